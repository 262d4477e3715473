"""Reading and writing the plain-text formats used by the command line."""

from __future__ import annotations

import os

import numpy as np

from .multidegree import MonomialBasis, parse_basis_spec

__all__ = ["read_points", "write_points", "load_basis"]

_SPEC_PREFIXES = ("triangular:", "degree:", "box:")


def read_points(path: str) -> np.ndarray:
    """Load a headerless CSV of floats, one point per row."""
    try:
        pts = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except OSError as exc:
        raise OSError(f"cannot read dataset {path!r}: {exc}") from exc
    except ValueError as exc:
        raise ValueError(f"malformed dataset {path!r}: {exc}") from exc
    if pts.size == 0:
        raise ValueError(f"dataset {path!r} is empty")
    return pts


def write_points(path: str, points) -> None:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-d array")
    lines = [",".join(repr(float(x)) for x in row) for row in pts]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_basis(spec: str) -> MonomialBasis:
    """Resolve a basis argument: compact spec string or path to a JSON file."""
    if spec.startswith(_SPEC_PREFIXES):
        return parse_basis_spec(spec)
    if os.path.exists(spec):
        with open(spec) as fh:
            return MonomialBasis.from_json(fh.read())
    raise ValueError(
        f"basis {spec!r} is neither a spec (triangular:q:l, degree:q:l, box:g1,...,gq) "
        f"nor an existing JSON file"
    )

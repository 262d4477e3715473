"""Shared helpers: independent oracles and frozen generic datasets."""

import numpy as np

from hyperfit import MonomialBasis


def hermite_direct(sigma: float, degrees: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Evaluate the noise-cancelling polynomials by their three-term recursion.

    Returns an array of shape ``(len(degrees_axis),) + values.shape`` where row
    ``k`` holds h_k at every entry of ``values``:
    h_0 = 1, h_1 = z, h_k = z h_{k-1} - (k-1) sigma^2 h_{k-2}.
    """
    kmax = int(np.max(degrees)) if np.size(degrees) else 0
    out = np.empty((kmax + 1,) + values.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = values
    for k in range(2, kmax + 1):
        out[k] = values * out[k - 1] - (k - 1) * sigma**2 * out[k - 2]
    return out


def psi_direct(basis: MonomialBasis, points: np.ndarray, sigma: float, s: int | None = None) -> np.ndarray:
    """Corrected Gram matrix straight from the definition, one entry at a time.

    Entry (k, l) sums, over the points, the product over coordinates of
    h_{alpha_j}(d_j) for noisy coordinates j < s and plain powers for the
    rest.  Independent of the shift construction under test.
    """
    points = np.asarray(points, dtype=float)
    q = basis.q
    if s is None:
        s = q
    cols = basis.columns
    m = len(cols)
    maxdeg = [max(2 * a[j] for a in cols) for j in range(q)]
    tables = []
    for j in range(q):
        if j < s:
            tables.append(hermite_direct(sigma, np.arange(maxdeg[j] + 1), points[:, j]))
        else:
            powers = np.empty((maxdeg[j] + 1, points.shape[0]))
            powers[0] = 1.0
            for k in range(1, maxdeg[j] + 1):
                powers[k] = powers[k - 1] * points[:, j]
            tables.append(powers)
    cache: dict[tuple, float] = {}
    out = np.empty((m, m))
    for k in range(m):
        for l in range(m):
            gamma = tuple(cols[k][j] + cols[l][j] for j in range(q))
            if gamma not in cache:
                prod = np.ones(points.shape[0])
                for j in range(q):
                    prod = prod * tables[j][gamma[j]]
                cache[gamma] = float(np.sum(prod))
            out[k, l] = cache[gamma]
    return out


# Generic asymmetric 2-d dataset, frozen so the eigenvalue gaps stay healthy.
# Drawn once from uniform(-1, 1) and kept at full precision.
WITNESS_POINTS = np.array([
    [0.10175609484332182, -0.5619749454579812],
    [0.08375968586736526, -0.5108860383335836],
    [-0.8333459655789179, 0.512724183486905],
    [-0.47100490299777165, -0.37271912591602274],
    [0.9766857162336782, -0.19888433680962936],
    [-0.11737580834663786, 0.8411974598755823],
    [0.5801327565610277, 0.7189641753133684],
    [-0.06328657213439426, -0.574992852543946],
    [-0.8687223669981639, -0.8403719618477092],
])


def conic_points(n: int = 10) -> np.ndarray:
    """Points on the ellipse ((x - 0.3) / 2)^2 + (y + 0.5)^2 = 1."""
    ang = np.linspace(0.2, 2 * np.pi, n + 1)[:-1]
    return np.column_stack([2 * np.cos(ang) + 0.3, np.sin(ang) - 0.5])


# Coefficients of the ellipse above on the canonical triangular(2, 2) order
# 1, x, y, x^2, xy, y^2.
CONIC_THETA = np.array([-0.7275, -0.15, 1.0, 0.25, 0.0, 1.0])

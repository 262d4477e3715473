from .app import (
    create_app,
    handle_fit,
    handle_invariance,
    handle_moments,
    handle_psi,
    handle_sweep_n,
    handle_sweep_sigma,
)

__all__ = [
    "create_app",
    "handle_fit",
    "handle_invariance",
    "handle_moments",
    "handle_psi",
    "handle_sweep_n",
    "handle_sweep_sigma",
]

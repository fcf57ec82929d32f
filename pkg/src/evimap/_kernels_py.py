"""Pure-numpy fallback for the stress-majorization kernels.

Same contract as the compiled evimap._speedups module; used when the
extension is unavailable or explicitly disabled.
"""

from __future__ import annotations

import numpy as np


def layout_distances(x: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances between layout rows."""
    diff = x[:, None, :] - x[None, :, :]
    out = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(out, 0.0)
    return out


def squared_residual(d: np.ndarray, delta: np.ndarray) -> float:
    """Sum over unordered pairs of (d_ij - delta_ij)^2."""
    r = d - delta
    return float(np.sum(np.triu(r * r, k=1)))


def guttman_step(d: np.ndarray, x: np.ndarray) -> np.ndarray:
    """One Guttman transform update of the layout (unit weights).

    Coincident pairs (delta == 0) contribute nothing, the standard
    majorization convention for the undefined ratio.
    """
    n = x.shape[0]
    delta = layout_distances(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(delta > 0.0, d / np.where(delta > 0.0, delta, 1.0), 0.0)
    np.fill_diagonal(ratio, 0.0)
    b = -ratio
    np.fill_diagonal(b, ratio.sum(axis=1))
    return b @ x / n

"""Classical entropies and divergences in bits, plus their marginal liftings.

Distributions are plain 1-D float arrays; :func:`as_distribution` validates
them.  Conventions: ``0 log 0 = 0``, logs are base 2, and an atom counts
towards the support only when its weight exceeds ``SUPPORT_TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import comb

from ._lattice import compositions
from .tensor_core import MultipartiteState, marginal_spectrum

NORM_TOL = 1e-12
SUPPORT_TOL = 1e-15
MAX_GRID_POINTS = 5_000_000


def as_distribution(weights, normalized: bool = True, tol: float = NORM_TOL) -> np.ndarray:
    """Validate a weight vector.

    With ``normalized=True`` the weights must sum to 1 within ``tol``; otherwise
    a subnormalized vector (sum at most ``1 + tol``) is accepted.
    """
    p = np.asarray(weights, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValueError("empty distribution")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("distribution weights must be finite and nonnegative")
    total = float(p.sum())
    if normalized and abs(total - 1.0) > tol:
        raise ValueError(f"distribution sums to {total!r}, not 1")
    if not normalized and total > 1.0 + tol:
        raise ValueError(f"subnormalized distribution sums to {total!r} > 1")
    return p


def support(p: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.asarray(p) > SUPPORT_TOL)


def _shannon(p: np.ndarray) -> float:
    q = p[p > 0]
    return float(-(q * np.log2(q)).sum())


def shannon(p) -> float:
    """Shannon entropy ``-sum p log2 p``."""
    return max(0.0, _shannon(as_distribution(p)))


def _renyi(p: np.ndarray, alpha: float) -> float:
    if alpha == 1:
        return _shannon(p)
    if alpha == 0:
        return math.log2(max(1, support(p).size))
    q = p[p > SUPPORT_TOL]
    if math.isinf(alpha):
        return -math.log2(q.max())
    beta = alpha - 1.0
    if abs(beta) < 0.5:
        # expm1/log1p on the normalized weights; cancellation-free as alpha -> 1
        w = q / q.sum()
        s = float((w * np.expm1(beta * np.log(w))).sum())
        return -math.log1p(s) / (beta * math.log(2))
    logs = alpha * np.log(q)
    top = logs.max()
    return float((top + math.log(np.exp(logs - top).sum())) / ((1.0 - alpha) * math.log(2)))


def renyi(p, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in ``[0, inf]``.

    ``alpha = 0`` gives log2 of the support size, ``alpha = 1`` the Shannon
    entropy and ``alpha = inf`` the min-entropy.
    """
    if alpha < 0 or math.isnan(alpha):
        raise ValueError(f"Renyi order must be >= 0, got {alpha}")
    return max(0.0, _renyi(as_distribution(p), float(alpha)))


def kl(p, q) -> float:
    """Relative entropy ``D(p || q)``; ``inf`` unless supp p is inside supp q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return max(0.0, float((p[mask] * np.log2(p[mask] / q[mask])).sum()))


def tv(p, q) -> float:
    """Total variation distance ``0.5 * sum |p - q|``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())


def binary_h(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy needs p in [0, 1], got {p}")
    return _shannon(np.array([p, 1.0 - p]))


def binary_d(p: float, q: float) -> float:
    return kl([p, 1.0 - p], [q, 1.0 - q])


@dataclass(frozen=True)
class VariationalCheck:
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    maximizer: np.ndarray


def variational_tolerance(p: np.ndarray, alpha: float, grid_resolution: float) -> float:
    """Worst-case loss of the grid maximum relative to the true maximum.

    The objective is ``(1 + c) H(Q) + c sum Q log P`` with ``c = alpha/(1-alpha)``.
    Some grid point lies within total variation ``t = (m-1) h`` of the
    maximizer, so continuity of the entropy (``t log(m-1) + h(t)``) and the
    linear term (``2 t max|log P|``) bound the loss.
    """
    ps = p[p > SUPPORT_TOL]
    m = ps.size
    if m == 1:
        return 0.0
    c = alpha / (1.0 - alpha)
    t = min(0.5, (m - 1) * grid_resolution)
    ent = t * math.log2(m - 1) + binary_h(t)
    return (1 + c) * ent + 2 * c * t * float(np.abs(np.log2(ps)).max())


def variational_renyi_check(p, alpha: float, grid_resolution: float = 1e-3) -> VariationalCheck:
    """Compare ``H_alpha(P)`` with ``max_Q [H(Q) - alpha/(1-alpha) D(Q||P)]`` over a grid.

    ``Q`` ranges over the lattice of step ``grid_resolution`` on the simplex
    of supp P (any Q outside it has infinite divergence).
    """
    p = as_distribution(p)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"variational form needs alpha in (0, 1), got {alpha}")
    supp = support(p)
    if supp.size > 4:
        raise ValueError(f"support of size {supp.size} too large for the grid search (max 4)")
    ps = p[supp] / p[supp].sum()
    m = ps.size
    steps = int(round(1.0 / grid_resolution))
    if steps < 1:
        raise ValueError("grid_resolution must be in (0, 1]")
    if comb(steps + m - 1, m - 1, exact=True) > MAX_GRID_POINTS:
        raise ValueError(f"grid of step {grid_resolution} on {m} atoms exceeds {MAX_GRID_POINTS} points")

    lhs = _renyi(ps, alpha)
    c = alpha / (1.0 - alpha)
    grid = compositions(steps, m) / steps
    with np.errstate(divide="ignore", invalid="ignore"):
        qlogq = np.where(grid > 0, grid * np.log2(grid), 0.0)
    h_q = -qlogq.sum(axis=1)
    d_q = qlogq.sum(axis=1) - grid @ np.log2(ps)
    objective = h_q - c * d_q
    best = int(np.argmax(objective))
    rhs = float(objective[best])
    q_full = np.zeros_like(p)
    q_full[supp] = grid[best]
    return VariationalCheck(
        lhs=lhs,
        rhs=rhs,
        gap=lhs - rhs,
        tolerance=variational_tolerance(ps, alpha, 1.0 / steps),
        maximizer=q_full,
    )


def spectrum_entropy(spectrum, alpha: float) -> float:
    """Renyi entropy of a nonnegative spectrum after normalizing it to sum 1."""
    s = np.asarray(spectrum, dtype=float)
    s = np.clip(s, 0.0, None)
    total = s.sum()
    if total <= 0:
        raise ValueError("spectrum has zero mass")
    return max(0.0, _renyi(s / total, float(alpha)))


def marginal_entropy(psi: MultipartiteState, b: Iterable[int], alpha: float = 1.0) -> float:
    """Renyi entropy of the reduced state of unit ``psi`` on the parties ``b``."""
    if alpha < 0:
        raise ValueError(f"Renyi order must be >= 0, got {alpha}")
    if not psi.is_unit(1e-10):
        raise ValueError("marginal_entropy needs a unit vector")
    return spectrum_entropy(marginal_spectrum(psi, b), alpha)

"""Smoothing of entanglement measures and its regularization over tensor powers.

The smoothed measure is ``E^eps(psi) = inf E(phi)`` over unit ``phi`` with
``|<phi|psi>|^2 >= 1 - eps``.  The per-copy limit of ``E^eps(psi^{(x)n}) / n``
is estimated from above in two ways:

* spectral mode -- the spectrum of ``rho_j^{(x)n}`` is handled through its
  type classes, and projecting every party onto its most likely eigenvectors
  gives a feasible vector with certified per-cut ranks;
* explicit mode -- the vector ``psi^{(x)n}`` is built and the infimum is
  searched directly by projected gradient descent on the unit sphere
  intersected with the fidelity cap.

All returned values are achieved by feasible vectors, so they are upper
bounds on the true infimum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import comb

from ._lattice import compositions
from .entropy import SUPPORT_TOL, as_distribution, kl
from .measures import MeasureSpec, evaluate, shannon_limit, value_and_gradient
from .tensor_core import (
    MAX_EXPLICIT_DIM,
    MultipartiteState,
    apply_local,
    fidelity_sq,
    marginal_spectrum,
    schmidt,
    schmidt_rank,
    tensor_power,
)

log = logging.getLogger(__name__)

MAX_ATOMS = 6
MAX_COPIES = 200
MAX_TYPE_ENTRIES = 2_000_000
MAX_OPT_DIM = 2**10
# absorbs rounding in accumulated masses when comparing against a budget
MASS_SLACK = 1e-12


# ---------------------------------------------------------------------------
# classical engine
# ---------------------------------------------------------------------------


def _budget_ok(dropped: float, eps: float) -> bool:
    return dropped <= eps + (MASS_SLACK if eps > 0 else 0.0)


def smooth_support(p, eps: float) -> int:
    """Smallest support reachable by moving at most ``eps`` probability mass.

    Atoms are removed from the lightest upwards while the removed mass stays
    within the budget; at least one atom always survives.
    """
    p = as_distribution(p)
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    atoms = np.sort(p[p > SUPPORT_TOL])
    removed = 0
    dropped = 0.0
    for w in atoms[:-1]:
        if not _budget_ok(dropped + w, eps):
            break
        dropped += w
        removed += 1
    return atoms.size - removed


@dataclass(frozen=True, eq=False)
class TypeClassSpectrum:
    """Spectrum of ``P^{(x)n}`` grouped into type classes.

    ``base`` holds the distinct atom values of ``P`` and ``degeneracy`` how
    often each occurs.  Row ``i`` of ``types`` is a type ``t`` over the
    distinct values (``sum t = n``); every string of that type has
    probability ``2**log2_prob[i]`` and there are ``multiplicity[i]`` of them,
    namely ``multinomial(n; t) * prod g**t``.
    """

    base: np.ndarray
    n: int
    types: np.ndarray
    log2_prob: np.ndarray
    multiplicity: tuple[int, ...]
    degeneracy: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.multiplicity)

    @property
    def atoms(self) -> int:
        return sum(self.degeneracy) if self.degeneracy else self.base.size

    @property
    def prob(self) -> np.ndarray:
        return np.exp2(self.log2_prob)

    @property
    def log2_multiplicity(self) -> np.ndarray:
        return np.array([math.log2(m) for m in self.multiplicity])

    @property
    def class_mass(self) -> np.ndarray:
        return np.exp2(self.log2_multiplicity + self.log2_prob)

    def total_mass(self) -> float:
        return math.fsum(self.class_mass)

    def total_count(self) -> int:
        return sum(self.multiplicity)

    def check(self, tol: float = 1e-9) -> None:
        if abs(self.total_mass() - 1.0) > tol:
            raise AssertionError(f"type-class masses add up to {self.total_mass()!r}")
        if self.total_count() != self.atoms**self.n:
            raise AssertionError("multiplicities do not add up to m**n")


def _group_atoms(atoms: np.ndarray, rtol: float = 1e-12) -> tuple[np.ndarray, tuple[int, ...]]:
    """Distinct values (descending) and how often each occurs, up to ``rtol``."""
    srt = np.sort(atoms)[::-1]
    values: list[float] = []
    counts: list[int] = []
    start = 0
    for i in range(1, srt.size + 1):
        if i == srt.size or srt[i] < srt[start] * (1.0 - rtol):
            values.append(float(srt[start:i].mean()))
            counts.append(i - start)
            start = i
    return np.array(values), tuple(counts)


def product_type_spectrum(p, n: int) -> TypeClassSpectrum:
    """Type classes of ``P^{(x)n}`` over the support of ``P``.

    Atoms of equal weight (relative tolerance 1e-12) share one coordinate of
    the type, so only the number of distinct weights counts against
    ``MAX_ATOMS``.
    """
    p = as_distribution(p)
    atoms = p[p > SUPPORT_TOL]
    atoms = atoms / atoms.sum()
    values, degeneracy = _group_atoms(atoms)
    m = values.size
    if m > MAX_ATOMS:
        raise ValueError(f"{m} distinct atom weights exceed the limit of {MAX_ATOMS}")
    if not 1 <= n <= MAX_COPIES:
        raise ValueError(f"n must lie in [1, {MAX_COPIES}], got {n}")
    count = comb(n + m - 1, m - 1, exact=True)
    if count > MAX_TYPE_ENTRIES:
        raise ValueError(f"{count} type classes exceed the limit of {MAX_TYPE_ENTRIES}")
    types = compositions(n, m)
    log2_prob = types @ np.log2(values)
    fact = [math.factorial(i) for i in range(n + 1)]
    powers = [[g**e for e in range(n + 1)] for g in degeneracy]
    mult = tuple(
        fact[n] // math.prod(fact[int(c)] for c in row) * math.prod(powers[i][int(c)] for i, c in enumerate(row))
        for row in types
    )
    return TypeClassSpectrum(values, n, types, log2_prob, mult, degeneracy)


@dataclass(frozen=True)
class Truncation:
    """Result of keeping the most probable strings under a mass budget."""

    count: int
    kept_mass: float
    tail: float


def greedy_truncation(spectrum: TypeClassSpectrum, eps: float) -> Truncation:
    """Fewest strings whose discarded mass is at most ``eps``.

    Classes are taken in order of decreasing per-string probability (ties in
    canonical type order); the last class may be used partially, keeping the
    fewest strings that meet the budget.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    total = spectrum.total_mass()
    if eps == 0.0:
        return Truncation(spectrum.total_count(), total, 0.0)
    target = total - eps - MASS_SLACK
    order = np.argsort(-spectrum.log2_prob, kind="stable")
    masses = spectrum.class_mass
    kept = 0.0
    count = 0
    for i in order:
        mult = spectrum.multiplicity[i]
        prob = 2.0 ** spectrum.log2_prob[i]
        if kept + masses[i] >= target:
            need = min(mult, max(1, math.ceil((target - kept) / prob)))
            if need > 1 and kept + (need - 1) * prob >= target:
                need -= 1
            count += need
            kept += need * prob
            break
        kept += masses[i]
        count += mult
    return Truncation(count, kept, max(0.0, total - kept))


def smooth_h0_count(p, eps: float, n: int) -> int:
    """Support size of the best ``eps``-smoothing of ``P^{(x)n}``."""
    return greedy_truncation(product_type_spectrum(p, n), eps).count


def regularized_smooth_h0(p, eps: float, n: int) -> float:
    """``(1/n) H_0^eps(P^{(x)n})`` in bits."""
    return math.log2(smooth_h0_count(p, eps, n)) / n


def binomial_window_mass(n: int, p: float, delta: float) -> float:
    """Exact ``sum_{m = floor(n(p-d))}^{floor(n(p+d))} C(n,m) p^m (1-p)^(n-m)``.

    Evaluated in rational arithmetic on the binary value of ``p``.
    """
    pf = Fraction(p)
    lo = max(0, math.floor(n * (p - delta)))
    hi = min(n, math.floor(n * (p + delta)))
    total = sum(math.comb(n, m) * pf**m * (1 - pf) ** (n - m) for m in range(lo, hi + 1))
    return float(total)


def type_class_bound_slack(p, n: int) -> float:
    """Worst relative slack of ``|T_t| P^n(t) >= (n+1)^{-|X|} 2^{-n D(t/n || P)}``.

    Returns the minimum over all types ``t`` of ``lhs / rhs - 1``.
    """
    p = as_distribution(p)
    if np.any(p <= 0):
        raise ValueError("type-class bound needs a fully supported distribution")
    size = p.size
    worst = math.inf
    logp = np.log2(p)
    fact = [math.factorial(i) for i in range(n + 1)]
    for t in compositions(n, size):
        mult = fact[n] // math.prod(fact[int(c)] for c in t)
        log_lhs = math.log2(mult) + float(t @ logp)
        log_rhs = -size * math.log2(n + 1) - n * kl(t / n, p)
        worst = min(worst, math.expm1((log_lhs - log_rhs) * math.log(2)))
    return worst


# ---------------------------------------------------------------------------
# typical projector
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SmoothingResult:
    """A feasible point of the smoothing problem and what it certifies.

    ``value`` is the measure (or its rank upper bound) at the achiever, hence
    an upper bound on ``E^eps`` of the ``n``-copy state.  ``certificate`` is a
    guaranteed lower bound on the squared overlap of the achiever with the
    target; ``fidelity`` is the measured one when the achiever is explicit.
    """

    value: float
    epsilon: float
    n: int
    unsmoothed_value: float
    certificate: float
    mode: str
    rank_bounds: tuple[int, ...] = ()
    tails: tuple[float, ...] = ()
    achiever: MultipartiteState | None = field(default=None, repr=False)
    fidelity: float | None = None
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        if self.value > self.unsmoothed_value + 1e-9:
            raise AssertionError(f"smoothed value {self.value} exceeds unsmoothed {self.unsmoothed_value}")
        if not 1.0 - self.epsilon - 1e-9 <= self.certificate <= 1.0 + 1e-12:
            raise AssertionError(f"certificate {self.certificate} outside [1 - eps, 1]")


def _cut_spectrum(psi: MultipartiteState, j: int) -> np.ndarray:
    lam = marginal_spectrum(psi, (j,))
    lam = lam / lam.sum()
    return lam[lam > SUPPORT_TOL]


def _party_projector(psi: MultipartiteState, j: int, n: int, r: int) -> np.ndarray:
    """Projector onto the ``r`` most likely eigenvectors of ``rho_j^{(x)n}``.

    Eigenvectors are Kronecker products of single-copy eigenvectors, ordered
    by decreasing eigenvalue with ties broken lexicographically on the string.
    """
    sd = schmidt(psi, (j,))
    lam = sd.coefficients
    m = schmidt_rank(lam, SUPPORT_TOL)
    vecs = sd.left[:, :m]
    logl = np.log2(lam[:m] / lam.sum())
    strings = np.array(np.unravel_index(np.arange(m**n), (m,) * n)).T
    order = np.argsort(-logl[strings].sum(axis=1), kind="stable")[:r]
    basis = np.empty((vecs.shape[0] ** n, r), dtype=complex)
    for col, idx in enumerate(order):
        v = np.ones(1, dtype=complex)
        for s in strings[idx]:
            v = np.kron(v, vecs[:, s])
        basis[:, col] = v
    return basis @ basis.conj().T


def typical_projector(
    psi: MultipartiteState,
    n: int,
    eps: float,
    theta: Sequence[float] | None = None,
    explicit: bool | None = None,
) -> SmoothingResult:
    """Project ``psi^{(x)n}`` onto the typical eigenspaces of every party.

    Each party ``j`` keeps the fewest eigenvectors ``r'_j`` of its marginal
    whose discarded weight is at most ``eps / k``.  The union bound gives
    ``||P psi^{(x)n}||^2 >= 1 - sum_j tail_j >= 1 - eps``.  ``value`` is
    ``sum_j theta_j log2 r'_j`` (``theta`` uniform by default), which bounds
    every weighted single-cut Renyi measure of the achiever.

    ``explicit=None`` builds the achiever whenever ``dim**n <= 2**16``.
    """
    if not psi.is_unit(1e-10):
        raise ValueError("typical_projector needs a unit vector")
    if psi.k < 2:
        raise ValueError("typical_projector needs k >= 2 parties")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    k = psi.k
    theta = np.full(k, 1.0 / k) if theta is None else as_distribution(theta)
    if theta.size != k:
        raise ValueError("theta needs one weight per party")
    fits = psi.dim**n <= MAX_EXPLICIT_DIM
    if explicit and not fits:
        raise ValueError(f"explicit mode needs dim**n <= {MAX_EXPLICIT_DIM}, got {psi.dim}**{n}")
    explicit = fits if explicit is None else explicit

    ranks, tails, full = [], [], []
    for j in range(k):
        lam = _cut_spectrum(psi, j)
        cut = greedy_truncation(product_type_spectrum(lam, n), eps / k)
        ranks.append(cut.count)
        tails.append(cut.tail)
        full.append(n * math.log2(lam.size))
    value = float(sum(w * math.log2(r) for w, r in zip(theta, ranks)))
    unsmoothed = float(np.dot(theta, full))
    certificate = 1.0 - math.fsum(tails)

    achiever = None
    fid = None
    if explicit:
        psi_n = tensor_power(psi, n)
        vec = psi_n
        for j in range(k):
            vec = apply_local(_party_projector(psi, j, n, ranks[j]), j, vec)
        achiever = vec.normalized()
        fid = fidelity_sq(achiever, psi_n)
    return SmoothingResult(
        value=value,
        epsilon=eps,
        n=n,
        unsmoothed_value=unsmoothed,
        certificate=min(1.0, certificate),
        mode="explicit" if explicit else "spectral",
        rank_bounds=tuple(ranks),
        tails=tuple(tails),
        achiever=achiever,
        fidelity=fid,
    )


# ---------------------------------------------------------------------------
# direct search for the infimum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptConfig:
    restarts: int = 32
    max_iter: int = 5000
    rel_tol: float = 1e-8
    step: float = 0.05
    seed: int = 0


def project_to_cap(phi: np.ndarray, psi: np.ndarray, eps: float) -> np.ndarray:
    """Nearest unit vector (up to phase) with ``|<psi|phi>|^2 >= 1 - eps``.

    ``phi`` is rephased so the overlap is real and nonnegative, then moved
    along the great circle towards ``psi`` if it lies outside the cap.
    """
    phi = phi / np.linalg.norm(phi)
    ov = np.vdot(psi, phi)
    if abs(ov) > 0:
        phi = phi * (abs(ov) / ov)
    c = abs(ov)
    if c * c >= 1.0 - eps:
        return phi
    perp = phi - c * psi
    pn = np.linalg.norm(perp)
    if pn == 0.0:
        return psi.copy()
    cos_t = math.sqrt(1.0 - eps)
    return cos_t * psi + math.sqrt(eps) * perp / pn


def _truncate_party(psi: MultipartiteState, j: int, eps: float) -> MultipartiteState:
    """Project party ``j`` alone onto its top eigenvectors, spending all of ``eps``."""
    sd = schmidt(psi, (j,))
    r = smooth_support(sd.coefficients / sd.coefficients.sum(), eps)
    basis = sd.left[:, :r]
    return apply_local(basis @ basis.conj().T, j, psi).normalized()


def _descend(spec: MeasureSpec, dims, target: np.ndarray, start: np.ndarray, eps: float, cfg: OptConfig):
    """Projected gradient descent inside the cap; returns (vector, value, converged, iterations)."""
    phi = project_to_cap(start, target, eps)
    val, grad = value_and_gradient(spec, MultipartiteState(dims, phi))
    step = cfg.step
    it = 0
    while it < cfg.max_iter:
        it += 1
        tangent = grad - np.vdot(phi, grad).real * phi
        if np.linalg.norm(tangent) < 1e-14:
            return phi, val, True, it
        trial = project_to_cap(phi - step * tangent, target, eps)
        tval, tgrad = value_and_gradient(spec, MultipartiteState(dims, trial))
        if tval < val:
            improvement = val - tval
            phi, val, grad = trial, tval, tgrad
            step *= 1.25
            if improvement <= cfg.rel_tol * max(abs(val), 1e-12):
                return phi, val, True, it
        else:
            step *= 0.5
            if step < 1e-14:
                return phi, val, True, it
    return phi, val, False, it


def smooth_infimum_estimate(
    measure: MeasureSpec,
    psi: MultipartiteState,
    eps: float,
    optimizer: OptConfig | None = None,
    warm_start: Sequence[MultipartiteState] = (),
) -> SmoothingResult:
    """Best feasible ``phi`` found for ``inf E(phi)`` over the fidelity cap.

    Candidates are ``psi`` itself, the typical-projector achiever, each
    single-party truncation spending the whole budget, any ``warm_start``
    vectors that are feasible, and ``optimizer.restarts`` random points of the
    cap.  Each is refined by projected gradient descent with step halving.
    The smallest value wins; ties go to the earliest candidate.
    """
    cfg = optimizer or OptConfig()
    if not psi.is_unit(1e-10):
        raise ValueError("smooth_infimum_estimate needs a unit vector")
    if psi.dim > MAX_OPT_DIM:
        raise ValueError(f"total dimension {psi.dim} exceeds the optimizer cap {MAX_OPT_DIM}")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    base_value = evaluate(measure, psi)
    if eps == 0.0:
        return SmoothingResult(base_value, 0.0, 1, base_value, 1.0, "explicit", achiever=psi, fidelity=1.0)

    target = psi.amps
    dims = psi.dims
    candidates = [psi]
    if psi.k >= 2:
        candidates.append(typical_projector(psi, 1, eps, explicit=True).achiever)
        candidates.extend(_truncate_party(psi, j, eps) for j in range(psi.k))
    for w in warm_start:
        if w.dims != dims:
            raise ValueError("warm start has the wrong dimensions")
        if fidelity_sq(w.normalized(), psi) >= 1.0 - eps - 1e-12:
            candidates.append(w.normalized())
    rng = np.random.default_rng(cfg.seed)
    starts = [c.amps for c in candidates]
    for _ in range(cfg.restarts):
        z = rng.standard_normal(psi.dim) + 1j * rng.standard_normal(psi.dim)
        z -= np.vdot(target, z) * target
        z /= np.linalg.norm(z)
        r = eps * rng.uniform()
        starts.append(math.sqrt(1.0 - r) * target + math.sqrt(r) * z)

    smooth = any(t.alpha > 0 for t in measure.terms)
    best = None
    total_iter = 0
    all_converged = True
    for idx, s in enumerate(starts):
        if smooth:
            vec, _, conv, it = _descend(measure, dims, target, s, eps, cfg)
            total_iter += it
            all_converged &= conv
        else:
            vec = project_to_cap(s, target, eps)
        state = MultipartiteState(dims, vec)
        fid = fidelity_sq(state, psi)
        if fid < 1.0 - eps - 1e-9:
            continue
        val = evaluate(measure, state)
        if best is None or val < best[0]:
            best = (val, idx, state, fid)
    if not all_converged:
        log.info("smoothing search hit max_iter on some restarts; returning best feasible iterate")
    val, _, state, fid = best
    return SmoothingResult(
        value=min(val, base_value),
        epsilon=eps,
        n=1,
        unsmoothed_value=base_value,
        certificate=1.0 - eps,
        mode="explicit",
        achiever=state if val <= base_value else psi,
        fidelity=fid if val <= base_value else 1.0,
        converged=all_converged,
        iterations=total_iter,
    )


def smooth_infimum_curve(
    measure: MeasureSpec,
    psi: MultipartiteState,
    epsilons: Sequence[float],
    optimizer: OptConfig | None = None,
) -> list[SmoothingResult]:
    """Estimates for several budgets, nonincreasing in ``eps`` by construction.

    Budgets are processed in increasing order and each achiever seeds the
    next search, since it remains feasible for every larger budget.
    """
    order = sorted(range(len(epsilons)), key=lambda i: epsilons[i])
    out: list[SmoothingResult | None] = [None] * len(epsilons)
    seeds: list[MultipartiteState] = []
    for i in order:
        res = smooth_infimum_estimate(measure, psi, epsilons[i], optimizer, warm_start=seeds)
        out[i] = res
        seeds = [res.achiever]
    return out  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# regularization table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhiRow:
    n: int
    epsilon: float
    value: float
    limit: float
    gap: float
    mode: str
    rank_bounds: tuple[int, ...]


def _spectral_upper(measure: MeasureSpec, psi: MultipartiteState, eps: float, n: int) -> tuple[float, tuple[int, ...]]:
    """Upper bound on ``E^eps(psi^{(x)n})`` from rank-truncated candidates.

    A candidate assigns every party a rank ``r_j`` (the full ``m_j**n`` when
    untruncated); on a cut ``b`` the achiever's rank is at most
    ``min(prod_{j in b} r_j, prod_{j not in b} r_j, rank_b**n)`` and every
    ``H_alpha`` with ``alpha <= 1`` is bounded by its log.
    """
    k = psi.k
    spectra = [_cut_spectrum(psi, j) for j in range(k)]
    log_full = [n * math.log2(s.size) for s in spectra]
    cut_log_rank = {}
    for t in measure.terms:
        lam = marginal_spectrum(psi, t.subset)
        cut_log_rank[t.subset] = n * math.log2(schmidt_rank(lam, SUPPORT_TOL))

    def total(log_ranks):
        out = 0.0
        for t in measure.terms:
            inside = sum(log_ranks[j] for j in t.subset)
            outside = sum(log_ranks[j] for j in range(k) if j not in t.subset)
            out += t.weight * min(inside, outside, cut_log_rank[t.subset])
        return out

    candidates = []
    split = [greedy_truncation(product_type_spectrum(s, n), eps / k).count for s in spectra]
    candidates.append((total([math.log2(r) for r in split]), tuple(split)))
    for j in range(k):
        r = greedy_truncation(product_type_spectrum(spectra[j], n), eps).count
        lr = list(log_full)
        lr[j] = math.log2(r)
        ranks = tuple(r if i == j else spectra[i].size ** n for i in range(k))
        candidates.append((total(lr), ranks))
    full_ranks = tuple(s.size**n for s in spectra)
    candidates.append((n * evaluate(measure, psi), full_ranks))
    return min(candidates, key=lambda c: c[0])


def phi_estimate(
    measure: MeasureSpec,
    psi: MultipartiteState,
    eps: float,
    n_list: Sequence[int],
    optimizer: OptConfig | None = None,
    mode: str = "auto",
) -> list[PhiRow]:
    """Per-copy upper estimates of ``E^eps(psi^{(x)n})`` for each ``n``.

    ``limit`` is the Shannon-weighted value of the same cuts, which is the
    regularized limit for every measure of these families; ``gap`` is
    ``value - limit``.  In ``auto`` mode the explicit search is added when
    an optimizer config is given and ``dim**n`` fits the optimizer cap.
    """
    if mode not in ("auto", "spectral", "explicit"):
        raise ValueError(f"unknown mode {mode!r}")
    if not psi.is_unit(1e-10):
        raise ValueError("phi_estimate needs a unit vector")
    limit = shannon_limit(measure, psi)
    rows = []
    for n in n_list:
        value, ranks = _spectral_upper(measure, psi, eps, n)
        used = "spectral"
        small = psi.dim**n <= MAX_OPT_DIM
        if mode == "explicit" and not small:
            raise ValueError(f"explicit mode needs dim**n <= {MAX_OPT_DIM}")
        if mode == "explicit" or (mode == "auto" and optimizer is not None and small):
            res = smooth_infimum_estimate(measure, tensor_power(psi, n), eps, optimizer)
            if res.value < value:
                value = res.value
                used = "explicit"
        per_copy = value / n
        rows.append(PhiRow(n, eps, per_copy, limit, per_copy - limit, used, ranks))
    return rows

"""Weighted marginal-entropy entanglement measures and their axiom checks.

Two families are supported:

* ``weighted_marginal_renyi`` -- ``sum_j theta_j H_{alpha_j}(Tr_j psi)`` over
  single-party cuts with ``alpha_j`` in ``[0, 1]``.  With every alpha equal to
  1 this is ``E^theta``; with every alpha equal to 0 it is the rank-based upper
  sandwich bound.
* ``weighted_marginal_shannon_general`` -- ``H^theta``, the same sum with
  Shannon entropies over arbitrary cuts ``b``.  A cut and its complement give
  the same entropy on pure states, so each cut is stored as the side that
  contains party 0.

Every measure is evaluated on ``psi / ||psi||``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .entropy import binary_h, spectrum_entropy
from .tensor_core import (
    MultipartiteState,
    check_bipartition,
    complement,
    direct_sum,
    direct_sum_many,
    marginal_spectrum,
    tensor_product,
)

RENYI = "weighted_marginal_renyi"
GENERAL = "weighted_marginal_shannon_general"
KINDS = (RENYI, GENERAL)
THETA_TOL = 1e-12


@dataclass(frozen=True)
class Term:
    subset: tuple[int, ...]
    weight: float
    alpha: float = 1.0


@dataclass(frozen=True)
class MeasureSpec:
    kind: str
    terms: tuple[Term, ...]
    k: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}; expected one of {KINDS}")
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("measure needs at least one term")
        weights = np.array([t.weight for t in terms], dtype=float)
        if np.any(~np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("theta weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > THETA_TOL:
            raise ValueError(f"theta weights sum to {weights.sum()!r}, not 1")
        if self.k is not None and self.k < 2:
            raise ValueError("entanglement measures need k >= 2 parties")
        for t in terms:
            if not t.subset or min(t.subset) < 0:
                raise ValueError(f"invalid cut {t.subset}")
            if not 0.0 <= t.alpha <= 1.0:
                raise ValueError(f"alpha must lie in [0, 1], got {t.alpha}")
            if self.kind == RENYI and len(t.subset) != 1:
                raise ValueError(f"{RENYI} terms act on single parties, got cut {t.subset}")
            if self.kind == GENERAL and t.alpha != 1.0:
                raise ValueError(f"{GENERAL} terms are Shannon (alpha = 1)")
            if self.k is not None:
                check_bipartition(t.subset, self.k)
        if self.kind == GENERAL:
            terms = _canonical_terms(terms, self.k)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def e_theta(cls, theta: Sequence[float], alpha: float | Sequence[float] = 1.0) -> "MeasureSpec":
        """``sum_j theta_j H_{alpha_j}(Tr_j psi)`` over the k single-party cuts."""
        theta = list(theta)
        alphas = [alpha] * len(theta) if np.isscalar(alpha) else list(alpha)
        if len(alphas) != len(theta):
            raise ValueError("need one alpha per party")
        terms = tuple(Term((j,), float(w), float(a)) for j, (w, a) in enumerate(zip(theta, alphas)))
        return cls(RENYI, terms, k=len(theta))

    @classmethod
    def h_theta(cls, weights: Mapping[Iterable[int], float], k: int) -> "MeasureSpec":
        """``sum_b theta_b H(Tr_b psi)`` over arbitrary cuts ``b``."""
        terms = tuple(Term(tuple(b), float(w), 1.0) for b, w in weights.items())
        return cls(GENERAL, terms, k=k)

    @property
    def is_shannon(self) -> bool:
        return all(t.alpha == 1.0 for t in self.terms)

    @property
    def parties(self) -> int:
        """Smallest party count the measure can act on."""
        if self.k is not None:
            return self.k
        return max(max(t.subset) for t in self.terms) + 1

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "theta": [{"subset": list(t.subset), "weight": t.weight, "alpha": t.alpha} for t in self.terms],
        }
        if self.k is not None:
            out["k"] = self.k
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: Mapping) -> "MeasureSpec":
        try:
            terms = tuple(
                Term(tuple(int(j) for j in t["subset"]), float(t["weight"]), float(t.get("alpha", 1.0)))
                for t in obj["theta"]
            )
            return cls(obj["kind"], terms, k=obj.get("k"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed measure: {exc!r}") from None

    @classmethod
    def from_json(cls, text: str) -> "MeasureSpec":
        return cls.from_dict(json.loads(text))


def _canonical_terms(terms: tuple[Term, ...], k: int | None) -> tuple[Term, ...]:
    merged: dict[tuple[int, ...], float] = {}
    for t in terms:
        b = tuple(sorted(t.subset))
        if 0 not in b:
            if k is None:
                raise ValueError(f"cut {b} lacks party 0; k is needed to take its complement")
            b = complement(b, k)
        merged[b] = merged.get(b, 0.0) + t.weight
    return tuple(Term(b, w, 1.0) for b, w in sorted(merged.items()))


def _check_parties(spec: MeasureSpec, psi: MultipartiteState) -> None:
    if spec.k is not None and spec.k != psi.k:
        raise ValueError(f"measure defined for {spec.k} parties, state has {psi.k}")
    if psi.k < 2 or spec.parties > psi.k:
        raise ValueError(f"measure needs at least {max(2, spec.parties)} parties, state has {psi.k}")


def evaluate(spec: MeasureSpec, psi: MultipartiteState) -> float:
    """Value of the measure on ``psi / ||psi||``."""
    nrm = psi.norm()
    if nrm == 0.0:
        raise ValueError("measure is undefined on the zero vector")
    _check_parties(spec, psi)
    unit = psi.scaled(1.0 / nrm)
    total = 0.0
    for t in spec.terms:
        if t.weight == 0.0:
            continue
        total += t.weight * spectrum_entropy(marginal_spectrum(unit, t.subset), t.alpha)
    return total


def _term_gradient(psi: MultipartiteState, t: Term) -> tuple[float, np.ndarray]:
    b = t.subset
    rest = complement(b, psi.k)
    order = b + rest
    tens = np.transpose(psi.tensor(), order)
    rows = math.prod(psi.dims[j] for j in b)
    mat = tens.reshape(rows, -1)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    lam = s**2
    value = spectrum_entropy(lam, t.alpha)
    keep = lam > 1e-30
    ln2 = math.log(2)
    g = np.zeros_like(lam)
    if t.alpha == 1.0:
        g[keep] = -(np.log2(lam[keep]) + 1.0 / ln2)
    elif t.alpha > 0.0:
        a = t.alpha
        norm = (lam[keep] ** a).sum()
        g[keep] = a * lam[keep] ** (a - 1.0) / ((1.0 - a) * ln2 * norm)
    # d/d(conj M) of f(M M^dagger) is U diag(g s) V^dagger
    grad_mat = (u * (g * s)) @ vh
    grad = np.transpose(grad_mat.reshape([psi.dims[j] for j in order]), np.argsort(order))
    return value, grad.reshape(-1)


def value_and_gradient(spec: MeasureSpec, psi: MultipartiteState) -> tuple[float, np.ndarray]:
    """Measure value at unit ``psi`` and its gradient with respect to ``conj(psi)``.

    Terms with ``alpha = 0`` are piecewise constant and contribute no gradient.
    """
    _check_parties(spec, psi)
    total = 0.0
    grad = np.zeros(psi.dim, dtype=complex)
    for t in spec.terms:
        if t.weight == 0.0:
            continue
        v, g = _term_gradient(psi, t)
        total += t.weight * v
        grad += t.weight * g
    return total, grad


def shannon_limit(spec: MeasureSpec, psi: MultipartiteState) -> float:
    """Same weights as the given measure but every entropy replaced by the Shannon one."""
    return evaluate(MeasureSpec(spec.kind, tuple(Term(t.subset, t.weight, 1.0) for t in spec.terms), spec.k), psi)


@dataclass(frozen=True)
class SandwichBounds:
    lower: float
    upper: float


def sandwich_bounds(psi: MultipartiteState, theta: Sequence[float]) -> SandwichBounds:
    """Shannon (lower) and log-rank (upper) bounds for the weighted single-cut family."""
    lower = evaluate(MeasureSpec.e_theta(theta, 1.0), psi)
    upper = evaluate(MeasureSpec.e_theta(theta, 0.0), psi)
    return SandwichBounds(lower, upper)


@dataclass(frozen=True)
class ContinuityBound:
    """``|E(phi) - E(psi)| <= a * log2(dim) + b`` at trace distance ``delta``."""

    k: int
    delta: float
    a: float
    b: float

    def bound(self, log_dim: float) -> float:
        return self.a * log_dim + self.b


def continuity_bound(k: int, delta: float) -> ContinuityBound:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    base = 1.0 + delta ** (2.0 / (k + 1))
    grow = base ** (k + 1)
    denom = 1.0 - delta**2
    a = (grow - 1.0 + delta**2) / denom
    b = grow / denom * binary_h(1.0 / base)
    return ContinuityBound(k, delta, a, b)


def check_direct_sum_identity(spec: MeasureSpec, psi: MultipartiteState, phi: MultipartiteState, p: float) -> float:
    """``|E(sqrt(p) phi (+) sqrt(1-p) psi) - p E(phi) - (1-p) E(psi) - h(p)|``."""
    if not spec.is_shannon:
        raise ValueError("the direct-sum identity holds for Shannon-type measures only")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    phi_u = phi.normalized()
    psi_u = psi.normalized()
    mixed = direct_sum(phi_u.scaled(math.sqrt(p)), psi_u.scaled(math.sqrt(1.0 - p)))
    lhs = evaluate(spec, mixed)
    rhs = p * evaluate(spec, phi_u) + (1.0 - p) * evaluate(spec, psi_u) + binary_h(p)
    return abs(lhs - rhs)


def check_log_boundedness(spec: MeasureSpec, summands: Sequence[MultipartiteState]) -> float:
    """Slack ``max_i E(psi_i/||psi_i||) + log2 l - E(psi_1 (+) ... (+) psi_l)``."""
    if not summands:
        raise ValueError("need at least one summand")
    mass = sum(s.norm_sq() for s in summands)
    if abs(mass - 1.0) > 1e-10:
        raise ValueError(f"squared norms of the summands add up to {mass!r}, not 1")
    total = evaluate(spec, direct_sum_many(summands))
    best = max(evaluate(spec, s) for s in summands)
    return best + math.log2(len(summands)) - total


def check_additivity(spec: MeasureSpec, psi: MultipartiteState, phi: MultipartiteState) -> float:
    """``|E(psi (x) phi) - E(psi) - E(phi)|``."""
    return abs(evaluate(spec, tensor_product(psi, phi)) - evaluate(spec, psi) - evaluate(spec, phi))

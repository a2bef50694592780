"""Remembering one-step LOCC channels acting on conditionally pure ensembles.

The classical register is carried as integer branch labels.  A one-step
channel on party ``i`` has Kraus operators ``K_y`` (one per output label
``y``) and a register map ``f``: branch ``x`` is acted on by every ``K_y``
with ``f[y] == x``, producing branch ``y``.  A protocol starts from the single
branch ``(1, label 0, psi)``.

JSON protocol format::

    [{"party": 0, "f": [0, 0], "kraus": [{"re": [[...]], "im": [[...]]}, ...]}, ...]
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entropy import tv
from .measures import MeasureSpec, evaluate
from .tensor_core import (
    MultipartiteState,
    apply_local,
    basis_state,
    clamped_eigvalsh,
    fidelity_sq,
    projector,
    trace_distance,
)

KRAUS_TOL = 1e-10
DROP_TOL = 1e-24


@dataclass(frozen=True, eq=False)
class Branch:
    weight: float
    label: int
    state: MultipartiteState


@dataclass(frozen=True, eq=False)
class ConditionallyPureState:
    """Ensemble ``sum_x P(x) |psi_x><psi_x| (x) |x><x|`` with unit ``psi_x``."""

    branches: tuple[Branch, ...]

    def __post_init__(self):
        branches = tuple(self.branches)
        labels = [b.label for b in branches]
        if len(set(labels)) != len(labels):
            raise ValueError("branch labels must be distinct")
        if any(b.weight < 0 for b in branches):
            raise ValueError("branch weights must be nonnegative")
        if sum(b.weight for b in branches) > 1.0 + 1e-12:
            raise ValueError("branch weights add up to more than 1")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def pure(cls, psi: MultipartiteState, label: int = 0) -> "ConditionallyPureState":
        return cls((Branch(1.0, label, psi.normalized()),))

    @classmethod
    def from_pairs(cls, weights: Sequence[float], states: Sequence[MultipartiteState]) -> "ConditionallyPureState":
        return cls(tuple(Branch(float(w), i, s.normalized()) for i, (w, s) in enumerate(zip(weights, states))))

    def __len__(self) -> int:
        return len(self.branches)

    def total_weight(self) -> float:
        return math.fsum(b.weight for b in self.branches)

    def weights(self) -> dict[int, float]:
        return {b.label: b.weight for b in self.branches}

    def by_label(self) -> dict[int, Branch]:
        return {b.label: b for b in self.branches}

    def density_matrix(self) -> np.ndarray:
        """State after discarding the register, ``sum_x P(x) |psi_x><psi_x|``."""
        if not self.branches:
            raise ValueError("empty ensemble")
        return sum(b.weight * projector(b.state) for b in self.branches)

    def coarse_grain(self, tol: float = 1e-12) -> "ConditionallyPureState":
        """Merge branches whose states agree up to a global phase."""
        merged: list[list] = []
        for b in self.branches:
            for slot in merged:
                if slot[1].dims == b.state.dims and fidelity_sq(slot[1], b.state) >= 1.0 - tol:
                    slot[0] += b.weight
                    break
            else:
                merged.append([b.weight, b.state, b.label])
        return ConditionallyPureState(tuple(Branch(w, lab, s) for w, s, lab in merged))


@dataclass(frozen=True, eq=False)
class OneStepChannel:
    party: int
    kraus: tuple[np.ndarray, ...]
    f: tuple[int, ...]

    def __post_init__(self):
        kraus = tuple(np.array(K, dtype=complex) for K in self.kraus)
        f = tuple(int(x) for x in self.f)
        if not kraus:
            raise ValueError("channel needs at least one Kraus operator")
        if len(f) != len(kraus):
            raise ValueError("register map needs one entry per Kraus operator")
        in_dim = kraus[0].shape[1]
        out_dim = kraus[0].shape[0]
        if any(K.shape != (out_dim, in_dim) for K in kraus):
            raise ValueError("Kraus operators must share one shape")
        for x in set(f):
            gram = sum(K.conj().T @ K for K, fx in zip(kraus, f) if fx == x)
            if np.linalg.eigvalsh(np.eye(in_dim) - gram)[0] < -KRAUS_TOL:
                raise ValueError(f"Kraus operators for register value {x} are not trace non-increasing")
        for K in kraus:
            K.setflags(write=False)
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "f", f)

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def alphabet(self) -> frozenset[int]:
        return frozenset(self.f)

    def is_trace_preserving(self, tol: float = KRAUS_TOL) -> bool:
        for x in self.alphabet:
            gram = sum(K.conj().T @ K for K, fx in zip(self.kraus, self.f) if fx == x)
            if not np.allclose(gram, np.eye(self.in_dim), atol=tol, rtol=0):
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "party": self.party,
            "f": list(self.f),
            "kraus": [{"re": K.real.tolist(), "im": K.imag.tolist()} for K in self.kraus],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "OneStepChannel":
        try:
            kraus = tuple(np.asarray(K["re"], dtype=float) + 1j * np.asarray(K["im"], dtype=float) for K in obj["kraus"])
            return cls(int(obj["party"]), kraus, tuple(obj["f"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed protocol step: {exc!r}") from None


def protocol_to_json(protocol: Sequence[OneStepChannel]) -> str:
    return json.dumps([ch.to_dict() for ch in protocol], sort_keys=True)


def protocol_from_json(text: str) -> list[OneStepChannel]:
    return [OneStepChannel.from_dict(step) for step in json.loads(text)]


def apply(ch: OneStepChannel, rho: ConditionallyPureState) -> ConditionallyPureState:
    """Run one step; branches with (numerically) zero weight are dropped."""
    alphabet = ch.alphabet
    out = []
    for b in rho.branches:
        if b.label not in alphabet:
            raise ValueError(f"branch label {b.label} is not in the channel's input alphabet {sorted(alphabet)}")
        if not 0 <= ch.party < b.state.k:
            raise ValueError(f"party {ch.party} out of range for a {b.state.k}-party state")
        for y, (K, x) in enumerate(zip(ch.kraus, ch.f)):
            if x != b.label:
                continue
            new = apply_local(K, ch.party, b.state)
            w = new.norm_sq()
            if w * b.weight <= DROP_TOL:
                continue
            out.append(Branch(b.weight * w, y, new.scaled(1.0 / math.sqrt(w))))
    return ConditionallyPureState(tuple(out))


def compose_and_discard(protocol: Sequence[OneStepChannel], psi: MultipartiteState) -> ConditionallyPureState:
    """Apply the steps in order to ``psi``, keeping the final register as labels."""
    rho = ConditionallyPureState.pure(psi)
    for ch in protocol:
        rho = apply(ch, rho)
    return rho


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry ``C^cols -> C^rows``.

    QR of a standard complex Gaussian matrix, with each column rescaled by
    the phase of the matching diagonal entry of R so that diag(R) is positive.
    """
    if rows < cols:
        raise ValueError(f"no isometry from dimension {cols} into {rows}")
    z = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_one_step(
    party: int,
    in_dim: int,
    out_dim: int,
    branches: int,
    seed,
    register: int = 1,
) -> OneStepChannel:
    """Trace-preserving random step: one Haar isometry per register value.

    For register value ``x`` an isometry ``C^in_dim -> C^(out_dim * branches)``
    is cut into ``branches`` blocks of ``out_dim`` rows; block ``b`` becomes
    the Kraus operator with label ``x * branches + b``.
    """
    if out_dim * branches < in_dim:
        raise ValueError(f"out_dim * branches = {out_dim * branches} < in_dim = {in_dim}")
    rng = np.random.default_rng(seed)
    kraus, f = [], []
    for x in range(register):
        v = haar_isometry(out_dim * branches, in_dim, rng)
        for b in range(branches):
            kraus.append(v[b * out_dim:(b + 1) * out_dim, :])
            f.append(x)
    return OneStepChannel(party, tuple(kraus), tuple(f))


def random_protocol(
    dims: Sequence[int],
    steps: int,
    rng: np.random.Generator,
    max_branches: int = 3,
    max_out_dim: int | None = None,
) -> list[OneStepChannel]:
    """A chain of random trace-preserving steps on random parties."""
    dims = list(dims)
    register = 1
    protocol = []
    for _ in range(steps):
        party = int(rng.integers(len(dims)))
        branches = int(rng.integers(1, max_branches + 1))
        top = max_out_dim or dims[party]
        lo = max(1, -(-dims[party] // branches))
        out_dim = int(rng.integers(lo, max(lo, top) + 1))
        ch = random_one_step(party, dims[party], out_dim, branches, rng.integers(2**63), register)
        protocol.append(ch)
        dims[party] = out_dim
        register = len(ch.kraus)
    return protocol


def discard_and_prepare(dims: Sequence[int]) -> list[OneStepChannel]:
    """Every party measures in its computational basis and resets to ``|0>``."""
    protocol = []
    register = 1
    for party, d in enumerate(dims):
        kraus, f = [], []
        for x in range(register):
            for a in range(d):
                K = np.zeros((d, d), dtype=complex)
                K[0, a] = 1.0
                kraus.append(K)
                f.append(x)
        protocol.append(OneStepChannel(party, tuple(kraus), tuple(f)))
        register = len(kraus)
    return protocol


def output_dims(protocol: Sequence[OneStepChannel], dims: Sequence[int]) -> tuple[int, ...]:
    dims = list(dims)
    for ch in protocol:
        if ch.in_dim != dims[ch.party]:
            raise ValueError(f"step on party {ch.party} expects dimension {ch.in_dim}, got {dims[ch.party]}")
        dims[ch.party] = ch.out_dim
    return tuple(dims)


def parallel_protocol(protocol: Sequence[OneStepChannel], dims: Sequence[int]) -> list[OneStepChannel]:
    """Protocol running ``protocol`` on each factor of ``psi (x) psi`` in turn.

    ``dims`` are the local dimensions of ``psi``.  The first pass acts on the
    first factor, the second on the second one.  A final register value
    ``x1 * m + x2`` encodes the pair of single-copy labels, where ``m`` is the
    largest Kraus count of any step.
    """
    if not protocol:
        return []
    final = output_dims(protocol, dims)
    m = max(len(ch.kraus) for ch in protocol)
    out = []
    for ch in protocol:
        eye = np.eye(dims[ch.party])
        out.append(OneStepChannel(ch.party, tuple(np.kron(K, eye) for K in ch.kraus), ch.f))
    first_labels = range(len(protocol[-1].kraus))
    for step, ch in enumerate(protocol):
        eye = np.eye(final[ch.party])
        kraus, f = [], []
        for x1 in first_labels:
            for y in range(m):
                # the first step of the second pass reads the bare first-pass label
                src = x1 if step == 0 else x1 * m + ch.f[min(y, len(ch.kraus) - 1)]
                if y < len(ch.kraus):
                    kraus.append(np.kron(eye, ch.kraus[y]))
                else:
                    kraus.append(np.zeros((final[ch.party] * ch.out_dim, final[ch.party] * ch.in_dim)))
                f.append(src)
        out.append(OneStepChannel(ch.party, tuple(kraus), tuple(f)))
    return out


def product_zero(dims: Sequence[int]) -> MultipartiteState:
    return basis_state(dims, [0] * len(dims))


def monotone_avg_check(spec: MeasureSpec, psi: MultipartiteState, protocol: Sequence[OneStepChannel]) -> float:
    """Slack ``E(psi) - sum_x P(x) E(psi_x)`` of monotonicity on average."""
    out = compose_and_discard(protocol, psi)
    return evaluate(spec, psi) - math.fsum(b.weight * evaluate(spec, b.state) for b in out.branches)


def weak_monotone_slack(spec: MeasureSpec, psi: MultipartiteState, protocol: Sequence[OneStepChannel]) -> float:
    """Smallest ``E(psi) - P(x) E(psi_x)`` over the outcome branches."""
    out = compose_and_discard(protocol, psi)
    e = evaluate(spec, psi)
    return min((e - b.weight * evaluate(spec, b.state) for b in out.branches), default=e)


def _block_trace_norm(p: float, q: float, ov_sq: float) -> float:
    """``|| p |a><a| - q |b><b| ||_1`` for unit a, b with ``|<a|b>|^2 = ov_sq``.

    The operator lives on span{a, b}; its eigenvalues solve
    ``l^2 - (p - q) l - p q (1 - ov_sq) = 0``.
    """
    return math.sqrt(max(0.0, (p - q) ** 2 + 4.0 * p * q * (1.0 - ov_sq)))


def cq_trace_distance(rho: ConditionallyPureState, sigma: ConditionallyPureState) -> float:
    """Trace distance of two ensembles with their registers kept."""
    a, b = rho.by_label(), sigma.by_label()
    total = 0.0
    for x in set(a) | set(b):
        ba, bb = a.get(x), b.get(x)
        if ba is None:
            total += bb.weight
        elif bb is None:
            total += ba.weight
        else:
            if ba.state.dims != bb.state.dims:
                raise ValueError(f"label {x} carries states of different dimensions")
            total += _block_trace_norm(ba.weight, bb.weight, fidelity_sq(ba.state, bb.state))
    return 0.5 * total


@dataclass(frozen=True)
class CondPureDistanceCheck:
    T: float
    tv: float
    avg_branch: float
    tv_bound_ok: bool
    avg_branch_bound_ok: bool


def check_cond_pure_distance(rho: ConditionallyPureState, sigma: ConditionallyPureState) -> CondPureDistanceCheck:
    """With ``eps = T(rho, sigma)``: ``TV(P, Q) <= eps`` and ``sum P(x) T(psi_x, phi_x) <= 2 eps``.

    Raises:
        ValueError: if the two ensembles carry different label sets.
    """
    a, b = rho.by_label(), sigma.by_label()
    if set(a) != set(b):
        raise ValueError(f"label sets differ: {sorted(set(a) ^ set(b))} appear on one side only")
    t = cq_trace_distance(rho, sigma)
    labels = sorted(a)
    p = np.array([a[x].weight for x in labels])
    q = np.array([b[x].weight for x in labels])
    avg = math.fsum(
        a[x].weight * math.sqrt(max(0.0, 1.0 - fidelity_sq(a[x].state, b[x].state))) for x in labels
    )
    dist = tv(p, q)
    return CondPureDistanceCheck(
        T=t,
        tv=dist,
        avg_branch=avg,
        tv_bound_ok=dist <= t + 1e-12,
        avg_branch_bound_ok=avg <= 2.0 * t + 1e-12,
    )


@dataclass(frozen=True)
class OutcomeMassCheck:
    epsilon: float
    mass: float
    bound: float
    ok: bool


def check_outcome_prob_lower(
    psi: MultipartiteState,
    phi: MultipartiteState,
    protocol: Sequence[OneStepChannel],
    eps_prime: float,
) -> OutcomeMassCheck:
    """Mass of the outcomes of ``phi`` that stay ``eps_prime``-close to those of ``psi``.

    With ``eps = 1 - |<phi|psi>|^2`` measured from the inputs, the mass
    ``sum Q(x)`` over labels with ``|<phi_x|psi_x>|^2 >= 1 - eps_prime`` must be
    at least ``1 - 2 sqrt(eps) (1 + 1/sqrt(eps_prime))``.
    """
    if not 0.0 < eps_prime <= 1.0:
        raise ValueError(f"eps_prime must lie in (0, 1], got {eps_prime}")
    eps = max(0.0, 1.0 - fidelity_sq(psi.normalized(), phi.normalized()))
    out_psi = compose_and_discard(protocol, psi).by_label()
    out_phi = compose_and_discard(protocol, phi)
    mass = 0.0
    for b in out_phi.branches:
        other = out_psi.get(b.label)
        if other is not None and fidelity_sq(b.state, other.state) >= 1.0 - eps_prime:
            mass += b.weight
    bound = 1.0 - 2.0 * math.sqrt(eps) * (1.0 + 1.0 / math.sqrt(eps_prime))
    return OutcomeMassCheck(eps, mass, bound, bool(bound <= 0.0 or mass >= bound - 1e-9))


@dataclass(frozen=True)
class MaxEigCheck:
    gap: float
    T: float
    ok: bool


def check_max_eig(rho: np.ndarray, sigma: np.ndarray) -> MaxEigCheck:
    """``|lambda_max(rho) - lambda_max(sigma)| <= 2 T(rho, sigma)``."""
    t = trace_distance(rho, sigma)
    gap = abs(clamped_eigvalsh(rho)[0] - clamped_eigvalsh(sigma)[0])
    return MaxEigCheck(float(gap), t, bool(gap <= 2.0 * t + 1e-10))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Unit-trace density matrix ``G G^dagger / Tr`` with complex Gaussian ``G``."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real

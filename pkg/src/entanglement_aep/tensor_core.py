"""Dense k-partite pure states.

Amplitudes are stored as a flat complex vector in row-major (C) order over
the multi-index ``(i_1, ..., i_k)``, so the flat position of a basis vector
is ``i_k + d_k * (i_{k-1} + d_{k-1} * (...))``.  Parties are numbered from 0.
A bipartition is given by the tuple of parties on one side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

UNIT_TOL = 1e-12
EIG_CLAMP = 1e-12
MAX_EXPLICIT_DIM = 2**16


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    """A (possibly unnormalized) vector in ``C^{d_1} x ... x C^{d_k}``."""

    dims: tuple[int, ...]
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError(f"dims must be k >= 1 positive integers, got {self.dims}")
        total = math.prod(dims)
        if total > MAX_EXPLICIT_DIM:
            raise ValueError(f"total dimension {total} exceeds explicit cap {MAX_EXPLICIT_DIM}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != total:
            raise ValueError(f"expected {total} amplitudes for dims {dims}, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def normalized(self) -> "MultipartiteState":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return MultipartiteState(self.dims, self.amps / nrm)

    def scaled(self, c: complex) -> "MultipartiteState":
        return MultipartiteState(self.dims, c * self.amps)

    def tensor(self) -> np.ndarray:
        """Amplitudes as a k-way array of shape ``dims``."""
        return self.amps.reshape(self.dims)

    def to_json(self) -> str:
        return json.dumps(state_to_dict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MultipartiteState":
        return state_from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class SchmidtData:
    """Schmidt decomposition across ``(parties, complement)``.

    ``left[:, i]`` lives on the parties of the cut (in increasing party order),
    ``right[:, i]`` on the complement, and the vector in the regrouped order is
    ``sum_i sqrt(coefficients[i]) * kron(left[:, i], right[:, i])``.
    """

    parties: tuple[int, ...]
    complement: tuple[int, ...]
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    dims: tuple[int, ...]

    @property
    def rank(self) -> int:
        return schmidt_rank(self.coefficients)

    def reconstruct(self) -> MultipartiteState:
        """Rebuild the state in the original party order."""
        s = np.sqrt(self.coefficients)
        mat = (self.left * s) @ self.right.T
        order = self.parties + self.complement
        tens = mat.reshape([self.dims[p] for p in order])
        tens = np.transpose(tens, np.argsort(order))
        return MultipartiteState(self.dims, tens.reshape(-1))


def state_to_dict(psi: MultipartiteState) -> dict:
    return {
        "dims": list(psi.dims),
        "re": [float(x) for x in psi.amps.real],
        "im": [float(x) for x in psi.amps.imag],
    }


def state_from_dict(obj: dict) -> MultipartiteState:
    try:
        dims = obj["dims"]
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state object: {exc}") from None
    if re.shape != im.shape:
        raise ValueError("'re' and 'im' must have equal length")
    return MultipartiteState(tuple(dims), re + 1j * im)


def check_bipartition(b: Iterable[int], k: int) -> tuple[int, ...]:
    """Validate a cut and return it as a sorted tuple."""
    raw = [int(j) for j in b]
    parts = tuple(sorted(set(raw)))
    if len(parts) != len(raw):
        raise ValueError(f"repeated party in bipartition {tuple(raw)}")
    if not parts or len(parts) >= k:
        raise ValueError(f"bipartition must be a nonempty proper subset of {k} parties, got {parts}")
    if parts[0] < 0 or parts[-1] >= k:
        raise ValueError(f"party index out of range for k={k}: {parts}")
    return parts


def complement(b: Sequence[int], k: int) -> tuple[int, ...]:
    s = set(b)
    return tuple(j for j in range(k) if j not in s)


def basis_state(dims: Sequence[int], index: Sequence[int]) -> MultipartiteState:
    amps = np.zeros(math.prod(dims), dtype=complex)
    amps[np.ravel_multi_index(tuple(index), tuple(dims))] = 1.0
    return MultipartiteState(tuple(dims), amps)


def product_state(vectors: Sequence[np.ndarray]) -> MultipartiteState:
    amps = np.ones(1, dtype=complex)
    for v in vectors:
        amps = np.kron(amps, np.asarray(v, dtype=complex))
    return MultipartiteState(tuple(len(v) for v in vectors), amps)


def ghz(k: int, r: int) -> MultipartiteState:
    """The r-level GHZ state ``r^{-1/2} sum_{i<r} |i...i>`` on k parties."""
    if k < 1 or r < 1:
        raise ValueError("ghz needs k >= 1 and r >= 1")
    dims = (r,) * k
    amps = np.zeros(r**k, dtype=complex)
    stride = sum(r**p for p in range(k))
    amps[np.arange(r) * stride] = 1.0 / math.sqrt(r)
    return MultipartiteState(dims, amps)


def random_state(dims: Sequence[int], rng: np.random.Generator) -> MultipartiteState:
    """Haar-random unit vector."""
    n = math.prod(dims)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return MultipartiteState(tuple(dims), v / np.linalg.norm(v))


def tensor_product(psi: MultipartiteState, phi: MultipartiteState) -> MultipartiteState:
    """Partywise tensor product; party i of the result is ``H_i (x) K_i``."""
    if psi.k != phi.k:
        raise ValueError(f"party count mismatch: {psi.k} vs {phi.k}")
    k = psi.k
    outer = np.multiply.outer(psi.tensor(), phi.tensor())
    interleave = [ax for i in range(k) for ax in (i, k + i)]
    dims = tuple(d * e for d, e in zip(psi.dims, phi.dims))
    return MultipartiteState(dims, np.transpose(outer, interleave).reshape(-1))


def tensor_power(psi: MultipartiteState, n: int) -> MultipartiteState:
    if n < 1:
        raise ValueError("n must be >= 1")
    out = psi
    for _ in range(n - 1):
        out = tensor_product(out, psi)
    return out


def direct_sum(psi: MultipartiteState, phi: MultipartiteState) -> MultipartiteState:
    """Embed ``psi (+) phi`` into ``(H_1 (+) K_1) x ... x (H_k (+) K_k)``.

    ``psi`` occupies the block where every local index is below ``d_i``,
    ``phi`` the block where every local index is at least ``d_i``.
    """
    if psi.k != phi.k:
        raise ValueError(f"party count mismatch: {psi.k} vs {phi.k}")
    dims = tuple(d + e for d, e in zip(psi.dims, phi.dims))
    out = np.zeros(dims, dtype=complex)
    out[tuple(slice(0, d) for d in psi.dims)] = psi.tensor()
    out[tuple(slice(d, None) for d in psi.dims)] = phi.tensor()
    return MultipartiteState(dims, out.reshape(-1))


def direct_sum_many(summands: Sequence[MultipartiteState]) -> MultipartiteState:
    if not summands:
        raise ValueError("need at least one summand")
    out = summands[0]
    for s in summands[1:]:
        out = direct_sum(out, s)
    return out


def _cut_matrix(psi: MultipartiteState, b: tuple[int, ...]) -> tuple[np.ndarray, tuple[int, ...]]:
    rest = complement(b, psi.k)
    tens = np.transpose(psi.tensor(), b + rest)
    rows = math.prod(psi.dims[j] for j in b)
    return tens.reshape(rows, -1), rest


def marginal(psi: MultipartiteState, b: Iterable[int]) -> np.ndarray:
    """Reduced operator on the parties in ``b``; its trace equals ``||psi||^2``."""
    b = check_bipartition(b, psi.k)
    mat, _ = _cut_matrix(psi, b)
    return mat @ mat.conj().T


def marginal_spectrum(psi: MultipartiteState, b: Iterable[int]) -> np.ndarray:
    """Descending eigenvalues of ``marginal(psi, b)``, via singular values."""
    b = check_bipartition(b, psi.k)
    mat, _ = _cut_matrix(psi, b)
    s = np.linalg.svd(mat, compute_uv=False)
    return s**2


def schmidt(psi: MultipartiteState, b: Iterable[int]) -> SchmidtData:
    b = check_bipartition(b, psi.k)
    mat, rest = _cut_matrix(psi, b)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    return SchmidtData(
        parties=b,
        complement=rest,
        coefficients=s**2,
        left=u,
        right=vh.T,
        dims=psi.dims,
    )


def schmidt_rank(coefficients: np.ndarray, tol: float = 1e-14) -> int:
    """Count of squared Schmidt coefficients above ``tol`` times the largest."""
    c = np.asarray(coefficients)
    if c.size == 0 or c.max() <= 0:
        return 0
    return int(np.count_nonzero(c > tol * c.max()))


def overlap(psi: MultipartiteState, phi: MultipartiteState) -> complex:
    if psi.dims != phi.dims:
        raise ValueError(f"dimension mismatch: {psi.dims} vs {phi.dims}")
    return complex(np.vdot(psi.amps, phi.amps))


def fidelity_sq(psi: MultipartiteState, phi: MultipartiteState) -> float:
    """``|<psi|phi>|^2`` for unit vectors."""
    return min(1.0, abs(overlap(psi, phi)) ** 2)


def trace_distance_pure(psi: MultipartiteState, phi: MultipartiteState) -> float:
    return math.sqrt(max(0.0, 1.0 - fidelity_sq(psi, phi)))


def projector(psi: MultipartiteState) -> np.ndarray:
    return np.outer(psi.amps, psi.amps.conj())


def check_density_matrix(rho: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate a (sub)normalized density matrix and return it as an array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        raise ValueError("density matrix is not Hermitian")
    eig = np.linalg.eigvalsh(rho)
    if eig.size and eig[0] < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {eig[0]:.3g}")
    if np.trace(rho).real > 1 + tol:
        raise ValueError("density matrix trace exceeds 1")
    return rho


def clamped_eigvalsh(rho: np.ndarray) -> np.ndarray:
    """Descending Hermitian eigenvalues with rounding negatives set to zero."""
    eig = np.linalg.eigvalsh(rho)[::-1]
    return np.where(eig < 0, np.where(eig >= -EIG_CLAMP, 0.0, eig), eig)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``0.5 * ||rho - sigma||_1``."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    diff = rho - sigma
    return 0.5 * float(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)).sum())


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem of ``rho`` not listed in ``keep``."""
    dims = tuple(dims)
    k = len(dims)
    keep = tuple(sorted(set(keep)))
    drop = tuple(j for j in range(k) if j not in keep)
    tens = np.asarray(rho).reshape(dims + dims)
    perm = keep + drop + tuple(k + j for j in keep) + tuple(k + j for j in drop)
    tens = np.transpose(tens, perm)
    dk = math.prod(dims[j] for j in keep)
    dd = math.prod(dims[j] for j in drop)
    return np.einsum("ajbj->ab", tens.reshape(dk, dd, dk, dd))


def apply_local(op: np.ndarray, party: int, psi: MultipartiteState) -> MultipartiteState:
    """Apply ``I x ... x op x ... x I`` with ``op`` acting on ``party``."""
    op = np.asarray(op, dtype=complex)
    if op.shape[1] != psi.dims[party]:
        raise ValueError(f"operator input dim {op.shape[1]} != party {party} dim {psi.dims[party]}")
    tens = np.tensordot(op, psi.tensor(), axes=([1], [party]))
    tens = np.moveaxis(tens, 0, party)
    dims = psi.dims[:party] + (op.shape[0],) + psi.dims[party + 1:]
    return MultipartiteState(dims, tens.reshape(-1))


def permute_parties(psi: MultipartiteState, perm: Sequence[int]) -> MultipartiteState:
    """New state whose party ``i`` is old party ``perm[i]``."""
    perm = tuple(perm)
    tens = np.transpose(psi.tensor(), perm)
    return MultipartiteState(tuple(psi.dims[p] for p in perm), tens.reshape(-1))

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_reduced
from entanglement_aep.tensor_core import (
    MultipartiteState,
    apply_local,
    basis_state,
    check_bipartition,
    clamped_eigvalsh,
    direct_sum,
    direct_sum_many,
    fidelity_sq,
    ghz,
    marginal,
    marginal_spectrum,
    partial_trace,
    permute_parties,
    product_state,
    projector,
    random_state,
    schmidt,
    state_from_dict,
    state_to_dict,
    tensor_power,
    tensor_product,
    trace_distance,
    trace_distance_pure,
)
from entanglement_aep.entropy import marginal_entropy, shannon

dims_strategy = st.lists(st.integers(1, 3), min_size=2, max_size=3)


def _random_density(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


class TestMultipartiteState:
    def test_length_must_match_dims(self):
        with pytest.raises(ValueError):
            MultipartiteState((2, 2), np.ones(3))

    def test_nonpositive_dims_rejected(self):
        with pytest.raises(ValueError):
            MultipartiteState((2, 0), np.ones(0))

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            MultipartiteState((2**9, 2**8), np.zeros(2**17))

    def test_amplitudes_are_read_only(self):
        psi = ghz(2, 2)
        with pytest.raises(ValueError):
            psi.amps[0] = 3.0

    def test_unnormalized_allowed(self):
        psi = MultipartiteState((2,), [3.0, 4.0])
        assert psi.norm() == pytest.approx(5.0)
        assert not psi.is_unit()
        assert psi.normalized().is_unit()

    def test_zero_vector_cannot_be_normalized(self):
        with pytest.raises(ValueError):
            MultipartiteState((2,), [0, 0]).normalized()

    def test_json_round_trip(self, rng):
        psi = random_state((2, 3, 2), rng)
        text = psi.to_json()
        obj = json.loads(text)
        assert set(obj) == {"dims", "re", "im"}
        back = MultipartiteState.from_json(text)
        assert back.dims == psi.dims
        np.testing.assert_array_equal(back.amps, psi.amps)
        assert psi.to_json() == text

    def test_state_from_dict_without_imaginary_part(self):
        psi = state_from_dict({"dims": [2], "re": [1.0, 0.0]})
        np.testing.assert_array_equal(psi.amps, [1, 0])

    def test_state_from_dict_rejects_garbage(self):
        with pytest.raises(ValueError):
            state_from_dict({"dims": [2]})
        with pytest.raises(ValueError):
            state_from_dict({"dims": [2], "re": [1, 0], "im": [0]})

    def test_row_major_layout(self):
        psi = basis_state((2, 3), (1, 2))
        assert np.flatnonzero(psi.amps).tolist() == [1 * 3 + 2]


class TestBipartition:
    @pytest.mark.parametrize("b", [(), (0, 1, 2), (3,), (-1,), (0, 0)])
    def test_invalid(self, b):
        with pytest.raises(ValueError):
            check_bipartition(b, 3)

    def test_sorted(self):
        assert check_bipartition([2, 0], 3) == (0, 2)


class TestTensorProduct:
    def test_party_mismatch(self):
        with pytest.raises(ValueError):
            tensor_product(ghz(2, 2), ghz(3, 2))

    def test_basis_product_index(self):
        # index arithmetic oracle: party i of the product carries (a_i, b_i) -> a_i * e_i + b_i
        for a in itertools.product(range(2), range(2)):
            for b in itertools.product(range(2), range(2)):
                out = tensor_product(basis_state((2, 2), a), basis_state((2, 2), b))
                assert out.dims == (4, 4)
                want = np.ravel_multi_index((a[0] * 2 + b[0], a[1] * 2 + b[1]), (4, 4))
                assert np.flatnonzero(out.amps).tolist() == [want]

    def test_00_times_11(self):
        out = tensor_product(basis_state((2, 2), (0, 0)), basis_state((2, 2), (1, 1)))
        assert out.tensor()[1, 1] == 1.0

    def test_norm_multiplies(self, rng):
        for _ in range(20):
            psi = random_state((2, 3), rng).scaled(rng.uniform(0.1, 2))
            phi = random_state((3, 2), rng).scaled(rng.uniform(0.1, 2))
            assert tensor_product(psi, phi).norm() == pytest.approx(psi.norm() * phi.norm(), rel=1e-12)

    def test_trivial_factor_keeps_spectra(self, rng):
        psi = random_state((2, 3, 2), rng)
        out = tensor_product(psi, ghz(3, 1))
        for j in range(3):
            np.testing.assert_allclose(marginal_spectrum(out, [j]), marginal_spectrum(psi, [j]), atol=1e-12)

    def test_marginal_is_kronecker(self, rng):
        psi = random_state((2, 2, 3), rng)
        phi = random_state((3, 2, 2), rng)
        out = tensor_product(psi, phi)
        for b in ([0], [1], [2], [0, 2]):
            if len(b) == 1:
                want = np.kron(marginal(psi, b), marginal(phi, b))
                np.testing.assert_allclose(marginal(out, b), want, atol=1e-10)
            want = np.sort(np.kron(marginal_spectrum(psi, b), marginal_spectrum(phi, b)))[::-1]
            np.testing.assert_allclose(marginal_spectrum(out, b)[: want.size], want, atol=1e-10)

    def test_fidelity_of_powers_factorizes(self, rng):
        psi = random_state((2, 2), rng)
        phis = [random_state((2, 2), rng) for _ in range(3)]
        prod = phis[0]
        for f in phis[1:]:
            prod = tensor_product(prod, f)
        want = math.prod(fidelity_sq(psi, f) for f in phis)
        assert fidelity_sq(tensor_power(psi, 3), prod) == pytest.approx(want, rel=1e-10, abs=1e-15)

    def test_tensor_power_rejects_zero(self):
        with pytest.raises(ValueError):
            tensor_power(ghz(2, 2), 0)


class TestDirectSum:
    def test_embedding_structure(self, rng):
        psi = random_state((2, 2), rng)
        phi = random_state((2, 2), rng)
        out = direct_sum(psi, phi)
        assert out.dims == (4, 4)
        tens = out.tensor()
        # explicit embedding oracle
        want = np.zeros((4, 4), dtype=complex)
        want[:2, :2] = psi.tensor()
        want[2:, 2:] = phi.tensor()
        np.testing.assert_array_equal(tens, want)
        zero_mask = np.ones((4, 4), bool)
        zero_mask[:2, :2] = zero_mask[2:, 2:] = False
        assert zero_mask.sum() == 8
        assert np.all(tens[zero_mask] == 0)

    def test_norm_adds(self, rng):
        psi = random_state((2, 3), rng)
        phi = random_state((3, 2), rng)
        out = direct_sum(psi.scaled(math.sqrt(0.3)), phi.scaled(math.sqrt(0.7)))
        assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_equal_product_halves(self):
        z = basis_state((2, 2, 2), (0, 0, 0)).scaled(math.sqrt(0.5))
        out = direct_sum(z, z)
        for j in range(3):
            np.testing.assert_allclose(marginal_spectrum(out, [j])[:2], [0.5, 0.5], atol=1e-12)

    def test_block_diagonal_spectrum(self, rng):
        p = 0.35
        psi = random_state((2, 3, 2), rng)
        phi = random_state((3, 2, 2), rng)
        out = direct_sum(psi.scaled(math.sqrt(p)), phi.scaled(math.sqrt(1 - p)))
        for b in ([0], [1], [0, 1]):
            want = np.concatenate([p * marginal_spectrum(psi, b), (1 - p) * marginal_spectrum(phi, b)])
            got = marginal_spectrum(out, b)
            want = np.sort(want)[::-1]
            np.testing.assert_allclose(got[: want.size], want, atol=1e-10)
            assert np.all(np.abs(got[want.size:]) < 1e-12)

    def test_many_matches_pairwise(self, rng):
        parts = [random_state((2, 2), rng).scaled(0.5) for _ in range(4)]
        a = direct_sum_many(parts)
        b = direct_sum(direct_sum(direct_sum(parts[0], parts[1]), parts[2]), parts[3])
        np.testing.assert_array_equal(a.amps, b.amps)

    def test_party_mismatch(self):
        with pytest.raises(ValueError):
            direct_sum(ghz(2, 2), ghz(3, 2))


class TestMarginal:
    def test_ghz_marginal(self):
        np.testing.assert_allclose(marginal(ghz(3, 2), [1]), np.eye(2) / 2, atol=1e-15)

    def test_product_marginal_rank_one(self, rng):
        v = [rng.standard_normal(d) + 1j * rng.standard_normal(d) for d in (2, 3, 2)]
        v = [x / np.linalg.norm(x) for x in v]
        psi = product_state(v)
        for b in ([0], [1], [2], [0, 1]):
            eig = np.linalg.eigvalsh(marginal(psi, b))
            assert eig[-1] == pytest.approx(1.0)
            assert np.all(np.abs(eig[:-1]) < 1e-12)

    def test_matches_dense_oracle(self, rng):
        psi = random_state((2, 3, 2), rng).scaled(1.3)
        for b in ([0], [1], [2], [0, 2], [1, 2]):
            np.testing.assert_allclose(marginal(psi, b), dense_reduced(psi, b), atol=1e-12)
            assert np.trace(marginal(psi, b)).real == pytest.approx(psi.norm_sq())

    def test_matches_partial_trace(self, rng):
        psi = random_state((3, 2, 2), rng)
        np.testing.assert_allclose(marginal(psi, [0, 2]), partial_trace(projector(psi), psi.dims, [0, 2]), atol=1e-12)

    def test_complement_spectra_agree(self, rng):
        psi = random_state((2, 3, 4), rng)
        for b, c in (([0], [1, 2]), ([1], [0, 2]), ([2], [0, 1])):
            sb, sc = marginal_spectrum(psi, b), marginal_spectrum(psi, c)
            m = min(sb.size, sc.size)
            np.testing.assert_allclose(sb[:m], sc[:m], atol=1e-12)

    def test_invalid_cut(self):
        with pytest.raises(ValueError):
            marginal(ghz(3, 2), [0, 1, 2])


class TestSchmidt:
    def test_bell(self):
        bell = MultipartiteState((2, 2), np.array([1, 0, 0, 1]) / math.sqrt(2))
        np.testing.assert_allclose(schmidt(bell, [0]).coefficients, [0.5, 0.5])

    def test_product(self):
        sd = schmidt(basis_state((2, 2), (0, 0)), [0])
        assert sd.rank == 1
        assert sd.coefficients[0] == pytest.approx(1.0)

    def test_against_svd(self, rng):
        psi = random_state((2, 3), rng)
        s = np.linalg.svd(psi.amps.reshape(2, 3), compute_uv=False)
        np.testing.assert_allclose(schmidt(psi, [0]).coefficients, s**2, atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(dims=st.lists(st.integers(1, 4), min_size=2, max_size=3), seed=st.integers(0, 2**32 - 1))
    def test_invariants(self, dims, seed):
        psi = random_state(dims, np.random.default_rng(seed))
        sd = schmidt(psi, [0])
        assert sd.coefficients.sum() == pytest.approx(1.0, abs=1e-10)
        r = sd.left.shape[1]
        np.testing.assert_allclose(sd.left.conj().T @ sd.left, np.eye(r), atol=1e-10)
        np.testing.assert_allclose(sd.right.T @ sd.right.conj(), np.eye(r), atol=1e-10)
        assert np.linalg.norm(sd.reconstruct().amps - psi.amps) <= 1e-8
        np.testing.assert_allclose(
            np.sort(sd.coefficients)[::-1][:r], np.sort(np.linalg.eigvalsh(marginal(psi, [0])))[::-1][:r], atol=1e-10
        )

    def test_multi_party_cut_reconstructs(self, rng):
        psi = random_state((2, 3, 2), rng)
        assert np.linalg.norm(schmidt(psi, [0, 2]).reconstruct().amps - psi.amps) <= 1e-10

    def test_degenerate_basis_irrelevant(self):
        # any orthonormal choice gives the same coefficient multiset
        psi = ghz(2, 3)
        np.testing.assert_allclose(schmidt(psi, [0]).coefficients, [1 / 3] * 3, atol=1e-15)
        rotated = apply_local(np.linalg.qr(np.arange(9).reshape(3, 3) + 1j)[0], 0, psi)
        np.testing.assert_allclose(schmidt(rotated, [0]).coefficients, [1 / 3] * 3, atol=1e-14)


class TestDistances:
    def test_identical(self, rng):
        psi = random_state((2, 2), rng)
        assert fidelity_sq(psi, psi) == pytest.approx(1.0)
        assert trace_distance_pure(psi, psi) == pytest.approx(0.0, abs=1e-7)

    def test_orthogonal(self):
        assert trace_distance_pure(basis_state((2,), (0,)), basis_state((2,), (1,))) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity_sq(ghz(2, 2), ghz(2, 3))
        with pytest.raises(ValueError):
            trace_distance(np.eye(2) / 2, np.eye(3) / 3)

    def test_pure_matches_general(self, rng):
        for _ in range(50):
            psi = random_state((2, 3), rng)
            phi = random_state((2, 3), rng)
            t = trace_distance_pure(psi, phi)
            assert t**2 + fidelity_sq(psi, phi) == pytest.approx(1.0, abs=1e-10)
            oracle = 0.5 * np.abs(np.linalg.eigvalsh(projector(psi) - projector(phi))).sum()
            assert t == pytest.approx(oracle, abs=1e-10)

    def test_diagonal_is_tv(self, rng):
        p, q = rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5))
        assert trace_distance(np.diag(p), np.diag(q)) == pytest.approx(0.5 * np.abs(p - q).sum(), abs=1e-14)

    def test_metric_properties(self, rng):
        for _ in range(100):
            a, b, c = (_random_density(4, rng) for _ in range(3))
            assert trace_distance(a, a) == pytest.approx(0.0, abs=1e-14)
            assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-14)
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12

    def test_data_processing(self, rng):
        for _ in range(100):
            rho, sigma = _random_density(12, rng), _random_density(12, rng)
            for keep in ([0], [1], [0, 2]):
                lhs = trace_distance(partial_trace(rho, (2, 3, 2), keep), partial_trace(sigma, (2, 3, 2), keep))
                assert lhs <= trace_distance(rho, sigma) + 1e-12

    def test_clamp(self):
        eig = clamped_eigvalsh(np.diag([0.5, 0.5 + 1e-13, -1e-13]))
        assert eig[-1] == 0.0
        assert eig[0] >= eig[1]


class TestGhz:
    def test_one_bit_per_cut(self):
        psi = ghz(3, 2)
        for j in range(3):
            assert marginal_entropy(psi, [j]) == pytest.approx(1.0, abs=1e-12)

    def test_r_one_is_product(self):
        psi = ghz(4, 1)
        assert psi.dims == (1, 1, 1, 1)
        assert marginal_entropy(ghz(3, 1), [0]) == 0.0

    def test_qutrit_pair(self):
        np.testing.assert_allclose(schmidt(ghz(2, 3), [0]).coefficients, [1 / 3] * 3, atol=1e-15)

    @pytest.mark.parametrize("k,r", [(2, 2), (3, 3), (4, 2), (1, 4)])
    def test_single_party_marginals_flat(self, k, r):
        psi = ghz(k, r)
        assert psi.is_unit()
        if k > 1:
            np.testing.assert_allclose(marginal(psi, [k - 1]), np.eye(r) / r, atol=1e-15)

    def test_invalid(self):
        with pytest.raises(ValueError):
            ghz(0, 2)


class TestLocalOps:
    def test_apply_local_matches_kron(self, rng):
        psi = random_state((2, 3, 2), rng)
        op = rng.standard_normal((4, 3))
        out = apply_local(op, 1, psi)
        want = np.kron(np.kron(np.eye(2), op), np.eye(2)) @ psi.amps
        assert out.dims == (2, 4, 2)
        np.testing.assert_allclose(out.amps, want, atol=1e-12)

    def test_apply_local_shape_check(self):
        with pytest.raises(ValueError):
            apply_local(np.eye(3), 0, ghz(2, 2))

    def test_permute(self, rng):
        psi = random_state((2, 3, 4), rng)
        out = permute_parties(psi, (2, 0, 1))
        assert out.dims == (4, 2, 3)
        np.testing.assert_allclose(marginal_spectrum(out, [0]), marginal_spectrum(psi, [2]), atol=1e-12)

    def test_unit_state_entropy_agrees_with_shannon(self, rng):
        psi = random_state((3, 3), rng)
        assert marginal_entropy(psi, [0]) == pytest.approx(shannon(schmidt(psi, [0]).coefficients), abs=1e-12)

"""
Tests for eigenbases, Galerkin operators, projection and norms.
"""

import math

import numpy as np
import pytest

from spectral.basis import DomainSpec, EigenBasis, ResolutionError
from spectral.norms import SpectralNorms
from spectral.operators import GalerkinOperators
from storage.tensor_cache import TensorCache


class TestEigenpairs:

    def test_unit_interval(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 3)
        np.testing.assert_allclose(basis.eigenvalues, [1.0, 4.0, 9.0], rtol=1e-14)

    def test_unit_square_ground_mode(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 1)
        assert basis.eigenvalues[0] == pytest.approx(2.0, rel=1e-14)
        assert tuple(basis.modes[0]) == (1, 1)

    def test_long_interval(self):
        basis = EigenBasis.eigenpairs(DomainSpec(dim=1, lengths=(2 * math.pi,)), 1)
        assert basis.eigenvalues[0] == pytest.approx(0.25, rel=1e-14)

    def test_ties_broken_lexicographically(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 3)
        assert [tuple(m) for m in basis.modes] == [(1, 1), (1, 2), (2, 1)]
        np.testing.assert_allclose(basis.eigenvalues, [2.0, 5.0, 5.0], rtol=1e-14)

    def test_lowest_eigenvalues_of_a_box(self):
        domain = DomainSpec(dim=3, lengths=(1.0, 2.0, 3.0))
        basis = EigenBasis.eigenpairs(domain, 20)
        brute = sorted(
            (i / 1.0) ** 2 + (j / 2.0) ** 2 + (k / 3.0) ** 2
            for i in range(1, 15) for j in range(1, 15) for k in range(1, 15)
        )[:20]
        np.testing.assert_allclose(basis.eigenvalues, np.pi ** 2 * np.array(brute), rtol=1e-12)
        assert np.all(np.diff(basis.eigenvalues) >= 0)

    def test_invalid_domains_rejected(self):
        with pytest.raises(ValueError):
            DomainSpec(dim=4, lengths=(1.0,) * 4)
        with pytest.raises(ValueError):
            DomainSpec(dim=2, lengths=(1.0,))
        with pytest.raises(ValueError):
            DomainSpec(dim=1, lengths=(0.0,))

    @pytest.mark.parametrize("dim,n", [(1, 8), (2, 10), (3, 6)])
    def test_orthonormality(self, dim, n):
        basis = EigenBasis.eigenpairs(DomainSpec(dim=dim, lengths=(1.3,) * dim), n)
        np.testing.assert_allclose(GalerkinOperators.gram_matrix(basis), np.eye(n), atol=1e-10)


class TestOperators:

    def test_sine_triple_closed_form(self):
        assert GalerkinOperators.sine_triple_integral(1, 1, 1) == pytest.approx(4.0 / 3.0, rel=1e-14)
        assert GalerkinOperators.sine_triple_integral(1, 1, 2) == 0.0

    def test_interval_triple_entries(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 2)
        tensor = GalerkinOperators.triple_product_tensor(basis)
        assert tensor[0, 0, 0] == pytest.approx((2.0 / math.pi) ** 1.5 * 4.0 / 3.0, rel=1e-12)
        assert tensor[0, 0, 1] == 0.0

    def test_axis_table_matches_closed_form(self):
        length = 2.5
        basis = EigenBasis.eigenpairs(DomainSpec(dim=1, lengths=(length,)), 7)
        table = GalerkinOperators.axis_triple_table(basis, 0)
        norm = (2.0 / length) ** 1.5
        for p in range(1, 8):
            for q in range(1, 8):
                for r in range(1, 8):
                    expected = norm * GalerkinOperators.sine_triple_integral(p, q, r, length)
                    assert table[p, q, r] == pytest.approx(expected, abs=1e-12)

    def test_parity_rule(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 9)
        tensor = GalerkinOperators.triple_product_tensor(basis)
        idx = basis.modes[:, 0]
        even = (idx[:, None, None] + idx[None, :, None] + idx[None, None, :]) % 2 == 0
        assert np.all(tensor[even] == 0.0)

    def test_tensor_symmetry(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 8)
        tensor = GalerkinOperators.triple_product_tensor(basis)
        for axes in [(1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]:
            np.testing.assert_allclose(tensor, tensor.transpose(axes), atol=1e-10)

    def test_tensor_agrees_with_grid_quadrature(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 5)
        tensor = GalerkinOperators.triple_product_tensor(basis)
        grids, weights = basis.gauss_legendre_grid(40)
        fields = [basis.evaluate(np.eye(basis.n)[k], grids) for k in range(basis.n)]
        for i, j, l in [(0, 0, 0), (0, 1, 2), (1, 1, 3), (2, 3, 4)]:
            direct = np.sum(weights * fields[i] * fields[j] * fields[l])
            assert tensor[i, j, l] == pytest.approx(direct, abs=1e-12)

    def test_assemble(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 4)
        ops = GalerkinOperators.assemble(basis)
        np.testing.assert_array_equal(ops.mass, np.eye(4))
        np.testing.assert_allclose(ops.eigenvalues, [1.0, 4.0, 9.0, 16.0])

    def test_tensor_cache(self, tmp_path):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 6)
        cache = TensorCache(str(tmp_path))
        assert cache.load(basis) is None

        first = GalerkinOperators.assemble(basis, cache=cache)
        assert cache.path(basis).exists()
        second = GalerkinOperators.assemble(basis, cache=cache)
        np.testing.assert_array_equal(first.triple, second.triple)

        cache.clear()
        assert cache.load(basis) is None

    def test_truncated_cache_file_is_recomputed(self, tmp_path):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 6)
        cache = TensorCache(str(tmp_path))
        fresh = GalerkinOperators.triple_product_tensor(basis)
        cache.store(basis, fresh)
        assert list(tmp_path.glob("*.tmp")) == []

        path = cache.path(basis)
        payload = path.read_bytes()
        path.write_bytes(payload[:len(payload) // 2])
        assert cache.load(basis) is None

        ops = GalerkinOperators.assemble(basis, cache=cache)
        np.testing.assert_array_equal(ops.triple, fresh)
        np.testing.assert_array_equal(cache.load(basis), fresh)


class TestProjection:

    def test_eigenfunction_projects_to_unit_vector(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 4)
        coeffs = GalerkinOperators.project(lambda x: math.sqrt(2.0 / math.pi) * np.sin(x), basis)
        np.testing.assert_allclose(coeffs, [1.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_parabola_first_coefficient(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 1)
        coeffs = GalerkinOperators.project(lambda x: x * (math.pi - x), basis)
        assert coeffs[0] == pytest.approx(4.0 * math.sqrt(2.0 / math.pi), rel=1e-12)

    def test_truncation_drops_higher_modes(self):
        norm = math.sqrt(2.0 / math.pi)

        def field(x):
            return norm * (np.sin(x) + 2.0 * np.sin(2.0 * x))

        one = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 1)
        two = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 2)
        c1 = GalerkinOperators.project(field, one)
        c2 = GalerkinOperators.project(field, two)

        np.testing.assert_allclose(c1, [1.0], atol=1e-12)
        lap1 = SpectralNorms.laplacian_norm(c1, one.eigenvalues)
        lap2 = SpectralNorms.laplacian_norm(c2, two.eigenvalues)
        assert lap1 == pytest.approx(1.0, rel=1e-12)
        assert lap2 == pytest.approx(math.sqrt(1.0 + 4.0 * 16.0), rel=1e-12)

    def test_projection_stability(self):
        domain = DomainSpec.unit_box(2)

        def field(x, y):
            return np.exp(np.sin(x) * np.cos(y)) * x * (math.pi - x) * y * (math.pi - y)

        full = EigenBasis.eigenpairs(domain, 24)
        reference = GalerkinOperators.project(field, full)
        previous = {0.0: 0.0, 1.0: 0.0, 2.0: 0.0}
        for n in range(1, 25):
            coeffs = reference[:n]
            sub = EigenBasis.eigenpairs(domain, n)
            for s in previous:
                value = SpectralNorms.sobolev_norm(coeffs, s, sub)
                assert value >= previous[s] - 1e-12
                assert value <= SpectralNorms.sobolev_norm(reference, s, full) + 1e-12
                previous[s] = value

    def test_initial_data_triple(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 3)
        norm = math.sqrt(2.0 / math.pi)
        xi0, xi1, xi2 = GalerkinOperators.project_initial_data(
            lambda x: norm * np.sin(x), lambda x: np.zeros_like(x), lambda x: -norm * np.sin(3.0 * x), basis
        )
        np.testing.assert_allclose(xi0, [1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(xi1, [0.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(xi2, [0.0, 0.0, -1.0], atol=1e-12)

    def test_coarse_grid_rejected(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 10)
        with pytest.raises(ResolutionError):
            GalerkinOperators.project(lambda x: x, basis, nodes_per_axis=5)

    def test_samples_must_match_grid(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 2)
        with pytest.raises(ResolutionError):
            GalerkinOperators.project(np.ones(7), basis, nodes_per_axis=40)


class TestNorms:

    def test_sobolev_norms_of_ground_mode(self, interval_basis):
        basis = interval_basis(1)
        e1 = np.array([1.0])
        assert SpectralNorms.sobolev_norm(e1, 0.0, basis) == pytest.approx(1.0)
        assert SpectralNorms.sobolev_norm(e1, 1.0, basis) == pytest.approx(math.sqrt(2.0))
        assert SpectralNorms.sobolev_norm(e1, 1.5, basis) == pytest.approx(2.0 ** 0.75)

    def test_negative_order_rejected(self, interval_basis):
        with pytest.raises(ValueError):
            SpectralNorms.sobolev_norm(np.array([1.0]), -0.5, interval_basis(1))

    def test_h1_agrees_with_quadrature(self):
        rng = np.random.default_rng(7)
        for dim in (1, 2):
            basis = EigenBasis.eigenpairs(DomainSpec(dim=dim, lengths=(2.0,) * dim), 10)
            for _ in range(5):
                coeffs = rng.standard_normal(basis.n)
                spectral = SpectralNorms.sobolev_norm(coeffs, 1.0, basis)
                assert SpectralNorms.h1_norm_quadrature(coeffs, basis) == pytest.approx(spectral, rel=1e-8)

    def test_sup_norm_known_values(self):
        line = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 1)
        square = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 1)
        assert SpectralNorms.sup_norm(np.zeros(1), line, 101) == 0.0
        assert SpectralNorms.sup_norm(np.ones(1), line, 101) == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-12)
        assert SpectralNorms.sup_norm(np.ones(1), square, 101) == pytest.approx(2.0 / math.pi, rel=1e-12)

    def test_sup_norm_resolution_floor(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(1), 5)
        with pytest.raises(ResolutionError):
            SpectralNorms.sup_norm(np.ones(5), basis, 19)

    def test_l4_norm_of_square_ground_mode(self):
        basis = EigenBasis.eigenpairs(DomainSpec.unit_box(2), 1)
        assert SpectralNorms.l4_norm(np.ones(1), basis) == pytest.approx(math.sqrt(3.0 / (2.0 * math.pi)), rel=1e-12)

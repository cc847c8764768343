import numpy as np
import pytest

from conftest import make_random_complex
from hodgeflow.complexes import LayerSignal, build_incidence
from hodgeflow.errors import LayerMismatch
from hodgeflow.hodge import decompose, pinv_psd, project_component
from hodgeflow.spectral import curl, divergence, hodge_basis


class TestDecompose:
    def test_pure_gradient_flow(self, ref_complex):
        ip = build_incidence(ref_complex)
        rng = np.random.default_rng(51)
        x = ip.b1.T.astype(float) @ rng.standard_normal(7)
        comps = decompose(ip, LayerSignal(1, x))
        np.testing.assert_allclose(comps.s_irr, x, atol=1e-8)
        assert np.abs(comps.s_sol).max() <= 1e-8
        assert np.abs(comps.s_harm).max() <= 1e-8

    def test_harmonic_basis_vector_passes_through(self, ref_complex):
        ip = build_incidence(ref_complex)
        basis = hodge_basis(ip)
        x = basis.u_harm[:, 0]
        comps = decompose(ip, LayerSignal(1, x))
        assert np.abs(comps.s_irr).max() <= 1e-8
        assert np.abs(comps.s_sol).max() <= 1e-8
        np.testing.assert_allclose(comps.s_harm, x, atol=1e-8)

    def test_potentials_match_generic_least_squares(self):
        # Independent route: minimum-norm solutions of the two fitting
        # problems min ||B1^T s0 - x|| and min ||B2 s2 - x|| via lstsq.
        rng = np.random.default_rng(52)
        for _ in range(10):
            ip = build_incidence(make_random_complex(rng, 9, 0.5))
            x = rng.standard_normal(ip.num_edges)
            comps = decompose(ip, LayerSignal(1, x))
            s0_ref = np.linalg.lstsq(ip.b1.T.astype(float), x, rcond=None)[0]
            np.testing.assert_allclose(comps.s0_hat, s0_ref, atol=1e-8)
            if ip.num_triangles:
                s2_ref = np.linalg.lstsq(ip.b2.astype(float), x, rcond=None)[0]
                np.testing.assert_allclose(comps.s2_hat, s2_ref, atol=1e-8)

    def test_components_sum_to_input(self, ref_complex):
        ip = build_incidence(ref_complex)
        rng = np.random.default_rng(53)
        x = rng.standard_normal(11)
        comps = decompose(ip, LayerSignal(1, x))
        np.testing.assert_allclose(comps.s_irr + comps.s_sol + comps.s_harm, x,
                                   atol=1e-12)

    def test_components_pairwise_orthogonal_and_pythagorean(self):
        rng = np.random.default_rng(54)
        for _ in range(10):
            ip = build_incidence(make_random_complex(rng, 9, 0.5))
            x = rng.standard_normal(ip.num_edges)
            comps = decompose(ip, LayerSignal(1, x))
            xx = float(x @ x)
            for a, b in ((comps.s_irr, comps.s_sol),
                         (comps.s_irr, comps.s_harm),
                         (comps.s_sol, comps.s_harm)):
                assert abs(a @ b) <= 1e-8 * max(xx, 1.0)
            energy = sum(comps.energies().values())
            assert abs(energy - xx) <= 1e-8 * max(xx, 1.0)

    def test_potentials_reproduce_components(self, ref_complex):
        ip = build_incidence(ref_complex)
        rng = np.random.default_rng(55)
        x = rng.standard_normal(11)
        comps = decompose(ip, LayerSignal(1, x))
        np.testing.assert_allclose(comps.s_irr, ip.b1.T.astype(float) @ comps.s0_hat,
                                   atol=1e-10)
        np.testing.assert_allclose(comps.s_sol, ip.b2.astype(float) @ comps.s2_hat,
                                   atol=1e-10)

    def test_component_calculus_identities(self):
        # Solenoidal and harmonic parts are divergence free, irrotational
        # and harmonic parts curl free.
        rng = np.random.default_rng(56)
        ip = build_incidence(make_random_complex(rng, 9, 0.55))
        x = rng.standard_normal(ip.num_edges)
        comps = decompose(ip, LayerSignal(1, x))
        assert np.abs(divergence(ip, LayerSignal(1, comps.s_sol)).values).max() <= 1e-8
        assert np.abs(divergence(ip, LayerSignal(1, comps.s_harm)).values).max() <= 1e-8
        assert np.abs(curl(ip, LayerSignal(1, comps.s_irr)).values).max() <= 1e-8
        assert np.abs(curl(ip, LayerSignal(1, comps.s_harm)).values).max() <= 1e-8

    def test_linearity(self, ref_complex):
        ip = build_incidence(ref_complex)
        rng = np.random.default_rng(57)
        x, y = rng.standard_normal((2, 11))
        a, b = 2.5, -1.25
        left = decompose(ip, LayerSignal(1, a * x + b * y))
        cx = decompose(ip, LayerSignal(1, x))
        cy = decompose(ip, LayerSignal(1, y))
        for attr in ("s_irr", "s_sol", "s_harm", "s0_hat", "s2_hat"):
            np.testing.assert_allclose(
                getattr(left, attr),
                a * getattr(cx, attr) + b * getattr(cy, attr), atol=1e-8)

    def test_disconnected_graph_handled(self):
        # Two components: the pseudoinverse absorbs the 2-dim kernel of L0.
        from hodgeflow.complexes import SimplicialComplex2
        c = SimplicialComplex2(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)],
                               [(0, 1, 2)])
        ip = build_incidence(c)
        rng = np.random.default_rng(58)
        x = rng.standard_normal(5)
        comps = decompose(ip, LayerSignal(1, x))
        np.testing.assert_allclose(comps.s_irr + comps.s_sol + comps.s_harm, x,
                                   atol=1e-12)

    def test_layer_mismatch(self, ref_complex):
        ip = build_incidence(ref_complex)
        with pytest.raises(LayerMismatch):
            decompose(ip, LayerSignal(0, np.zeros(7)))


class TestProjectComponent:
    def test_matches_decompose(self, ref_complex):
        ip = build_incidence(ref_complex)
        basis = hodge_basis(ip)
        rng = np.random.default_rng(61)
        x = LayerSignal(1, rng.standard_normal(11))
        comps = decompose(ip, x)
        np.testing.assert_allclose(project_component(basis, x, "irr").values,
                                   comps.s_irr, atol=1e-8)
        np.testing.assert_allclose(project_component(basis, x, "sol").values,
                                   comps.s_sol, atol=1e-8)
        np.testing.assert_allclose(project_component(basis, x, "harm").values,
                                   comps.s_harm, atol=1e-8)

    def test_idempotent(self, ref_complex):
        basis = hodge_basis(build_incidence(ref_complex))
        rng = np.random.default_rng(62)
        x = LayerSignal(1, rng.standard_normal(11))
        for which in ("irr", "sol", "harm", "not_irr", "not_sol"):
            once = project_component(basis, x, which)
            twice = project_component(basis, once, which)
            np.testing.assert_allclose(twice.values, once.values, atol=1e-10)

    def test_resolution_of_identity(self, ref_complex):
        basis = hodge_basis(build_incidence(ref_complex))
        rng = np.random.default_rng(63)
        x = LayerSignal(1, rng.standard_normal(11))
        total = (project_component(basis, x, "irr").values
                 + project_component(basis, x, "sol").values
                 + project_component(basis, x, "harm").values)
        np.testing.assert_allclose(total, x.values, atol=1e-10)

    def test_not_sol_kills_curl_flows(self, ref_complex):
        ip = build_incidence(ref_complex)
        basis = hodge_basis(ip)
        rng = np.random.default_rng(64)
        x = LayerSignal(1, ip.b2.astype(float) @ rng.standard_normal(3))
        assert np.abs(project_component(basis, x, "not_sol").values).max() <= 1e-10

    def test_unknown_subspace(self, ref_complex):
        basis = hodge_basis(build_incidence(ref_complex))
        with pytest.raises(ValueError):
            project_component(basis, LayerSignal(1, np.zeros(11)), "whatever")


class TestPinv:
    def test_empty_matrix(self):
        assert pinv_psd(np.zeros((0, 0))).shape == (0, 0)

    def test_matches_numpy_on_psd(self):
        rng = np.random.default_rng(65)
        a = rng.standard_normal((6, 4))
        m = a @ a.T  # rank 4 PSD
        np.testing.assert_allclose(pinv_psd(m), np.linalg.pinv(m, hermitian=True),
                                   atol=1e-10)

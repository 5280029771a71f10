import numpy as np
import pytest

from xxzql.chain import AnisotropyParams
from xxzql.errors import SpectralPointError
from xxzql.lax import (
    DerivativeLax,
    assemble,
    build_lax,
    check_boundary_transitions,
    check_commutator_defect,
    check_divergence_relation,
    derivative_lax,
    gauge_covariance_residual,
    lax_phi_derivative,
    lax_phi_second_derivative,
    phi_difference_residual,
    restricted_B,
    spin_difference_residual,
    tau_matrix,
)

P12 = AnisotropyParams(1, 2)
P13 = AnisotropyParams(1, 3)
P25 = AnisotropyParams(2, 5)


class TestBuildLax:
    def test_free_point_scalar_identity_component(self):
        # l=1, m=2, s=1/2: cos(eta sz) = cos(pi/4) on both weights
        lax = build_lax(P12, np.pi / 2, 0.5)
        np.testing.assert_allclose(lax.component("0"), np.sqrt(0.5) * np.eye(2), atol=1e-15)

    def test_dense_reassembly_block_structure(self):
        lax = build_lax(P13, 1.1, 0.3j)
        d = lax.dense()
        assert d.shape == (6, 6)
        # diagonal physical blocks: L0 +- Lz
        blk = d.reshape(3, 2, 3, 2)
        np.testing.assert_allclose(
            blk[:, 0, :, 0], lax.component("0") + lax.component("z"), atol=1e-15
        )
        np.testing.assert_allclose(
            blk[:, 1, :, 1], lax.component("0") - lax.component("z"), atol=1e-15
        )
        np.testing.assert_allclose(blk[:, 0, :, 1], lax.component("+"), atol=1e-15)
        np.testing.assert_allclose(blk[:, 1, :, 0], lax.component("-"), atol=1e-15)

    def test_ladder_components_swap_verma_ladders(self):
        from xxzql.qsl2 import build_verma

        rep = build_verma(P25, 0.4 - 0.2j)
        lax = build_lax(P25, 0.7, 0.4 - 0.2j)
        sineta = np.sin(P25.eta)
        np.testing.assert_allclose(lax.component("+"), sineta * rep.sminus, atol=1e-15)
        np.testing.assert_allclose(lax.component("-"), sineta * rep.splus, atol=1e-15)


class TestPhiDerivatives:
    @pytest.mark.parametrize("params", [P12, P13, P25])
    @pytest.mark.parametrize("phi,s", [(1.2, 0.4j), (np.pi / 2 + 0.1j, 0.25), (0.3, -0.8)])
    def test_first_derivative_matches_differencing(self, params, phi, s):
        assert phi_difference_residual(params, phi, s, delta=1e-6) < 1e-8

    def test_second_derivative_matches_differencing(self):
        phi, s = 0.9, 0.3j
        d2 = assemble(lax_phi_second_derivative(P13, phi, s))
        num = (
            build_lax(P13, phi + 1e-4, s).dense()
            - 2 * build_lax(P13, phi, s).dense()
            + build_lax(P13, phi - 1e-4, s).dense()
        ) / 1e-8
        np.testing.assert_allclose(d2, num, atol=1e-6)

    def test_derivative_kills_ladder_components(self):
        d = lax_phi_derivative(P25, 0.6, 0.1j)
        assert np.all(d[2] == 0) and np.all(d[3] == 0)


class TestDerivativeLax:
    def test_explicit_entries_m3(self):
        # l=1, m=3 at phi=pi/2: cot = 0 so L0z = 0, L1z = 0
        dl = derivative_lax(P13, np.pi / 2)
        eta = P13.eta
        np.testing.assert_allclose(dl.L0[0], np.diag([1.0, 0.5, -0.5]), atol=1e-15)
        np.testing.assert_allclose(dl.L0[1], np.zeros((3, 3)), atol=1e-15)
        np.testing.assert_allclose(
            dl.L1[0], eta * np.diag([0.0, np.sqrt(3) / 2, np.sqrt(3) / 2]), atol=1e-15
        )
        # lowering pattern: L0+ entries at (k+1, k) with -s_k
        want = np.zeros((3, 3))
        want[1, 0] = 0.0
        want[2, 1] = -np.sqrt(3) / 2
        np.testing.assert_allclose(dl.L0[2], want, atol=1e-15)

    def test_L1_minus_vanishes_everywhere(self):
        for params in (P12, P13, P25):
            dl = derivative_lax(params, 0.8 + 0.2j)
            assert np.all(dl.L1[3] == 0)

    def test_L0_is_scaled_lax_at_zero_weight(self):
        phi = 0.7 + 0.3j
        dl = derivative_lax(P25, phi)
        direct = build_lax(P25, phi, 0.0).components / np.sin(phi)
        np.testing.assert_allclose(dl.L0, direct, atol=1e-14)

    def test_L1_matches_weight_differencing_anchor(self):
        assert spin_difference_residual(P25, np.pi / 2 + 0.1j, delta=1e-5) < 1e-9

    @pytest.mark.parametrize("params,phi", [(P13, 1.0), (P12, 0.4)])
    def test_L1_matches_weight_differencing(self, params, phi):
        # O(delta^2) truncation times csc(phi) sets the scale away from pi/2
        assert spin_difference_residual(params, phi, delta=1e-5) < 5e-9

    def test_raising_annihilates_vacuum(self):
        dl = derivative_lax(P13, 1.3)
        e0 = np.array([1.0, 0, 0])
        np.testing.assert_array_equal(dl.L0[2] @ e0, np.zeros(3))

    def test_singular_spectral_point_rejected(self):
        with pytest.raises(SpectralPointError):
            derivative_lax(P13, np.pi)
        with pytest.raises(SpectralPointError):
            derivative_lax(P13, 0.0)


class TestBoundaryTransitions:
    def test_symmetric_point_passes(self):
        report = check_boundary_transitions(P13, np.pi / 2)
        assert report.passed, report.residuals

    def test_complex_phi_passes_with_nonzero_cot(self):
        report = check_boundary_transitions(AnisotropyParams(1, 4), np.pi / 2 + 0.2j)
        assert report.passed, report.residuals
        assert abs(np.cos(np.pi / 2 + 0.2j)) > 0.1

    def test_fault_injection_flags_only_plus_row(self):
        dl = derivative_lax(P13, np.pi / 2 + 0.1j)
        bad = dl.L1.copy()
        bad[2, 0, 0] += 1e-6
        tampered = DerivativeLax(params=dl.params, phi=dl.phi, L0=dl.L0, L1=bad)
        report = check_boundary_transitions(P13, dl.phi, dlax=tampered)
        assert not report.passed
        assert report.failing == ["row_plus_vanishes"]


class TestDivergenceRelation:
    @pytest.mark.parametrize(
        "params,phi,s",
        [
            (P12, 1.2, 0.4j),
            (P13, np.pi / 2, 0.0),
            (P13, 0.9 + 0.3j, 0.25 + 0.5j),
            (P25, 1.7, -0.3),
        ],
    )
    def test_two_site_divergence(self, params, phi, s):
        assert check_divergence_relation(params, phi, s) < 1e-11

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_open_chain_commutator_defect(self, n):
        assert check_commutator_defect(P13, 0.8 + 0.2j, 0.3j, n) < 1e-10

    def test_tau_at_symmetric_point_is_z_only(self):
        tau = tau_matrix(P13, np.pi / 2, 0.4j)
        want = -2 * np.sin(P13.eta) * np.sin(P13.eta * 0.4j) * np.diag([1.0, -1.0])
        np.testing.assert_allclose(tau, want, atol=1e-15)


class TestRestrictedB:
    def test_m2_blocks(self):
        b = restricted_B(P12)
        np.testing.assert_array_equal(b.B0, np.array([[0.0]]))
        np.testing.assert_array_equal(b.Bz, np.array([[-1.0]]))
        assert b.Bplus.shape == (1, 1) and np.all(b.Bplus == 0)
        assert np.all(b.Bminus == 0)

    def test_m3_diagonal(self):
        b = restricted_B(P13)
        np.testing.assert_allclose(b.B0, np.diag([0.5, -0.5]), atol=1e-15)

    @pytest.mark.parametrize("phi", [np.pi / 2, np.pi / 2 + 0.3j])
    @pytest.mark.parametrize("params", [P13, P25, AnisotropyParams(1, 4)])
    def test_phi_independence_against_L0(self, params, phi):
        b = restricted_B(params)
        dl = derivative_lax(params, phi)
        cot = np.cos(phi) / np.sin(phi)
        csc = 1.0 / np.sin(phi)
        np.testing.assert_allclose(dl.L0[0][1:, 1:], b.B0, atol=1e-12)
        np.testing.assert_allclose(dl.L0[1][1:, 1:], cot * b.Bz, atol=1e-12)
        np.testing.assert_allclose(dl.L0[2][1:, 1:], csc * b.Bplus, atol=1e-12)
        np.testing.assert_allclose(dl.L0[3][1:, 1:], csc * b.Bminus, atol=1e-12)


class TestGaugeCovariance:
    @pytest.mark.parametrize("theta", [0.3, -1.1, np.pi])
    @pytest.mark.parametrize("params,phi,s", [(P13, 1.2, 0.3j), (P25, 0.8 + 0.1j, 0.5)])
    def test_auxiliary_twist_equals_physical_rotation(self, params, phi, s, theta):
        assert gauge_covariance_residual(params, phi, s, theta) < 1e-12

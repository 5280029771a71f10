"""Acceptance checklist: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -s` to see the verdict lines as the
suite progresses.  Every criterion computes its residuals first and asserts at
the very end, so a failing criterion still reports its single line.
"""

import numpy as np
import pytest

from xxzql import (
    AnisotropyParams,
    BoundarySpec,
    build_hamiltonian,
    hs_norm,
    spin_current,
)
from xxzql.drude import (
    drude_bound_DK,
    finite_n_mazur,
    fredholm_lhs,
    mazur_bound_functional,
    monomial_integrals_Ik,
    monomial_quadrature,
    current_expansion,
    time_average,
)
from xxzql.lindblad import (
    CASES,
    LindbladSetup,
    defining_relation_residual,
    lindblad_apply,
    steady_state,
)
from xxzql.reduced import (
    bilinear_inner,
    contraction_certificate,
    density_norm_sq,
    kappa_r,
    kernel_K,
    kernel_closed_form,
    kernel_series,
    psi_explicit,
    psi_solve,
    remainder_norm_sq,
    strip_boundary_bisection,
)
from xxzql.transfer import (
    build_transfer,
    density_q,
    lemma1_reconstruction,
    open_reconstruction,
    remainder_p,
    spin_inversion_check,
    symmetry_relation_check,
)

P12 = AnisotropyParams(1, 2)
P13 = AnisotropyParams(1, 3)
P14 = AnisotropyParams(1, 4)


def verdict(num: int, label: str, ok: bool) -> None:
    print(f"criterion {num:02d} [{'PASS' if ok else 'FAIL'}] {label}")
    assert ok, f"criterion {num:02d} failed: {label}"


def strip_grid(params: AnisotropyParams) -> np.ndarray:
    """3 x 3 complex grid strictly inside the regularity strip."""
    half = np.pi / (2 * params.m)
    res = np.pi / 2 + 0.8 * half * np.array([-1.0, 0.0, 1.0])
    ims = np.array([-0.3, 0.0, 0.3])
    return (res[:, None] + 1j * ims[None, :]).ravel()


def rel_comm_residual(h: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.norm(h @ y - y @ h) / np.linalg.norm(y))


def test_criterion_01_conservation():
    worst = 0.0
    for params in (P12, P13):
        for n in (4, 6, 8):
            h_pbc = build_hamiltonian(params, n, "periodic")
            twisted = {f: build_hamiltonian(params, n, BoundarySpec("twisted", f))
                       for f in (0.7, np.pi / 2)}
            for phi in strip_grid(params):
                y = build_transfer("Y", params, phi, n).matrix
                worst = max(worst, rel_comm_residual(h_pbc, y))
                for flux, h_tw in twisted.items():
                    yt = build_transfer("Y_twisted", params, phi, n, flux=flux).matrix
                    worst = max(worst, rel_comm_residual(h_tw, yt))
    verdict(1, f"commutation residual {worst:.2e} < 1e-10", worst < 1e-10)


def test_criterion_02_reconstruction():
    worst = 0.0
    for params, phi in ((P12, 1.4 + 0.2j), (P13, np.pi / 2 + 0.1j)):
        for n in (4, 5, 6):
            worst = max(worst, lemma1_reconstruction(params, phi, n))
        for n in (4, 6):
            worst = max(worst, open_reconstruction(params, phi, n))
    verdict(2, f"reconstruction residual {worst:.2e} < 1e-10", worst < 1e-10)


def test_criterion_03_reduced_matches_dense():
    combos = [(P13, 0.9, 1.2 + 0.1j), (P13, np.pi / 2, np.pi / 2 - 0.2j),
              (P12, 1.4, 1.3 + 0.2j), (P14, 1.5, 1.65)]
    worst = 0.0
    for params, phi, phi2 in combos:
        for r in range(2, 9):
            dense = bilinear_inner(density_q(params, phi, r).matrix,
                                   density_q(params, phi2, r).matrix)
            closed = kappa_r(params, phi, phi2, r)
            worst = max(worst, abs(dense - closed) / max(abs(dense), 1e-30))
        for n in range(2, 9):
            dense = hs_norm(remainder_p(params, phi, n).matrix) ** 2
            closed = remainder_norm_sq(params, phi, n)
            worst = max(worst, abs(dense - closed) / max(abs(dense), 1e-30))
    anchors = (abs(kappa_r(P13, np.pi / 2, np.pi / 2, 2) - 0.25) < 1e-14
               and abs(kappa_r(P13, np.pi / 2, np.pi / 2, 3) - 1 / 16) < 1e-14
               and abs(kappa_r(P13, np.pi / 2, np.pi / 2, 4) - 13 / 256) < 1e-14)
    verdict(3, f"reduced-route rel err {worst:.2e} < 1e-10, anchors exact",
            worst < 1e-10 and anchors)


def test_criterion_04_contraction_certificate():
    cert = contraction_certificate(P13, np.pi / 2)
    ok_tau = abs(cert.tau1 - 0.625) < 1e-12
    ok_xi = abs(cert.xi - 0.2350018146228678) < 1e-6
    ok_edge = True
    for params in (P12, P13):
        edge = strip_boundary_bisection(params, tol=1e-9)
        ok_edge = ok_edge and abs(edge - np.pi / (2 * params.m)) < 1e-6
    verdict(4, "tau1 = 0.625, xi anchor, contraction edge at strip boundary",
            ok_tau and ok_xi and ok_edge)


def test_criterion_05_kernel_routes_agree():
    ok_anchor = (abs(kernel_K(P12, np.pi / 2, np.pi / 2) - 0.25) < 1e-12
                 and abs(kernel_K(P13, np.pi / 2, np.pi / 2) - 4.0 / 9.0) < 1e-12)
    rng = np.random.default_rng(7)
    worst = 0.0
    for params in (P12, P13):
        half = np.pi / (2 * params.m)
        for _ in range(10):
            a = np.pi / 2 + 0.8 * half * rng.uniform(-1, 1) + 0.2j * rng.uniform(-1, 1)
            b = np.pi / 2 + 0.8 * half * rng.uniform(-1, 1) + 0.2j * rng.uniform(-1, 1)
            solve = kernel_K(params, a, b)
            worst = max(worst, abs(kernel_closed_form(params, a, b) - solve))
            worst = max(worst, abs(kernel_series(params, a, b) - solve))
            worst = max(worst, float(np.max(np.abs(
                psi_explicit(params, a, b) - psi_solve(params, a, b)))))
    verdict(5, f"kernel anchors exact, route spread {worst:.2e} < 1e-10",
            ok_anchor and worst < 1e-10)


def test_criterion_06_fredholm_identity():
    samples = [np.pi / 2 + 0.0j, np.pi / 2 + 0.4j, np.pi / 2 + 0.15 - 0.3j, np.pi / 2 - 0.15 + 0.8j]
    worst_dev = 0.0
    worst_gap = 0.0
    for params in (P12, P13):
        for phi in samples:
            lens = fredholm_lhs(params, phi, backend="lens")
            strip = fredholm_lhs(params, phi, backend="strip")
            worst_dev = max(worst_dev, abs(lens + 0.25j))
            worst_gap = max(worst_gap, abs(lens - strip))
    verdict(6, f"integral identity dev {worst_dev:.2e} < 1e-5, backends within {worst_gap:.2e}",
            worst_dev < 1e-5 and worst_gap < 1e-6)


def test_criterion_07_drude_constants():
    anchors = {2: 1.0, 3: 1.0 - 3.0 * np.sqrt(3.0) / (4.0 * np.pi), 4: 1.0 - 2.0 / np.pi}
    ok = True
    worst = 0.0
    for m, want in anchors.items():
        params = AnisotropyParams(1, m)
        dk = drude_bound_DK(params)
        ok = ok and abs(dk - want) < 1e-12
        func = mazur_bound_functional(params).functional
        worst = max(worst, abs(func - dk / 4.0))
    verdict(7, f"D_K anchors exact, functional dev {worst:.2e} < 1e-5", ok and worst < 1e-5)


def test_criterion_08_free_point_time_average():
    ok = True
    for n in (4, 6, 8, 10):
        current = spin_current(n)
        result = time_average(build_hamiltonian(P12, n, "periodic"), current)
        dist = hs_norm(result.abar - current)
        ok = ok and dist < 1e-12 and abs(result.susceptibility - 0.25) < 1e-12
    expansion = current_expansion(P12, 8)
    tail = max((abs(v) for (r, _), v in expansion.coefficients.items() if r > 2), default=0.0)
    verdict(8, "free-point time average is the current itself, higher orders vanish",
            ok and tail < 1e-12)


@pytest.mark.xfail(strict=True, reason="published anchor uses a normalization off by "
                   "-1/2 from the one fixed by the unit-disk case")
def test_criterion_08_published_anchor():
    assert abs(current_expansion(P12, 2).a2 - 1j) < 1e-6


def test_criterion_09_finite_size_bounds():
    grids = [[np.pi / 2 + 1j * v for v in offs]
             for offs in ([0.0], [0.0, 0.6, -0.6], [0.0, 0.6, -0.6, 0.3, -0.3],
                          [0.0, 0.6, -0.6, 0.3, -0.3, 0.9, -0.9])]
    ok = True
    for n in (6, 8):
        current = spin_current(n)
        d_n = time_average(build_hamiltonian(P13, n, "periodic"), current).susceptibility
        bounds = [finite_n_mazur(P13, n, g, current).bound for g in grids]
        ok = ok and all(b <= d_n + 1e-9 for b in bounds)
        ok = ok and all(bounds[i + 1] >= bounds[i] - 1e-12 for i in range(len(bounds) - 1))
    verdict(9, "variational bounds below susceptibility, nondecreasing under refinement", ok)


def _superoperator(setup: LindbladSetup) -> np.ndarray:
    # independent route: column j is the generator applied to the j-th basis matrix
    dim = 2**setup.n
    gen = np.zeros((dim * dim, dim * dim), dtype=complex)
    basis = np.zeros((dim, dim), dtype=complex)
    for j in range(dim * dim):
        basis.flat[j] = 1.0
        gen[:, j] = lindblad_apply(setup, basis).ravel()
        basis.flat[j] = 0.0
    return gen


def _kernel_state(gen: np.ndarray, dim: int) -> np.ndarray:
    _, svals, vh = np.linalg.svd(gen)
    assert svals[-1] < 1e-10 * svals[0]
    rho = vh[-1].conj().reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho)


def _fidelity(a: np.ndarray, b: np.ndarray) -> float:
    evals, evecs = np.linalg.eigh(a)
    sqrt_a = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    inner = sqrt_a @ b @ sqrt_a
    return float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None)) ) ** 2)


def test_criterion_10_steady_state_identities():
    worst = 0.0
    for n in (2, 3, 4):
        for eps in (0.5, 1.0):
            setup = LindbladSetup(P13, n, eps)
            for case in CASES:
                fac = steady_state(setup, case)
                worst = max(worst, defining_relation_residual(setup, case))
                worst = max(worst, float(np.linalg.norm(lindblad_apply(setup, fac.rho))))
    worst_fid = 0.0
    for n in (2, 3):
        setup = LindbladSetup(P13, n, 1.0)
        oracle = _kernel_state(_superoperator(setup), 2**setup.n)
        for case in CASES:
            fid = _fidelity(oracle, steady_state(setup, case).rho)
            worst_fid = max(worst_fid, 1.0 - fid)
    verdict(10, f"steady-state residuals {worst:.2e} < 1e-9, infidelity {worst_fid:.2e} < 1e-10",
            worst < 1e-9 and worst_fid < 1e-10)


def test_criterion_11_inversion_and_shift_identities():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(5):
        phi = np.pi / 2 + 0.3 * rng.uniform(-1, 1) + 0.3j * rng.uniform(-1, 1)
        s = rng.uniform(0.3, 1.5) + 1j * rng.uniform(-0.5, 0.5)
        for params in (P12, P13):
            for n in (2, 3, 4):
                worst = max(worst, spin_inversion_check(params, phi, s, n))
                worst = max(worst, symmetry_relation_check(params, s, n))
    verdict(11, f"inversion and half-period shift residual {worst:.2e} < 1e-9", worst < 1e-9)


def test_criterion_12_monomial_integrals():
    worst = 0.0
    for m in (3, 5, 7):
        params = AnisotropyParams(1, m)
        closed = monomial_integrals_Ik(params, 4)
        for k in range(5):
            quad = monomial_quadrature(params, k)
            worst = max(worst, abs(closed[k] - quad))
    verdict(12, f"closed-form moments match quadrature to {worst:.2e} < 1e-6", worst < 1e-6)


@pytest.mark.xfail(strict=True, reason="published anchor uses a normalization off by "
                   "-1/2 from the one fixed by the unit-disk case")
def test_criterion_12_published_anchor():
    assert abs(monomial_integrals_Ik(P13, 0)[0] - 0.586503j) < 1e-5


def test_criterion_13_gauge_norms():
    worst_q = 0.0
    for params in (P12, P13):
        for theta in (0.7, np.pi / 2):
            for r in (2, 3, 4, 5):
                plain = hs_norm(density_q(params, np.pi / 2 + 0.1j, r).matrix)
                gauged = hs_norm(density_q(params, np.pi / 2 + 0.1j, r,
                                           flux_per_site=theta / 6).matrix)
                worst_q = max(worst_q, abs(plain - gauged))
    diffs = []
    for n in (4, 6, 8):
        yt = build_transfer("Y_twisted", P13, np.pi / 2, n, flux=0.7).matrix
        y0 = build_transfer("Y", P13, np.pi / 2, n).matrix
        diffs.append(hs_norm(yt) - hs_norm(y0))
    mono = diffs[0] > diffs[1] > diffs[2] > 0.0
    verdict(13, f"gauged density norms equal ({worst_q:.2e}), twist gap shrinks with n",
            worst_q < 1e-12 and mono)

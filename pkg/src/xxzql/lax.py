"""Lax operator on auxiliary (x) physical space, with spectral and weight derivatives.

Component convention throughout: stacks of shape (4, d, d) indexed in the
order (0, z, +, -), paired with (identity, sigma_z, sigma_plus, sigma_minus)
on the physical leg.  The sigma_+ coefficient carries the auxiliary lowering
operator and vice versa; that index swap is deliberate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import SIGMA_0, SIGMA_Z, AnisotropyParams
from .errors import SpectralPointError
from .mpo import COMPONENT_ORDER, PAULI_STACK
from .qsl2 import build_verma


def _sin(phi: complex) -> complex:
    return complex(np.sin(complex(phi)))


def _require_regular(phi: complex) -> complex:
    phi = complex(phi)
    if abs(_sin(phi)) < 1e-12:
        raise SpectralPointError(f"spectral parameter {phi!r} is too close to pi*Z")
    return phi


def assemble(components: np.ndarray) -> np.ndarray:
    """sum_a comp[a] (x) sigma[a] as a dense matrix, auxiliary leg leftmost."""
    d = components.shape[1]
    out = np.einsum("axy,aij->xiyj", components, PAULI_STACK)
    return np.ascontiguousarray(out.reshape(2 * d, 2 * d))


@dataclass(frozen=True)
class LaxFamily:
    """L(phi, s) split into Pauli components on the m-dimensional auxiliary space."""

    params: AnisotropyParams
    phi: complex
    s: complex
    components: np.ndarray = field(repr=False)

    def component(self, name: str) -> np.ndarray:
        return self.components[COMPONENT_ORDER.index(name)]

    def dense(self) -> np.ndarray:
        return assemble(self.components)


def build_lax(params: AnisotropyParams, phi: complex, s: complex) -> LaxFamily:
    """L^0 = sin(phi) cos(eta sz); L^z = cos(phi) sin(eta sz); L^+- = sin(eta) s-+."""
    phi, s = complex(phi), complex(s)
    rep = build_verma(params, s)
    eta = params.eta
    weights = np.diag(rep.sz)
    comps = np.stack(
        [
            np.diag(np.sin(phi) * np.cos(eta * weights)),
            np.diag(np.cos(phi) * np.sin(eta * weights)),
            np.sin(eta) * rep.sminus,
            np.sin(eta) * rep.splus,
        ]
    )
    return LaxFamily(params=params, phi=phi, s=s, components=comps)


def lax_phi_derivative(params: AnisotropyParams, phi: complex, s: complex) -> np.ndarray:
    """Analytic d/dphi of the component stack; only the diagonal pair responds."""
    phi, s = complex(phi), complex(s)
    m = params.m
    eta = params.eta
    weights = complex(s) - np.arange(m)
    zero = np.zeros((m, m), dtype=complex)
    return np.stack(
        [
            np.diag(np.cos(phi) * np.cos(eta * weights)),
            np.diag(-np.sin(phi) * np.sin(eta * weights)),
            zero,
            zero,
        ]
    )


def lax_phi_second_derivative(params: AnisotropyParams, phi: complex, s: complex) -> np.ndarray:
    """d^2/dphi^2 of the stack: the diagonal pair flips sign, ladder parts stay zero."""
    comps = build_lax(params, phi, s).components.copy()
    comps[0] *= -1
    comps[1] *= -1
    comps[2:] = 0
    return comps


@dataclass(frozen=True)
class DerivativeLax:
    """L0 = csc(phi) L(phi, 0) and L1 = csc(phi) d/ds L(phi, s)|_{s=0}."""

    params: AnisotropyParams
    phi: complex
    L0: np.ndarray = field(repr=False)
    L1: np.ndarray = field(repr=False)

    def extended(self) -> np.ndarray:
        """Stack on auxiliary (x) two-state bookkeeping space: L0*1_b + L1*splus_b.

        A product of extended stacks sandwiched between <*,0| and |*,1> picks
        up exactly one L1 factor.
        """
        sp = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        eye = np.eye(2, dtype=complex)
        return np.stack([np.kron(a, eye) + np.kron(b, sp) for a, b in zip(self.L0, self.L1)])


def derivative_lax(params: AnisotropyParams, phi: complex) -> DerivativeLax:
    """Explicit entries of the weight-derivative pair at s = 0.

    L0^0 = diag(c_k)                 L1^0 = eta diag(s_k)
    L0^z = -cot(phi) diag(s_k)       L1^z = eta cot(phi) diag(c_k)
    L0^+ = -csc(phi) s_k |k+1><k|    L1^+ = 2 eta csc(phi) c_k |k+1><k|
    L0^- = csc(phi) s_{k+1} |k><k+1| L1^- = 0
    """
    phi = _require_regular(phi)
    m = params.m
    eta = params.eta
    k = np.arange(m)
    ck = params.cos_k(k).astype(complex)
    sk = params.sin_k(k).astype(complex)
    cot = np.cos(phi) / np.sin(phi)
    csc = 1.0 / np.sin(phi)

    lower = np.zeros((m, m), dtype=complex)  # |k+1><k| pattern
    upper = np.zeros((m, m), dtype=complex)  # |k><k+1| pattern
    for j in range(m - 1):
        lower[j + 1, j] = 1.0
        upper[j, j + 1] = 1.0

    L0 = np.stack(
        [
            np.diag(ck),
            -cot * np.diag(sk),
            -csc * (lower * sk[np.newaxis, :]),
            csc * _shifted_upper(sk, m),
        ]
    )
    L1 = np.stack(
        [
            eta * np.diag(sk),
            eta * cot * np.diag(ck),
            2 * eta * csc * (lower * ck[np.newaxis, :]),
            np.zeros((m, m), dtype=complex),
        ]
    )
    return DerivativeLax(params=params, phi=phi, L0=L0, L1=L1)


def _shifted_upper(sk: np.ndarray, m: int) -> np.ndarray:
    """Matrix with s_{k+1} at (k, k+1)."""
    out = np.zeros((m, m), dtype=complex)
    for j in range(m - 1):
        out[j, j + 1] = sk[j + 1]
    return out


@dataclass(frozen=True)
class BoundaryReport:
    """Residuals of the six boundary transition identities of the extended stack."""

    passed: bool
    tol: float
    residuals: dict[str, float]

    @property
    def failing(self) -> list[str]:
        return [name for name, r in self.residuals.items() if not r < self.tol]


def check_boundary_transitions(params: AnisotropyParams, phi: complex, tol: float = 1e-12,
                               dlax: DerivativeLax | None = None) -> BoundaryReport:
    """Verify the transition identities that make the telescoped sums local.

    With |a, b> labelling auxiliary (x) bookkeeping basis states:
      <0,0| Lt^0 = <0,0|        <0,0| Lt^+ = 0
      Lt^0 |0,1> = |0,1>        Lt^- |0,1> = 0
      Lt^z |0,1> = eta cot(phi) |0,0>
      Lt^a |0,0> = 0 for a in {z, +, -}
    """
    if dlax is None:
        dlax = derivative_lax(params, phi)
    ext = dlax.extended()
    dim = ext.shape[1]
    e00 = np.zeros(dim, dtype=complex)
    e00[0] = 1.0
    e01 = np.zeros(dim, dtype=complex)
    e01[1] = 1.0
    eta = params.eta
    cot = np.cos(dlax.phi) / np.sin(dlax.phi)

    comp = {name: ext[i] for i, name in enumerate(COMPONENT_ORDER)}
    residuals = {
        "row_identity_0": float(np.max(np.abs(e00 @ comp["0"] - e00))),
        "row_plus_vanishes": float(np.max(np.abs(e00 @ comp["+"]))),
        "ket_identity_0": float(np.max(np.abs(comp["0"] @ e01 - e01))),
        "ket_minus_vanishes": float(np.max(np.abs(comp["-"] @ e01))),
        "ket_z_cot": float(np.max(np.abs(comp["z"] @ e01 - eta * cot * e00))),
        "vacuum_annihilated": float(
            max(np.max(np.abs(comp[a] @ e00)) for a in ("z", "+", "-"))
        ),
    }
    passed = all(r < tol for r in residuals.values())
    return BoundaryReport(passed=passed, tol=tol, residuals=residuals)


def _two_site(dense_left: np.ndarray, dense_right: np.ndarray, m: int) -> np.ndarray:
    """Auxiliary-ordered product acting on two physical sites: dim 4m."""
    a = dense_left.reshape(m, 2, m, 2)
    b = dense_right.reshape(m, 2, m, 2)
    out = np.einsum("ciek,ejfl->cijfkl", a, b)
    return out.reshape(4 * m, 4 * m)


def check_divergence_relation(params: AnisotropyParams, phi: complex, s: complex) -> float:
    """Max-entry residual of [h, L (x)_p L] = 2 sin(eta) (L (x)_p Lphi - Lphi (x)_p L)."""
    from .chain import two_site_coupling

    m = params.m
    lax = build_lax(params, phi, s)
    ld = lax.dense()
    lphi = assemble(lax_phi_derivative(params, phi, s))
    h2 = np.kron(np.eye(m), two_site_coupling(params))
    lhs = h2 @ _two_site(ld, ld, m) - _two_site(ld, ld, m) @ h2
    rhs = 2 * np.sin(params.eta) * (_two_site(ld, lphi, m) - _two_site(lphi, ld, m))
    return float(np.max(np.abs(lhs - rhs)))


def tau_matrix(params: AnisotropyParams, phi: complex, s: complex) -> np.ndarray:
    """Boundary defect tau = 2 sin(eta) [cos(phi)cos(eta s) 1 - sin(phi)sin(eta s) sigma_z]."""
    phi, s = complex(phi), complex(s)
    eta = params.eta
    return 2 * np.sin(eta) * (
        np.cos(phi) * np.cos(eta * s) * SIGMA_0.astype(complex)
        - np.sin(phi) * np.sin(eta * s) * SIGMA_Z.astype(complex)
    )


def check_commutator_defect(params: AnisotropyParams, phi: complex, s: complex, n: int) -> float:
    """Residual of [H_open, W_n] = -tau (x) W_{n-1} + W_{n-1} (x) tau."""
    from .chain import build_hamiltonian
    from .mpo import braket_product, uniform_sites

    comps = build_lax(params, phi, s).components
    e0 = np.zeros(params.m)
    e0[0] = 1.0
    w_n = braket_product(uniform_sites(comps, n), e0, e0)
    w_prev = braket_product(uniform_sites(comps, n - 1), e0, e0)
    tau = tau_matrix(params, phi, s)
    ham = build_hamiltonian(params, n, "open")
    lhs = ham @ w_n - w_n @ ham
    rhs = -np.kron(tau, w_prev) + np.kron(w_prev, tau)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class RestrictedB:
    """phi-independent component matrices on the span of |1>..|m-1>."""

    params: AnisotropyParams
    B0: np.ndarray = field(repr=False)
    Bz: np.ndarray = field(repr=False)
    Bplus: np.ndarray = field(repr=False)
    Bminus: np.ndarray = field(repr=False)

    def stack(self) -> np.ndarray:
        return np.stack([self.B0, self.Bz, self.Bplus, self.Bminus])


def restricted_B(params: AnisotropyParams) -> RestrictedB:
    """Read the reduced-space blocks off the L0 entries.

    B^0 = diag(c_k), B^z = -diag(s_k), B^+ = -s_k |k+1><k|, B^- = s_{k+1}|k><k+1|,
    all for k = 1..m-1.  The cot/csc prefactors of L0 are divided out, so the
    blocks carry no phi dependence.
    """
    m = params.m
    r = m - 1
    k = np.arange(1, m)
    b0 = np.diag(params.cos_k(k).astype(complex))
    bz = -np.diag(params.sin_k(k).astype(complex))
    bplus = np.zeros((r, r), dtype=complex)
    bminus = np.zeros((r, r), dtype=complex)
    for j in range(1, m - 1):
        bplus[j, j - 1] = -params.sin_k(j)
        bminus[j - 1, j] = params.sin_k(j + 1)
    return RestrictedB(params=params, B0=b0, Bz=bz, Bplus=bplus, Bminus=bminus)


def gauge_covariance_residual(params: AnisotropyParams, phi: complex, s: complex, theta: float) -> float:
    """Auxiliary twist equals a physical-leg phase rotation.

    (g^-1 (x) 1) L (g (x) 1) = (1 (x) d) L (1 (x) d^-1), d = diag(e^{-i t/2}, e^{i t/2}).
    """
    from .qsl2 import gauge_matrix

    ld = build_lax(params, phi, s).dense()
    m = params.m
    g = gauge_matrix(params, theta).matrix
    left = np.kron(np.linalg.inv(g), np.eye(2)) @ ld @ np.kron(g, np.eye(2))
    d = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    right = np.kron(np.eye(m), d) @ ld @ np.kron(np.eye(m), np.linalg.inv(d))
    return float(np.max(np.abs(left - right)))


def phi_difference_residual(params: AnisotropyParams, phi: complex, s: complex,
                            delta: float = 1e-6) -> float:
    """Central-difference cross-check of the analytic phi derivative."""
    plus = build_lax(params, phi + delta, s).components
    minus = build_lax(params, phi - delta, s).components
    numeric = (plus - minus) / (2 * delta)
    return float(np.max(np.abs(numeric - lax_phi_derivative(params, phi, s))))


def spin_difference_residual(params: AnisotropyParams, phi: complex,
                             delta: float = 1e-5) -> float:
    """Central-difference cross-check of L1 against the analytic entries."""
    phi = _require_regular(phi)
    csc = 1.0 / np.sin(phi)
    plus = build_lax(params, phi, +delta).components
    minus = build_lax(params, phi, -delta).components
    numeric = csc * (plus - minus) / (2 * delta)
    return float(np.max(np.abs(numeric - derivative_lax(params, phi).L1)))

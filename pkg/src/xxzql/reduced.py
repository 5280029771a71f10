"""Quasilocality certification on the reduced auxiliary space.

The Hilbert-Schmidt data of the local densities and remainders close on a
small (m-1)-dimensional space: a symmetric transfer matrix T(phi, phi') plus
a lower-bidiagonal vertex matrix V.  Powers of T give density overlaps
kappa_r, the leading eigenvalue of T(conj phi, phi) gives the decay rate xi,
and the resolvent of T gives the inner-product kernel K.

Remainder norms need the full doubled walk space: the printed reduction of
the pair trace to the diagonal subspace drops the quotient block, which is
nonzero for m >= 3, so remainder_norm_sq works on the (m-1)^2 pair space
restricted to indices k, k' >= 1 (state 0 is never visited by these walks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import AnisotropyParams, site_count
from .errors import AccuracyError, ConfigError, DomainError, SpectralPointError
from .lax import derivative_lax
from .transfer import modified_prefactor

# Pauli pairing weights per component (0, z, +, -) in the bilinear trace
_PAIR_WEIGHTS = np.array([1.0, 1.0, 0.5, 0.5])


def bilinear_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Unconjugated pairing 2^-n tr(a^T b); adjoints pair conjugated arguments."""
    n = site_count(a)
    if b.shape != a.shape:
        raise ConfigError("operands must share the same chain length")
    return complex(np.sum(a * b) / 2**n)


def _require_regular(phi: complex) -> complex:
    phi = complex(phi)
    if abs(np.sin(phi)) < 1e-12:
        raise SpectralPointError(f"sin(phi) vanishes at phi={phi}")
    return phi


@dataclass(frozen=True)
class ReducedTransferMatrix:
    params: AnisotropyParams
    phi: complex
    phi_prime: complex
    T: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)


def build_T_V(
    params: AnisotropyParams, phi: complex, phi_prime: complex
) -> ReducedTransferMatrix:
    """Closed-form T and V on the reduced space k = 1..m-1.

    T is symmetric by construction; the absolute values in the off-diagonal
    weights come from the basis rescaling by diag(|s_k|).
    """
    phi = _require_regular(phi)
    phi_prime = _require_regular(phi_prime)
    m = params.m
    ck = np.array([params.cos_k(k) for k in range(1, m)])
    sk = np.array([params.sin_k(k) for k in range(1, m)])
    cotcot = (np.cos(phi) / np.sin(phi)) * (np.cos(phi_prime) / np.sin(phi_prime))
    sinsin = np.sin(phi) * np.sin(phi_prime)
    eta = params.eta

    T = np.diag(ck**2 + cotcot * sk**2).astype(complex)
    V = np.diag(eta**2 * (sk**2 + cotcot * ck**2)).astype(complex)
    for k in range(m - 2):
        hop = abs(sk[k] * sk[k + 1]) / (2 * sinsin)
        T[k, k + 1] += hop
        T[k + 1, k] += hop
        V[k + 1, k] += 2 * eta**2 * ck[k] ** 2 * abs(sk[k + 1]) / (abs(sk[k]) * sinsin)
    return ReducedTransferMatrix(params=params, phi=phi, phi_prime=phi_prime, T=T, V=V)


def doubled_matrices(
    params: AnisotropyParams, phi: complex, phi_prime: complex
) -> tuple[np.ndarray, np.ndarray]:
    """Pair-space walk matrices on indices k, k' >= 1, shape (m-1)^2.

    Left factors evaluate at phi, right at phi_prime.  Walks from k >= 1
    cannot reach index 0 (the only downward move has an empty first row), so
    the restriction is exact.
    """
    a = derivative_lax(params, _require_regular(phi))
    b = derivative_lax(params, _require_regular(phi_prime))
    tt = sum(
        w * np.kron(a.L0[i, 1:, 1:], b.L0[i, 1:, 1:])
        for i, w in enumerate(_PAIR_WEIGHTS)
    )
    vv = sum(
        w * np.kron(a.L1[i, 1:, 1:], b.L1[i, 1:, 1:])
        for i, w in enumerate(_PAIR_WEIGHTS)
    )
    return tt, vv


def diagonal_projection(params: AnisotropyParams, phi: complex, phi_prime: complex) -> np.ndarray:
    """Independent route to T: rescale the diagonal block of the pair matrix."""
    tt, _ = doubled_matrices(params, phi, phi_prime)
    m = params.m
    d = m - 1
    idx = [k * d + k for k in range(d)]
    block = tt[np.ix_(idx, idx)]
    scale = np.array([abs(params.sin_k(k)) for k in range(1, m)])
    return scale[:, None] * block / scale[None, :]


def kappa_r(params: AnisotropyParams, phi: complex, phi_prime: complex, r: int) -> complex:
    """Density overlap 2^-r tr(q_r^T(phi) q_r(phi')) = <1| T^(r-2) |1> / 4."""
    if r < 2:
        raise ConfigError("density support must be at least 2 sites")
    T = build_T_V(params, phi, phi_prime).T
    v = np.zeros(params.m - 1, dtype=complex)
    v[0] = 1.0
    for _ in range(r - 2):
        v = T @ v
    return complex(v[0] / 4)


def density_norm_sq(params: AnisotropyParams, phi: complex, r: int) -> float:
    val = kappa_r(params, np.conj(complex(phi)), phi, r)
    return float(val.real)


def remainder_norm_sq(params: AnisotropyParams, phi: complex, n: int) -> float:
    """||p_n||^2 from the restricted pair-space trace, prefactor included."""
    if n < 2:
        raise ConfigError("need at least 2 sites")
    phi = complex(phi)
    tt, vv = doubled_matrices(params, np.conj(phi), phi)
    acc = vv
    for _ in range(n - 1):
        acc = tt @ acc
    pref = abs(modified_prefactor(params, phi)) ** 2
    return float((pref * np.trace(acc)).real)


def diagonal_remainder_form(params: AnisotropyParams, phi: complex, n: int) -> float:
    """Diagonal-subspace reduction tr{T^(n-1) V} of the remainder norm.

    Kept for comparison only: it agrees with remainder_norm_sq (up to the
    prefactor) exactly at m = 2 and undercounts the walk space for m >= 3.
    """
    red = build_T_V(params, np.conj(complex(phi)), phi)
    acc = red.V
    for _ in range(n - 1):
        acc = red.T @ acc
    pref = abs(modified_prefactor(params, phi)) ** 2
    return float((pref * np.trace(acc)).real)


def norms(params: AnisotropyParams, phi: complex, k: int) -> dict[str, float]:
    """Closed-form squared norms of the k-site density and the k-site remainder."""
    return {
        "density_sq": density_norm_sq(params, phi, k),
        "remainder_sq": remainder_norm_sq(params, phi, k),
    }


# ---------------------------------------------------------------------------
# contraction certificate


@dataclass(frozen=True)
class QuasilocalityCertificate:
    params: AnisotropyParams
    phi: complex
    tau1: float
    xi: float
    gamma: float
    gamma_prime: float
    in_domain: bool


def _self_paired_T(params: AnisotropyParams, phi: complex) -> np.ndarray:
    T = build_T_V(params, np.conj(complex(phi)), phi).T
    if np.max(np.abs(T.imag)) > 1e-12:
        raise AccuracyError("self-paired transfer matrix should be real", achieved=float(np.max(np.abs(T.imag))))
    return T.real


def in_strip(params: AnisotropyParams, phi: complex) -> bool:
    # strict membership with a safety margin; the boundary itself is excluded
    return abs(complex(phi).real - np.pi / 2) < np.pi / (2 * params.m) - 1e-12


def contraction_certificate(params: AnisotropyParams, phi: complex) -> QuasilocalityCertificate:
    """Leading eigenvalue, decay rate and fitted prefactors at one spectral point.

    Out-of-strip points are allowed and reported with in_domain=False; the
    degenerate free point (m=2, phi=pi/2) has tau1 = 0 and reports xi=inf
    with gamma=inf (no finite geometric envelope covers the r=2 density).
    """
    phi = _require_regular(phi)
    T = _self_paired_T(params, phi)
    tau1 = float(np.max(np.abs(np.linalg.eigvalsh(T))))
    domain = in_strip(params, phi)
    # cot(pi/2)**2 leaves ~1e-33 of float dust; treat anything below 1e-30
    # as the exactly degenerate point
    if tau1 < 1e-30:
        tau1 = 0.0
    if tau1 == 0.0:
        return QuasilocalityCertificate(
            params=params, phi=phi, tau1=0.0, xi=np.inf, gamma=np.inf,
            gamma_prime=0.0, in_domain=domain,
        )
    xi = -0.5 * math.log(tau1)
    gamma = 0.0
    gamma_prime = 0.0
    for r in range(2, 9):
        gamma = max(gamma, math.sqrt(max(density_norm_sq(params, phi, r), 0.0)) * math.exp(xi * r))
        gamma_prime = max(
            gamma_prime, math.sqrt(max(remainder_norm_sq(params, phi, r), 0.0)) * math.exp(xi * r)
        )
    return QuasilocalityCertificate(
        params=params, phi=phi, tau1=tau1, xi=xi, gamma=gamma,
        gamma_prime=gamma_prime, in_domain=domain,
    )


def dad_decomposition(params: AnisotropyParams, phi: complex) -> dict:
    """Split 1 - T(conj phi, phi) = |sin phi|^-2 D A D.

    D = diag|s_k| and A = cos(2u) 1 - E with E the nearest-neighbor hopping
    matrix; positivity of A is the strip membership test, independent of the
    imaginary part of phi.
    """
    phi = _require_regular(phi)
    m = params.m
    T = _self_paired_T(params, phi)
    D = np.diag([abs(params.sin_k(k)) for k in range(1, m)])
    u = phi.real - np.pi / 2
    E = np.zeros((m - 1, m - 1))
    for k in range(m - 2):
        E[k, k + 1] = E[k + 1, k] = 0.5
    A = math.cos(2 * u) * np.eye(m - 1) - E
    lhs = np.eye(m - 1) - T
    rhs = D @ A @ D / abs(np.sin(phi)) ** 2
    margin = math.cos(2 * u) - math.cos(np.pi / m)
    return {
        "D": D,
        "A": A,
        "residual": float(np.max(np.abs(lhs - rhs))),
        "spectral_margin": margin,
        "positive": margin > 0,
    }


def strip_boundary_bisection(params: AnisotropyParams, tol: float = 1e-7) -> float:
    """Half-width of the contraction strip, located by bisecting tau1 = 1."""
    half = np.pi / (2 * params.m)

    def gap(u: float) -> float:
        T = _self_paired_T(params, np.pi / 2 + u)
        return float(np.max(np.abs(np.linalg.eigvalsh(T)))) - 1.0

    lo, hi = 0.0, min(np.pi / 2 - 0.05, half + 0.3)
    if gap(hi) <= 0:
        raise AccuracyError("bisection bracket does not cross tau1 = 1", achieved=gap(hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# inner-product kernel


def _resolvent_column(params: AnisotropyParams, phi: complex, phi_prime: complex) -> np.ndarray:
    T = build_T_V(params, phi, phi_prime).T
    m = params.m
    lhs = np.eye(m - 1, dtype=complex) - T
    cond = np.linalg.cond(lhs)
    if not np.isfinite(cond) or cond > 1e13:
        raise DomainError(f"kernel pole: 1 - T is singular at ({phi}, {phi_prime})")
    e1 = np.zeros(m - 1, dtype=complex)
    e1[0] = 1.0
    return np.linalg.solve(lhs, e1)


def kernel_K(params: AnisotropyParams, phi: complex, phi_prime: complex) -> complex:
    """Inner-product kernel K = <1|(1 - T)^-1|1> / 4 by linear solve."""
    return complex(_resolvent_column(params, phi, phi_prime)[0] / 4)


def _sine_ratio(num_mult: int, den_mult: int, x: complex) -> complex:
    """sin(num_mult x) / sin(den_mult x) with the removable limits at x in pi Z."""
    num = np.sin(num_mult * x)
    den = np.sin(den_mult * x)
    if abs(den) >= 1e-9:
        return num / den
    k = int(round((den_mult * x).real / np.pi))
    if k % den_mult != 0:
        raise DomainError(f"kernel pole at phi + phi' = {x}")
    # removable point x ~ kk*pi: both sines vanish, the limit is exact to O(1e-18)
    kk = k // den_mult
    sign = -1.0 if (kk * (num_mult - den_mult)) % 2 else 1.0
    return complex(sign * num_mult / den_mult)


def kernel_closed_form(params: AnisotropyParams, phi: complex, phi_prime: complex) -> complex:
    """Trigonometric evaluation of K; cross-check for the linear solve."""
    phi, phi_prime = complex(phi), complex(phi_prime)
    m = params.m
    s1 = params.sin_k(1)
    x = phi + phi_prime
    ratio = _sine_ratio(m - 1, m, x)
    return complex(-(np.sin(phi) * np.sin(phi_prime) / (2 * s1**2)) * ratio)


def kernel_series(
    params: AnisotropyParams,
    phi: complex,
    phi_prime: complex,
    tol: float = 1e-13,
    max_terms: int = 200000,
) -> complex:
    """Geometric accumulation sum_r kappa_r; valid inside the contraction region."""
    T = build_T_V(params, phi, phi_prime).T
    radius = float(np.max(np.abs(np.linalg.eigvals(T))))
    if radius >= 1 - 1e-9:
        raise DomainError(f"series diverges: spectral radius {radius:.6f}")
    v = np.zeros(params.m - 1, dtype=complex)
    v[0] = 1.0
    total = 0.0 + 0.0j
    for _ in range(max_terms):
        term = v[0] / 4
        total += term
        if abs(term) < tol * max(abs(total), 1.0):
            return complex(total)
        v = T @ v
    raise AccuracyError("kernel series did not converge", achieved=abs(term))


def psi_solve(params: AnisotropyParams, phi: complex, phi_prime: complex) -> np.ndarray:
    """Resolvent column of the memory-kernel difference equation.

    Solved through the symmetrized T and mapped back with the |s_j| basis
    weights; the first entry is basis independent and equals 4K.
    """
    column = _resolvent_column(params, phi, phi_prime)
    scale = np.array([abs(params.sin_k(j)) for j in range(1, params.m)])
    return column * scale / scale[0]


def psi_explicit(params: AnisotropyParams, phi: complex, phi_prime: complex) -> np.ndarray:
    """Closed-form resolvent column from the three-term recurrence."""
    phi, phi_prime = complex(phi), complex(phi_prime)
    m = params.m
    s1 = params.sin_k(1)
    x = phi + phi_prime
    out = np.empty(m - 1, dtype=complex)
    for j in range(1, m):
        ratio = _sine_ratio(m - j, m, x)
        out[j - 1] = 2 * (-1) ** j * (np.sin(phi) * np.sin(phi_prime) / s1**2) * ratio
    return out


# ---------------------------------------------------------------------------
# dense-sequence asymptotics


def z_inner_exact(params: AnisotropyParams, phi: complex, phi_prime: complex, n: int) -> complex:
    """Finite-n overlap of the open family: sum_r (n - r + 1) kappa_r, exact."""
    total = 0.0 + 0.0j
    for r in range(2, n + 1):
        total += (n - r + 1) * kappa_r(params, phi, phi_prime, r)
    return complex(total)


def inner_product_asymptotics(
    params: AnisotropyParams, phi: complex, phi_prime: complex, n: int
) -> dict:
    """Dense per-site overlaps against the kernel at one chain length."""
    from .transfer import build_transfer

    if n > 10:
        raise ConfigError("dense asymptotics capped at 10 sites")
    y1 = build_transfer("Y", params, phi, n).matrix
    y2 = build_transfer("Y", params, phi_prime, n).matrix
    z1 = build_transfer("Z", params, phi, n).matrix
    z2 = build_transfer("Z", params, phi_prime, n).matrix
    K = kernel_K(params, phi, phi_prime)
    # bilinear_inner pairs tr(a^T b) itself, so the operators go in untransposed
    y_over_n = bilinear_inner(y1, y2) / n
    z_over_n = bilinear_inner(z1, z2) / n
    return {
        "kernel": K,
        "y_over_n": y_over_n,
        "z_over_n": z_over_n,
        "y_gap": abs(y_over_n - K),
        "z_gap": abs(z_over_n - K),
        "z_exact_over_n": z_inner_exact(params, phi, phi_prime, n) / n,
        "transpose_z": bilinear_inner(z1.T, z2),
        "transpose_y": bilinear_inner(y1.T, y2),
    }


def pseudolocality_constant(cert: QuasilocalityCertificate) -> float:
    """Volume coefficient bounding ||Y_n||^2 <= K n from the fitted envelope."""
    if not math.isfinite(cert.xi):
        # degenerate point: only the two-site density survives
        return 0.5
    damp = 1.0 - math.exp(-2.0 * cert.xi)
    return (
        cert.gamma**2 / damp
        + 2.0 * cert.gamma * cert.gamma_prime / damp
        + cert.gamma_prime**2
    )

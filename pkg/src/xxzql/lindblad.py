"""Boundary-driven steady state under maximal edge driving.

The generator injects spin at the left edge and drains it at the right; its
unique fixed point factors as S S^dag with S an upper triangular unit-diagonal
matrix built from the highest-weight transfer operator at imaginary spin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import (
    SIGMA_0,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    AnisotropyParams,
    build_hamiltonian,
    check_site_count,
)
from .errors import ConfigError, SizeCapError, SpectralPointError
from .lax import build_lax
from .transfer import build_transfer

# the two spectral points where the edge driving closes on a transfer operator
CASES = ("phi0", "phiHalfPi")
_CASE_PHI = {"phi0": 0.0, "phiHalfPi": np.pi / 2}


@dataclass(frozen=True)
class LindbladSetup:
    """Chain with spin injection at site 0 and extraction at site n-1.

    The jump operators are fixed; epsilon is the common rate of both.
    """

    params: AnisotropyParams
    n: int
    epsilon: float = 1.0

    def __post_init__(self):
        check_site_count(self.n, minimum=2)
        if self.epsilon < 0:
            raise ConfigError("driving rate must be nonnegative")

    @property
    def hamiltonian(self) -> np.ndarray:
        return build_hamiltonian(self.params, self.n, "open")

    @property
    def jump_operators(self) -> tuple[np.ndarray, np.ndarray]:
        rest = np.eye(2 ** (self.n - 1), dtype=complex)
        return (np.kron(SIGMA_PLUS, rest), np.kron(rest, SIGMA_MINUS))


def lindblad_apply(setup: LindbladSetup, rho: np.ndarray) -> np.ndarray:
    """One application of the generator, -i[H, rho] plus the edge dissipators."""
    rho = np.asarray(rho, dtype=complex)
    dim = 2**setup.n
    if rho.shape != (dim, dim):
        raise ConfigError(f"state must be {dim} x {dim} for n = {setup.n}")
    ham = setup.hamiltonian
    out = -1j * (ham @ rho - rho @ ham)
    for a in setup.jump_operators:
        adag = a.conj().T
        sink = adag @ a
        out += setup.epsilon * (2.0 * a @ rho @ adag - sink @ rho - rho @ sink)
    return out


def solve_spin_for_epsilon(params: AnisotropyParams, case: str, epsilon: float) -> complex:
    """Spin value whose transfer operator matches the driving rate.

    The matching condition is tan(eta s) = i eps / (2 sin eta) at the strip
    midpoint case and its reciprocal at the in-plane case; the principal
    branch is taken, which lands on the imaginary axis for weak driving.
    """
    if case not in CASES:
        raise ConfigError(f"unknown driving case {case!r}")
    if not epsilon > 0:
        raise ConfigError("matching requires a positive driving rate")
    eta = params.eta
    ratio = epsilon / (2.0 * params.sin_k(1))
    if abs(ratio - 1.0) < 1e-14:
        raise SpectralPointError("driving rate sits at the branch point of the matching condition")
    target = 1j * ratio if case == "phiHalfPi" else 1j / ratio
    return complex(np.arctan(target) / eta)


def _w_matrix(params: AnisotropyParams, phi: float, n: int, s: complex) -> np.ndarray:
    if n >= 2:
        return build_transfer("W", params, phi, n, s=s).matrix
    # single site: highest-weight element of the Lax operator
    comps = build_lax(params, phi, s).components
    return sum(c[0, 0] * sig for c, sig in zip(comps, (SIGMA_0, SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS)))


def _s_matrix(params: AnisotropyParams, case: str, n: int, s: complex) -> np.ndarray:
    eta = params.eta
    if case == "phi0":
        norm = complex(np.sin(eta * s))
        tail = SIGMA_Z
    else:
        norm = complex(np.cos(eta * s))
        tail = SIGMA_0
    if abs(norm) < 1e-12:
        raise SpectralPointError("degenerate per-site normalization; rescale the driving rate")
    post = tail
    for _ in range(n - 1):
        post = np.kron(post, tail)
    w = _w_matrix(params, _CASE_PHI[case], n, s)
    return (w.T @ post) / norm**n


@dataclass(frozen=True)
class SteadyStateFactor:
    case: str
    s: complex
    Sn: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)


def steady_state(setup: LindbladSetup, case: str) -> SteadyStateFactor:
    """Closed-form fixed point of the driven chain, factored as Sn Sn^dag."""
    if setup.n > 8:
        raise SizeCapError("steady-state factorization is capped at n = 8")
    s = solve_spin_for_epsilon(setup.params, case, setup.epsilon)
    sn = _s_matrix(setup.params, case, setup.n, s)
    gram = sn @ sn.conj().T
    rho = gram / np.trace(gram).real
    return SteadyStateFactor(case=case, s=s, Sn=sn, rho=rho)


def defining_relation_residual(setup: LindbladSetup, case: str) -> float:
    """Frobenius residual of [H, S_n] + i eps (sz (x) S_{n-1} - S_{n-1} (x) sz)."""
    s = solve_spin_for_epsilon(setup.params, case, setup.epsilon)
    sn = _s_matrix(setup.params, case, setup.n, s)
    smaller = _s_matrix(setup.params, case, setup.n - 1, s)
    ham = setup.hamiltonian
    lhs = ham @ sn - sn @ ham
    rhs = -1j * setup.epsilon * (np.kron(SIGMA_Z, smaller) - np.kron(smaller, SIGMA_Z))
    return float(np.linalg.norm(lhs - rhs))

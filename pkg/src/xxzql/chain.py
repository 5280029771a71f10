"""Dense operator algebra for the spin-1/2 XXZ chain.

Conventions used across the package:

* site 0 is the leftmost Kronecker factor (slowest index),
* all dense operators are complex128 matrices of size 2**n x 2**n,
* chains are capped at n = 12 sites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SizeCapError

MAX_SITES = 12


def _cos_pi_frac(num: int, den: int) -> float:
    """cos(pi*num/den) with exact values at the quarter-period points."""
    x = num % (2 * den)
    if x == 0:
        return 1.0
    if x == den:
        return -1.0
    if 2 * x == den or 2 * x == 3 * den:
        return 0.0
    return math.cos(math.pi * x / den)


def _sin_pi_frac(num: int, den: int) -> float:
    """sin(pi*num/den) with exact values at the quarter-period points."""
    x = num % (2 * den)
    if x == 0 or x == den:
        return 0.0
    if 2 * x == den:
        return 1.0
    if 2 * x == 3 * den:
        return -1.0
    return math.sin(math.pi * x / den)


SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class AnisotropyParams:
    """Commensurate anisotropy Delta = cos(pi*l/m), with l, m coprime."""

    l: int
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError(f"m must be >= 2, got {self.m}")
        if not 1 <= self.l <= self.m:
            raise ConfigError(f"l must satisfy 1 <= l <= m, got l={self.l}, m={self.m}")
        if math.gcd(self.l, self.m) != 1:
            raise ConfigError(f"l and m must be coprime, got l={self.l}, m={self.m}")

    @property
    def eta(self) -> float:
        return math.pi * self.l / self.m

    @property
    def delta(self) -> float:
        return _cos_pi_frac(self.l, self.m)

    @property
    def q(self) -> complex:
        return complex(_cos_pi_frac(self.l, self.m), _sin_pi_frac(self.l, self.m))

    def cos_k(self, k) -> np.ndarray | float:
        """cos(pi*l*k/m) for integer k (scalar or array), exact at special angles."""
        if np.isscalar(k):
            return _cos_pi_frac(self.l * int(k), self.m)
        return np.array([_cos_pi_frac(self.l * int(kk), self.m) for kk in np.ravel(k)]).reshape(np.shape(k))

    def sin_k(self, k) -> np.ndarray | float:
        """sin(pi*l*k/m) for integer k (scalar or array), exact at special angles."""
        if np.isscalar(k):
            return _sin_pi_frac(self.l * int(k), self.m)
        return np.array([_sin_pi_frac(self.l * int(kk), self.m) for kk in np.ravel(k)]).reshape(np.shape(k))


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary condition: 'open', 'periodic', or 'twisted' with a flux angle."""

    kind: str = "open"
    flux: float = 0.0

    def __post_init__(self):
        if self.kind not in ("open", "periodic", "twisted"):
            raise ConfigError(f"unknown boundary kind {self.kind!r}")
        if self.kind != "twisted" and self.flux != 0.0:
            raise ConfigError("flux is only meaningful for twisted boundaries")


def check_site_count(n: int, minimum: int = 1) -> int:
    if not isinstance(n, (int, np.integer)):
        raise ConfigError(f"site count must be an integer, got {n!r}")
    if n < minimum:
        raise ConfigError(f"need at least {minimum} sites, got {n}")
    if n > MAX_SITES:
        raise SizeCapError(f"n={n} exceeds the dense cap of {MAX_SITES} sites")
    return int(n)


def site_count(op: np.ndarray) -> int:
    """Number of sites of a dense chain operator, from its dimension."""
    d = op.shape[0]
    n = d.bit_length() - 1
    if op.shape != (d, d) or d != 2**n:
        raise ConfigError(f"not a 2^n x 2^n matrix: shape {op.shape}")
    return n


def kron_all(ops) -> np.ndarray:
    """Kronecker product of a sequence, site 0 leftmost."""
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-site operator at position `site` of an n-site chain."""
    check_site_count(n)
    if not 0 <= site < n:
        raise ConfigError(f"site {site} out of range for n={n}")
    return kron_all([op if x == site else SIGMA_0 for x in range(n)])


def two_site_coupling(params: AnisotropyParams) -> np.ndarray:
    """Bond Hamiltonian h = 2(s+ s- + s- s+) + Delta sz sz on two sites."""
    return (
        2.0 * np.kron(SIGMA_PLUS, SIGMA_MINUS)
        + 2.0 * np.kron(SIGMA_MINUS, SIGMA_PLUS)
        + params.delta * np.kron(SIGMA_Z, SIGMA_Z)
    )


def _embed_bond(op4: np.ndarray, x: int, n: int) -> np.ndarray:
    # op4 acts on sites (x, x+1); x+1 < n assumed
    return kron_all([SIGMA_0] * x + [op4] + [SIGMA_0] * (n - x - 2))


def build_hamiltonian(
    params: AnisotropyParams, n: int, boundary: BoundarySpec | str = "open"
) -> np.ndarray:
    """Dense XXZ Hamiltonian with the requested boundary condition.

    'periodic' is built as 'twisted' with flux 0 so the two agree bit for bit.
    """
    check_site_count(n, minimum=2)
    if isinstance(boundary, str):
        boundary = BoundarySpec(kind=boundary)
    h = two_site_coupling(params)
    H = np.zeros((2**n, 2**n), dtype=complex)
    for x in range(n - 1):
        H += _embed_bond(h, x, n)
    if boundary.kind == "open":
        return H
    theta = float(boundary.flux)
    # boundary term couples site 0 and site n-1 with the twist phase
    pm = kron_all([SIGMA_PLUS] + [SIGMA_0] * (n - 2) + [SIGMA_MINUS])
    mp = kron_all([SIGMA_MINUS] + [SIGMA_0] * (n - 2) + [SIGMA_PLUS])
    zz = kron_all([SIGMA_Z] + [SIGMA_0] * (n - 2) + [SIGMA_Z])
    H += 2.0 * np.exp(1j * theta) * pm + 2.0 * np.exp(-1j * theta) * mp + params.delta * zz
    return H


def canonical_gauge(n: int, flux: float) -> np.ndarray:
    """Diagonal unitary C = exp(i flux/n * sum_x x sz_x / 2)."""
    check_site_count(n)
    phase = np.zeros(2**n, dtype=float)
    for x in range(n):
        # sz eigenvalue of site x: +1 if bit clear, -1 if bit set (site 0 slowest)
        bit = (np.arange(2**n) >> (n - 1 - x)) & 1
        phase += (flux / n) * x * 0.5 * (1.0 - 2.0 * bit)
    return np.diag(np.exp(1j * phase))


def uniform_flux_hamiltonian(params: AnisotropyParams, n: int, flux: float) -> np.ndarray:
    """Gauged form of the twisted Hamiltonian: every bond carries phase exp(-+ i flux/n).

    Equals C H_twisted C^dag with C = canonical_gauge(n, flux).
    """
    check_site_count(n, minimum=2)
    theta = flux / n
    H = np.zeros((2**n, 2**n), dtype=complex)
    hop = (
        2.0 * np.exp(-1j * theta) * np.kron(SIGMA_PLUS, SIGMA_MINUS)
        + 2.0 * np.exp(1j * theta) * np.kron(SIGMA_MINUS, SIGMA_PLUS)
        + params.delta * np.kron(SIGMA_Z, SIGMA_Z)
    )
    for x in range(n - 1):
        H += _embed_bond(hop, x, n)
    H += (
        2.0 * np.exp(-1j * theta) * kron_all([SIGMA_MINUS] + [SIGMA_0] * (n - 2) + [SIGMA_PLUS])
        + 2.0 * np.exp(1j * theta) * kron_all([SIGMA_PLUS] + [SIGMA_0] * (n - 2) + [SIGMA_MINUS])
        + params.delta * kron_all([SIGMA_Z] + [SIGMA_0] * (n - 2) + [SIGMA_Z])
    )
    return H


def shift_map(op: np.ndarray) -> np.ndarray:
    """One-site cyclic shift: the factor at site x moves to site x-1 (site 0 wraps to n-1)."""
    n = site_count(op)
    if n == 1:
        return op.copy()
    t = op.reshape([2] * (2 * n))
    t = np.moveaxis(t, 0, n - 1)
    t = np.moveaxis(t, n, 2 * n - 1)
    return np.ascontiguousarray(t.reshape(2**n, 2**n))


def parity_operator(n: int) -> np.ndarray:
    """Global spin flip P = sx^(x n)."""
    return kron_all([SIGMA_X] * n)


def spin_current(n: int) -> np.ndarray:
    """J = i sum_x (s+_x s-_{x+1} - s-_x s+_{x+1}), periodic wrap included."""
    check_site_count(n, minimum=2)
    J = np.zeros((2**n, 2**n), dtype=complex)
    bond = 1j * (np.kron(SIGMA_PLUS, SIGMA_MINUS) - np.kron(SIGMA_MINUS, SIGMA_PLUS))
    for x in range(n - 1):
        J += _embed_bond(bond, x, n)
    J += 1j * (
        kron_all([SIGMA_MINUS] + [SIGMA_0] * (n - 2) + [SIGMA_PLUS])
        - kron_all([SIGMA_PLUS] + [SIGMA_0] * (n - 2) + [SIGMA_MINUS])
    )
    return J


def magnetization(n: int) -> np.ndarray:
    """Total sz."""
    M = np.zeros((2**n, 2**n), dtype=complex)
    for x in range(n):
        M += site_operator(SIGMA_Z, x, n)
    return M


def standard_observables(n: int) -> dict[str, np.ndarray]:
    return {"parity": parity_operator(n), "current": spin_current(n), "magnetization": magnetization(n)}


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Normalized Hilbert-Schmidt inner product 2^-n tr(a^dag b)."""
    n = site_count(a)
    if b.shape != a.shape:
        raise ConfigError("operands must share the same chain length")
    return complex(np.vdot(a, b) / 2**n)


def hs_norm(a: np.ndarray) -> float:
    return math.sqrt(max(hs_inner(a, a).real, 0.0))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a

"""Finite q-deformed sl(2) representation on the m-dimensional auxiliary space.

The generators act on basis states |0>, ..., |m-1> with a continuous (complex)
highest weight s.  For 2s a nonnegative integer with 2s+1 <= m the leading
(2s+1) x (2s+1) block is an invariant subspace carrying the usual spin-s
multiplet; the truncation at m states is consistent because sin(m eta) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import AnisotropyParams
from .errors import ConfigError


@dataclass(frozen=True)
class VermaRep:
    """Generator triple (sz, splus, sminus) at highest weight s."""

    params: AnisotropyParams
    s: complex
    sz: np.ndarray = field(repr=False)
    splus: np.ndarray = field(repr=False)
    sminus: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.params.m


def build_verma(params: AnisotropyParams, s: complex) -> VermaRep:
    """Highest-weight representation with weight s on m auxiliary states.

    sz     = sum_k (s - k) |k><k|
    splus  = sum_k sin((k+1) eta)/sin(eta) |k><k+1|
    sminus = sum_k sin((2s-k) eta)/sin(eta) |k+1><k|
    """
    m = params.m
    eta = params.eta
    s = complex(s)
    k = np.arange(m)
    sz = np.diag((s - k).astype(complex))
    splus = np.zeros((m, m), dtype=complex)
    sminus = np.zeros((m, m), dtype=complex)
    sin_1 = params.sin_k(1)
    for j in range(m - 1):
        # sin((j+1) eta) hits exact zeros at multiples of pi, keep it exact
        splus[j, j + 1] = params.sin_k(j + 1) / sin_1
        sminus[j + 1, j] = np.sin((2 * s - j) * eta) / sin_1
    return VermaRep(params=params, s=s, sz=sz, splus=splus, sminus=sminus)


def commutation_residuals(rep: VermaRep) -> dict[str, float]:
    """Max-entry residuals of the deformed sl(2) relations.

    [s+, s-] = sin(2 eta sz)/sin(eta),   [sz, s+-] = +- s+-
    """
    eta = rep.params.eta
    sz, sp, sm = rep.sz, rep.splus, rep.sminus
    sin2 = np.diag(np.sin(2 * eta * np.diag(sz)) / np.sin(eta))
    return {
        "plus_minus": float(np.max(np.abs(sp @ sm - sm @ sp - sin2))),
        "z_plus": float(np.max(np.abs(sz @ sp - sp @ sz - sp))),
        "z_minus": float(np.max(np.abs(sz @ sm - sm @ sz + sm))),
    }


def irreducible_block(rep: VermaRep) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Generators restricted to the invariant leading (2s+1)-block.

    Requires 2s to be a nonnegative integer with 2s + 1 <= m.
    """
    two_s = 2 * rep.s
    if abs(two_s.imag) > 1e-12 or abs(two_s.real - round(two_s.real)) > 1e-12:
        raise ConfigError(f"2s must be a nonnegative integer, got s={rep.s}")
    d = int(round(two_s.real)) + 1
    if d < 1 or d > rep.dim:
        raise ConfigError(f"irreducible block of size {d} does not fit in m={rep.dim}")
    return rep.sz[:d, :d], rep.splus[:d, :d], rep.sminus[:d, :d]


def block_leakage(rep: VermaRep) -> float:
    """Largest entry coupling the leading (2s+1)-block to the rest; 0 means invariant."""
    d = int(round((2 * rep.s).real)) + 1
    worst = 0.0
    for op in (rep.sz, rep.splus, rep.sminus):
        if d < rep.dim:
            worst = max(worst, float(np.max(np.abs(op[d:, :d]))))
    return worst


def spin_flip(rep: VermaRep) -> np.ndarray:
    """Antidiagonal involution U on the leading block.

    U sz U^-1 = -sz,  U s+ U^-1 = s-,  U s- U^-1 = s+  (restricted to the block).
    """
    irreducible_block(rep)  # validates s
    d = int(round((2 * rep.s).real)) + 1
    return np.fliplr(np.eye(d, dtype=complex))


@dataclass(frozen=True)
class GaugeMatrix:
    """Diagonal twist g = diag(1, e^{i flux}, ..., e^{(m-1) i flux})."""

    params: AnisotropyParams
    flux: float
    entries: np.ndarray = field(repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.entries)

    def conjugate(self, op: np.ndarray) -> np.ndarray:
        """g^-1 op g; sends splus -> e^{+i flux} splus, sminus -> e^{-i flux} sminus."""
        return (op * self.entries[np.newaxis, :]) / self.entries[:, np.newaxis]


def gauge_matrix(params: AnisotropyParams, flux: float) -> GaugeMatrix:
    k = np.arange(params.m)
    return GaugeMatrix(params=params, flux=float(flux), entries=np.exp(1j * flux * k))


def weight_gauge(rep_dim: int, s: complex, flux: float) -> np.ndarray:
    """exp(-i flux sz) as a diagonal matrix, the weight-space twist insertion."""
    k = np.arange(rep_dim)
    return np.diag(np.exp(-1j * flux * (complex(s) - k)))

"""Transfer-operator families over the spin-1/2 chain.

Six kinds are built from the same Lax contraction engine:

  W          <0| L(phi,s)^n |0>, lower triangular, open-boundary generator
  V          tr_aux L(phi,s)^n, periodic, a commuting family in (phi, s)
  V_twisted  trace with the weight-space gauge insertion exp(-i flux sz_s)
  Z          weight derivative of W at s=0 minus the magnetization part
  Y          same derivative of V; the periodic quasilocal family
  Y_twisted  gauged Y commuting with the flux Hamiltonian

Modified kinds (Z, Y, Y_twisted) are built with the analytic two-state
derivative ancilla, never by numerical s-differencing.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .chain import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    AnisotropyParams,
    build_hamiltonian,
    canonical_gauge,
    check_site_count,
    magnetization,
    shift_map,
)
from .errors import ConfigError, SizeCapError
from .lax import (
    DerivativeLax,
    build_lax,
    derivative_lax,
    lax_phi_derivative,
    lax_phi_second_derivative,
)
from .mpo import braket_product, closure_product, uniform_sites
from .qsl2 import gauge_matrix, weight_gauge

TRANSFER_KINDS = ("W", "V", "V_twisted", "Z", "Y", "Y_twisted")
_MODIFIED = ("Z", "Y", "Y_twisted")
_TWISTED = ("V_twisted", "Y_twisted")

# bookkeeping-ancilla matrix whose single insertion marks the derivative site
_ANCILLA_PICK = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


def modified_prefactor(params: AnisotropyParams, phi: complex) -> complex:
    """sin^2(phi) / (2 eta sin(eta)); converts ancilla contraction to the derivative family."""
    return np.sin(complex(phi)) ** 2 / (2 * params.eta * np.sin(params.eta))


def magnetization_coefficient(params: AnisotropyParams, phi: complex) -> complex:
    """sin(phi) cos(phi) / (2 sin(eta)); weight of the subtracted magnetization."""
    phi = complex(phi)
    return np.sin(phi) * np.cos(phi) / (2 * np.sin(params.eta))


@dataclass(frozen=True)
class TransferOperator:
    kind: str
    params: AnisotropyParams
    n: int
    phi: complex
    s: complex | None
    flux: float | None
    matrix: np.ndarray = field(repr=False)


def build_transfer(
    kind: str,
    params: AnisotropyParams,
    phi: complex,
    n: int,
    s: complex | None = None,
    flux: float | None = None,
) -> TransferOperator:
    """Dense transfer operator of the requested kind on n sites (n <= 12)."""
    if kind not in TRANSFER_KINDS:
        raise ConfigError(f"unknown transfer kind {kind!r}")
    check_site_count(n, minimum=2)
    phi = complex(phi)
    m = params.m

    if kind in _TWISTED:
        if flux is None:
            raise ConfigError(f"kind {kind!r} requires a flux")
        flux = float(flux)
    elif flux is not None:
        raise ConfigError(f"kind {kind!r} takes no flux")

    if kind in _MODIFIED:
        # s is fixed by the s->0 derivative; a passed value is ignored
        dlax = derivative_lax(params, phi)
        sites = uniform_sites(dlax.extended(), n)
        if kind == "Z":
            bra = np.zeros(2 * m)
            bra[0] = 1.0  # |0>_a |0>_b
            ket = np.zeros(2 * m)
            ket[1] = 1.0  # |0>_a |1>_b
            core = braket_product(sites, bra, ket)
        else:
            gauge = np.eye(m, dtype=complex) if kind == "Y" else gauge_matrix(params, flux).matrix
            core = closure_product(sites, np.kron(gauge, _ANCILLA_PICK))
        matrix = modified_prefactor(params, phi) * core
        matrix -= magnetization_coefficient(params, phi) * magnetization(n)
        return TransferOperator(kind=kind, params=params, n=n, phi=phi, s=None, flux=flux, matrix=matrix)

    if s is None:
        raise ConfigError(f"kind {kind!r} requires a spin parameter s")
    s = complex(s)
    comps = build_lax(params, phi, s).components
    sites = uniform_sites(comps, n)
    if kind == "W":
        e0 = np.zeros(m)
        e0[0] = 1.0
        matrix = braket_product(sites, e0, e0)
    elif kind == "V":
        matrix = closure_product(sites, np.eye(m, dtype=complex))
    else:
        matrix = closure_product(sites, weight_gauge(m, s, flux))
    return TransferOperator(kind=kind, params=params, n=n, phi=phi, s=s, flux=flux, matrix=matrix)


# ---------------------------------------------------------------------------
# local densities and remainders


@dataclass(frozen=True)
class LocalDensity:
    r: int
    params: AnisotropyParams
    phi: complex
    flux_per_site: float
    matrix: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Remainder:
    n: int
    params: AnisotropyParams
    phi: complex
    flux_per_site: float
    matrix: np.ndarray = field(repr=False)


def _gauged(comps: np.ndarray, params: AnisotropyParams, flux_per_site: float) -> np.ndarray:
    if flux_per_site == 0.0:
        return comps
    g = gauge_matrix(params, flux_per_site).matrix
    return comps @ g


def density_q(
    params: AnisotropyParams,
    phi: complex,
    r: int,
    flux_per_site: float = 0.0,
) -> LocalDensity:
    """Local density on r sites: sigma_minus, interior walk factors, sigma_plus.

    Interior amplitudes are <1| L0^{a_2} .. L0^{a_{r-1}} |1> walks that never
    touch the auxiliary ground state.  With a per-site flux the walk factors
    become L0 G and a boundary phase e^{i flux} multiplies the whole density.
    """
    if r < 2:
        raise ConfigError("density support must be at least 2 sites")
    if r > 10:
        raise SizeCapError("density support capped at 10 sites")
    phi = complex(phi)
    over = np.exp(1j * flux_per_site)
    if r == 2:
        matrix = over * np.kron(SIGMA_MINUS, SIGMA_PLUS).astype(complex)
        return LocalDensity(r=r, params=params, phi=phi, flux_per_site=flux_per_site, matrix=matrix)
    comps = _gauged(derivative_lax(params, phi).L0, params, flux_per_site)
    e1 = np.zeros(params.m)
    e1[1] = 1.0
    interior = braket_product(uniform_sites(comps, r - 2), e1, e1)
    matrix = over * np.kron(SIGMA_MINUS, np.kron(interior, SIGMA_PLUS))
    return LocalDensity(r=r, params=params, phi=phi, flux_per_site=flux_per_site, matrix=matrix)


def remainder_p(
    params: AnisotropyParams,
    phi: complex,
    n: int,
    flux_per_site: float = 0.0,
) -> Remainder:
    """Excited-sector recurrent part left over after all local densities.

    Sum over diagonal matrix elements k = 1..m-1 of L0^(n-1) (x) L1 walks,
    scaled by the same prefactor that normalizes the derivative family, so the
    periodic reconstruction holds without extra factors.
    """
    check_site_count(n, minimum=2)
    dlax = derivative_lax(params, phi)
    comps0 = _gauged(dlax.L0, params, flux_per_site)
    comps1 = _gauged(dlax.L1, params, flux_per_site)
    sites = uniform_sites(comps0, n - 1) + [comps1]
    excited = np.eye(params.m, dtype=complex)
    excited[0, 0] = 0.0
    matrix = modified_prefactor(params, phi) * closure_product(sites, excited)
    return Remainder(n=n, params=params, phi=phi, flux_per_site=flux_per_site, matrix=matrix)


def sum_of_shifts(op: np.ndarray) -> np.ndarray:
    """sum_x S^x(op) over all cyclic left shifts."""
    from .chain import site_count

    n = site_count(op)
    acc = op.astype(complex).copy()
    cur = op
    for _ in range(n - 1):
        cur = shift_map(cur)
        acc += cur
    return acc


def lemma1_reconstruction(
    params: AnisotropyParams,
    phi: complex,
    n: int,
    flux: float | None = None,
) -> float:
    """Max-entry residual of the periodic build against densities plus remainder.

    For a twisted build the comparison happens in the uniform gauge: the dense
    operator is conjugated by the canonical gauge and the densities carry the
    distributed per-site flux.
    """
    if flux is None:
        target = build_transfer("Y", params, phi, n).matrix
        mu = 0.0
    else:
        raw = build_transfer("Y_twisted", params, phi, n, flux=flux).matrix
        c = canonical_gauge(n, flux)
        target = c @ raw @ c.conj().T
        mu = flux / n
    recon = np.zeros_like(target)
    for r in range(2, n + 1):
        q = density_q(params, phi, r, flux_per_site=mu).matrix
        recon += sum_of_shifts(np.kron(np.eye(2 ** (n - r)), q))
    recon += sum_of_shifts(remainder_p(params, phi, n, flux_per_site=mu).matrix)
    return float(np.max(np.abs(target - recon)))


def open_reconstruction(params: AnisotropyParams, phi: complex, n: int) -> float:
    """Max-entry residual of Z against its plain density sum (no remainder)."""
    target = build_transfer("Z", params, phi, n).matrix
    recon = np.zeros_like(target)
    for r in range(2, n + 1):
        q = density_q(params, phi, r).matrix
        for x in range(n - r + 1):
            recon += np.kron(np.eye(2**x), np.kron(q, np.eye(2 ** (n - r - x))))
    return float(np.max(np.abs(target - recon)))


# ---------------------------------------------------------------------------
# identity checks


def _rel_comm(a: np.ndarray, b: np.ndarray) -> float:
    num = np.linalg.norm(a @ b - b @ a)
    den = np.linalg.norm(a) * np.linalg.norm(b)
    return float(num / den) if den > 0 else 0.0


def commutation_suite(
    params: AnisotropyParams,
    n: int,
    phi_list: list[complex],
    s_list: list[complex],
    flux: float | None = None,
) -> dict[str, float]:
    """Worst-case normalized commutator residuals across the parameter grids.

    The W entry is a negative control: the highest-weight family does NOT
    commute with its transpose family, and the returned residual stays large.
    """
    if not phi_list or not s_list:
        raise ConfigError("parameter lists must be nonempty")
    vs = [build_transfer("V", params, p, n, s=s).matrix for p in phi_list for s in s_list]
    ys = [build_transfer("Y", params, p, n).matrix for p in phi_list]
    ws = [build_transfer("W", params, p, n, s=s).matrix for p in phi_list for s in s_list]
    h_pbc = build_hamiltonian(params, n, "periodic")

    out = {
        "V_pair": max(_rel_comm(a, b) for a in vs for b in vs),
        "V_transpose_pair": max(_rel_comm(a, b.T) for a in vs for b in vs),
        "Y_pair": max(_rel_comm(a, b) for a in ys for b in ys),
        "Y_transpose_pair": max(_rel_comm(a, b.T) for a in ys for b in ys),
        "H_with_Y": max(_rel_comm(h_pbc, y) for y in ys),
        "W_transpose_pair_control": max(
            _rel_comm(a, b.T) for a in ws for b in ws
        ),
    }
    if flux is not None:
        from .chain import BoundarySpec

        h_tw = build_hamiltonian(params, n, BoundarySpec("twisted", flux))
        vts = [
            build_transfer("V_twisted", params, p, n, s=s, flux=flux).matrix
            for p in phi_list
            for s in s_list
        ]
        yts = [build_transfer("Y_twisted", params, p, n, flux=flux).matrix for p in phi_list]
        out["V_twisted_pair"] = max(_rel_comm(a, b) for a in vts for b in vts)
        out["H_twisted_with_V_twisted"] = max(_rel_comm(h_tw, v) for v in vts)
        out["H_twisted_with_Y_twisted"] = max(_rel_comm(h_tw, y) for y in yts)
    return out


def spin_inversion_check(params: AnisotropyParams, phi: complex, s: complex, n: int) -> float:
    """Residual of W(phi,s) W(phi,-s) = (sin(phi+eta s) sin(phi-eta s))^n * 1."""
    phi, s = complex(phi), complex(s)
    wp = build_transfer("W", params, phi, n, s=s).matrix
    wm = build_transfer("W", params, phi, n, s=-s).matrix
    eta = params.eta
    scalar = (np.sin(phi + eta * s) * np.sin(phi - eta * s)) ** n
    return float(np.max(np.abs(wp @ wm - scalar * np.eye(2**n))) / abs(scalar))


def symmetry_relation_check(params: AnisotropyParams, s: complex, n: int) -> float:
    """Residual of W(pi/2, s) = (sigma_z)^(x)n W(0, s + pi/(2 eta)).

    The sign string must be n-independent for the identity to hold at odd n;
    checked here for every n rather than only even chains.
    """
    s = complex(s)
    left = build_transfer("W", params, np.pi / 2, n, s=s).matrix
    shifted = build_transfer("W", params, 0.0, n, s=s + np.pi / (2 * params.eta)).matrix
    string = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        string = np.kron(string, SIGMA_Z.astype(complex))
    return float(np.max(np.abs(left - string @ shifted)))


def parity_split(op: TransferOperator) -> tuple[np.ndarray, np.ndarray]:
    """Even and odd spin-flip components: one half of op plus/minus P op P."""
    if op.kind not in ("Y", "Z"):
        raise ConfigError("parity split applies to the modified kinds Y and Z")
    from .chain import parity_operator

    p = parity_operator(op.n)
    conj = p @ op.matrix @ p
    return 0.5 * (op.matrix + conj), 0.5 * (op.matrix - conj)


# ---------------------------------------------------------------------------
# fundamental local charges from the s = 1/2 point


_SHIFT3 = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
_SHIFT3_SQ = _SHIFT3 @ _SHIFT3


def fundamental_charges(
    params: AnisotropyParams,
    n: int,
    j_max: int = 2,
) -> list[np.ndarray]:
    """Log-derivative charges of V(phi, 1/2) at phi = eta/2: local and conserved.

    Q1 = (dV) V^-1 and Q2 = (d2V) V^-1 - Q1^2, with the phi-derivatives built
    analytically through a three-state derivative ancilla.  If V happens to be
    numerically singular at the evaluation point, the point is shifted by 1e-6
    with a warning.
    """
    if j_max not in (1, 2):
        raise ConfigError("only the first two log-derivative charges are built")
    check_site_count(n, minimum=2)
    phi0 = params.eta / 2
    s = 0.5
    eye3 = np.eye(3, dtype=complex)

    for attempt in range(2):
        # at s = 1/2 the leading 2x2 weight block is invariant; closing the
        # trace over the full weight space would add the quotient sector,
        # which does not generate the local charges
        base = build_lax(params, phi0, s).components[:, :2, :2]
        d1 = lax_phi_derivative(params, phi0, s)[:, :2, :2]
        d2 = lax_phi_second_derivative(params, phi0, s)[:, :2, :2]
        comps = np.stack(
            [
                np.kron(base[a], eye3)
                + np.kron(d1[a], _SHIFT3)
                + np.kron(0.5 * d2[a], _SHIFT3_SQ)
                for a in range(4)
            ]
        )
        sites = uniform_sites(comps, n)

        def pick(block: int) -> np.ndarray:
            sel = np.zeros((3, 3), dtype=complex)
            sel[block, 0] = 1.0
            return closure_product(sites, np.kron(np.eye(2, dtype=complex), sel))

        v = pick(0)
        dv = pick(1)
        cond = np.linalg.cond(v)
        if np.isfinite(cond) and cond < 1e12:
            break
        if attempt == 0:
            warnings.warn(
                f"transfer operator ill-conditioned at phi={phi0}; shifting by 1e-6",
                RuntimeWarning,
            )
            phi0 += 1e-6
    vinv = np.linalg.inv(v)
    q1 = dv @ vinv
    charges = [q1]
    if j_max == 2:
        d2v = 2.0 * pick(2)
        charges.append(d2v @ vinv - q1 @ q1)
    return charges


# ---------------------------------------------------------------------------
# serialization: one JSON header line + row-major little-endian complex doubles


def save_transfer(op: TransferOperator, path: str) -> None:
    header = {
        "kind": op.kind,
        "l": op.params.l,
        "m": op.params.m,
        "n": op.n,
        "phi": [op.phi.real, op.phi.imag],
        "s": None if op.s is None else [complex(op.s).real, complex(op.s).imag],
        "flux": op.flux,
        "shape": list(op.matrix.shape),
        "dtype": "<c16",
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode("ascii") + b"\n")
        f.write(np.ascontiguousarray(op.matrix).astype("<c16").tobytes())


def load_transfer(path: str) -> TransferOperator:
    with open(path, "rb") as f:
        header = json.loads(f.readline().decode("ascii"))
        raw = f.read()
    shape = tuple(header["shape"])
    matrix = np.frombuffer(raw, dtype="<c16").reshape(shape).astype(complex)
    s = header["s"]
    return TransferOperator(
        kind=header["kind"],
        params=AnisotropyParams(header["l"], header["m"]),
        n=header["n"],
        phi=complex(header["phi"][0], header["phi"][1]),
        s=None if s is None else complex(s[0], s[1]),
        flux=header["flux"],
        matrix=matrix,
    )

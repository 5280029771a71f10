"""Mazur-Suzuki machinery for the spin current.

The contraction strip maps to a bounded lens under z = cot(phi), so planar
integrals of the current weight become polynomial area integrals.  This module
holds both quadrature backends, the Fredholm residual of the optimal weight,
the Drude constant, exact-diagonalization time averages, finite-size Gram
bounds, and the expansion of the time-averaged current over density strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .chain import (
    SIGMA_0,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    AnisotropyParams,
    _cos_pi_frac,
    _sin_pi_frac,
    hs_inner,
    site_count,
    spin_current,
)
from .errors import AccuracyError, ConfigError, DomainError
from .lax import restricted_B
from .transfer import build_transfer, parity_split, sum_of_shifts

_PAULIS = (SIGMA_0, SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS)
_LETTERS = ("0", "z", "+", "-")


# ---------------------------------------------------------------------------
# integration domains


@dataclass(frozen=True)
class SpectralDomain:
    """Vertical strip of half-width pi/(2m) around Re phi = pi/2."""

    params: AnisotropyParams
    im_cutoff: float

    @property
    def half_width(self) -> float:
        return np.pi / (2 * self.params.m)

    @property
    def center(self) -> float:
        return np.pi / 2

    def contains(self, phi) -> np.ndarray | bool:
        return np.abs(np.real(phi) - self.center) < self.half_width


@dataclass(frozen=True)
class LensDomain:
    """Image of the strip under z = cot(phi): two equal disks meeting at +-i."""

    params: AnisotropyParams

    @property
    def radius(self) -> float:
        return 1.0 / _sin_pi_frac(1, self.params.m)

    @property
    def centers(self) -> tuple[float, float]:
        c = _cos_pi_frac(1, self.params.m) / _sin_pi_frac(1, self.params.m)
        return (-c, c)

    @property
    def corners(self) -> tuple[complex, complex]:
        return (1j, -1j)

    def contains(self, z) -> np.ndarray | bool:
        z = np.asarray(z, dtype=complex)
        left, right = self.centers
        return (np.abs(z - left) <= self.radius) & (np.abs(z - right) <= self.radius)

    def area(self) -> float:
        m = self.params.m
        beta = np.pi / m
        return 2.0 * (beta / _sin_pi_frac(1, m) ** 2
                      - _cos_pi_frac(1, m) / _sin_pi_frac(1, m))


def spectral_domain(params: AnisotropyParams, im_cutoff: float | None = None) -> SpectralDomain:
    return SpectralDomain(params=params, im_cutoff=8.0 * params.m if im_cutoff is None else float(im_cutoff))


def lens_domain(params: AnisotropyParams) -> LensDomain:
    return LensDomain(params=params)


# ---------------------------------------------------------------------------
# quadrature nodes

# imaginary-axis panel edges; the weight classes handled here decay at least
# like exp(-2|Im phi|), so panels past 8 only mop up the tail bound
_V_PANELS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)


@lru_cache(maxsize=32)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


@lru_cache(maxsize=64)
def _strip_nodes(l: int, m: int, level: int, im_cutoff: float) -> tuple[np.ndarray, np.ndarray]:
    n = 8 << level
    half = np.pi / (2 * m)
    u, wu = _panel_nodes(-half, half, n)
    edges = [v for v in _V_PANELS if v < im_cutoff] + [im_cutoff]
    vs, wv = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = _panel_nodes(a, b, n)
        vs.extend([x, -x])
        wv.extend([w, w])
    v = np.concatenate(vs)
    wv = np.concatenate(wv)
    phi = np.pi / 2 + u[:, None] + 1j * v[None, :]
    weight = wu[:, None] * wv[None, :]
    return phi.ravel(), weight.ravel()


@lru_cache(maxsize=64)
def _lens_nodes(l: int, m: int, level: int) -> tuple[np.ndarray, np.ndarray]:
    """Polar patches around the two disk centers; weights carry d^2phi."""
    n = 8 << level
    beta = np.pi / m
    c = _cos_pi_frac(1, m) / _sin_pi_frac(1, m)
    radius = 1.0 / _sin_pi_frac(1, m)
    theta, wt = _panel_nodes(-beta, beta, n)
    base, wb = _gauss(n)
    rho_min = c / np.cos(theta)
    mid = 0.5 * (rho_min + radius)
    span = 0.5 * (radius - rho_min)
    rho = mid[:, None] + span[:, None] * base[None, :]
    wr = span[:, None] * wb[None, :]
    z_right = -c + rho * np.exp(1j * theta)[:, None]
    w_polar = wt[:, None] * wr * rho
    z = np.concatenate([z_right.ravel(), -np.conj(z_right).ravel()])
    w = np.concatenate([w_polar.ravel(), w_polar.ravel()])
    phi = np.pi / 2 - np.arctan(z)
    # |d phi / d z|^2 = |sin phi|^4 = 1/|1+z^2|^2
    weight = w / np.abs(1.0 + z * z) ** 2
    return phi, weight


def _quad_nodes(params: AnisotropyParams, backend: str, level: int,
                im_cutoff: float | None) -> tuple[np.ndarray, np.ndarray]:
    if backend == "lens":
        return _lens_nodes(params.l, params.m, level)
    if backend == "strip":
        dom = spectral_domain(params, im_cutoff)
        return _strip_nodes(params.l, params.m, level, dom.im_cutoff)
    raise ConfigError(f"unknown quadrature backend {backend!r}")


def integrate_over_domain(
    params: AnisotropyParams,
    integrand,
    tol: float = 1e-7,
    backend: str = "lens",
    im_cutoff: float | None = None,
    max_level: int = 5,
) -> complex:
    """Planar integral over the strip, via level doubling until stable.

    The integrand must act elementwise on complex ndarrays and decay at least
    like exp(-2|Im phi|); node order is fixed and np.sum is pairwise, so the
    result is reproducible bit for bit.
    """
    if max_level < 1:
        raise ConfigError("max_level must be at least 1")
    prev = None
    diff = np.inf
    for level in range(max_level + 1):
        phi, w = _quad_nodes(params, backend, level, im_cutoff)
        val = complex(np.sum(w * np.asarray(integrand(phi), dtype=complex)))
        if prev is not None:
            diff = abs(val - prev)
            if diff < tol:
                return val
        prev = val
    raise AccuracyError(f"quadrature did not stabilize below {tol}", achieved=diff)


# ---------------------------------------------------------------------------
# current weight, Fredholm residual, Drude constant


def current_weight_f(params: AnisotropyParams, phi) -> complex | np.ndarray:
    """Optimal Mazur weight for the spin current: -i (m s1^2 / pi) / |sin phi|^4."""
    arr = np.asarray(phi, dtype=complex)
    if not np.all(np.abs(arr.real - np.pi / 2) < np.pi / (2 * params.m)):
        raise DomainError("phi outside the contraction strip")
    s1 = params.sin_k(1)
    out = -1j * (params.m * s1**2 / np.pi) / np.abs(np.sin(arr)) ** 4
    return out if arr.shape else complex(out)


def _kernel_values(params: AnisotropyParams, phi: complex, phis: np.ndarray) -> np.ndarray:
    # vectorized kernel evaluation; quadrature nodes never sit on a pole
    m = params.m
    s1 = params.sin_k(1)
    x = phi + phis
    return -(np.sin(phi) * np.sin(phis) / (2 * s1**2)) * np.sin((m - 1) * x) / np.sin(m * x)


def fredholm_lhs(
    params: AnisotropyParams,
    phi: complex,
    f_weight=None,
    tol: float = 1e-7,
    backend: str = "lens",
) -> complex:
    """Half the kernel integral of the weight, (1/2) int K(phi, .) f."""
    f = f_weight if f_weight is not None else (lambda p: current_weight_f(params, p))
    return 0.5 * integrate_over_domain(
        params, lambda p: _kernel_values(params, phi, p) * f(p), tol=tol, backend=backend
    )


def fredholm_residual(
    params: AnisotropyParams,
    f_weight=None,
    phi_samples=None,
    tol: float = 1e-7,
    backend: str = "lens",
) -> float:
    """Worst deviation of (1/2) int K f from -i/4 over the sample points."""
    if phi_samples is None:
        phi_samples = [np.pi / 2, np.pi / 2 + 0.4j]
    worst = 0.0
    for phi in phi_samples:
        lhs = fredholm_lhs(params, phi, f_weight=f_weight, tol=tol, backend=backend)
        worst = max(worst, abs(lhs + 0.25j))
    return worst


def drude_bound_DK(params: AnisotropyParams) -> float:
    """Closed-form Drude constant; the current bound is D_K / 4."""
    m = params.m
    s1 = params.sin_k(1)
    ssmall = _sin_pi_frac(1, m)
    return float(s1**2 / ssmall**2 * (1.0 - m / (2 * np.pi) * _sin_pi_frac(2, m)))


@dataclass(frozen=True)
class MazurFunctional:
    functional: float
    linear_term: float
    quadratic_term: float


def _graded_edge_quadrature(
    v_star: float, delta: float, v_cut: float, order: int = 10
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on [-v_cut, v_cut] refined geometrically toward v_star.

    delta sets the finest panel scale; panels double in width away from v_star,
    which keeps the kernel pole at O(1) relative distance from every panel.
    """
    pts = [max(-v_cut, min(v_cut, v_star))]
    step = float(delta)
    while step < 4.0 * v_cut:
        for s in (v_star - step, v_star + step):
            if -v_cut < s < v_cut:
                pts.append(s)
        step *= 2.0
    pts.extend((-v_cut, v_cut))
    breaks = np.unique(np.asarray(pts))
    ref_x, ref_w = _gauss(order)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    half = 0.5 * (breaks[1:] - breaks[:-1])
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def _edge_kernel_integrand(
    params: AnisotropyParams, phi_c: np.ndarray, phi_prime: complex
) -> np.ndarray:
    # -cot(phi) is the antiderivative of the holomorphic 1/sin^2(phi) factor of
    # conj(f); the remaining factor depends on conj(phi) alone, so Stokes turns
    # the strip integral of conj(f) K into this boundary integrand.
    pb = np.conj(phi_c)
    kappa = _kernel_values(params, phi_prime, pb)
    return (np.cos(phi_c) / np.sin(phi_c)) * kappa / np.sin(pb) ** 2


def _contour_inner_values(params: AnisotropyParams, phi_out: np.ndarray) -> np.ndarray:
    """Exact strip-boundary evaluation of int conj(f(phi)) K(conj(phi), phi') dA(phi).

    Valid only for the closed-form current weight, whose phi-dependence factors
    into a holomorphic part with an elementary antiderivative and a part
    anti-holomorphic in phi. One value per interior point of phi_out.
    """
    m = params.m
    s1 = params.sin_k(1)
    c0 = m * s1 * s1 / np.pi
    half = np.pi / (2 * m)
    left = np.pi / 2 - half
    right = np.pi / 2 + half
    cap_x, cap_w = _gauss(8)
    cap_u = np.pi / 2 + half * cap_x
    cap_wu = half * cap_w
    out = np.empty(np.shape(phi_out), dtype=complex)
    for idx, pp in enumerate(phi_out):
        pp = complex(pp)
        v_star = pp.imag
        v_cut = abs(v_star) + 12.0
        total = 0.0 + 0.0j
        for u_edge, direction in ((right, -1j), (left, 1j)):
            # the kernel pole sits off the edge at the lateral gap of phi'
            delta = max(abs(u_edge - pp.real), 1e-9)
            v, w = _graded_edge_quadrature(v_star, delta, v_cut)
            total += direction * np.sum(
                w * _edge_kernel_integrand(params, u_edge + 1j * v, pp)
            )
        # caps close the truncated rectangle; the integrand decays like e^{-2 v}
        total -= np.sum(cap_wu * _edge_kernel_integrand(params, cap_u + 1j * v_cut, pp))
        total += np.sum(cap_wu * _edge_kernel_integrand(params, cap_u - 1j * v_cut, pp))
        out[idx] = 0.5 * c0 * total
    return out


def mazur_bound_functional(
    params: AnisotropyParams,
    f_weight=None,
    a_func=None,
    tol: float = 1e-7,
    backend: str = "lens",
    max_level: int = 4,
) -> MazurFunctional:
    """Variational lower-bound functional F[f] = int Re(a f) - (1/4) int int K conj(f) f.

    With the default weight the inner kernel average is evaluated by the exact
    boundary-contour reduction, so only the smooth outer integral is sampled and
    the value converges spectrally. A user-supplied f_weight has no known
    analytic factorization and falls back to direct product quadrature of the
    double integral, which converges much more slowly near the strip edges; pass
    a looser tol there.
    """
    if max_level < 1:
        raise ConfigError("max_level must be at least 1")
    f = f_weight if f_weight is not None else (lambda p: current_weight_f(params, p))
    a = a_func if a_func is not None else (lambda p: np.full(np.shape(p), 0.25j))
    exact_inner = f_weight is None
    prev = None
    diff = np.inf
    for level in range(max_level + 1):
        phi, w = _quad_nodes(params, backend, level, None)
        fvals = np.asarray(f(phi), dtype=complex)
        linear = float(np.sum(w * np.real(np.asarray(a(phi), dtype=complex) * fvals)))
        if exact_inner:
            quad = np.sum(w * fvals * _contour_inner_values(params, phi))
        else:
            wf = w * fvals
            quad = 0.0 + 0.0j
            for start in range(0, len(phi), 512):
                sl = slice(start, start + 512)
                kmat = _kernel_values(params, np.conj(phi[sl])[:, None], phi[None, :])
                quad += np.sum(w[sl] * np.conj(fvals[sl]) * (kmat @ wf))
        value = linear - 0.25 * quad.real
        if prev is not None:
            diff = abs(value - prev)
            if diff < tol:
                return MazurFunctional(
                    functional=value, linear_term=linear, quadratic_term=0.25 * quad.real
                )
        prev = value
    raise AccuracyError(f"functional did not stabilize below {tol}", achieved=diff)


# ---------------------------------------------------------------------------
# exact-diagonalization time averages


@dataclass(frozen=True)
class TimeAverageResult:
    n: int
    clusters: list[tuple[float, int]]
    abar: np.ndarray = field(repr=False)
    susceptibility: float


def time_average(ham: np.ndarray, op: np.ndarray, cluster_tol: float = 1e-8) -> TimeAverageResult:
    """Infinite-time average of op under ham, and its susceptibility at infinite temperature.

    Eigenvalues closer than cluster_tol * ||ham|| are treated as one degenerate
    cluster, so exact symmetry multiplets survive double-precision jitter.
    """
    n = site_count(ham)
    w, basis = np.linalg.eigh(ham)
    scale = max(float(np.max(np.abs(w))), 1.0)
    ids = np.concatenate([[0], np.cumsum(np.diff(w) > cluster_tol * scale)])
    mask = ids[:, None] == ids[None, :]
    in_eig = basis.conj().T @ op @ basis
    abar = basis @ (in_eig * mask) @ basis.conj().T
    clusters = [
        (float(np.mean(w[ids == c])), int(np.sum(ids == c))) for c in range(ids[-1] + 1)
    ]
    susceptibility = float(hs_inner(abar, abar).real / (2 * n))
    return TimeAverageResult(n=n, clusters=clusters, abar=abar, susceptibility=susceptibility)


@dataclass(frozen=True)
class FiniteMazurBound:
    bound: float
    effective_rank: int
    gram_spectrum: np.ndarray = field(repr=False)
    grid: tuple[complex, ...]


def finite_n_mazur(
    params: AnisotropyParams,
    n: int,
    phi_grid,
    op: np.ndarray,
    rcond: float = 1e-10,
) -> FiniteMazurBound:
    """Gram projection of op onto the odd conserved family at the grid points.

    Nearby grid points give nearly parallel operators, so the Gram matrix is
    regularized by an eigenvalue cutoff; truncation only lowers the bound.
    """
    grid = tuple(complex(p) for p in phi_grid)
    family = [parity_split(build_transfer("Y", params, phi, n))[1] for phi in grid]
    k = len(family)
    gram = np.empty((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            gram[i, j] = hs_inner(family[i], family[j])
    overlaps = np.array([hs_inner(y, op) for y in family])
    evals, evecs = np.linalg.eigh(gram)
    keep = evals > rcond * float(np.max(evals)) if k else np.array([], dtype=bool)
    rotated = evecs.conj().T @ overlaps
    bound = float(np.sum(np.abs(rotated[keep]) ** 2 / evals[keep]).real / (2 * n))
    return FiniteMazurBound(
        bound=bound,
        effective_rank=int(np.sum(keep)),
        gram_spectrum=evals[::-1].copy(),
        grid=grid,
    )


def current_overlap(params: AnisotropyParams, phi: complex, n: int) -> complex:
    """Finite-size overlap (J, Y^-)/n; tends to the constant coefficient i/4."""
    odd = parity_split(build_transfer("Y", params, phi, n))[1]
    return complex(hs_inner(spin_current(n), odd) / n)


# ---------------------------------------------------------------------------
# monomial integrals and the time-averaged current expansion


def monomial_integrals_Ik(params: AnisotropyParams, k_max: int) -> np.ndarray:
    """Closed forms of int f cot^{2k}; pure monomial moments of the lens."""
    if k_max < 0:
        raise ConfigError("k_max must be nonnegative")
    m = params.m
    s1 = params.sin_k(1)
    cosb = _cos_pi_frac(1, m)
    cscb = 1.0 / _sin_pi_frac(1, m)
    out = np.zeros(k_max + 1, dtype=complex)
    for k in range(k_max + 1):
        total = 0.0
        for j in range(2 * k + 2):
            if j == 1:
                sinc = 1.0
            else:
                arg = (j - 1) * np.pi / m
                sinc = _sin_pi_frac(j - 1, m) / arg
            total += (-1) ** j * math.comb(2 * k + 1, j) * cosb ** (2 * k + 1 - j) * sinc
        out[k] = 2j * s1**2 * cscb ** (2 * k + 2) / (2 * k + 1) * total
    return out


def monomial_quadrature(
    params: AnisotropyParams, k: int, tol: float = 1e-7, backend: str = "lens"
) -> complex:
    """Direct quadrature route to I_k, cross-checking the closed form."""
    def integrand(phi):
        cot = np.cos(phi) / np.sin(phi)
        return current_weight_f(params, phi) * cot ** (2 * k)

    return integrate_over_domain(params, integrand, tol=tol, backend=backend)


@dataclass(frozen=True)
class CurrentExpansion:
    params: AnisotropyParams
    r_max: int
    coefficients: dict[tuple[int, tuple[str, ...]], complex] = field(repr=False)
    Ik: np.ndarray = field(repr=False)

    @property
    def a2(self) -> complex:
        return self.coefficients[(2, ())]

    def max_coefficient(self, r: int) -> float:
        vals = [abs(v) for (rr, _), v in self.coefficients.items() if rr == r]
        return max(vals, default=0.0)


def current_expansion(params: AnisotropyParams, r_max: int) -> CurrentExpansion:
    """Coefficients of the time-averaged current over interior density strings.

    Each string closes a walk on the reduced auxiliary space; its weight is
    the walk amplitude times a binomial combination of monomial integrals.
    Strings with an odd count of z letters integrate to zero.
    """
    if not 2 <= r_max <= 10:
        raise ConfigError("expansion order must lie in 2..10")
    blocks = restricted_B(params)
    mats = dict(zip(_LETTERS, blocks.stack()))
    ik = monomial_integrals_Ik(params, max((r_max - 2) // 2, 0))
    start = np.zeros(params.m - 1, dtype=complex)
    start[0] = 1.0
    coeffs: dict[tuple[int, tuple[str, ...]], complex] = {}

    def weight(nz: int, nplus: int) -> complex:
        if nz % 2:
            return 0.0 + 0.0j
        return sum(math.comb(nplus, j) * ik[j + nz // 2] for j in range(nplus + 1))

    def walk(r: int, letters: list[str], vec: np.ndarray, nz: int, nplus: int) -> None:
        if len(letters) == r - 2:
            amp = vec[0]
            if amp != 0:
                coeffs[(r, tuple(letters))] = complex(amp * weight(nz, nplus))
            return
        for letter in _LETTERS:
            nxt = vec @ mats[letter]
            if not np.any(nxt):
                continue
            letters.append(letter)
            walk(r, letters, nxt, nz + (letter == "z"), nplus + (letter == "+"))
            letters.pop()

    for r in range(2, r_max + 1):
        walk(r, [], start, 0, 0)
    return CurrentExpansion(params=params, r_max=r_max, coefficients=coeffs, Ik=ik)


def _interior_products(params: AnisotropyParams, phi: np.ndarray, length: int) -> np.ndarray:
    """Stack over nodes of <1| prod_i (sum_alpha L0^alpha x sigma^alpha) |1>.

    Walks from the second weight state never revisit the first, so the
    restricted blocks carry the full amplitude.
    """
    blocks = restricted_B(params)
    cot = np.cos(phi) / np.sin(phi)
    csc = 1.0 / np.sin(phi)
    prefs = (np.ones_like(csc), cot, csc, csc)
    dim = params.m - 1
    out = np.zeros((len(phi), dim, 1, 1), dtype=complex)
    out[:, 0, 0, 0] = 1.0
    for _ in range(length):
        k = out.shape[-1]
        nxt = np.zeros((len(phi), dim, 2 * k, 2 * k), dtype=complex)
        for pref, mat, sigma in zip(prefs, blocks.stack(), _PAULIS):
            grown = (
                out[:, :, :, None, :, None] * sigma[None, None, None, :, None, :]
            ).reshape(len(phi), dim, 2 * k, 2 * k)
            nxt += pref[:, None, None, None] * np.einsum("ab,paxy->pbxy", mat, grown)
        out = nxt
    return out[:, 0]


def density_weight_matrix(
    params: AnisotropyParams, r: int, level: int = 1, chunk: int = 32
) -> np.ndarray:
    """Dense r-site density integrated against the current weight, int f q_r."""
    if not 2 <= r <= 10:
        raise ConfigError("density support must lie in 2..10")
    phi, w = _lens_nodes(params.l, params.m, level)
    fvals = np.asarray(current_weight_f(params, phi), dtype=complex)
    interior = np.zeros((2 ** (r - 2),) * 2, dtype=complex)
    for start in range(0, len(phi), chunk):
        sl = slice(start, start + chunk)
        prods = _interior_products(params, phi[sl], r - 2)
        interior += np.einsum("p,pxy->xy", w[sl] * fvals[sl], prods)
    return np.kron(SIGMA_MINUS, np.kron(interior, SIGMA_PLUS))


def reconstruct_time_average(
    params: AnisotropyParams,
    n: int,
    r_max: int | None = None,
    nu: int = -1,
    level: int = 1,
) -> np.ndarray:
    """Translationally invariant sum of weighted densities, parity reassembled.

    nu is the spin-flip parity of the target observable (-1 for the current).
    """
    from .chain import parity_operator

    r_top = min(n, 10) if r_max is None else r_max
    if r_top > n:
        raise ConfigError("density support cannot exceed the chain length")
    acc = np.zeros((2**n, 2**n), dtype=complex)
    for r in range(2, r_top + 1):
        local = density_weight_matrix(params, r, level=level)
        acc += sum_of_shifts(np.kron(local, np.eye(2 ** (n - r), dtype=complex)))
    par = parity_operator(n)
    return 0.5 * (acc + nu * (par @ acc @ par))

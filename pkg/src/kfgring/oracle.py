"""Brute-force eigensolvers used as ground truth for the closed forms.

Radial: Numerov shooting for chi'' = Q(r; E) chi, Q = V_eff + M^2 - E^2, on
a grid uniform in x = ln r + r/rho.  The Liouville substitution
chi = sqrt(dr/dx) phi keeps the equation free of first derivatives:

    phi'' = [p^2 Q - S/2] phi,   p = dr/dx,  S = Schwarzian of r(x).

Near the origin the grid is logarithmic, far out it is linear.  The outward
and inward solutions meet at the outermost classical turning point; their
discrete Casoratian vanishes exactly at an eigenvalue and is conserved along
the grid, so its sign is a clean bracketing function in E.

Angular: cell-centred finite differences for the Sturm-Liouville form of
the theta equation, solved as a symmetric tridiagonal eigenproblem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit
from scipy.linalg import eigh_tridiagonal
from scipy.special import lambertw

from .errors import DomainError, NoBoundState, NotBound, OracleFailure
from .levels import EnergyLevel
from .nu_radial import EDGE, bracket_roots
from .potential import CouplingCase, PotentialSpec, effective_radial_potential


@dataclass(frozen=True)
class OracleConfig:
    r_max: float | None = None
    grid_n: int = 40000
    match_tol: float = 1e-8
    max_outer_iter: int = 8
    scan_points: int = 256
    angular_n: int = 4000

    def __post_init__(self):
        if self.grid_n < 2000:
            raise DomainError("grid_n must be at least 2000")

    def radial_extent(self, delta: float) -> float:
        r_max = 20.0 / delta if self.r_max is None else self.r_max
        if r_max * delta < 20.0 - 1e-12:
            raise DomainError(f"r_max * delta = {r_max * delta:.3g} < 20; the Hulthen tail is not resolved")
        return r_max


DEFAULT_CONFIG = OracleConfig()


@dataclass(frozen=True)
class RadialGrid:
    r: np.ndarray
    p: np.ndarray
    half_schwarzian: np.ndarray
    dx: float


@lru_cache(maxsize=32)
def radial_grid(delta: float, M: float, r_max: float, n: int) -> RadialGrid:
    rho = min(1.0 / delta, 5.0 / M)
    r0 = 1e-6 / delta
    x = np.linspace(math.log(r0) + r0 / rho, math.log(r_max) + r_max / rho, n)
    # r e^{r/rho} = e^x
    r = rho * np.real(lambertw(np.exp(x) / rho))
    p = r * rho / (r + rho)
    schwarzian = -(rho**3) * (2.0 * r + 0.5 * rho) / (r + rho) ** 4
    return RadialGrid(r=r, p=p, half_schwarzian=0.5 * schwarzian, dx=float(x[1] - x[0]))


@njit(cache=True, nogil=True)
def _numerov_match(f, dx, m, o0, o1, i_last, i_prev):
    """Outward to m+1, inward to m; returns Casoratian data and node count."""
    n = f.shape[0]
    h12 = dx * dx / 12.0
    pa = (1.0 - h12 * f[0]) * o0
    pb = (1.0 - h12 * f[1]) * o1
    nodes = 0
    if o0 * o1 < 0.0:
        nodes += 1
    sign = 1.0 if o1 > 0.0 else -1.0
    for i in range(1, m + 1):
        phi = pb / (1.0 - h12 * f[i])
        pc = 2.0 * pb - pa + 12.0 * h12 * f[i] * phi
        pa = pb
        pb = pc
        nxt = pc / (1.0 - h12 * f[i + 1])
        if nxt != 0.0:
            s = 1.0 if nxt > 0.0 else -1.0
            if s != sign:
                nodes += 1
                sign = s
        if abs(pb) > 1e200:
            pa *= 1e-200
            pb *= 1e-200
    qa = (1.0 - h12 * f[n - 1]) * i_last
    qb = (1.0 - h12 * f[n - 2]) * i_prev
    sign = 1.0 if i_prev > 0.0 else -1.0
    for i in range(n - 2, m, -1):
        phi = qb / (1.0 - h12 * f[i])
        qc = 2.0 * qb - qa + 12.0 * h12 * f[i] * phi
        qa = qb
        qb = qc
        nxt = qc / (1.0 - h12 * f[i - 1])
        if nxt != 0.0:
            s = 1.0 if nxt > 0.0 else -1.0
            if s != sign:
                nodes += 1
                sign = s
        if abs(qb) > 1e200:
            qa *= 1e-200
            qb *= 1e-200
    # out: pa at m, pb at m+1; in: qb at m, qa at m+1
    return pa, pb, qb, qa, nodes


@njit(cache=True, nogil=True)
def _numerov_profile(f, dx, m, o0, o1, i_last, i_prev):
    """Full phi on the grid, inward piece scaled to meet the outward one at m."""
    n = f.shape[0]
    h12 = dx * dx / 12.0
    w = 1.0 - h12 * f
    phi = np.empty(n)
    phi[0] = o0
    phi[1] = o1
    for i in range(1, m + 1):
        psi = 2.0 * w[i] * phi[i] - w[i - 1] * phi[i - 1] + 12.0 * h12 * f[i] * phi[i]
        phi[i + 1] = psi / w[i + 1]
        if abs(phi[i + 1]) > 1e200:
            for j in range(i + 2):
                phi[j] *= 1e-200
    tail = np.empty(n)
    tail[n - 1] = i_last
    tail[n - 2] = i_prev
    for i in range(n - 2, m, -1):
        psi = 2.0 * w[i] * tail[i] - w[i + 1] * tail[i + 1] + 12.0 * h12 * f[i] * tail[i]
        tail[i - 1] = psi / w[i - 1]
        if abs(tail[i - 1]) > 1e200:
            for j in range(i - 1, n):
                tail[j] *= 1e-200
    scale = phi[m] / tail[m]
    for j in range(m + 1, n):
        phi[j] = tail[j] * scale
    return phi


@dataclass(frozen=True)
class ShootResult:
    defect: float
    nodes: int
    casoratian: float
    r_match: float


def _q_profile(spec: PotentialSpec, E: float, lam: float, r: np.ndarray, use_approx: bool) -> np.ndarray:
    return effective_radial_potential(spec, E, lam, r, use_approx) + (spec.M**2 - E**2)


def _setup(spec, E, lam, use_approx, cfg):
    if not abs(E) < spec.M:
        raise NotBound(f"|E| = {abs(E)} must be below M = {spec.M}")
    grid = radial_grid(spec.delta, spec.M, cfg.radial_extent(spec.delta), cfg.grid_n)
    r, p = grid.r, grid.p
    q = _q_profile(spec, E, lam, r, use_approx)
    f = p * p * q - grid.half_schwarzian
    n = len(r)
    allowed = np.nonzero(q < 0.0)[0]
    m = int(allowed[-1]) if len(allowed) else int(np.argmin(q))
    m = min(max(m, 8), n - 8)

    # Frobenius start chi ~ r^K (1 + a r): K from the 1/r^2 strength, a from the 1/r one.
    quad = spec.S0**2 - spec.V0**2
    disc = 0.25 + quad / spec.delta**2 + lam
    if disc < 0:
        raise OracleFailure("complex indicial exponent at the origin")
    K = 0.5 + math.sqrt(disc)
    lin = -2.0 * (spec.M * spec.S0 + E * spec.V0)
    a = (lin - quad) / spec.delta / (2.0 * K)
    chi0 = r[:2] ** K * (1.0 + a * r[:2])
    start = chi0 / np.sqrt(p[:2])
    start = start / abs(start[1])

    # Decaying WKB start at the far edge.
    if f[-1] <= 0 or f[-2] <= 0:
        raise OracleFailure("far edge of the grid is classically allowed; increase r_max")
    ratio = math.exp(0.5 * (math.sqrt(f[-1]) + math.sqrt(f[-2])) * grid.dx) * (f[-1] / f[-2]) ** 0.25
    return grid, f, m, start, (1.0, ratio)


def _shoot(spec, E, lam, use_approx, cfg) -> ShootResult:
    grid, f, m, start, tail = _setup(spec, E, lam, use_approx, cfg)
    om, om1, im, im1, nodes = _numerov_match(f, grid.dx, m, start[0], start[1], tail[0], tail[1])
    if not all(map(math.isfinite, (om, om1, im, im1))):
        raise OracleFailure(f"overflow while integrating at E = {E}")
    cas = (om * im1 - om1 * im) / (math.hypot(om, om1) * math.hypot(im, im1))
    if om == 0.0 or im == 0.0:
        defect = math.inf
    else:
        defect = (im1 / im - om1 / om) / (grid.dx * grid.p[m])
    return ShootResult(defect=defect, nodes=int(nodes), casoratian=cas, r_match=float(grid.r[m]))


def shoot_radial(
    spec: PotentialSpec, E: float, lam: float, use_approx: bool = True, cfg: OracleConfig = DEFAULT_CONFIG
) -> tuple[float, int]:
    """(log-derivative mismatch at the matching radius, interior node count)."""
    res = _shoot(spec, E, lam, use_approx, cfg)
    return res.defect, res.nodes


def ode_profile(
    spec: PotentialSpec, E: float, lam: float, use_approx: bool = True, cfg: OracleConfig = DEFAULT_CONFIG
) -> tuple[np.ndarray, np.ndarray]:
    """(r, chi) on the oracle grid, unnormalized; meaningful at an eigenvalue."""
    grid, f, m, start, tail = _setup(spec, E, lam, use_approx, cfg)
    phi = _numerov_profile(f, grid.dx, m, start[0], start[1], tail[0], tail[1])
    return grid.r, phi * np.sqrt(grid.p)


def _node_scan(spec, lam, use_approx, cfg, lo, hi):
    # Cosine spacing crowds the samples toward +-M where levels accumulate.
    t = np.linspace(math.acos(max(min(hi / spec.M, 1.0), -1.0)), math.acos(max(min(lo / spec.M, 1.0), -1.0)), cfg.scan_points)
    grid = spec.M * np.cos(t)
    grid[0], grid[-1] = hi, lo
    grid = grid[::-1].copy()
    values = np.empty(len(grid))
    nodes = np.empty(len(grid), dtype=int)
    for i, E in enumerate(grid):
        res = _shoot(spec, float(E), lam, use_approx, cfg)
        values[i], nodes[i] = res.casoratian, res.nodes
    return grid, values, nodes


def _refine_grid(spec, lam, use_approx, cfg, grid, values, nodes, depth=5):
    """Split cells whose node count jumps by two or more (possible missed pair)."""
    out_e, out_v = [grid[0]], [values[0]]
    for i in range(len(grid) - 1):
        if depth > 0 and abs(int(nodes[i + 1]) - int(nodes[i])) >= 2:
            sub = np.linspace(grid[i], grid[i + 1], 9)
            sv = np.empty(9)
            sn = np.empty(9, dtype=int)
            for j, E in enumerate(sub):
                res = _shoot(spec, float(E), lam, use_approx, cfg)
                sv[j], sn[j] = res.casoratian, res.nodes
            e2, v2 = _refine_grid(spec, lam, use_approx, cfg, sub, sv, sn, depth - 1)
            out_e.extend(e2[1:])
            out_v.extend(v2[1:])
        else:
            out_e.append(grid[i + 1])
            out_v.append(values[i + 1])
    return np.array(out_e), np.array(out_v)


@lru_cache(maxsize=256)
def _eigen_scan(spec, lam, use_approx, cfg, window) -> tuple[tuple[float, int, float, float], ...]:
    lo, hi = window or (-spec.M * (1.0 - EDGE), spec.M * (1.0 - EDGE))
    grid, values, nodes = _node_scan(spec, lam, use_approx, cfg, lo, hi)
    grid, values = _refine_grid(spec, lam, use_approx, cfg, grid, values, nodes)

    def cas(E):
        return _shoot(spec, E, lam, use_approx, cfg).casoratian

    found = []
    for E in bracket_roots(cas, grid, values, 1e-13):
        res = _shoot(spec, E, lam, use_approx, cfg)
        found.append((E, res.nodes, res.defect, res.r_match))
    return tuple(found)


def solve_ode_energies(
    spec: PotentialSpec,
    lam: float,
    use_approx: bool = True,
    cfg: OracleConfig = DEFAULT_CONFIG,
    case: CouplingCase | str = CouplingCase.VneqS,
    window: tuple[float, float] | None = None,
) -> list[EnergyLevel]:
    """Every eigenvalue of the energy-dependent radial problem in the window.

    ``spec`` is used as given: for V = S or V = -S pass ``spec.for_case(case)``.
    Each level's ``n_r`` is its node count.  Scans are cached per input.
    """
    case = CouplingCase.parse(case)
    found = _eigen_scan(spec, float(lam), bool(use_approx), cfg, None if window is None else tuple(window))
    return [
        EnergyLevel(
            E=E,
            n_r=nodes,
            lam=lam,
            case=case,
            route="oracle",
            residual=defect,
            flags=["bound"],
            diagnostics={"r_match": r_match, "use_approx": use_approx},
        )
        for E, nodes, defect, r_match in found
    ]


def solve_ode_energy(
    spec: PotentialSpec,
    n_r: int,
    lam: float,
    use_approx: bool = True,
    cfg: OracleConfig = DEFAULT_CONFIG,
    case: CouplingCase | str = CouplingCase.VneqS,
    near: float | None = None,
    window: tuple[float, float] | None = None,
) -> EnergyLevel:
    """The level with ``n_r`` nodes; ties go to the one nearest ``near``
    (default: the highest energy)."""
    levels = [lv for lv in solve_ode_energies(spec, lam, use_approx, cfg, case, window) if lv.n_r == n_r]
    if not levels:
        raise NoBoundState(f"no level with {n_r} nodes for lambda = {lam}")
    if near is None:
        return max(levels, key=lambda lv: lv.E)
    return min(levels, key=lambda lv: abs(lv.E - near))


def refine_ode_energy(
    spec: PotentialSpec,
    E_guess: float,
    lam: float,
    use_approx: bool = True,
    cfg: OracleConfig = DEFAULT_CONFIG,
    width: float = 1e-3,
) -> float:
    """Oracle eigenvalue in a small window around ``E_guess``, widening as needed."""
    cas = lambda E: _shoot(spec, E, lam, use_approx, cfg).casoratian  # noqa: E731
    limit = spec.M * (1.0 - EDGE)
    for _ in range(cfg.max_outer_iter):
        lo, hi = max(E_guess - width, -limit), min(E_guess + width, limit)
        grid = np.linspace(lo, hi, 17)
        values = np.array([cas(float(E)) for E in grid])
        roots = bracket_roots(cas, grid, values, 1e-13)
        if roots:
            return min(roots, key=lambda E: abs(E - E_guess))
        width *= 4.0
    raise NoBoundState(f"no oracle eigenvalue near E = {E_guess}")


def fd_angular_eig(
    spec: PotentialSpec, E: float, m: int, k_index: int, cfg: OracleConfig | int = DEFAULT_CONFIG
) -> float:
    """k-th eigenvalue (0-based) of

        -(1/sin t)(sin t Theta')' + (m^2 + 2(M+E)(beta' + beta cos t))/sin^2 t Theta = lam Theta

    on a cell-centred theta grid; flux vanishes at the poles.
    """
    n = cfg if isinstance(cfg, int) else cfg.angular_n
    if n < 2 * (k_index + 2):
        raise OracleFailure("angular grid too coarse for the requested eigenvalue")
    gamma = 2.0 * (E + spec.M)
    h = math.pi / n
    theta = (np.arange(n) + 0.5) * h
    s = np.sin(theta)
    face = np.sin(np.arange(n + 1) * h)
    pot = (m * m + gamma * (spec.beta_prime + spec.beta * np.cos(theta))) / (s * s)
    diag = (face[1:] + face[:-1]) / (h * h * s) + pot
    off = -face[1:-1] / (h * h * np.sqrt(s[1:] * s[:-1]))
    try:
        ev = eigh_tridiagonal(diag, off, select="i", select_range=(0, k_index), eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise OracleFailure(f"angular eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise OracleFailure("non-finite angular eigenvalue")
    return float(ev[k_index])

"""Supersymmetric route: superpotential, partner potentials, shape invariance.

The ansatz W(r) = -(C + D h(r)), h = e^{-delta r}/(1 - e^{-delta r}), makes
V1 = W^2 - W' reproduce V_eff + (M^2 - E^2) up to a constant.  Matching the
coefficients of h and h^2 fixes D = delta/2 + delta sqrt(1/4 + lam + beta^2)
and C = g(D) with

    g(x) = x/2 - delta^2 (alpha^2 + beta^2) / (2x).

Partner potentials are shape invariant under D -> D + delta; telescoping the
remainders gives the ladder g(D + n delta)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoNormalizableGroundState, NotBound
from .levels import EnergyLevel
from .nu_radial import (
    SCAN_POINTS,
    _check_lambda,
    bracket_roots,
    coupling_constants,
    energy_grid,
    radial_norm_integral,
    radial_tail_cutoff,
)
from .potential import CouplingCase, PotentialSpec, hulthen_factor


@dataclass(frozen=True)
class SusyFactorization:
    c_const: float
    d_const: float
    delta: float
    alpha_sq: float
    beta_sq: float
    lam: float
    E_context: float
    residuals: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def coupling(self) -> float:
        """delta^2 (alpha^2 + beta^2), the constant shared by every step of the ladder."""
        return self.delta**2 * (self.alpha_sq + self.beta_sq)

    def step(self, i: int) -> "SusyFactorization":
        """Factorization with D_i = D + i delta and C_i = g(D_i)."""
        d = self.d_const + i * self.delta
        if d <= 0:
            raise DomainError(f"D + i delta = {d} must stay positive")
        return SusyFactorization(
            c_const=ladder_g(d, self.coupling),
            d_const=d,
            delta=self.delta,
            alpha_sq=self.alpha_sq,
            beta_sq=self.beta_sq,
            lam=self.lam,
            E_context=self.E_context,
        )


def ladder_g(x: float, coupling: float) -> float:
    if x == 0:
        raise DomainError("ladder constant evaluated at D = 0")
    return 0.5 * x - coupling / (2.0 * x)


def factorize(
    spec: PotentialSpec, E: float, lam: float, case: CouplingCase | str = CouplingCase.VneqS
) -> SusyFactorization:
    """C and D at energy E without the normalizability requirement on C."""
    case = CouplingCase.parse(case)
    if not abs(E) < spec.M:
        raise NotBound(f"|E| = {abs(E)} must be below M = {spec.M}")
    alpha_sq, beta_sq = coupling_constants(spec, E, case)
    delta = spec.delta
    q = _check_lambda(beta_sq, lam)
    D = 0.5 * delta + delta * q
    C = ladder_g(D, delta**2 * (alpha_sq + beta_sq))
    d2 = delta**2
    eps_sq_d2 = spec.M**2 - E**2
    residuals = (
        C * C - (eps_sq_d2 + d2 * spec.C0 * lam),
        2.0 * C * D - delta * D - d2 * (lam - alpha_sq),
        D * D - delta * D - d2 * (lam + beta_sq),
    )
    return SusyFactorization(C, D, delta, alpha_sq, beta_sq, lam, E, residuals)


def solve_cd(
    spec: PotentialSpec, E: float, lam: float, case: CouplingCase | str = CouplingCase.VneqS
) -> SusyFactorization:
    """Superpotential constants; C must be negative for a normalizable chi_0.

    ``residuals`` holds the three coefficient-matching conditions; the first
    (C^2 = eps^2 delta^2 + delta^2 C0 lam) vanishes only at a ground-state energy.
    """
    fac = factorize(spec, E, lam, case)
    if fac.c_const >= 0:
        raise NoNormalizableGroundState(f"C = {fac.c_const:.6g} >= 0 at E = {E}")
    return fac


def superpotential(fac: SusyFactorization, r):
    h = hulthen_factor(fac.delta, r)
    out = -(fac.c_const + fac.d_const * h)
    return float(out) if np.ndim(out) == 0 else out


def superpotential_prime(fac: SusyFactorization, r):
    """W'(r) = D delta (h + h^2)."""
    h = hulthen_factor(fac.delta, r)
    out = fac.d_const * fac.delta * h * (1.0 + h)
    return float(out) if np.ndim(out) == 0 else out


def partner_potentials(fac: SusyFactorization, r):
    """(V1, V2) = (W^2 - W', W^2 + W'), without any additive energy constant."""
    w = np.asarray(superpotential(fac, r))
    wp = np.asarray(superpotential_prime(fac, r))
    v1, v2 = w * w - wp, w * w + wp
    if v1.ndim == 0:
        return float(v1), float(v2)
    return v1, v2


def shape_invariance_remainder(
    spec: PotentialSpec, lam: float, i: int, E: float | None = None, case: CouplingCase | str = CouplingCase.VneqS
) -> float:
    """R(D_i) = V2(D_{i-1}, r) - V1(D_i, r) = g(D_{i-1})^2 - g(D_i)^2.

    ``E`` fixes alpha^2 for energy-dependent couplings (defaults to 0).
    """
    if i < 1:
        raise DomainError("remainder index starts at 1")
    fac = factorize(spec, 0.0 if E is None else E, lam, case)
    return remainder(fac, i)


def remainder(fac: SusyFactorization, i: int) -> float:
    prev = fac.d_const + (i - 1) * fac.delta
    cur = fac.d_const + i * fac.delta
    if prev <= 0 or cur <= 0:
        raise DomainError("D + i delta must stay positive")
    return ladder_g(prev, fac.coupling) ** 2 - ladder_g(cur, fac.coupling) ** 2


def level_energy_shift(fac: SusyFactorization, n_r: int, C0: float) -> float:
    """Eigenvalue of -d^2/dr^2 + V_eff for the n_r-th level, by telescoping.

    The ground level of V1 is zero; V_eff = V1 - C^2 + lam delta^2 C0 and each
    climb of the ladder adds R(D_i).
    """
    e = fac.lam * fac.delta**2 * C0 - fac.c_const**2
    for i in range(1, n_r + 1):
        e += remainder(fac, i)
    return e


def susy_energy_residual(
    spec: PotentialSpec, E: float, n_r: int, lam: float, case: CouplingCase | str = CouplingCase.VneqS
) -> float:
    """(M^2 - E^2) + level_energy_shift: zero when E^2 - M^2 is the n_r-th eigenvalue."""
    fac = factorize(spec, E, lam, case)
    return spec.M**2 - E**2 + level_energy_shift(fac, n_r, spec.C0)


@dataclass
class GroundState:
    fac: SusyFactorization
    norm: float

    def __call__(self, r):
        return ground_state_wf(self.fac, r, self.norm)


def ground_state_wf(fac: SusyFactorization, r, norm: float | None = None):
    """N0 e^{C r} (1 - e^{-delta r})^{D/delta}; N0 from quadrature when not given."""
    if fac.c_const >= 0:
        raise NoNormalizableGroundState(f"C = {fac.c_const:.6g} >= 0")
    rr = np.asarray(r, dtype=float)
    if np.any(rr <= 0):
        raise DomainError("radius must be positive")
    if norm is None:
        norm = ground_state_norm(fac)
    out = norm * np.exp(fac.c_const * rr) * (-np.expm1(-fac.delta * rr)) ** (fac.d_const / fac.delta)
    return float(out) if out.ndim == 0 else out


def ground_state_norm(fac: SusyFactorization) -> float:
    sqrt_c = -fac.c_const / fac.delta
    K = fac.d_const / fac.delta
    hi = radial_tail_cutoff(sqrt_c, K, 0, fac.delta)
    raw = radial_norm_integral(lambda r: ground_state_wf(fac, r, 1.0), hi)
    return 1.0 / math.sqrt(raw)


def ground_state(fac: SusyFactorization) -> GroundState:
    return GroundState(fac, ground_state_norm(fac))


@dataclass(frozen=True)
class EquivalenceReport:
    E_nu: float
    E_susy: float
    abs_diff: float
    remainder_flatness: float
    ratio_std: float

    def to_dict(self) -> dict:
        return {
            "E_nu": self.E_nu,
            "E_susy": self.E_susy,
            "abs_diff": self.abs_diff,
            "remainder_flatness": self.remainder_flatness,
            "ratio_std": self.ratio_std,
        }


def remainder_flatness(fac: SusyFactorization, i: int, radii) -> float:
    """max - min over ``radii`` of V2(D_i, r) - V1(D_{i+1}, r)."""
    _, v2 = partner_potentials(fac.step(i), radii)
    v1, _ = partner_potentials(fac.step(i + 1), radii)
    diff = np.asarray(v2) - np.asarray(v1)
    return float(diff.max() - diff.min())


def solve_susy_energies(
    spec: PotentialSpec,
    n_r: int,
    lam: float,
    case: CouplingCase | str = CouplingCase.VneqS,
    scan_points: int = SCAN_POINTS,
    tol: float = 1e-12,
) -> list[EnergyLevel]:
    """Roots of the SUSY residual in (-M, M), flagged like the NU roots."""
    case = CouplingCase.parse(case)
    grid = energy_grid(spec.M, scan_points)

    def g(E):
        return susy_energy_residual(spec, E, n_r, lam, case)

    values = np.array([g(E) for E in grid])
    levels = []
    for E in bracket_roots(g, grid, values, tol):
        top = factorize(spec, E, lam, case).step(n_r)
        if top.c_const >= 0:
            flags = ["spurious"]
        elif lam * spec.C0 * spec.delta**2 >= top.c_const**2:
            flags = ["not-bound"]
        else:
            flags = ["bound"]
        levels.append(
            EnergyLevel(E=E, n_r=n_r, lam=lam, case=case, route="SUSY", residual=g(E), flags=flags,
                        diagnostics={"C": top.c_const, "D": top.d_const})
        )
    return levels

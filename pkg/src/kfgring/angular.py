"""Closed-form solution of the polar-angle equation.

With z = cos(theta) and gamma = 2(E + M) the equation

    Theta'' - 2z/(1 - z^2) Theta' + [lam (1 - z^2) - m^2 - gamma (beta' + beta z)] / (1 - z^2)^2 Theta = 0

has polynomial solutions when lam = (N + zeta)(N + zeta + 1).  The
eigenfunctions are (1 - z)^{(B+C)/2} (1 + z)^{(B-C)/2} P_N^{(B+C, B-C)}(z).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleRing, SingularPointError
from .potential import PotentialSpec
from .special import jacobi_poly, log_gamma


@dataclass(frozen=True)
class AngularSolution:
    gamma: float
    u: float
    zeta: float
    B_ang: float
    C_ang: float
    lam: float
    l_eff: float
    norm: float
    N: int
    m: int

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "u": self.u,
            "zeta": self.zeta,
            "B": self.B_ang,
            "C": self.C_ang,
            "lambda": self.lam,
            "l_eff": self.l_eff,
            "norm": self.norm,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __call__(self, theta):
        return theta_wavefunction(self, self.N, theta)


def ring_feasible(spec: PotentialSpec, E: float, m: int) -> bool:
    """m^2 >= gamma (beta - beta'), i.e. (m^2 + gamma beta')^2 >= gamma^2 beta^2."""
    gamma = 2.0 * (E + spec.M)
    return m * m + gamma * spec.beta_prime - gamma * spec.beta >= 0.0


def zeta_of(spec: PotentialSpec, E: float, m: int) -> float:
    """zeta = sqrt((m^2 + gamma beta' + u)/2); raises InfeasibleRing."""
    gamma = 2.0 * (E + spec.M)
    base = m * m + gamma * spec.beta_prime
    u_sq = base * base - (gamma * spec.beta) ** 2
    if not ring_feasible(spec, E, m):
        raise InfeasibleRing(
            f"m^2 = {m * m} < gamma (beta - beta') = {gamma * (spec.beta - spec.beta_prime):.6g}"
        )
    u = math.sqrt(max(u_sq, 0.0))
    return math.sqrt(max(0.5 * (base + u), 0.0))


def angular_norm(B_ang: float, C_ang: float, N: int) -> float:
    """C_N with int_{-1}^{1} Theta_N^2 dz = 1 (Jacobi orthogonality)."""
    args = (N + 2.0 * B_ang + 1.0, N + B_ang + C_ang + 1.0, N + B_ang - C_ang + 1.0)
    if min(args) <= 0 or 2 * N + 2 * B_ang + 1 <= 0:
        raise DomainError(f"angular_norm at a gamma pole: B={B_ang}, C={C_ang}, N={N}")
    log_sq = (
        math.log(2 * N + 2 * B_ang + 1)
        + log_gamma(N + 1.0)
        + log_gamma(args[0])
        - (2 * B_ang + 1) * math.log(2.0)
        - log_gamma(args[1])
        - log_gamma(args[2])
    )
    return math.exp(0.5 * log_sq)


def solve_angular(spec: PotentialSpec, E: float, m: int, N: int) -> AngularSolution:
    if N < 0 or int(N) != N:
        raise DomainError(f"N must be a nonnegative integer, got {N!r}")
    gamma = 2.0 * (E + spec.M)
    base = m * m + gamma * spec.beta_prime
    zeta = zeta_of(spec, E, m)
    u = math.sqrt(max(base * base - (gamma * spec.beta) ** 2, 0.0))
    c_ang = math.sqrt(max(0.5 * (base - u), 0.0))
    b_ang = zeta
    if b_ang + c_ang <= -1 or b_ang - c_ang <= -1:
        raise DomainError("Jacobi parameters B +/- C must exceed -1")
    l_eff = N + zeta
    return AngularSolution(
        gamma=gamma,
        u=u,
        zeta=zeta,
        B_ang=b_ang,
        C_ang=c_ang,
        lam=l_eff * (l_eff + 1.0),
        l_eff=l_eff,
        norm=angular_norm(b_ang, c_ang, N),
        N=N,
        m=m,
    )


def theta_wavefunction(sol: AngularSolution, N: int, theta):
    th = np.asarray(theta, dtype=float)
    if np.any(th <= 0) or np.any(th >= math.pi):
        raise SingularPointError("theta must lie strictly inside (0, pi)")
    z = np.cos(th)
    # 1 -/+ z via half-angle forms keeps precision near the poles.
    one_minus = 2.0 * np.sin(0.5 * th) ** 2
    one_plus = 2.0 * np.cos(0.5 * th) ** 2
    a, b = sol.B_ang + sol.C_ang, sol.B_ang - sol.C_ang
    norm = sol.norm if N == sol.N else angular_norm(sol.B_ang, sol.C_ang, N)
    out = norm * one_minus ** (0.5 * a) * one_plus ** (0.5 * b) * jacobi_poly(N, a, b, z)
    return float(out) if out.ndim == 0 else out

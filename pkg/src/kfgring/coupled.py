"""Self-consistent spectrum of the combined Hulthen plus ring-shaped problem.

The angular eigenvalue eta = (N + zeta)(N + zeta + 1) depends on E through
gamma = 2(E + M), and the radial energy equation depends on eta.  Each
iteration solves the radial equation with eta frozen at the current energy,
then moves halfway toward that root.  The loop stops as soon as the radial
root is itself self-consistent to within ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .angular import ring_feasible, solve_angular
from .errors import ConvergenceFailure, DomainError, InfeasibleRing, KFGError, NoBoundState
from .levels import EnergyLevel
from .nu_radial import energy_rhs, energy_residual, solve_energies
from .potential import CouplingCase, PotentialSpec
from .special import find_root_bracketed

DAMPING = 0.5
START_OFFSET = 1e-3
BRANCHES = ("auto", "positive", "negative", "all")


def eta_of(spec: PotentialSpec, E: float, N: int, m: int) -> float:
    """Angular separation constant at energy E."""
    return solve_angular(spec, E, m, N).lam


@dataclass(frozen=True)
class Existence:
    ring_ok: bool
    binding_ok: bool

    @property
    def flag(self) -> str:
        return "bound" if self.ring_ok and self.binding_ok else "not-bound"


def existence_conditions(spec: PotentialSpec, E: float, n_r: int, eta: float, m: int,
                         case: CouplingCase | str = CouplingCase.VneqS) -> Existence:
    """Ring feasibility m^2 >= gamma (beta - beta') and positivity of the binding M^2 - E^2."""
    case = CouplingCase.parse(case)
    return Existence(
        ring_ok=ring_feasible(spec, E, m),
        binding_ok=float(energy_rhs(spec, E, n_r, eta, case)) > 0.0,
    )


def existence_check(spec: PotentialSpec, level: EnergyLevel, n_r: int | None = None, eta: float | None = None) -> str:
    """'bound' when both existence inequalities hold at the level's energy."""
    n_r = level.n_r if n_r is None else n_r
    eta = level.lam if eta is None else eta
    m = 0 if level.m is None else level.m
    return existence_conditions(spec, level.E, n_r, eta, m, level.case).flag


def _self_consistency(spec, E, n_r, N, m, case):
    """Residual F(E) = g(E; eta(E)) and its Newton distance |F/F'|."""
    F = energy_residual(spec, E, n_r, eta_of(spec, E, N, m), case)
    h = 1e-7 * spec.M
    lo, hi = max(E - h, -spec.M * (1 - 1e-12)), min(E + h, spec.M * (1 - 1e-12))
    dF = (energy_residual(spec, hi, n_r, eta_of(spec, hi, N, m), case)
          - energy_residual(spec, lo, n_r, eta_of(spec, lo, N, m), case)) / (hi - lo)
    return F, abs(F / dF) if dF != 0 else math.inf


def _polish(spec, E, dist, n_r, N, m, case):
    """Brent refinement of F(E) = g(E; eta(E)) inside a few Newton distances."""
    if not math.isfinite(dist) or dist == 0.0:
        return E
    F = lambda x: energy_residual(spec, x, n_r, eta_of(spec, x, N, m), case)  # noqa: E731
    width = 4.0 * dist + 1e-15
    lo, hi = max(E - width, -spec.M * (1 - 1e-12)), min(E + width, spec.M * (1 - 1e-12))
    try:
        if F(lo) * F(hi) < 0:
            return find_root_bracketed(F, lo, hi, 1e-15)
    except (KFGError, ValueError):
        pass
    return E


def _bound_roots(spec, n_r, eta, case, sign):
    roots = [lv for lv in solve_energies(spec, n_r, eta, case) if lv.bound]
    return [lv for lv in roots if (lv.E > 0) == (sign > 0)]


def _iterate_branch(spec, n_r, N, m, case, tol, max_iter, sign, damping):
    E = sign * spec.M * (1.0 - START_OFFSET)
    if not ring_feasible(spec, E, m):
        raise InfeasibleRing(f"m^2 < gamma (beta - beta') at the starting energy E = {E}")
    history = [E]
    for it in range(1, max_iter + 1):
        eta = eta_of(spec, E, N, m)
        roots = _bound_roots(spec, n_r, eta, case, sign)
        if not roots:
            raise NoBoundState(f"no bound root with sign {sign:+d} at eta = {eta:.6g}")
        target = min(roots, key=lambda lv: abs(lv.E - E)).E
        _, dist = _self_consistency(spec, target, n_r, N, m, case)
        if dist < tol or abs(target - E) < tol:
            target = _polish(spec, target, dist, n_r, N, m, case)
            history.append(target)
            return target, it, history
        E = E + damping * (target - E)
        if not ring_feasible(spec, E, m):
            raise InfeasibleRing(f"iteration left the feasible ring region at E = {E}")
        history.append(E)
    raise ConvergenceFailure(f"no self-consistent energy after {max_iter} iterations", history)


def _finish(spec, E, n_r, N, m, case, eta, iterations, history, frozen):
    F = energy_residual(spec, E, n_r, eta, case)
    ex = existence_conditions(spec, E, n_r, eta, m, case)
    sol = solve_angular(spec, E, m, N)
    return EnergyLevel(
        E=E,
        n_r=n_r,
        lam=eta,
        case=case,
        route="NU",
        residual=F,
        flags=[ex.flag],
        N=N,
        m=m,
        diagnostics={
            "iterations": iterations,
            "history": history,
            "zeta": sol.zeta,
            "l_eff": sol.l_eff,
            "ring_ok": ex.ring_ok,
            "binding_ok": ex.binding_ok,
            "frozen_lambda": frozen,
        },
    )


def solve_combined_all(
    spec: PotentialSpec,
    n_r: int,
    N: int,
    m: int,
    coupling_case: CouplingCase | str = CouplingCase.VneqS,
    tol: float = 1e-10,
    max_iter: int = 200,
    freeze_lambda: bool = False,
    damping: float = DAMPING,
) -> list[EnergyLevel]:
    """Converged levels on every energy branch that has one, ascending in E.

    With ``freeze_lambda`` the angular eigenvalue is taken at E = M and the
    radial equation is solved once.
    """
    case = CouplingCase.parse(coupling_case)
    if tol <= 0:
        raise DomainError("tol must be positive")
    if n_r < 0 or N < 0:
        raise DomainError("quantum numbers must be nonnegative")
    if freeze_lambda:
        if not ring_feasible(spec, spec.M, m):
            raise InfeasibleRing("m^2 < gamma (beta - beta') at E = M")
        eta = eta_of(spec, spec.M, N, m)
        return [
            _finish(spec, lv.E, n_r, N, m, case, eta, 1, [lv.E], True)
            for lv in solve_energies(spec, n_r, eta, case)
            if lv.bound
        ]
    out = []
    failures = []
    for sign in (-1, 1):
        try:
            E, its, hist = _iterate_branch(spec, n_r, N, m, case, tol, max_iter, sign, damping)
        except (NoBoundState, InfeasibleRing) as exc:
            failures.append(exc)
            continue
        out.append(_finish(spec, E, n_r, N, m, case, eta_of(spec, E, N, m), its, hist, False))
    if not out and failures and all(isinstance(f, InfeasibleRing) for f in failures):
        raise failures[0]
    return out


def solve_combined(
    spec: PotentialSpec,
    n_r: int,
    N: int,
    m: int,
    coupling_case: CouplingCase | str = CouplingCase.VneqS,
    tol: float = 1e-10,
    max_iter: int = 200,
    branch: str = "auto",
    freeze_lambda: bool = False,
) -> EnergyLevel:
    """One converged level.  ``branch`` picks E > 0, E < 0, or (auto) the highest E."""
    if branch not in BRANCHES or branch == "all":
        raise DomainError(f"branch must be auto, positive or negative, got {branch!r}")
    levels = solve_combined_all(spec, n_r, N, m, coupling_case, tol, max_iter, freeze_lambda)
    if branch == "positive":
        levels = [lv for lv in levels if lv.E > 0]
    elif branch == "negative":
        levels = [lv for lv in levels if lv.E < 0]
    if not levels:
        raise NoBoundState(f"no bound level for n_r={n_r}, N={N}, m={m}")
    return max(levels, key=lambda lv: lv.E)

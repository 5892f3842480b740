from __future__ import annotations

import numpy as np
import pytest

from kfgring.angular import solve_angular
from kfgring.coupled import (
    eta_of,
    existence_check,
    existence_conditions,
    solve_combined,
    solve_combined_all,
)
from kfgring.errors import ConvergenceFailure, DomainError, InfeasibleRing
from kfgring.nu_radial import energy_residual, solve_energies
from kfgring.oracle import refine_ode_energy
from kfgring.potential import PotentialSpec


@pytest.mark.parametrize("N,m", [(0, 0), (1, 0), (2, 0), (1, 1), (0, 2)])
def test_central_case_is_pure_hulthen(general_spec, N, m):
    level = solve_combined(general_spec, 1, N, m)
    l = N + m
    ref = max((lv for lv in solve_energies(general_spec, 1, l * (l + 1)) if lv.bound), key=lambda lv: lv.E)
    assert level.diagnostics["iterations"] == 1
    assert abs(level.E - ref.E) < 1e-12
    assert level.lam == pytest.approx(l * (l + 1), abs=1e-12)
    assert level.N == N and level.m == m


def test_both_branches_reported(general_spec):
    levels = solve_combined_all(general_spec, 0, 1, 0)
    assert [lv.E > 0 for lv in levels] == [False, True]
    assert solve_combined(general_spec, 0, 1, 0, branch="negative").E < 0


@pytest.mark.parametrize("case,spec", [
    ("VneqS", PotentialSpec(V0=0.1, S0=0.25, delta=0.1, beta=0.1, beta_prime=0.2)),
    ("V=S", PotentialSpec(V0=0.25, S0=0.25, delta=0.1, beta=0.05, beta_prime=0.1)),
    ("V=-S", PotentialSpec(V0=-0.25, S0=0.25, delta=0.1, beta=0.05, beta_prime=0.1)),
])
def test_ring_case_self_consistent_and_oracle_checked(case, spec):
    tol = 1e-10
    for level in solve_combined_all(spec, 1, 1, 1, case, tol=tol):
        eta = eta_of(spec, level.E, 1, 1)
        assert level.lam == pytest.approx(eta, rel=1e-14)
        h = 1e-6
        dg = (energy_residual(spec, level.E + h, 1, eta_of(spec, level.E + h, 1, 1), case)
              - energy_residual(spec, level.E - h, 1, eta_of(spec, level.E - h, 1, 1), case)) / (2 * h)
        assert abs(energy_residual(spec, level.E, 1, eta, case)) < 10 * tol * abs(dg)
        ode = refine_ode_energy(spec.for_case(case), level.E, level.lam)
        assert abs(ode - level.E) < 1e-6
        assert level.flags == ["bound"]


def test_binding_nondecreasing_in_v0():
    # On the particle branch (E > 0); past E = 0 the binding M^2 - E^2 must fall again.
    binding = []
    for V0 in np.linspace(0.05, 0.3, 6):
        spec = PotentialSpec(V0=V0, S0=V0, delta=0.1, beta=0.05, beta_prime=0.1)
        lv = solve_combined(spec, 0, 1, 1, "V=S", branch="positive")
        assert lv.E > 0
        binding.append(spec.M**2 - lv.E**2)
    assert np.all(np.diff(binding) >= 0)


def test_freeze_lambda_uses_rest_mass(ring_spec):
    frozen = solve_combined(ring_spec, 0, 1, 1, freeze_lambda=True)
    assert frozen.lam == pytest.approx(solve_angular(ring_spec, ring_spec.M, 1, 1).lam)
    assert frozen.diagnostics["frozen_lambda"]
    assert abs(frozen.E - solve_combined(ring_spec, 0, 1, 1).E) > 1e-6


def test_convergence_failure_keeps_history(ring_spec):
    with pytest.raises(ConvergenceFailure) as info:
        solve_combined_all(ring_spec, 1, 1, 1, max_iter=2)
    assert len(info.value.history) == 3


def test_infeasible_ring():
    spec = PotentialSpec(V0=0.1, S0=0.25, delta=0.1, beta=1.0, beta_prime=0.0)
    with pytest.raises(InfeasibleRing):
        solve_combined(spec, 0, 0, 0)


def test_bad_arguments(general_spec):
    with pytest.raises(DomainError):
        solve_combined(general_spec, 0, 0, 0, tol=0.0)
    with pytest.raises(DomainError):
        solve_combined(general_spec, 0, 0, 0, branch="sideways")


def test_existence_flags(ring_spec):
    level = solve_combined(ring_spec, 0, 1, 1)
    assert existence_check(ring_spec, level) == "bound"
    # beta <= beta': ring condition holds automatically.
    assert existence_conditions(ring_spec, 0.9, 0, 2.0, 0).ring_ok
    # A large lambda C0 swallows the binding.
    heavy = ring_spec.with_(C0=1.0)
    assert existence_check(heavy, level, eta=400.0) == "not-bound"

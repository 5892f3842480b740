from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kfgring.errors import NotBound, UnsupportedRegime
from kfgring.nu_radial import (
    coupling_constants,
    energy_residual,
    lambda_bar,
    lambda_bar_n,
    nu_parameters,
    quantized_sqrt_c,
    radial_eigenfunction,
    radial_norm,
    solve_energies,
    unnormalized_radial,
)
from kfgring.potential import CouplingCase, PotentialSpec
from kfgring.special import integrate


def quadratic_roots(M, V0, delta):
    """(1 + V0^2/delta^2) X^2 - (2M + V0) X + delta^2/4 = 0 with X = E + M."""
    X = np.roots([1 + V0**2 / delta**2, -(2 * M + V0), delta**2 / 4])
    return sorted(float(x) - M for x in X)


def test_quadratic_spot_check():
    spec = PotentialSpec(M=1.0, V0=0.25, S0=0.25, delta=0.05)
    roots = solve_energies(spec, 0, 0.0, "V=S")
    assert len(roots) == 2
    for level, ref in zip(sorted(roots, key=lambda lv: lv.E), quadratic_roots(1.0, 0.25, 0.05)):
        assert level.E == pytest.approx(ref, abs=1e-10)
    flags = {lv.flags[0] for lv in roots}
    assert flags == {"bound", "spurious"}


def test_parameter_identities(general_spec):
    p = nu_parameters(general_spec, 0.4, 2.0)
    assert p.c + p.a - p.b == pytest.approx(0.25 + p.beta_sq + 2.0, rel=1e-14)
    assert p.K == pytest.approx(0.5 + math.sqrt(0.25 + p.beta_sq + 2.0), rel=1e-14)
    assert p.eps**2 == pytest.approx((1 - 0.16) / 0.01, rel=1e-14)


def test_quantization_is_lambda_bar_equality(general_spec):
    level = next(lv for lv in solve_energies(general_spec, 1, 2.0) if lv.bound)
    p = nu_parameters(general_spec, level.E, 2.0)
    assert lambda_bar(p) == pytest.approx(lambda_bar_n(p, 1), abs=1e-8)


def test_not_bound_and_unsupported(general_spec):
    with pytest.raises(NotBound):
        nu_parameters(general_spec, 1.0, 0.0)
    with pytest.raises(NotBound):
        energy_residual(general_spec, -1.2, 0, 0.0)
    weird = PotentialSpec(V0=0.25, S0=0.1, delta=0.1)
    with pytest.raises(UnsupportedRegime):
        solve_energies(weird, 0, 0.0)


def test_no_potential_no_bound_state():
    assert [lv for lv in solve_energies(PotentialSpec(), 0, 2.0) if lv.bound] == []


@given(E=st.floats(-0.999, 0.999), n=st.integers(0, 3), lam=st.sampled_from([0.0, 2.0, 6.0]))
def test_general_case_with_equal_strengths_is_v_equals_s(E, n, lam):
    spec = PotentialSpec(V0=0.2, S0=0.2, delta=0.1)
    a = energy_residual(spec, E, n, lam, "VneqS")
    b = energy_residual(spec, E, n, lam, "V=S")
    assert a == pytest.approx(b, abs=1e-12 * max(1.0, abs(a)))


@given(E=st.floats(-0.999, 0.999), n=st.integers(0, 3), l=st.integers(0, 3))
def test_v_equals_s_without_c0_simplified_form(E, n, l):
    spec = PotentialSpec(V0=0.2, S0=0.2, delta=0.1, C0=0.0)
    alpha_sq, _ = coupling_constants(spec, E, CouplingCase.VeqS)
    k = n + l + 1
    rhs = (alpha_sq / (2 * k) - k / 2) ** 2 * spec.delta**2
    g = energy_residual(spec, E, n, l * (l + 1), "V=S")
    assert g == pytest.approx(spec.M**2 - E**2 - rhs, abs=1e-12 * max(1.0, rhs))


def test_v_minus_s_uses_primed_coupling():
    spec = PotentialSpec(V0=-0.25, S0=0.25, delta=0.1)
    alpha_sq, beta_sq = coupling_constants(spec, 0.3, CouplingCase.VeqmS)
    assert alpha_sq == pytest.approx(2 * -0.25 * (0.3 - 1.0) / 0.01)
    assert beta_sq == 0.0
    assert any(lv.bound for lv in solve_energies(spec, 0, 0.0, "V=-S"))


def test_roots_are_zeros_of_residual(general_spec):
    for lv in solve_energies(general_spec, 2, 6.0):
        assert abs(energy_residual(general_spec, lv.E, 2, 6.0)) < 1e-10
        s = quantized_sqrt_c(*coupling_constants(general_spec, lv.E, CouplingCase.VneqS), 6.0, 2)
        assert (s > 0) == (lv.flags != ["spurious"])


@pytest.mark.parametrize("sqrt_c,K,n", [(0.7, 1.5, 0), (1.3, 2.2, 1), (2.5, 3.1, 2), (0.4, 1.0, 3), (4.0, 1.7, 2)])
@pytest.mark.parametrize("delta", [0.05, 0.2])
def test_closed_form_radial_norm(sqrt_c, K, n, delta):
    C = radial_norm(sqrt_c, K, n, delta)
    hi = 80.0 / (delta * sqrt_c)
    raw = sum(
        integrate(lambda r: unnormalized_radial(sqrt_c, K, n, delta, r) ** 2, lo, up)
        for lo, up in zip(np.linspace(0, hi, 9)[:-1], np.linspace(0, hi, 9)[1:])
    )
    assert C * C * raw == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("case,spec", [
    ("VneqS", PotentialSpec(V0=0.1, S0=0.25, delta=0.1)),
    ("V=S", PotentialSpec(V0=0.25, S0=0.25, delta=0.2)),
    ("V=-S", PotentialSpec(V0=-0.25, S0=0.25, delta=0.1)),
])
def test_eigenfunction_normalized_with_n_nodes(case, spec):
    for n in range(3):
        for lv in solve_energies(spec, n, 2.0, case):
            if not lv.bound:
                continue
            chi = radial_eigenfunction(spec, lv)
            assert chi.quad_norm == pytest.approx(1.0, abs=1e-8)
            r = np.linspace(1e-3, 40 / spec.delta, 20001)
            v = chi(r)
            big = np.abs(v) > 1e-10 * np.abs(v).max()
            assert np.count_nonzero(np.diff(np.sign(v[big]))) == n

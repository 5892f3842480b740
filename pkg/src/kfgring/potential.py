"""Hulthen plus ring-shaped potential: parameters and pointwise evaluators.

Natural units (hbar = c = 1).  Radial evaluators accept scalars or numpy
arrays of radii.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import DomainError, SingularPointError

C0_IMPROVED = 1.0 / 12.0


class CouplingCase(str, enum.Enum):
    """How the scalar Hulthen strength relates to the vector one."""

    VneqS = "VneqS"
    VeqS = "VeqS"
    VeqmS = "VeqmS"

    @classmethod
    def parse(cls, text: "str | CouplingCase") -> "CouplingCase":
        if isinstance(text, cls):
            return text
        key = str(text).strip().replace(" ", "").replace("−", "-")
        aliases = {
            "vneqs": cls.VneqS, "v!=s": cls.VneqS, "v≠s": cls.VneqS, "general": cls.VneqS,
            "veqs": cls.VeqS, "v=s": cls.VeqS,
            "veqms": cls.VeqmS, "v=-s": cls.VeqmS,
        }
        try:
            return aliases[key.lower()]
        except KeyError:
            raise ValueError(f"unknown coupling case {text!r}") from None


@dataclass(frozen=True)
class PotentialSpec:
    M: float = 1.0
    V0: float = 0.0
    S0: float = 0.0
    delta: float = 0.1
    beta: float = 0.0
    beta_prime: float = 0.0
    C0: float = C0_IMPROVED

    def __post_init__(self):
        for name in ("M", "V0", "S0", "delta", "beta", "beta_prime", "C0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.M <= 0:
            raise DomainError(f"M must be positive, got {self.M}")
        if self.delta <= 0:
            raise DomainError(f"delta must be positive (no Coulomb limit), got {self.delta}")
        if self.beta < 0 or self.beta_prime < 0:
            raise DomainError("ring strengths beta, beta_prime must be nonnegative")
        if not 0.0 <= self.C0 <= 1.0:
            raise DomainError(f"C0 must lie in [0, 1], got {self.C0}")

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PotentialSpec":
        known = {k: float(v) for k, v in data.items() if k in cls.__dataclass_fields__}
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown PotentialSpec keys: {sorted(unknown)}")
        return cls(**known)

    @classmethod
    def from_json(cls, text: str) -> "PotentialSpec":
        return cls.from_dict(json.loads(text))

    def with_(self, **changes) -> "PotentialSpec":
        return replace(self, **changes)

    def for_case(self, case: "CouplingCase | str") -> "PotentialSpec":
        """Spec whose scalar strength realises ``case`` (S0 = V0 or S0 = -V0)."""
        case = CouplingCase.parse(case)
        if case is CouplingCase.VeqS:
            return replace(self, S0=self.V0)
        if case is CouplingCase.VeqmS:
            return replace(self, S0=-self.V0)
        return self


def _radii(r):
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("radius must be positive")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def hulthen_factor(delta: float, r):
    """e^{-delta r} / (1 - e^{-delta r}), evaluated without cancellation."""
    return 1.0 / np.expm1(delta * _radii(r))


def hulthen_vector(spec: PotentialSpec, r):
    return _out(-spec.V0 * hulthen_factor(spec.delta, r))


def hulthen_scalar(spec: PotentialSpec, r):
    return _out(-spec.S0 * hulthen_factor(spec.delta, r))


def approx_centrifugal(spec: PotentialSpec, r):
    """delta^2 [C0 + e^{-delta r}/(1 - e^{-delta r})^2], the stand-in for 1/r^2."""
    h = hulthen_factor(spec.delta, r)
    return _out(spec.delta**2 * (spec.C0 + h * (1.0 + h)))


def effective_radial_potential(spec: PotentialSpec, E: float, lam: float, r, use_approx: bool = True):
    """Energy-dependent radial potential V_eff(r; E) with separation constant ``lam``.

    The radial equation reads chi'' = [V_eff - (E^2 - M^2)] chi.
    """
    rr = _radii(r)
    h = hulthen_factor(spec.delta, rr)
    linear = -2.0 * (spec.M * spec.S0 + E * spec.V0) * h
    quadratic = (spec.S0**2 - spec.V0**2) * h * h
    if use_approx:
        cent = spec.delta**2 * (spec.C0 + h * (1.0 + h))
    else:
        cent = 1.0 / (rr * rr)
    return _out(linear + quadratic + lam * cent)


def ring_shaped_angular_term(spec: PotentialSpec, E: float, theta):
    """(2/sin^2 theta)(M + E)(beta' + beta cos theta)."""
    th = np.asarray(theta, dtype=float)
    s = np.sin(th)
    if np.any(np.abs(s) < 1e-300) or np.any(th <= 0) or np.any(th >= math.pi):
        raise SingularPointError("theta must lie strictly inside (0, pi)")
    return _out(2.0 * (spec.M + E) * (spec.beta_prime + spec.beta * np.cos(th)) / (s * s))

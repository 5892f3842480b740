"""Converged bound-state records and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .potential import CouplingCase

ROUTES = ("NU", "SUSY", "oracle")


@dataclass
class EnergyLevel:
    E: float
    n_r: int
    lam: float
    case: CouplingCase
    route: str = "NU"
    residual: float = 0.0
    flags: list[str] = field(default_factory=list)
    N: int | None = None
    m: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.case = CouplingCase.parse(self.case)
        if self.route not in ROUTES:
            raise ValueError(f"route must be one of {ROUTES}, got {self.route!r}")

    @property
    def bound(self) -> bool:
        return "bound" in self.flags

    def to_dict(self) -> dict:
        out = {
            "E": self.E,
            "n_r": self.n_r,
            "lambda": self.lam,
            "case": self.case.value,
            "residual": self.residual,
            "flags": list(self.flags),
            "route": self.route,
        }
        if self.N is not None:
            out["N"] = self.N
        if self.m is not None:
            out["m"] = self.m
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyLevel":
        return cls(
            E=float(data["E"]),
            n_r=int(data["n_r"]),
            lam=float(data["lambda"]),
            case=data["case"],
            route=data.get("route", "NU"),
            residual=float(data.get("residual", 0.0)),
            flags=list(data.get("flags", [])),
            N=None if data.get("N") is None else int(data["N"]),
            m=None if data.get("m") is None else int(data["m"]),
        )

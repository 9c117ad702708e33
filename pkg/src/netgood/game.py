"""Game parameters, profiles, payoffs and the f-free payoff comparator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidGameSpec, InvalidProfile, NotAnEquilibrium
from .graph import Topology

Profile = tuple[Fraction, ...]


def parse_rational(x) -> Fraction:
    """Exact rational from int, Fraction or a ``"p/q"`` / decimal string.

    Floats are rejected so that nothing inexact leaks into decisions.
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {x!r}") from exc
    raise TypeError(f"expected int, Fraction or str, got {type(x).__name__}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# -- benefit functions -------------------------------------------------------
# Each factory takes (delta, cost) as floats and returns a vectorised f with
# f(0) = 0, f' > 0, f'' < 0 and f'(delta) = cost.

def _exp_benefit(delta: float, cost: float):
    scale = cost * delta * math.e
    return lambda x: scale * (1.0 - np.exp(-np.asarray(x, dtype=float) / delta))


def _sqrt_benefit(delta: float, cost: float):
    scale = 2.0 * cost * math.sqrt(delta)
    return lambda x: scale * np.sqrt(np.asarray(x, dtype=float))


def _log_benefit(delta: float, cost: float):
    return lambda x: 2.0 * cost * delta * np.log1p(np.asarray(x, dtype=float) / delta)


BENEFITS: dict[str, Callable[[float, float], Callable]] = {
    "exp-default": _exp_benefit,
    "sqrt": _sqrt_benefit,
    "log": _log_benefit,
}


@dataclass(frozen=True)
class GameSpec:
    delta: Fraction = Fraction(1)
    cost: Fraction = Fraction(1)
    s_max: Fraction | None = None
    benefit: str = "exp-default"

    def __post_init__(self):
        delta = parse_rational(self.delta)
        cost = parse_rational(self.cost)
        s_max = 2 * delta if self.s_max is None else parse_rational(self.s_max)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "s_max", s_max)
        if delta <= 0:
            raise InvalidGameSpec("delta must be positive")
        if cost <= 0:
            raise InvalidGameSpec("cost must be positive")
        if s_max < delta:
            raise InvalidGameSpec("s_max must be at least delta")
        if self.benefit not in BENEFITS:
            raise InvalidGameSpec(f"unknown benefit {self.benefit!r}; choose from {sorted(BENEFITS)}")

    @property
    def f(self) -> Callable:
        return BENEFITS[self.benefit](float(self.delta), float(self.cost))

    def to_json_obj(self) -> dict:
        return {"delta": format_rational(self.delta), "cost": format_rational(self.cost),
                "s_max": format_rational(self.s_max), "benefit": self.benefit}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GameSpec":
        try:
            return cls(delta=obj.get("delta", 1), cost=obj.get("cost", 1),
                       s_max=obj.get("s_max"), benefit=obj.get("benefit", "exp-default"))
        except (TypeError, ValueError, AttributeError) as exc:
            raise InvalidGameSpec(f"bad game spec: {exc}") from exc


# -- profiles ----------------------------------------------------------------

def make_profile(values: Iterable, g: Topology | None = None,
                 spec: GameSpec | None = None) -> Profile:
    try:
        s = tuple(parse_rational(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InvalidProfile(str(exc)) from exc
    if g is not None or spec is not None:
        check_profile(g, spec, s)
    return s


def check_profile(g: Topology | None, spec: GameSpec | None, s: Sequence[Fraction]) -> None:
    if g is not None and len(s) != g.n:
        raise InvalidProfile(f"profile has {len(s)} entries for {g.n} players")
    for i, v in enumerate(s):
        if not isinstance(v, (int, Fraction)):
            raise InvalidProfile(f"s[{i}] = {v!r} is not an exact rational")
        if v < 0 or (spec is not None and v > spec.s_max):
            raise InvalidProfile(f"s[{i}] = {v} outside [0, s_max]")


def profile_to_json(s: Sequence[Fraction]) -> list[str]:
    return [format_rational(v) for v in s]


def neighbor_sum(g: Topology, s: Sequence[Fraction], i: int) -> Fraction:
    return sum((s[j] for j in g.adjacency[i]), Fraction(0))


def exposure(g: Topology, s: Sequence[Fraction], i: int) -> Fraction:
    return s[i] + neighbor_sum(g, s, i)


def payoff(g: Topology, spec: GameSpec, s: Sequence[Fraction], i: int) -> float:
    check_profile(g, spec, s)
    return float(spec.f(float(exposure(g, s, i)))) - float(spec.cost * s[i])


@dataclass(frozen=True)
class PayoffEntry:
    exposure: Fraction
    payoff: float
    active: bool


def payoff_report(g: Topology, spec: GameSpec, s: Sequence[Fraction]) -> list[PayoffEntry]:
    check_profile(g, spec, s)
    f = spec.f
    out = []
    for i in range(g.n):
        t = exposure(g, s, i)
        out.append(PayoffEntry(t, float(f(float(t))) - float(spec.cost * s[i]), s[i] > 0))
    return out


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def compare_at_equilibrium(g: Topology, s: Sequence[Fraction], i: int, j: int) -> int:
    """Sign of payoff_i - payoff_j for an equilibrium ``s``, without f.

    Active players all have exposure delta, so only their own effort
    differs; inactive players are ranked by exposure; an inactive player
    always beats an active one.  The caller guarantees ``s`` is an equilibrium.
    """
    ai, aj = s[i] > 0, s[j] > 0
    if ai and aj:
        return _sign(s[j] - s[i])
    if not ai and not aj:
        return _sign(neighbor_sum(g, s, i) - neighbor_sum(g, s, j))
    return -1 if ai else 1


def ordinal_compare(g: Topology, spec: GameSpec, s: Sequence[Fraction], i: int, j: int) -> int:
    """Return -1, 0 or 1 as payoff_i is below, equal to or above payoff_j.

    Raises NotAnEquilibrium when ``s`` fails the equilibrium condition,
    since the reduction is only valid there.
    """
    from .equilibrium import is_pne

    if not is_pne(g, spec, s):
        raise NotAnEquilibrium("ordinal comparison needs an equilibrium profile")
    return compare_at_equilibrium(g, s, i, j)

"""Value functions, utilities and the local optimizer of the game.

``H`` is the expected support an isolated player collects from a hinterland
of a given length, ``M`` the same for an internal region. Every quantity in
the game reduces to these two functions and their derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

from . import _kernels_py
from ._backend import kernels
from .distributions import DistributionSpec, Exponential, from_dict, survival_integral
from .quadrature import QUAD_MAX_DEPTH, QUAD_TOL, adaptive_simpson
from .roots import brentq

_DOMAIN_SLACK = 1e-12


class Variant(str, Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


@dataclass(frozen=True)
class GameSpec:
    n: int
    dist: DistributionSpec
    variant: Variant = Variant.SYMMETRIC

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need an integer n >= 2 players, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "variant", Variant(self.variant))
        if abs(hinterland_value(self, 0.0)) > 1e-12 or abs(internal_value(self, 0.0)) > 1e-12:
            raise ValueError("value functions must vanish at 0")

    @property
    def symmetric(self) -> bool:
        return self.variant is Variant.SYMMETRIC

    def with_variant(self, variant: Variant | str) -> "GameSpec":
        return replace(self, variant=Variant(variant))

    def with_n(self, n: int) -> "GameSpec":
        return replace(self, n=n)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "variant": self.variant.value, "dist": self.dist.to_dict()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GameSpec":
        try:
            return cls(int(data["n"]), from_dict(data["dist"]), Variant(data.get("variant", "symmetric")))
        except KeyError as exc:
            raise ValueError(f"game object missing field {exc}") from None


@dataclass(frozen=True)
class Profile:
    """Player locations, kept sorted so that player ``i`` is the ``i``-th from the left."""

    locations: tuple[float, ...]

    def __post_init__(self):
        locs = tuple(sorted(float(s) for s in self.locations))
        if not locs:
            raise ValueError("a profile needs at least one player")
        if locs[0] < 0.0 or locs[-1] > 1.0 or any(math.isnan(s) for s in locs):
            raise ValueError(f"locations must lie in [0, 1], got {locs}")
        object.__setattr__(self, "locations", locs)

    @classmethod
    def of(cls, locations: Iterable[float]) -> "Profile":
        return cls(tuple(locations))

    @property
    def n(self) -> int:
        return len(self.locations)

    def groups(self) -> list[tuple[float, tuple[int, ...]]]:
        """Distinct occupied locations with the indices of the players there."""
        out: list[tuple[float, list[int]]] = []
        for i, s in enumerate(self.locations):
            if out and out[-1][0] == s:
                out[-1][1].append(i)
            else:
                out.append((s, [i]))
        return [(s, tuple(ix)) for s, ix in out]

    def group_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.n
        for _, ix in self.groups():
            for i in ix:
                sizes[i] = len(ix)
        return tuple(sizes)

    def to_list(self) -> list[float]:
        return list(self.locations)


@dataclass(frozen=True)
class PlayerUtility:
    left: float
    right: float
    total: float


@dataclass(frozen=True)
class UtilityBreakdown:
    per_player: tuple[PlayerUtility, ...] = field(default=())

    @property
    def totals(self) -> list[float]:
        return [p.total for p in self.per_player]

    def to_dict(self) -> dict[str, Any]:
        return {"per_player": [{"left": p.left, "right": p.right, "total": p.total} for p in self.per_player]}


def _unit(x: float) -> float:
    if x < -_DOMAIN_SLACK or x > 1.0 + _DOMAIN_SLACK or x != x:
        raise ValueError(f"region length must lie in [0, 1], got {x!r}")
    return min(max(x, 0.0), 1.0)


def _asym_integral(dist: DistributionSpec, kind: int, x: float) -> float:
    """Integral of an asymmetric-variant integrand over ``[x/2, x]``."""
    if x <= 0.0:
        return 0.0
    if dist.code is not None:
        p0, p1 = dist.kernel_params
        return kernels.family_integral(kind, dist.code, p0, p1, x, 0.5 * x, x, QUAD_TOL, QUAD_MAX_DEPTH)
    f = _kernels_py.integrand(kind, dist, x)
    pts = _kernels_py.integrand_breakpoints(kind, dist.breakpoints, x)
    return adaptive_simpson(f, 0.5 * x, x, QUAD_TOL, QUAD_MAX_DEPTH, pts)


def hinterland_value(game: GameSpec, x: float) -> float:
    """``H(x)``: the survival function integrated over ``[0, x]``; same in both variants."""
    return survival_integral(game.dist, _unit(x))


def internal_value(game: GameSpec, x: float, method: str = "auto") -> float:
    """``M(x)``.

    Symmetric: ``H(x/2)``. Asymmetric: ``H(x/2)`` plus the mass of clients in
    the far half whose near-side range misses the closer player but whose
    far-side range reaches this one. ``method="quadrature"`` skips the
    exponential closed form.
    """
    x = _unit(x)
    base = survival_integral(game.dist, 0.5 * x)
    if game.symmetric or x == 0.0:
        return base
    dist = game.dist
    if method == "auto" and isinstance(dist, Exponential):
        y = dist.lam * x
        return (-math.expm1(-y) - 0.5 * y * math.exp(-y)) / dist.lam
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    return base + _asym_integral(dist, _kernels_py.KIND_MASS, x)


def h_prime(game: GameSpec, x: float) -> float:
    return game.dist.survival(_unit(x))


def m_prime(game: GameSpec, x: float, method: str = "auto") -> float:
    x = _unit(x)
    half = game.dist.survival(0.5 * x)
    if game.symmetric:
        return 0.5 * half
    dist = game.dist
    if method == "auto" and isinstance(dist, Exponential):
        y = dist.lam * x
        return 0.5 * math.exp(-y) * (1.0 + y)
    return 0.5 * half * half + _asym_integral(dist, _kernels_py.KIND_RATE, x)


def h_second(game: GameSpec, x: float) -> float:
    return -game.dist.pdf(_unit(x))


def m_second(game: GameSpec, x: float) -> float:
    x = _unit(x)
    if game.symmetric:
        return -0.25 * game.dist.pdf(0.5 * x)
    dist = game.dist
    if isinstance(dist, Exponential):
        y = dist.lam * x
        return -0.5 * dist.lam * y * math.exp(-y)
    return -_asym_integral(dist, _kernels_py.KIND_CURV, x)


def _check_offset(x: float, t: float) -> tuple[float, float]:
    x = _unit(x)
    if t < -_DOMAIN_SLACK or t > x + _DOMAIN_SLACK:
        raise ValueError(f"offset t={t!r} outside [0, {x!r}]")
    return x, min(max(t, 0.0), x)


def theta(game: GameSpec, x: float, t: float) -> float:
    """Utility of a peripheral player at distance ``t`` from the endpoint, neighbor at ``x``."""
    x, t = _check_offset(x, t)
    return hinterland_value(game, t) + internal_value(game, x - t)


def mu(game: GameSpec, x: float, t: float) -> float:
    """Utility of an internal player at offset ``t`` inside a gap of length ``x``."""
    x, t = _check_offset(x, t)
    return internal_value(game, t) + internal_value(game, x - t)


def rho(game: GameSpec, x: float) -> float:
    """Best location for a peripheral player whose neighbor sits at ``x``."""
    x = _unit(x)
    if x == 0.0:
        return 0.0
    if h_prime(game, x) > m_prime(game, 0.0):
        return x
    return brentq(lambda t: h_prime(game, t) - m_prime(game, x - t), 0.0, x)


def profile_utilities(game: GameSpec, profile: Profile | Sequence[float]) -> UtilityBreakdown:
    """Left, right and total utility of every player; colocated players split evenly."""
    if not isinstance(profile, Profile):
        profile = Profile.of(profile)
    groups = profile.groups()
    out: list[PlayerUtility | None] = [None] * profile.n
    last = len(groups) - 1
    for k, (s, members) in enumerate(groups):
        left = hinterland_value(game, s) if k == 0 else internal_value(game, s - groups[k - 1][0])
        right = hinterland_value(game, 1.0 - s) if k == last else internal_value(game, groups[k + 1][0] - s)
        gamma = len(members)
        share = PlayerUtility(left / gamma, right / gamma, left / gamma + right / gamma)
        for i in members:
            out[i] = share
    return UtilityBreakdown(tuple(out))  # type: ignore[arg-type]


@dataclass(frozen=True)
class HMViolation:
    condition: str
    x: float
    margin: float
    density_vanishes: bool = False


@dataclass(frozen=True)
class HMReport:
    violations: tuple[HMViolation, ...]
    grid_step: float

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def ok_where_density_positive(self) -> bool:
        """True when every violation is a flat second derivative caused by zero density."""
        return all(v.density_vanishes for v in self.violations)

    def failing(self, condition: str) -> list[HMViolation]:
        return [v for v in self.violations if v.condition == condition]


def check_hm_assumptions(game: GameSpec, grid_step: float = 1e-3) -> HMReport:
    """Check monotonicity/concavity, ``H >= M`` and ``H(0) = M(0) = 0`` on a grid.

    Strict concavity is checked on the open interval (0, 1): in the asymmetric
    variant ``M''(0) = 0`` for every distribution.
    """
    if not 0.0 < grid_step <= 0.1:
        raise ValueError(f"grid_step must lie in (0, 0.1], got {grid_step!r}")
    steps = int(round(1.0 / grid_step))
    grid = np.linspace(0.0, 1.0, steps + 1)
    bad: list[HMViolation] = []

    h0, m0 = hinterland_value(game, 0.0), internal_value(game, 0.0)
    if abs(h0) > 1e-12:
        bad.append(HMViolation("HM3:H(0)=0", 0.0, -abs(h0)))
    if abs(m0) > 1e-12:
        bad.append(HMViolation("HM3:M(0)=0", 0.0, -abs(m0)))

    for x in grid:
        x = float(x)
        gap = hinterland_value(game, x) - internal_value(game, x)
        if gap < -1e-10:
            bad.append(HMViolation("HM2:H>=M", x, gap))
        if x < 1.0:
            for name, val in (("HM1:H'>0", h_prime(game, x)), ("HM1:M'>0", m_prime(game, x))):
                if not val > 0.0:
                    bad.append(HMViolation(name, x, val))
        if 0.0 < x < 1.0:
            for name, val in (("HM1:H''<0", h_second(game, x)), ("HM1:M''<0", m_second(game, x))):
                if not val < 0.0:
                    bad.append(HMViolation(name, x, -val, density_vanishes=(val == 0.0)))
    return HMReport(tuple(bad), grid_step)

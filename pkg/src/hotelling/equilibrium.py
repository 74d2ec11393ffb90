"""Canonical pairs, equilibrium verdicts and per-family closed forms.

The generic path works for any game: solve ``H'(a) = M'(b)`` with
``2a + (n-1)b = 1`` and test the two deviation conditions that decide
whether the canonical profile is a Nash equilibrium. The closed forms are
independent fast paths used to cross-check it.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .distributions import DistributionSpec, Exponential, Linear, Pareto, Uniform
from .errors import NoClosedForm, PreconditionError
from .game import (
    GameSpec,
    Profile,
    UtilityBreakdown,
    Variant,
    h_prime,
    hinterland_value,
    internal_value,
    m_prime,
    profile_utilities,
    rho,
)
from .roots import bisect, brentq

VERDICT_TOL = 1e-9
LN2 = math.log(2.0)


class Reason(str, Enum):
    NO_CANONICAL_PAIR = "NoCanonicalPair"
    PERIPHERAL_DEVIATES = "PeripheralDeviates"
    INTERNAL_DEVIATES = "InternalDeviates"
    IS_EQUILIBRIUM = "IsEquilibrium"
    TWO_PLAYER_CENTER = "TwoPlayerCenter"


@dataclass(frozen=True)
class CanonicalPair:
    a: float
    b: float
    profile: Profile

    @classmethod
    def from_ab(cls, a: float, b: float, n: int) -> "CanonicalPair":
        locs = [min(1.0, a + i * b) for i in range(n)]
        return cls(a, b, Profile.of(locs))

    def to_dict(self) -> dict[str, Any]:
        return {"a": self.a, "b": self.b, "profile": self.profile.to_list()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CanonicalPair":
        return cls(float(data["a"]), float(data["b"]), Profile.of(data["profile"]))


@dataclass(frozen=True)
class EquilibriumReport:
    exists: bool
    reason: Reason
    pair: CanonicalPair | None
    profile: Profile | None
    peripheral_margin: float | None
    internal_margin: float | None
    rho_a: float | None
    h_prime_half: float
    m_prime_zero: float
    utilities: list[float] = field(default_factory=list)
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "exists": self.exists,
            "reason": self.reason.value,
            "pair": None if self.pair is None else self.pair.to_dict(),
            "profile": None if self.profile is None else self.profile.to_list(),
            "peripheral_margin": self.peripheral_margin,
            "internal_margin": self.internal_margin,
            "rho_a": self.rho_a,
            "h_prime_half": self.h_prime_half,
            "m_prime_zero": self.m_prime_zero,
            "utilities": list(self.utilities),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EquilibriumReport":
        pair = data.get("pair")
        prof = data.get("profile")
        return cls(
            exists=bool(data["exists"]),
            reason=Reason(data["reason"]),
            pair=None if pair is None else CanonicalPair.from_dict(pair),
            profile=None if prof is None else Profile.of(prof),
            peripheral_margin=data.get("peripheral_margin"),
            internal_margin=data.get("internal_margin"),
            rho_a=data.get("rho_a"),
            h_prime_half=float(data["h_prime_half"]),
            m_prime_zero=float(data["m_prime_zero"]),
            utilities=[float(u) for u in data.get("utilities", [])],
            warnings=tuple(data.get("warnings", ())),
        )


def has_canonical_pair(game: GameSpec) -> bool:
    return h_prime(game, 0.5) <= m_prime(game, 0.0)


def canonical_pair(
    game: GameSpec, bracket: tuple[float, float] | None = None, method: str = "brent"
) -> CanonicalPair | None:
    """Solve for the canonical pair, or return None when ``H'(1/2) > M'(0)``.

    ``bracket`` narrows the search for ``a`` inside ``[0, 1/2]``; ``method``
    picks Brent or plain bisection, which gives an independent second solve.
    """
    if not has_canonical_pair(game):
        return None
    n = game.n
    lo, hi = bracket if bracket is not None else (0.0, 0.5)
    if not 0.0 <= lo < hi <= 0.5:
        raise ValueError(f"bracket must satisfy 0 <= lo < hi <= 1/2, got {(lo, hi)}")

    def g(x: float) -> float:
        return h_prime(game, x) - m_prime(game, (1.0 - 2.0 * x) / (n - 1))

    if method == "brent":
        a = brentq(g, lo, hi)
    elif method == "bisect":
        a = bisect(g, lo, hi, xtol=1e-14)
    else:
        raise ValueError(f"unknown method {method!r}")
    b = max(0.0, (1.0 - 2.0 * a) / (n - 1))
    return CanonicalPair.from_ab(a, b, n)


def deviation_margins(game: GameSpec, a: float, b: float) -> tuple[float, float, float]:
    """``(peripheral_margin, internal_margin, rho(a))`` for a canonical pair.

    The peripheral player must not gain by moving into the first internal
    region; the internal players must not gain by jumping into a hinterland.
    """
    peripheral = hinterland_value(game, a) + internal_value(game, b) - 2.0 * internal_value(game, 0.5 * b)
    r = rho(game, a)
    internal = 2.0 * internal_value(game, b) - hinterland_value(game, r) - internal_value(game, a - r)
    return peripheral, internal, r


def _warnings(game: GameSpec, pair: CanonicalPair | None) -> tuple[str, ...]:
    dist = game.dist
    if isinstance(dist, Pareto) and pair is not None and pair.b < 2.0 * dist.xi:
        return (f"pareto: internal gap b={pair.b:.6g} < 2*xi={2 * dist.xi:.6g}; density vanishes inside M",)
    return ()


def decide_equilibrium(game: GameSpec) -> EquilibriumReport:
    """Decide whether the game has a pure Nash equilibrium."""
    hp_half = h_prime(game, 0.5)
    mp_zero = m_prime(game, 0.0)
    pair = canonical_pair(game)
    warns = _warnings(game, pair)

    def report(exists, reason, profile, pm=None, im=None, r=None):
        utils = profile_utilities(game, profile).totals if profile is not None else []
        return EquilibriumReport(exists, reason, pair, profile, pm, im, r, hp_half, mp_zero, utils, warns)

    degenerate = pair is None or pair.b <= 1e-12
    if game.n == 2:
        if degenerate:
            return report(True, Reason.TWO_PLAYER_CENTER, Profile((0.5, 0.5)))
        pm, im, r = deviation_margins(game, pair.a, pair.b)
        return report(True, Reason.IS_EQUILIBRIUM, pair.profile, pm, im, r)

    if degenerate:
        return report(False, Reason.NO_CANONICAL_PAIR, None if pair is None else pair.profile)
    pm, im, r = deviation_margins(game, pair.a, pair.b)
    if pm < -VERDICT_TOL:
        return report(False, Reason.PERIPHERAL_DEVIATES, pair.profile, pm, im, r)
    if im < -VERDICT_TOL:
        return report(False, Reason.INTERNAL_DEVIATES, pair.profile, pm, im, r)
    return report(True, Reason.IS_EQUILIBRIUM, pair.profile, pm, im, r)


# ---------------------------------------------------------------- closed forms


def _exp_asym_alpha(lam: float, n: int) -> float:
    """Invert ``lam = alpha (n+1) - 2 ln((1+alpha)/2)``; increasing in alpha."""

    def f(al: float) -> float:
        return al * (n + 1) - 2.0 * math.log1p(0.5 * (al - 1.0)) - lam

    return brentq(f, 0.0, lam / (n - 1))


def closed_form_canonical(dist: DistributionSpec, variant: Variant | str, n: int) -> CanonicalPair | None:
    """Canonical pair from a per-family formula; None when no pair exists.

    Raises NoClosedForm for families (or variants) without one.
    """
    variant = Variant(variant)
    if n < 2:
        raise ValueError("need n >= 2")
    sym = variant is Variant.SYMMETRIC
    if isinstance(dist, Uniform):
        return CanonicalPair.from_ab(0.5, 0.0, n)
    if isinstance(dist, Linear) and sym:
        if dist.r == -2.0:
            s2 = math.sqrt(2.0)
            a = (2.0 * (s2 - 1.0) * n - 2.0 * s2 + 3.0) / (2.0 * s2 * (n - 1) + 2.0)
            b = (s2 - 1.0) / (n - 1 + 1.0 / s2)
            return CanonicalPair.from_ab(a, b, n)
        if dist.r == 2.0:
            return None
    if isinstance(dist, Pareto) and sym:
        k = 2.0 ** (1.0 / dist.alpha)
        return CanonicalPair.from_ab(0.5 * k / (n - 1 + k), 1.0 / (n - 1 + k), n)
    if isinstance(dist, Exponential):
        lam = dist.lam
        if lam < 2.0 * LN2:
            return None
        if sym:
            return CanonicalPair.from_ab((0.5 + (n - 1) * LN2 / lam) / n, (1.0 - 2.0 * LN2 / lam) / n, n)
        if lam == 2.0 * LN2:
            return CanonicalPair.from_ab(0.5, 0.0, n)
        al = _exp_asym_alpha(lam, n)
        c = math.log1p(0.5 * (al - 1.0)) / al
        b = 1.0 / (n + 1 - 2.0 * c)
        return CanonicalPair.from_ab((1.0 - c) * b, b, n)
    raise NoClosedForm(f"no closed-form canonical pair for {dist!r} ({variant.value})")


def exp_asym_alpha_of(pair: CanonicalPair, lam: float) -> float:
    """The reparametrization variable ``alpha = lam * b`` of an asymmetric exponential pair."""
    return lam * pair.b


# ------------------------------------------------- asymmetric exponential bound


def _beta1(alpha: float) -> float:
    """Root in beta of ``e^{-2b}(1+b) = e^{-alpha}(1+alpha)``."""
    rhs = math.exp(-alpha) * (1.0 + alpha)

    def f(b: float) -> float:
        return math.exp(-2.0 * b) * (1.0 + b) - rhs

    hi = 0.5 * alpha
    if f(hi) > 0.0:
        hi = alpha
    return brentq(f, 0.0, hi, xtol=1e-15)


def _h7(beta: float) -> float:
    return math.exp(-beta) * (0.75 + 0.5 * beta)


def _beta2(alpha: float) -> float:
    """Nonnegative root in beta of ``e^{-b}(3/4+b/2) = e^{-alpha}(1+alpha/2)``, NaN if none."""
    rhs = math.exp(-alpha) * (1.0 + 0.5 * alpha)
    if rhs > _h7(0.0):
        return math.nan
    return brentq(lambda b: _h7(b) - rhs, 0.0, 60.0, xtol=1e-15)


def alpha_beta_curves(alpha: float) -> tuple[float, float]:
    """``(beta1(alpha), beta2(alpha))``; beta2 is NaN where it has no root ``>= 0``."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha!r}")
    return _beta1(alpha), _beta2(alpha)


def alpha_beta_residuals(alpha: float, beta: float) -> tuple[float, float]:
    r6 = math.exp(-alpha) * (1.0 + alpha) - math.exp(-2.0 * beta) * (1.0 + beta)
    r7 = math.exp(-alpha) * (1.0 + 0.5 * alpha) - _h7(beta)
    return r6, r7


_alpha0_lock = threading.Lock()
_alpha0_cache: tuple[float, float] | None = None


def exp_asym_alpha0() -> tuple[float, float]:
    """``(alpha0, beta0)``: where the two alpha-beta curves meet in (0, 1).

    Bisection runs on ``h7(beta1(alpha)) - e^{-alpha}(1+alpha/2)``, which is
    defined for every alpha and vanishes exactly where beta1 = beta2.
    """
    global _alpha0_cache
    with _alpha0_lock:
        if _alpha0_cache is None:

            def d(al: float) -> float:
                return _h7(_beta1(al)) - math.exp(-al) * (1.0 + 0.5 * al)

            a0 = bisect(d, 1e-6, 1.0, xtol=1e-16)
            _alpha0_cache = (a0, _beta1(a0))
        return _alpha0_cache


def exp_asym_threshold(n: int) -> float:
    """Smallest exponential rate at which the n-player asymmetric game has an equilibrium."""
    if n < 3:
        raise PreconditionError("threshold is defined for n >= 3")
    a0, _ = exp_asym_alpha0()
    return (n + 1) * a0 - 2.0 * math.log1p(0.5 * (a0 - 1.0))


# -------------------------------------------------- symmetric exponential bound

TAU1 = (2.0 ** (1.0 / 6.0) + math.sqrt(64.0 + 2.0 ** (1.0 / 3.0))) / (8.0 * 2.0 ** (5.0 / 6.0))


def exp_sym_threshold(n: int) -> float:
    """Published symmetric exponential bound ``ln 4 - n ln(4 tau1^6)``."""
    if n < 3:
        raise PreconditionError("threshold is defined for n >= 3")
    return math.log(4.0) - n * math.log(4.0 * TAU1**6)


def exp_sym_threshold_sharp(n: int) -> float:
    """Rate at which the internal deviation condition is tight: ``ln 4 + n ln(64/27)``.

    For the symmetric exponential the best hinterland jump is
    ``rho(a) = a/3 + 2 ln 2 / (3 lam)``; with the closed-form pair the internal
    condition holds with equality exactly at this rate.
    """
    if n < 3:
        raise PreconditionError("threshold is defined for n >= 3")
    return math.log(4.0) + n * math.log(64.0 / 27.0)


# ----------------------------------------------------------------- pareto bound


def _pareto_eq(z: float) -> float:
    k = 2.0 ** (1.0 / z)
    return k * (2.0 + k) ** z - 8.0


def pareto_threshold() -> float:
    """Shape ``z`` in (0, 1) solving ``2^{1/z} (2 + 2^{1/z})^z = 8``.

    ``z = 1`` is a second, trivial root; the bracket stops short of it.
    """

    def f(z: float) -> float:
        return math.log2(_pareto_eq(z) + 8.0) - 3.0

    return bisect(f, 0.3, 0.95, xtol=1e-16)


def pareto_residual(z: float) -> float:
    return _pareto_eq(z)


# ------------------------------------------------ symmetric-to-asymmetric test


def region_gain_rate(game_sym: GameSpec, x: float) -> float:
    """Derivative in x of the extra internal mass the asymmetric variant adds.

    That extra mass is ``M_asym(x) - M_sym(x)``, so its derivative is the
    difference of the analytic ``M'`` of the two variants.
    """
    asym = game_sym.with_variant(Variant.ASYMMETRIC)
    return m_prime(asym, x) - m_prime(game_sym, x)


def sym_to_asym_sufficient(game_sym: GameSpec, grid_step: float = 1e-3) -> bool:
    """Sufficient test that a symmetric equilibrium carries over to the asymmetric variant.

    True when the extra internal mass is nondecreasing on a grid over [0, 1]
    (slack 1e-8). False means inconclusive, not "no equilibrium".
    """
    if not game_sym.symmetric:
        raise PreconditionError("sym_to_asym_sufficient needs a symmetric game")
    if not decide_equilibrium(game_sym).exists:
        raise PreconditionError("the symmetric game has no equilibrium")
    if not 0.0 < grid_step <= 0.1:
        raise ValueError(f"grid_step must lie in (0, 0.1], got {grid_step!r}")
    steps = int(round(1.0 / grid_step))
    return all(region_gain_rate(game_sym, i / steps) >= -1e-8 for i in range(steps + 1))


"""Tolerance-range distributions.

Each family exposes the density, cdf, survival function and the integral of
the survival function from 0, which is all the value functions need. Support
is ``[0, inf)``; no truncation is applied to the unbounded families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar

from .quadrature import QUAD_MAX_DEPTH, QUAD_TOL, adaptive_simpson

# Family codes shared with the compiled kernels.
UNIFORM, LINEAR, PARETO, EXPONENTIAL = 0, 1, 2, 3


class DistributionSpec:
    """Base class for a tolerance-range distribution.

    Subclasses are frozen dataclasses and therefore immutable and hashable.
    """

    family: ClassVar[str] = ""
    code: ClassVar[int | None] = None

    def pdf(self, t: float) -> float:
        raise NotImplementedError

    def cdf(self, t: float) -> float:
        raise NotImplementedError

    def survival(self, t: float) -> float:
        return 1.0 - self.cdf(t)

    def survival_integral_exact(self, x: float) -> float | None:
        """Closed-form antiderivative of the survival function, if any."""
        return None

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, math.inf)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where the density is discontinuous or kinked."""
        return ()

    @property
    def kernel_params(self) -> tuple[float, float]:
        return (0.0, 0.0)

    def to_dict(self) -> dict[str, Any]:
        raise TypeError(f"{type(self).__name__} is not JSON-serializable")


@dataclass(frozen=True)
class Uniform(DistributionSpec):
    family: ClassVar[str] = "uniform"
    code: ClassVar[int] = UNIFORM

    def pdf(self, t: float) -> float:
        return 1.0 if 0.0 <= t <= 1.0 else 0.0

    def cdf(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        return t if t < 1.0 else 1.0

    def survival_integral_exact(self, x: float) -> float:
        if x >= 1.0:
            return 0.5
        return x - 0.5 * x * x

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, 1.0)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (1.0,)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family}


@dataclass(frozen=True)
class Linear(DistributionSpec):
    """Density ``r*t + q`` on ``[0, 1]`` with ``q = 1 - r/2`` derived from ``r``."""

    r: float
    family: ClassVar[str] = "linear"
    code: ClassVar[int] = LINEAR

    def __post_init__(self):
        if not math.isfinite(self.r) or abs(self.r) > 2.0:
            raise ValueError(f"linear slope must satisfy -2 <= r <= 2, got {self.r!r}")

    @property
    def q(self) -> float:
        return 1.0 - 0.5 * self.r

    def pdf(self, t: float) -> float:
        if 0.0 <= t <= 1.0:
            return self.r * t + self.q
        return 0.0

    def cdf(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return 1.0
        return min(1.0, 0.5 * self.r * t * t + self.q * t)

    def survival_integral_exact(self, x: float) -> float:
        x = min(x, 1.0)
        return x - self.r * x**3 / 6.0 - 0.5 * self.q * x * x

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, 1.0)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (1.0,)

    @property
    def kernel_params(self) -> tuple[float, float]:
        return (self.r, self.q)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, "r": self.r}


@dataclass(frozen=True)
class Pareto(DistributionSpec):
    alpha: float
    xi: float = 0.01
    family: ClassVar[str] = "pareto"
    code: ClassVar[int] = PARETO

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"pareto shape must be > 0, got {self.alpha!r}")
        if not (math.isfinite(self.xi) and self.xi > 0):
            raise ValueError(f"pareto scale must be > 0, got {self.xi!r}")

    def pdf(self, t: float) -> float:
        if t < self.xi:
            return 0.0
        return self.alpha * self.xi**self.alpha / t ** (self.alpha + 1.0)

    def survival(self, t: float) -> float:
        if t < self.xi:
            return 1.0
        return (self.xi / t) ** self.alpha

    def cdf(self, t: float) -> float:
        return 1.0 - self.survival(t)

    def survival_integral_exact(self, x: float) -> float:
        xi, alpha = self.xi, self.alpha
        if x < xi:
            return x
        if alpha == 1.0:
            return xi + xi * math.log(x / xi)
        return xi + xi / (alpha - 1.0) * (1.0 - (xi / x) ** (alpha - 1.0))

    @property
    def support(self) -> tuple[float, float]:
        return (self.xi, math.inf)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.xi,)

    @property
    def kernel_params(self) -> tuple[float, float]:
        return (self.alpha, self.xi)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, "alpha": self.alpha, "xi": self.xi}


@dataclass(frozen=True)
class Exponential(DistributionSpec):
    lam: float
    family: ClassVar[str] = "exponential"
    code: ClassVar[int] = EXPONENTIAL

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"exponential rate must be > 0, got {self.lam!r}")

    def pdf(self, t: float) -> float:
        if t < 0.0:
            return 0.0
        return self.lam * math.exp(-self.lam * t)

    def survival(self, t: float) -> float:
        if t <= 0.0:
            return 1.0
        return math.exp(-self.lam * t)

    def cdf(self, t: float) -> float:
        return 1.0 - self.survival(t)

    def survival_integral_exact(self, x: float) -> float:
        return -math.expm1(-self.lam * x) / self.lam

    @property
    def kernel_params(self) -> tuple[float, float]:
        return (self.lam, 0.0)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, "lambda": self.lam}


@dataclass(frozen=True)
class Custom(DistributionSpec):
    """User-supplied ``(pdf, cdf)`` pair; every integral goes through quadrature."""

    pdf_fn: Callable[[float], float]
    cdf_fn: Callable[[float], float]
    kinks: tuple[float, ...] = field(default=())
    family: ClassVar[str] = "custom"

    def pdf(self, t: float) -> float:
        return float(self.pdf_fn(t)) if t >= 0.0 else 0.0

    def cdf(self, t: float) -> float:
        return float(self.cdf_fn(t)) if t > 0.0 else 0.0

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(self.kinks)


FAMILIES: dict[str, type[DistributionSpec]] = {
    "uniform": Uniform,
    "linear": Linear,
    "pareto": Pareto,
    "exponential": Exponential,
}


def from_dict(data: dict[str, Any]) -> DistributionSpec:
    """Build a distribution from its JSON object form."""
    try:
        family = str(data["family"]).lower()
    except (KeyError, TypeError):
        raise ValueError("distribution object needs a 'family' field") from None
    if family == "uniform":
        return Uniform()
    if family == "linear":
        dist = Linear(float(data["r"]))
        if "q" in data and abs(float(data["q"]) - dist.q) > 1e-12:
            raise ValueError(f"linear q is derived as 1 - r/2 = {dist.q}, got {data['q']}")
        return dist
    if family == "pareto":
        return Pareto(float(data["alpha"]), float(data.get("xi", 0.01)))
    if family == "exponential":
        return Exponential(float(data["lambda"]))
    raise ValueError(f"unknown distribution family {family!r}")


def from_code(code: int, p0: float, p1: float) -> DistributionSpec:
    if code == UNIFORM:
        return Uniform()
    if code == LINEAR:
        return Linear(p0)
    if code == PARETO:
        return Pareto(p0, p1)
    if code == EXPONENTIAL:
        return Exponential(p0)
    raise ValueError(f"unknown family code {code}")


def pdf(dist: DistributionSpec, t: float) -> float:
    return dist.pdf(t)


def cdf(dist: DistributionSpec, t: float) -> float:
    return dist.cdf(t)


def survival(dist: DistributionSpec, t: float) -> float:
    return dist.survival(t)


def survival_integral(dist: DistributionSpec, x: float, method: str = "auto") -> float:
    """Integral of the survival function over ``[0, x]``.

    ``method="auto"`` uses the family antiderivative when there is one;
    ``method="quadrature"`` forces adaptive Simpson.
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    if x == 0:
        return 0.0
    if method == "auto":
        exact = dist.survival_integral_exact(x)
        if exact is not None:
            return exact
    elif method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    return adaptive_simpson(dist.survival, 0.0, x, QUAD_TOL, QUAD_MAX_DEPTH, dist.breakpoints)

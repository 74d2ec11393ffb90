import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hotelling.distributions import (
    Custom,
    Exponential,
    Linear,
    Pareto,
    Uniform,
    cdf,
    from_dict,
    pdf,
    survival,
    survival_integral,
)
from hotelling.quadrature import adaptive_simpson

FAMILIES = [
    Uniform(),
    Linear(-2.0),
    Linear(0.7),
    Linear(2.0),
    Pareto(1.0, 0.1),
    Pareto(0.8, 0.01),
    Pareto(2.5, 0.05),
    Exponential(1.0),
    Exponential(7.5),
]
GRID = np.linspace(0.0, 1.5, 301)


def test_pdf_examples():
    assert pdf(Exponential(1.0), 0.0) == 1.0
    assert pdf(Uniform(), 0.3) == 1.0
    assert pdf(Pareto(1.0, 0.01), 0.005) == 0.0


def test_survival_examples():
    for d in (Uniform(), Linear(1.0), Exponential(3.0)):
        assert survival(d, 0.0) == 1.0
    assert survival(Exponential(2.0), 0.5) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert survival(Uniform(), 1.5) == 0.0


def test_survival_integral_examples():
    for d in FAMILIES:
        assert survival_integral(d, 0.0) == 0.0
    assert survival_integral(Exponential(1.0), 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert survival_integral(Pareto(1.0, 0.1), 0.5) == pytest.approx(0.1 + 0.1 * math.log(5), abs=1e-15)


@pytest.mark.parametrize("dist", FAMILIES, ids=repr)
def test_survival_is_one_minus_cdf(dist):
    for t in GRID:
        assert abs(dist.survival(t) - (1.0 - dist.cdf(t))) <= 1e-14


@pytest.mark.parametrize("dist", FAMILIES, ids=repr)
def test_pdf_integrates_to_one(dist):
    lo, hi = dist.support
    top = hi if math.isfinite(hi) else lo + 60.0 / getattr(dist, "lam", 1.0)
    mass = adaptive_simpson(dist.pdf, 0.0, top, 1e-12, 50, dist.breakpoints)
    tail = 1.0 - dist.cdf(top)
    if isinstance(dist, Pareto):
        # Heavy tail: compare against the cdf at the cut instead.
        top = 1e4
        mass = sum(
            adaptive_simpson(dist.pdf, x0, x1, 1e-12, 50)
            for x0, x1 in zip([0.0, dist.xi, 1.0, 10.0, 100.0, 1000.0], [dist.xi, 1.0, 10.0, 100.0, 1000.0, top])
        )
        tail = dist.survival(top)
    assert abs(mass + tail - 1.0) <= 1e-8


@pytest.mark.parametrize("dist", FAMILIES, ids=repr)
def test_cdf_monotone_and_limits(dist):
    vals = [dist.cdf(t) for t in GRID]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert dist.cdf(-1e-300) == 0.0
    assert dist.cdf(1e9) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("dist", FAMILIES, ids=repr)
def test_quadrature_agrees_with_antiderivative(dist):
    for x in np.linspace(0.0, 1.0, 41):
        exact = survival_integral(dist, x)
        assert abs(survival_integral(dist, x, method="quadrature") - exact) <= 1e-10


@pytest.mark.parametrize("dist", FAMILIES, ids=repr)
def test_pdf_is_derivative_of_cdf(dist):
    h = 1e-6
    kinks = list(dist.breakpoints) + [0.0]
    for t in np.linspace(0.01, 0.99, 99):
        if min(abs(t - k) for k in kinks) < 1e-3:
            continue
        fd = (dist.cdf(t + h) - dist.cdf(t - h)) / (2 * h)
        assert abs(fd - dist.pdf(t)) <= 1e-6 * max(1.0, dist.pdf(t))


@pytest.mark.parametrize("dist", FAMILIES, ids=repr)
def test_survival_integral_nondecreasing_and_concave(dist):
    h = 1e-3
    xs = np.linspace(h, 1.0 - h, 200)
    for x in xs:
        lo, mid, hi = (survival_integral(dist, x + d) for d in (-h, 0.0, h))
        assert hi >= mid >= lo
        assert (hi - 2 * mid + lo) / h**2 <= 1e-6


@given(st.sampled_from(FAMILIES), st.floats(0.0, 5.0))
@settings(max_examples=200, deadline=None)
def test_primitives_in_range(dist, t):
    assert dist.pdf(t) >= 0.0
    assert 0.0 <= dist.cdf(t) <= 1.0
    assert 0.0 <= dist.survival(t) <= 1.0


@pytest.mark.parametrize(
    "bad",
    [lambda: Exponential(0.0), lambda: Exponential(-1.0), lambda: Pareto(0.0), lambda: Pareto(1.0, 0.0),
     lambda: Linear(2.5), lambda: Linear(math.nan)],
)
def test_invalid_parameters_rejected_at_construction(bad):
    with pytest.raises(ValueError):
        bad()


def test_linear_intercept_is_derived():
    assert Linear(-2.0).q == 2.0
    assert Linear(2.0).q == 0.0
    with pytest.raises(ValueError):
        from_dict({"family": "linear", "r": 1.0, "q": 0.9})
    assert from_dict({"family": "linear", "r": 1.0, "q": 0.5}) == Linear(1.0)


@pytest.mark.parametrize("dist", [Uniform(), Linear(-1.5), Pareto(0.8, 0.02), Exponential(3.0)], ids=repr)
def test_json_round_trip(dist):
    assert from_dict(dist.to_dict()) == dist


def test_json_field_names():
    assert Exponential(3.0).to_dict() == {"family": "exponential", "lambda": 3.0}
    assert from_dict({"family": "pareto", "alpha": 2.0}) == Pareto(2.0, 0.01)
    with pytest.raises(ValueError):
        from_dict({"family": "gamma"})
    with pytest.raises(ValueError):
        from_dict({"lambda": 1.0})


def test_custom_distribution_uses_quadrature():
    lam = 2.0
    d = Custom(lambda t: lam * math.exp(-lam * t), lambda t: 1 - math.exp(-lam * t))
    for x in (0.1, 0.5, 1.0):
        assert survival_integral(d, x) == pytest.approx(survival_integral(Exponential(lam), x), abs=1e-10)
    with pytest.raises(TypeError):
        d.to_dict()


def test_module_functions_delegate():
    d = Linear(1.0)
    assert cdf(d, 0.4) == d.cdf(0.4)
    with pytest.raises(ValueError):
        survival_integral(d, -0.1)

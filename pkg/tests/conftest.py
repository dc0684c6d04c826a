"""Shared charts, random generators and numeric oracles for the test suite."""

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qbhkit.multivec import Multivector, VectorField
from qbhkit.symexpr import Chart, add, as_expr, evaluate_many, mul, power, sample_points

settings.register_profile("qbhkit", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qbhkit")

FD_STEP = 1e-5


def plane_chart(dim=3):
    names = tuple(f"x{i + 1}" for i in range(dim))
    return Chart.build(names, box=[(-2.0, 2.0)] * dim)


@pytest.fixture
def chart3():
    return plane_chart(3)


@pytest.fixture
def chart2():
    return plane_chart(2)


@pytest.fixture
def annulus():
    """Right half annulus used by the rotation/translation systems."""
    return Chart.build(("x1", "x2", "x3"), box=[(0.6, 2.0), (-2.0, 2.0), (-2.0, 2.0)], guards=["4 - x1^2 - x2^2"])


def random_poly(rng, chart, max_degree=2, density=0.6):
    """Random polynomial with small integer coefficients and degree <= max_degree."""
    terms = []
    for exps in itertools.product(range(max_degree + 1), repeat=chart.dim):
        if sum(exps) > max_degree or rng.random() > density:
            continue
        c = int(rng.integers(-3, 4))
        if c == 0:
            continue
        factors = [as_expr(c)] + [power(chart.var(i), e) for i, e in enumerate(exps) if e]
        terms.append(mul(*factors))
    return add(*terms)


def random_field(rng, chart, max_degree=2):
    return VectorField(chart, tuple(random_poly(rng, chart, max_degree) for _ in range(chart.dim)))


def random_multivector(rng, chart, degree, max_degree=2):
    keys = itertools.combinations(range(chart.dim), degree)
    return Multivector(chart, degree, {k: random_poly(rng, chart, max_degree) for k in keys})


def central_difference(e, chart, index, points, bindings=None, h=FD_STEP):
    shift = np.zeros(chart.dim)
    shift[index] = h
    return (evaluate_many(e, points + shift, bindings) - evaluate_many(e, points - shift, bindings)) / (2 * h)


def interior_points(chart, count=20, seed=7, margin=2 * FD_STEP):
    """Sample points whose finite-difference stencil also stays inside the chart."""
    pts = sample_points(chart, 4 * count, seed)
    keep = []
    for p in pts:
        stencil = [p + s * margin * np.eye(chart.dim)[i] for i in range(chart.dim) for s in (-1, 1)]
        if all(chart.inside(q[None, :]) for q in stencil):
            keep.append(p)
        if len(keep) == count:
            break
    return np.array(keep)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

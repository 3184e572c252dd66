import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biharm.errors import ConfigError, DomainError
from biharm.expr import parse_expression
from biharm.jets import coordinates


def test_polynomial_with_caret():
    f = parse_expression("x^2 + 1")
    assert f((3.0, 0.0, 0.0)) == 10.0
    J = f(coordinates((3.0, 0.0, 0.0)))
    assert J.extract((1, 0, 0)) == 6.0


def test_parameters_and_functions():
    f = parse_expression("a*sqrt(1 + b^2) * exp(-y) / (1 + x^2)", params={"a": 2.0, "b": 1.0})
    want = 2 * math.sqrt(2) * math.exp(-0.5) / 2
    assert f((1.0, 0.5, 0.0)) == pytest.approx(want)


def test_custom_variables():
    f = parse_expression("u/(1 + v^2)", variables=("u", "v"))
    assert f((2.0, 1.0)) == 1.0


def test_real_power():
    f = parse_expression("x^1.5")
    J = f(coordinates((4.0, 0.0, 0.0)))
    assert J.value == pytest.approx(8.0)
    assert J.extract((1, 0, 0)) == pytest.approx(3.0)


@pytest.mark.parametrize(
    "text",
    ["__import__('os')", "x.real", "q + 1", "foo(x)", "sqrt(x, y)", "x if y else z", "'s'", "x ^ y", "[x]"],
)
def test_rejected(text):
    with pytest.raises(ConfigError):
        f = parse_expression(text)
        f(coordinates((1.0, 1.0, 1.0)))


def test_syntax_error_is_config_error():
    with pytest.raises(ConfigError):
        parse_expression("x +* 2")


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_matches_python_evaluation(x, y, z):
    text = "sin(x*y) - cos(z)^2 + exp(x/3)*(y - 2*z) / (2 + x^2)"
    f = parse_expression(text)
    want = math.sin(x * y) - math.cos(z) ** 2 + math.exp(x / 3) * (y - 2 * z) / (2 + x * x)
    assert f((x, y, z)) == pytest.approx(want, rel=1e-12, abs=1e-12)
    assert f(coordinates((x, y, z))).value == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_array_evaluation():
    f = parse_expression("x*y + 1")
    P = np.array([[1.0, 2.0, 0.0], [3.0, 4.0, 0.0]])
    np.testing.assert_allclose(f((P[:, 0], P[:, 1], P[:, 2])), [3.0, 13.0])


def test_constant_expression_is_float():
    assert parse_expression("2*3")(coordinates((0.0, 0.0, 0.0))) == 6.0


def test_log_domain():
    with pytest.raises(DomainError):
        parse_expression("log(x)")(coordinates((-1.0, 0.0, 0.0)))

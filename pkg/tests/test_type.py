import math
from argparse import ArgumentTypeError

import pytest  # noqa: F401

from wshift.criteria import Rho
from wshift.type_ import (
    family,
    nonnegative_int,
    p_value,
    parse_family,
    positive_float,
    positive_int,
    rho,
    tolerance,
)
from wshift.weights import WeightSpecError


@pytest.mark.parametrize(
    "text,expected",
    [("2", 2.0), ("1", 1.0), ("1.5", 1.5), ("inf", math.inf), ("c0", math.inf)],
)
def test_p_value(text, expected):
    assert p_value(text) == expected


@pytest.mark.parametrize("text", ["0.5", "-1", "nan", "two"])
def test_p_value_errors(text):
    with pytest.raises(ArgumentTypeError):
        p_value(text)


def test_tolerance():
    assert tolerance("1e-6") == pytest.approx(math.log(1e-6))
    assert tolerance("1") == 0
    for bad in ("0", "-1e-3", "inf", "small"):
        with pytest.raises(ArgumentTypeError):
            tolerance(bad)


def test_numbers():
    assert positive_int("3") == 3
    assert nonnegative_int("0") == 0
    assert positive_float("0.1") == 0.1
    with pytest.raises(ArgumentTypeError, match="positive"):
        positive_int("0")
    with pytest.raises(ArgumentTypeError, match="non-negative"):
        nonnegative_int("-1")
    with pytest.raises(ArgumentTypeError):
        positive_int("1.5")
    with pytest.raises(ArgumentTypeError):
        positive_float("0")


def test_parse_family():
    assert parse_family("supexp") == {"family": "supexp"}
    assert parse_family("beauzamy(0.5, 2)") == {"family": "beauzamy", "a": 0.5, "b": 2}
    assert parse_family("polydecay(1, 2, alpha=0.75)") == {
        "family": "polydecay",
        "a": 1,
        "b": 2,
        "alpha": 0.75,
    }
    assert parse_family(' {"family": "constant", "c": 2} ') == {
        "family": "constant",
        "c": 2,
    }


@pytest.mark.parametrize(
    "text,field",
    [
        ("nosuch(1)", "family"),
        ("beauzamy(1, 2, 3)", "family"),
        ("beauzamy(1, a=2)", "a"),
        ("beauzamy(1, 2", "family"),
        ("beauzamy(x, 2)", "family"),
        ("beauzamy(1,, 2)", "family"),
        ('{"family": ', "family"),
    ],
)
def test_parse_family_errors(text, field):
    with pytest.raises(WeightSpecError) as exc:
        parse_family(text)
    assert exc.value.field == field


def test_family_reports_argument_errors():
    with pytest.raises(ArgumentTypeError, match=r"\[family\]"):
        family("nosuch(1)")
    # domain checks are left to from_spec
    assert family("beauzamy(0, 1)") == {"family": "beauzamy", "a": 0, "b": 1}


def test_rho():
    assert isinstance(rho("power:2"), Rho)
    with pytest.raises(ArgumentTypeError):
        rho("power")

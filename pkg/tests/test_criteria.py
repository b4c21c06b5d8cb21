import math
from pathlib import Path

import numpy as np
import pytest  # noqa: F401

from wshift.criteria import (
    SALAS_HYPERCYCLIC,
    SALAS_SUPERCYCLIC,
    Budgets,
    Rho,
    Verdict,
    a_sequence_log,
    aag_cyclic,
    conjugate_exponent,
    direct_sum_lq,
    fixed_power_ratio,
    q_exponent,
    quasinilpotent,
    root_product_infimum,
    root_product_value,
    salas_grid,
    salas_hypercyclic,
    salas_supercyclic,
    sc_witness,
)
from wshift.weights import Constant, PolyDecay, Table, from_spec

CONFIGS = Path(__file__).parent / "configs"
TOL = math.log(1e-6)
LOG2 = math.log(2)
SPECS = [
    {"family": "constant", "c": 1},
    {"family": "beauzamy", "a": 2, "b": 1},
    {"family": "beauzamy", "a": 1, "b": 2},
    {"family": "supexp", "gamma": 1},
    {"family": "polydecay", "a": 1, "b": 2, "alpha": 0.5},
]


@pytest.fixture
def beauzamy():
    return from_spec({"family": "beauzamy", "a": 0.5, "b": 2.0})


@pytest.fixture
def supexp():
    return from_spec({"family": "supexp", "gamma": 1})


def test_budgets():
    budgets = Budgets()
    assert budgets.tol_log == pytest.approx(TOL)
    assert budgets.scaled(2).m_max == 128
    assert budgets.scaled(2).a_max == budgets.a_max

    loaded = Budgets.from_config(CONFIGS / "budgets.toml")
    assert loaded.tol_log == pytest.approx(math.log(1e-8))
    assert (loaded.m_max, loaded.n_max, loaded.j_max) == (16, 256, 64)
    assert Budgets.from_config({"m_max": 4}, {"m_max": 5}).m_max == 5
    assert Budgets.from_config({"support-radius": 3}).support_radius == 3

    with pytest.raises(ValueError, match="Unknown budget"):
        Budgets.from_config({"mmax": 4})
    with pytest.raises(ValueError):
        Budgets.from_config({"tol": 0})
    with pytest.raises(ValueError):
        Budgets(m_max=0)
    with pytest.raises(ValueError):
        Budgets(lq_m=-1)


def test_salas_supercyclic(beauzamy):
    report = salas_supercyclic(beauzamy, 8, 64, TOL)
    assert report.verdict is Verdict.WITNESSED
    assert report.witnessed
    # the ratio is 4^-(n - m) once n > m, the same for every m
    assert report.witness == {"m_worst": 0, "n": 10}
    assert report.value_log == pytest.approx(-20 * LOG2)
    assert len(report.details["per_m"]) == 9

    report = salas_supercyclic(beauzamy, 8, 9, TOL)
    assert report.verdict is Verdict.UNDETERMINED

    report = salas_supercyclic(Constant(1.0), 4, 32, TOL)
    assert not report.witnessed
    assert report.value_log == 0


def test_salas_hypercyclic(beauzamy):
    report = salas_hypercyclic(beauzamy, 8, 64, TOL)
    assert report.witnessed
    assert report.witness == {"m_worst": 0, "n": 20}
    assert salas_hypercyclic(beauzamy, 8, 30, TOL).verdict is Verdict.UNDETERMINED


def test_salas_ties_go_to_the_smallest_m():
    # w_n = 1 (n <= 0), 2 (n > 0): the ratio is 2^-(n - m) for n > m
    ws = from_spec({"family": "beauzamy", "a": 1, "b": 2})
    report = salas_supercyclic(ws, 8, 64, math.log(1e-3))
    assert report.witnessed
    assert report.witness == {"m_worst": 0, "n": 10}
    assert report.value_log == pytest.approx(-10 * LOG2, abs=1e-12)
    assert [row[1] for row in report.details["per_m"]] == list(range(10, 19))


def test_salas_workers_do_not_change_result(beauzamy):
    one = salas_supercyclic(beauzamy, 12, 40, TOL)
    two = salas_supercyclic(beauzamy, 12, 40, TOL, workers=2)
    assert one.to_dict() == two.to_dict()


def test_salas_grid(beauzamy):
    grid = salas_grid(beauzamy, 2, 5)
    assert grid.shape == (3, 5)
    # m = 0, n = 1: w_0 / w_1
    assert grid[0, 0] == pytest.approx(-2 * LOG2)


def test_quasinilpotent(supexp):
    report = quasinilpotent(supexp, 64, TOL)
    assert report.witnessed
    assert report.witness == {"n": 64}
    assert report.value_log == pytest.approx(-31.5)
    assert report.trace[:3] == pytest.approx([0.0, -0.5, -1.0])

    assert not quasinilpotent(Constant(1.0), 64, TOL).witnessed
    with pytest.raises(ValueError):
        quasinilpotent(supexp, 0, TOL)


def test_quasinilpotent_at_default_budgets(supexp):
    # the weights underflow to 0.0 past |n| = 745
    n_max = Budgets().n_max
    report = quasinilpotent(supexp, n_max, TOL)
    assert report.witnessed
    assert report.witness == {"n": n_max}
    assert report.value_log == pytest.approx(-(n_max - 1) / 2, rel=1e-12)
    assert report.trace[1000] == pytest.approx(-500.0, rel=1e-12)


def test_root_product_infimum(supexp):
    report = root_product_infimum(supexp, 1, 4, 8, TOL)
    assert report.witnessed
    j, m = report.witness["j"], report.witness["m"]
    assert report.value_log == pytest.approx(root_product_value(supexp, 1, j, m))

    report = root_product_infimum(Constant(1.0), 2, 4, 8, TOL)
    assert not report.witnessed
    assert report.value_log == pytest.approx(0.0, abs=1e-15)
    # ties go to the smallest m, then the smallest j
    assert report.witness == {"j": 1, "m": 2}

    with pytest.raises(ValueError):
        root_product_infimum(supexp, 0, 4, 8, TOL)
    with pytest.raises(ValueError):
        root_product_infimum(supexp, 5, 4, 4, TOL)


def test_root_product_monotone_in_budgets():
    ws = PolyDecay(1, 2, 0.75)
    values = [
        root_product_infimum(ws, 1, 4 * f, 8 * f, TOL).value_log for f in (1, 2, 4)
    ]
    assert values[0] >= values[1] >= values[2]


def test_fixed_power_ratio(supexp):
    # value -m^2 + 2m for j = 2
    report = fixed_power_ratio(supexp, 2, 1, 8, TOL)
    assert report.witnessed
    assert report.witness == {"m": 8}
    assert report.value_log == pytest.approx(-48.0)

    # value m for j = 1
    report = fixed_power_ratio(supexp, 1, 1, 8, TOL)
    assert not report.witnessed
    assert report.value_log == pytest.approx(1.0)
    assert report.witness == {"m": 1}

    with pytest.raises(ValueError):
        fixed_power_ratio(supexp, 0, 1, 8, TOL)


def test_fixed_power_ratio_starts_at_nonempty_range(supexp):
    report = fixed_power_ratio(supexp, 2, 5, 3, TOL)
    assert report.witness["m"] >= 3


@pytest.mark.parametrize(
    "p1,p2,q",
    [
        (2, 2, math.inf),
        (3, 3, 3),
        (4, 4, 2),
        (math.inf, math.inf, 1),
        (math.inf, 2, 2),
        (1, math.inf, math.inf),
        (3, 1.5, math.inf),
    ],
)
def test_q_exponent(p1, p2, q):
    assert q_exponent(p1, p2) == q


def test_conjugate_exponent():
    assert conjugate_exponent(2) == 2
    assert conjugate_exponent(1) == math.inf
    assert conjugate_exponent(math.inf) == 1
    assert conjugate_exponent(3) == 1.5
    with pytest.raises(ValueError):
        conjugate_exponent(0.5)


def test_a_sequence(beauzamy):
    # a_n = w~(1, n) / w~(1 - n, 0) = 4^n at m = 0
    assert list(a_sequence_log(beauzamy, 0, 3)) == pytest.approx(
        [2 * LOG2, 4 * LOG2, 6 * LOG2]
    )


def test_direct_sum_sup_case(beauzamy):
    report = direct_sum_lq(Constant(1.0), 2, 2, 0, 64)
    assert report.witnessed
    assert report.witness == {"n_star": 1}
    assert report.value_log == -math.inf
    assert report.details["q"] == "inf"

    report = direct_sum_lq(Constant(1.0), 2, 2, 0, 64, math.log(1e-3))
    assert report.witnessed
    assert report.value_log <= report.tolerance_log

    # a_n = 4^n keeps growing: at best 4^32 past n* = 32
    report = direct_sum_lq(beauzamy, 2, 2, 0, 64)
    assert not report.witnessed
    assert report.witness == {"n_star": None}
    assert report.details["best_n_star"] == 32
    assert report.value_log == pytest.approx(math.log(64 * LOG2))
    assert report.value_log > report.tolerance_log


def test_direct_sum_finite_q():
    summable = from_spec({"family": "beauzamy", "a": 2.0, "b": 0.5})
    report = direct_sum_lq(summable, 4, 4, 0, 64)
    assert report.details["q"] == 2
    assert report.witnessed
    assert len(report.trace) == 64

    report = direct_sum_lq(Constant(1.0), 4, 4, 0, 64)
    assert not report.witnessed
    assert report.value_log == pytest.approx(math.log(0.5))
    assert report.details["tail_exponent"] == pytest.approx(0.0, abs=1e-9)

    with pytest.raises(ValueError):
        direct_sum_lq(Constant(1.0), 0.5, 2, 0, 64)


def test_rho():
    rho = Rho.parse("subexp:5,0.25")
    assert rho.kind == "subexp"
    assert rho.params == (5.0, 0.25)
    assert str(rho) == "subexp:5,0.25"
    assert list(rho.log([16])) == pytest.approx([10.0])
    assert list(Rho.parse("power:2").log([1])) == pytest.approx([2 * LOG2])
    assert list(Rho.parse("constant:1").log([3])) == [0.0]
    for bad in ("nosuch:1", "power:1,2", "constant:0", "subexp:a,b"):
        with pytest.raises(ValueError):
            Rho.parse(bad)


def test_aag_cyclic():
    ws = PolyDecay(1, 2, 0.75)
    report = aag_cyclic(ws, 2, 1, Rho.parse("subexp:5,0.25"), 2048, TOL)
    assert report.witnessed
    assert report.value_log <= TOL
    assert all(report.details["hypotheses"].values())
    assert report.details["heuristic"] is True

    supexp = from_spec({"family": "supexp", "gamma": 1})
    report = aag_cyclic(supexp, 2, 1, Rho.parse("constant:1"), 256, TOL)
    assert not report.witnessed
    assert report.details["hypotheses"]["alpha_positive_rho"] is False

    with pytest.raises(ValueError):
        aag_cyclic(ws, 2, 1, None, 256, TOL)
    with pytest.raises(ValueError):
        aag_cyclic(ws, 2, 1, Rho.parse("constant:1"), 3, TOL)


def test_sc_witness(beauzamy):
    report = sc_witness(beauzamy, 2, 64, TOL)
    assert report.witnessed
    assert report.witness == {"n_1": 14}
    assert report.details["prefix"][:3] == [14, 15, 16]
    assert report.value_log == pytest.approx(-20 * LOG2)

    report = sc_witness(Constant(1.0), 2, 64, TOL)
    assert not report.witnessed
    assert report.details["prefix"] == []
    with pytest.raises(ValueError):
        sc_witness(beauzamy, -1, 64, TOL)


def test_report_to_dict(beauzamy):
    data = quasinilpotent(beauzamy, 8, TOL).to_dict()
    assert data["criterion"] == "quasinilpotent"
    assert data["verdict"] in ("witnessed", "undetermined")
    assert set(data) >= {"witness", "value_log", "tolerance_log", "horizon", "trace"}


def test_unweighted_shift_values_are_exactly_zero():
    ws = Constant(1.0)
    reports = [
        salas_hypercyclic(ws, 8, 64, TOL),
        salas_supercyclic(ws, 8, 64, TOL),
        root_product_infimum(ws, 1, 4, 8, TOL),
        quasinilpotent(ws, 64, TOL),
    ]
    for report in reports:
        assert not report.witnessed
        assert report.value_log == 0


def test_aag_cyclic_unweighted_shift():
    # cyclic on l_2, the l_inf obstruction shows on l_1
    rho = Rho.parse("constant:1")
    report = aag_cyclic(Constant(1.0), 2, 1, rho, 64, TOL)
    assert report.witnessed
    assert report.details["lq_membership"] is False

    report = aag_cyclic(Constant(1.0), 1, 1, rho, 64, TOL)
    assert not report.witnessed
    assert report.details["q"] == "inf"
    assert report.details["lq_membership"] is True
    assert report.details["hypotheses"]["alpha_inverse_not_in_lq"] is False


def test_beauzamy_with_heavier_left_side():
    ws = from_spec({"family": "beauzamy", "a": 2, "b": 1})
    tol = math.log(1e-3)
    assert not salas_supercyclic(ws, 8, 64, tol).witnessed
    # a_n = 2^-n is bounded
    report = direct_sum_lq(ws, 2, 2, 0, 64, tol)
    assert report.witnessed
    assert report.witness == {"n_star": 1}


def test_polydecay_supercyclic_when_the_left_side_decays_faster():
    assert salas_supercyclic(PolyDecay(1, 2, 0.75), 8, 4096, TOL).witnessed
    assert not salas_supercyclic(PolyDecay(2, 1, 0.75), 8, 4096, TOL).witnessed


@pytest.mark.parametrize("spec", SPECS)
def test_root_product_substitution(spec):
    ws = from_spec(spec)
    for a in (1, 2, 3):
        for j in range(1, 9):
            expected = -ws.w_tilde_log(1, a + 1) + ws.w_tilde_log(-j, 0) / j
            assert root_product_value(ws, a, j, a + 1) == pytest.approx(
                expected, rel=1e-12, abs=1e-15
            )


@pytest.mark.parametrize("spec", SPECS)
def test_hypercyclic_grid_bounds_supercyclic_grid(spec):
    ws = from_spec(spec)
    ratio = salas_grid(ws, 8, 64, SALAS_SUPERCYCLIC)
    worst = salas_grid(ws, 8, 64, SALAS_HYPERCYCLIC)
    assert np.all(ratio <= 2 * worst + 1e-9)
    if salas_hypercyclic(ws, 8, 64, TOL).witnessed:
        assert salas_supercyclic(ws, 8, 64, TOL).witnessed


def _infimum_reports(ws, budgets, tol):
    return [
        quasinilpotent(ws, budgets.n_max, tol),
        root_product_infimum(ws, 1, budgets.j_max, budgets.m_max, tol),
        fixed_power_ratio(ws, 2, 1, budgets.m_max, tol),
    ]


def test_infimum_criteria_are_monotone_in_budgets():
    rng = np.random.default_rng(5)
    small = Budgets(m_max=8, n_max=64, j_max=4)
    tol = math.log(0.5)
    witnessed = 0
    for _ in range(100):
        width = int(rng.integers(1, 9))
        ws = Table(
            {n: float(rng.uniform(0.1, 2.0)) for n in range(-width, width + 1)},
            ("constant", float(rng.uniform(0.1, 2.0))),
            ("constant", float(rng.uniform(0.1, 2.0))),
        )
        before = _infimum_reports(ws, small, tol)
        after = _infimum_reports(ws, small.scaled(2), tol)
        for old, new in zip(before, after):
            if old.witnessed:
                witnessed += 1
                assert new.witnessed
                assert new.value_log <= old.value_log
    assert witnessed > 0

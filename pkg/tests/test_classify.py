import logging
import math

import pytest  # noqa: F401

from wshift.classify import (
    CONFLICT,
    FAILS,
    GENERAL_EDGES,
    HOLDS,
    NODES,
    SMALL_P_EDGES,
    UNDETERMINED,
    Edge,
    check_justification,
    classify,
    edge_set,
    propagate,
)
from wshift.criteria import Budgets, Rho
from wshift.weights import Constant, from_spec

BUDGETS = Budgets(m_max=8, n_max=64, j_max=4, a_max=2)
SPECS = [
    {"family": "constant", "c": 1},
    {"family": "beauzamy", "a": 2, "b": 1},
    {"family": "beauzamy", "a": 1, "b": 2},
    {"family": "supexp", "gamma": 1},
    {"family": "polydecay", "a": 1, "b": 2, "alpha": 0.5},
]


def test_edge_set():
    assert Edge("C1", "C2").name == "C1->C2"
    assert set(SMALL_P_EDGES) <= set(edge_set(2))
    assert set(SMALL_P_EDGES) <= set(edge_set(1))
    assert not set(SMALL_P_EDGES) & set(edge_set(3))
    assert not set(SMALL_P_EDGES) & set(edge_set(math.inf))
    with pytest.raises(ValueError):
        edge_set(0.5)


def test_propagate_forward():
    statuses = propagate({"C1": ["seed->C1"]}, {}, GENERAL_EDGES)
    for node in ("C1", "C2", "C3", "C4", "C5", "C6", "cyclic", "dual_sum"):
        assert statuses[node].status == HOLDS
    assert statuses["hypercyclic"].status == UNDETERMINED
    assert statuses["C5"].via == [
        "seed->C1",
        "C1->C2",
        "C2->C3",
        "C3->C6",
        "C6->C5",
    ]


def test_propagate_backward():
    statuses = propagate({}, {"C4": ["seed->not C4"]}, GENERAL_EDGES)
    for node in ("hypercyclic", "C1", "C2", "C3", "C5", "C6", "dual_sum"):
        assert statuses[node].status == FAILS
    assert statuses["cyclic"].status == UNDETERMINED
    assert statuses["C1"].via == ["seed->not C4", "not C1->C4"]


def test_propagate_conflict(caplog):
    with caplog.at_level(logging.WARNING):
        statuses = propagate(
            {"C2": ["seed->C2"]}, {"C4": ["seed->not C4"]}, GENERAL_EDGES
        )
    assert statuses["C4"].status == CONFLICT
    assert statuses["C4"].refuted_via == ["seed->not C4"]
    assert statuses["C4"].to_dict()["refuted_via"] == ["seed->not C4"]
    assert "Conflicting evidence for C4" in caplog.text


def test_classify_supercyclic_shift():
    ws = from_spec({"family": "beauzamy", "a": 0.5, "b": 2.0})
    report = classify(ws, 2, BUDGETS)
    assert report.status("C2") == HOLDS
    assert report.status("hypercyclic") == HOLDS
    for node in NODES:
        assert report.status(node) == HOLDS
    assert report.statuses["C1"].via[0] in ("sc_witness->C1", "salas_supercyclic->C2")
    assert check_justification(report)


def test_classify_unweighted_shift():
    report = classify(Constant(1.0), 2, BUDGETS)
    assert report.status("C4") == FAILS
    assert report.status("C1") == FAILS
    assert report.status("dual_sum") == FAILS
    assert report.status("cyclic") == UNDETERMINED
    assert check_justification(report)

    # above p = 2 the equivalences are not available
    report = classify(Constant(1.0), 3, BUDGETS)
    assert report.status("dual_sum") == FAILS
    assert report.status("C2") == FAILS
    assert report.status("C4") == UNDETERMINED
    assert report.status("C3") == UNDETERMINED
    assert check_justification(report)


def test_classify_report_to_dict():
    report = classify(Constant(1.0), math.inf, BUDGETS)
    data = report.to_dict()
    assert data["p"] == "c_0"
    assert list(data["statuses"]) == list(NODES)
    assert "C2->C1" not in data["edges"]
    names = [c["criterion"] for c in data["criteria"]]
    assert "dual_sum_lq" in names
    assert names.count("root_product_infimum") == BUDGETS.a_max


def test_check_justification_rejects_unknown_steps():
    report = classify(Constant(1.0), 3, BUDGETS)
    report.statuses["C2"].via = ["made_up->C2"]
    assert not check_justification(report)


def test_classify_quasinilpotent_shift_is_cyclic():
    ws = from_spec({"family": "supexp", "gamma": 1})
    report = classify(ws, 1, BUDGETS)
    assert report.status("cyclic") == HOLDS
    assert report.statuses["cyclic"].via[-1].endswith("->cyclic")
    assert check_justification(report)


def test_classify_heavier_left_side_refutes_everything_but_cyclicity():
    ws = from_spec({"family": "beauzamy", "a": 2, "b": 1})
    report = classify(ws, 2, BUDGETS)
    for node in NODES:
        if node == "cyclic":
            assert report.status(node) == UNDETERMINED
        else:
            assert report.status(node) == FAILS
    assert report.statuses["C4"].via == ["direct_sum_lq->not C4"]
    assert check_justification(report)


def test_classify_polydecay_supercyclic():
    ws = from_spec({"family": "polydecay", "a": 1, "b": 2, "alpha": 0.75})
    budgets = Budgets(m_max=8, n_max=4096, j_max=4, a_max=2)
    report = classify(ws, 2, budgets)
    assert report.status("C2") == HOLDS
    assert CONFLICT not in {report.status(node) for node in NODES}
    assert check_justification(report)


@pytest.mark.parametrize("p", [1, 2, math.inf])
@pytest.mark.parametrize("spec", SPECS)
def test_classification_is_sound(spec, p):
    report = classify(from_spec(spec), p, BUDGETS, rho=Rho.parse("constant:1"))
    for criterion in report.reports:
        if criterion.witnessed:
            assert criterion.value_log <= criterion.tolerance_log
    for edge in report.edges:
        if report.status(edge.src) == HOLDS:
            assert report.status(edge.dst) in (HOLDS, CONFLICT)
        if report.status(edge.dst) == FAILS:
            assert report.status(edge.src) in (FAILS, CONFLICT)
    assert check_justification(report)

"""Classification of a weighted shift against the conditions C1-C6

C1: T satisfies the Supercyclicity Criterion
C2: T is supercyclic
C3: T is weakly supercyclic
C4: T + T is cyclic
C5: T^n is cyclic for some n >= 2
C6: T^n is cyclic for every n

Criterion verdicts seed some nodes as holding (or, for the direct sum
obstructions, failing). Holding propagates forward along implication edges
and failing propagates backward. Which edges are available depends on p:
for p <= 2 all six conditions are equivalent.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, NamedTuple, Sequence, Tuple

from .criteria import (
    Budgets,
    CriterionReport,
    Rho,
    aag_cyclic,
    check_p,
    conjugate_exponent,
    direct_sum_lq,
    quasinilpotent,
    root_product_infimum,
    salas_hypercyclic,
    salas_supercyclic,
    sc_witness,
)
from .weights import WeightSequence

logger = logging.getLogger(__name__)

CONDITIONS = ("C1", "C2", "C3", "C4", "C5", "C6")
NODES = ("hypercyclic",) + CONDITIONS + ("cyclic", "dual_sum")

HOLDS = "holds"
FAILS = "fails"
UNDETERMINED = "undetermined"
CONFLICT = "conflict"


class Edge(NamedTuple):
    """An implication between two nodes"""

    src: str
    dst: str

    @property
    def name(self) -> str:
        return f"{self.src}->{self.dst}"


# Valid for weighted shifts on every l_p and c_0
GENERAL_EDGES = (
    Edge("hypercyclic", "C2"),
    Edge("C1", "C2"),
    Edge("C1", "C4"),
    Edge("C2", "C3"),
    Edge("C3", "C6"),
    Edge("C6", "C5"),
    Edge("C5", "C4"),
    Edge("C2", "cyclic"),
    Edge("C6", "cyclic"),
    Edge("C2", "dual_sum"),
    Edge("dual_sum", "C2"),
)
# Closing the cycle of equivalences, p <= 2 only
SMALL_P_EDGES = (
    Edge("C2", "C1"),
    Edge("C4", "C2"),
)

# criterion -> node it supports when witnessed
SUPPORTS = {
    "salas_hypercyclic": "hypercyclic",
    "salas_supercyclic": "C2",
    "sc_witness": "C1",
    "quasinilpotent": "cyclic",
    "root_product_infimum": "cyclic",
    "aag_cyclic": "cyclic",
}
# criterion evidence -> node it refutes when witnessed
REFUTES = {
    "direct_sum_lq": "C4",
    "dual_sum_lq": "dual_sum",
}


def edge_set(p: float) -> Tuple[Edge, ...]:
    check_p(p)
    return GENERAL_EDGES + (SMALL_P_EDGES if p <= 2 else ())


@dataclass
class NodeStatus:
    status: str = UNDETERMINED
    via: List[str] = field(default_factory=list)
    refuted_via: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"status": self.status, "via": self.via}
        if self.status == CONFLICT:
            out["refuted_via"] = self.refuted_via
        return out


@dataclass
class ClassificationReport:
    family: str
    p: float
    statuses: Dict[str, NodeStatus]
    edges: Tuple[Edge, ...]
    reports: List[CriterionReport]

    @property
    def p_label(self) -> str | float:
        return "c_0" if math.isinf(self.p) else self.p

    def status(self, node: str) -> str:
        return self.statuses[node].status

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "p": self.p_label,
            "statuses": {node: self.statuses[node].to_dict() for node in NODES},
            "edges": [edge.name for edge in self.edges],
            "criteria": [report.to_dict() for report in self.reports],
        }


def _evidence_name(report: CriterionReport) -> str:
    a = report.horizon.get("a")
    return f"{report.criterion}[a={a}]" if a is not None else report.criterion


def propagate(
    holds: Mapping[str, Sequence[str]],
    fails: Mapping[str, Sequence[str]],
    edges: Sequence[Edge],
) -> Dict[str, NodeStatus]:
    """Close the seeded statuses under the edges

    `holds`/`fails` map a node to the evidence chain seeding it. A node
    reached both ways is a conflict.
    """
    positive: Dict[str, List[str]] = {n: list(chain) for n, chain in holds.items()}
    queue = deque(positive)
    while queue:
        node = queue.popleft()
        for edge in edges:
            if edge.src == node and edge.dst not in positive:
                positive[edge.dst] = positive[node] + [edge.name]
                queue.append(edge.dst)

    negative: Dict[str, List[str]] = {n: list(chain) for n, chain in fails.items()}
    queue = deque(negative)
    while queue:
        node = queue.popleft()
        for edge in edges:
            if edge.dst == node and edge.src not in negative:
                negative[edge.src] = negative[node] + [f"not {edge.name}"]
                queue.append(edge.src)

    statuses = {}
    for node in NODES:
        if node in positive and node in negative:
            logger.warning(
                "Conflicting evidence for %s: %s vs %s",
                node,
                positive[node],
                negative[node],
            )
            statuses[node] = NodeStatus(CONFLICT, positive[node], negative[node])
        elif node in positive:
            statuses[node] = NodeStatus(HOLDS, positive[node])
        elif node in negative:
            statuses[node] = NodeStatus(FAILS, negative[node])
        else:
            statuses[node] = NodeStatus()
    return statuses


def run_criteria(
    ws: WeightSequence,
    p: float,
    budgets: Budgets,
    rho: Rho | None = None,
    k: float = 1.0,
    workers: int = 1,
) -> List[CriterionReport]:
    """Every criterion that bears on the classification at exponent p"""
    check_p(p)
    tol = budgets.tol_log
    reports = [
        salas_supercyclic(ws, budgets.m_max, budgets.n_max, tol, workers=workers),
        salas_hypercyclic(ws, budgets.m_max, budgets.n_max, tol, workers=workers),
        sc_witness(ws, budgets.support_radius, budgets.n_max, tol),
        quasinilpotent(ws, budgets.n_max, tol),
    ]
    for a in range(1, budgets.a_max + 1):
        reports.append(
            root_product_infimum(
                ws, a, budgets.j_max, max(budgets.m_max, a), tol, workers=workers
            )
        )
    reports.append(direct_sum_lq(ws, p, p, budgets.lq_m, budgets.n_max, tol))
    dual = direct_sum_lq(
        ws, p, conjugate_exponent(p), budgets.lq_m, budgets.n_max, tol
    )
    dual.criterion = "dual_sum_lq"
    reports.append(dual)
    if rho is not None:
        reports.append(aag_cyclic(ws, p, k, rho, budgets.n_max, tol))
    return reports


def classify(
    ws: WeightSequence,
    p: float,
    budgets: Budgets | None = None,
    rho: Rho | None = None,
    k: float = 1.0,
    workers: int = 1,
) -> ClassificationReport:
    """Status of each condition C1-C6 (plus hypercyclic, cyclic, dual_sum)

    Cyclicity from root_product_infimum needs a witness for every
    a in [1, a_max].
    """
    budgets = budgets or Budgets()
    edges = edge_set(p)
    reports = run_criteria(ws, p, budgets, rho=rho, k=k, workers=workers)

    holds: Dict[str, List[str]] = {}
    fails: Dict[str, List[str]] = {}
    root_reports = [r for r in reports if r.criterion == "root_product_infimum"]
    for report in reports:
        if not report.witnessed:
            continue
        if report.criterion == "root_product_infimum":
            continue
        if report.criterion in SUPPORTS:
            node = SUPPORTS[report.criterion]
            holds.setdefault(node, [f"{report.criterion}->{node}"])
        elif report.criterion in REFUTES:
            node = REFUTES[report.criterion]
            fails.setdefault(node, [f"{report.criterion}->not {node}"])
    if root_reports and all(r.witnessed for r in root_reports):
        holds.setdefault("cyclic", ["root_product_infimum->cyclic"])

    statuses = propagate(holds, fails, edges)
    return ClassificationReport(
        family=ws.label,
        p=p,
        statuses=statuses,
        edges=edges,
        reports=reports,
    )


def check_justification(report: ClassificationReport) -> bool:
    """Every step of every chain is an evidence edge or a listed edge"""
    names = {edge.name for edge in report.edges}
    evidence = {f"{c}->{n}" for c, n in SUPPORTS.items()}
    evidence |= {f"{c}->not {n}" for c, n in REFUTES.items()}
    evidence.add("root_product_infimum->cyclic")
    for status in report.statuses.values():
        for chain in (status.via, status.refuted_via):
            if not chain:
                continue
            if chain[0] not in evidence:
                return False
            for step in chain[1:]:
                if step.removeprefix("not ") not in names:
                    return False
    return True

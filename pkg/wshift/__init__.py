"""Cyclicity criteria for weighted bilateral shifts"""
# Shortcuts
from .classify import classify
from .constructor import approximate_transition, direct_sum_cyclic_vector
from .criteria import (
    Budgets,
    CriterionReport,
    Verdict,
    aag_cyclic,
    direct_sum_lq,
    fixed_power_ratio,
    quasinilpotent,
    root_product_infimum,
    salas_hypercyclic,
    salas_supercyclic,
    sc_witness,
)
from .engine import LogPolynomial, SparseVector
from .weights import (
    WeightDomainError,
    WeightSequence,
    WeightSpecError,
    from_spec,
    load_weight_spec,
)

__version__ = "0.1.0"

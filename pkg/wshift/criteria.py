"""Finite-horizon evaluation of the inf/liminf criteria for weighted shifts

Every criterion returns a CriterionReport whose verdict is either
"witnessed" (a parameter point with value <= tolerance was found inside the
horizon) or "undetermined". A liminf condition cannot be refuted on a
finite grid, so no criterion ever reports a failure.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from functools import partial
from os import PathLike
from typing import Any, Dict, List, Mapping, Tuple

import numpy as np
from scipy.special import logsumexp
from simpleconf import Config

from .sweep import lexicographic_min, sweep
from .utils import LogMagnitude, render_float
from .weights import WeightSequence

logger = logging.getLogger(__name__)

# Slack when testing a trace for monotonicity or non-growth
TRACE_RTOL = 1e-12


class Verdict(str, Enum):
    WITNESSED = "witnessed"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Budgets:
    """Search horizons and the witnessing tolerance (a log-magnitude)"""

    tol_log: float = math.log(1e-6)
    m_max: int = 64
    n_max: int = 4096
    j_max: int = 64
    a_max: int = 4
    support_radius: int = 2
    lq_m: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.tol_log):
            raise ValueError(f"tol_log must be finite, got {self.tol_log}")
        for name in ("m_max", "n_max", "j_max", "a_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("support_radius", "lq_m"):
            if getattr(self, name) < 0:
                raise ValueError(
                    f"{name} must be non-negative, got {getattr(self, name)}"
                )

    def scaled(self, factor: int) -> Budgets:
        """The same budgets with every horizon multiplied by `factor`"""
        return replace(
            self,
            m_max=self.m_max * factor,
            n_max=self.n_max * factor,
            j_max=self.j_max * factor,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_config(cls, *configs: Mapping[str, Any] | str | PathLike) -> Budgets:
        """Load budgets from dicts or files, later ones taking precedence

        `tol` may be given as a magnitude instead of `tol_log`.
        """
        conf = Config.load(*(c if isinstance(c, Mapping) else str(c) for c in configs))
        known = {f.name for f in fields(cls)}
        kwargs: Dict[str, Any] = {}
        for key, value in conf.items():
            key = key.replace("-", "_")
            if key == "tol":
                if not float(value) > 0:
                    raise ValueError(f"tol must be positive, got {value}")
                kwargs["tol_log"] = math.log(float(value))
            elif key in known:
                kwargs[key] = float(value) if key == "tol_log" else int(value)
            else:
                raise ValueError(f"Unknown budget: {key}")
        return cls(**kwargs)


@dataclass
class CriterionReport:
    """The outcome of one criterion over a finite horizon"""

    criterion: str
    verdict: Verdict
    witness: Dict[str, Any]
    value_log: LogMagnitude
    tolerance_log: LogMagnitude
    horizon: Dict[str, Any]
    trace: List[float] | None = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def witnessed(self) -> bool:
        return self.verdict is Verdict.WITNESSED

    @property
    def params(self) -> Tuple[int, ...]:
        return tuple(v for v in self.witness.values() if isinstance(v, int))

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "criterion": self.criterion,
            "verdict": self.verdict.value,
            "witness": _render(self.witness),
            "value_log": render_float(self.value_log),
            "tolerance_log": render_float(self.tolerance_log),
            "horizon": _render(self.horizon),
        }
        if self.trace is not None:
            out["trace"] = [render_float(x) for x in self.trace]
        if self.details:
            out["details"] = _render(self.details)
        return out


def _render(value: Any) -> Any:
    if isinstance(value, float):
        return render_float(value)
    if isinstance(value, Mapping):
        return {key: _render(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_render(val) for val in value]
    if isinstance(value, np.generic):
        return _render(value.item())
    return value


def _report(
    criterion: str,
    found: bool,
    witness: Dict[str, Any],
    value: float,
    tol: float,
    horizon: Dict[str, Any],
    **kwargs: Any,
) -> CriterionReport:
    report = CriterionReport(
        criterion=criterion,
        verdict=Verdict.WITNESSED if found else Verdict.UNDETERMINED,
        witness=witness,
        value_log=float(value),
        tolerance_log=tol,
        horizon=horizon,
        **kwargs,
    )
    logger.info(
        "%s: %s (value %.6g, witness %s)",
        criterion,
        report.verdict.value,
        report.value_log,
        witness,
    )
    return report


# -- Salas conditions ------------------------------------------------------
SALAS_HYPERCYCLIC = "salas_hypercyclic"
SALAS_SUPERCYCLIC = "salas_supercyclic"


def _salas_values(
    ws: WeightSequence,
    m: int,
    n_max: int,
    kind: str,
) -> np.ndarray:
    """Values for n = 1..n_max at a fixed m"""
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    backward = ws.range_log_many(m - ns + 1, np.full_like(ns, m))
    forward = ws.range_log_many(np.full_like(ns, m + 1), m + ns)
    if kind == SALAS_HYPERCYCLIC:
        return np.maximum(backward, -forward)
    return backward - forward


def salas_grid(
    ws: WeightSequence,
    m_max: int,
    n_max: int,
    kind: str = SALAS_SUPERCYCLIC,
) -> np.ndarray:
    """The full (m, n) value grid, rows m = 0..m_max, columns n = 1..n_max"""
    return np.array([_salas_values(ws, m, n_max, kind) for m in range(m_max + 1)])


def _salas_row(
    m: int,
    ws: WeightSequence,
    n_max: int,
    tol: float,
    kind: str,
) -> Tuple[int, int | None, float, int]:
    """(m, first n with value <= tol or None, its value or the best, best n)"""
    values = _salas_values(ws, m, n_max, kind)
    hits = np.flatnonzero(values <= tol)
    if hits.size:
        return m, int(hits[0]) + 1, float(values[hits[0]]), int(hits[0]) + 1
    best = int(np.argmin(values))
    return m, None, float(values[best]), best + 1


def _salas(
    kind: str,
    ws: WeightSequence,
    m_max: int,
    n_max: int,
    tol: float,
    workers: int,
) -> CriterionReport:
    if m_max < 0 or n_max < 1:
        raise ValueError(f"Expected m_max >= 0 and n_max >= 1, got {m_max}, {n_max}")
    row = partial(_salas_row, ws=ws, n_max=n_max, tol=tol, kind=kind)
    rows = sweep(row, list(range(m_max + 1)), workers)

    missing = [r for r in rows if r[1] is None]
    found = not missing
    # the hardest m: largest (best or first-hit) value, ties to the smallest m
    pool = missing or rows
    top = max(r[2] for r in pool)
    slack = TRACE_RTOL * max(1.0, abs(top))
    hardest = [r for r in pool if r[2] >= top - slack]
    m, _, value, n = min(hardest, key=lambda r: r[0])
    return _report(
        kind,
        found,
        {"m_worst": m, "n": n},
        value,
        tol,
        {"m_max": m_max, "n_max": n_max},
        details={
            "per_m": [[r[0], r[3], r[2]] for r in rows],
            "m_scanned": [0, m_max],
        },
    )


def salas_hypercyclic(
    ws: WeightSequence,
    m_max: int,
    n_max: int,
    tol: float,
    workers: int = 1,
) -> CriterionReport:
    """For each m <= m_max, some n <= n_max with
    max(w~(m-n+1, m), w~(m+1, m+n)^-1) <= e^tol"""
    return _salas(SALAS_HYPERCYCLIC, ws, m_max, n_max, tol, workers)


def salas_supercyclic(
    ws: WeightSequence,
    m_max: int,
    n_max: int,
    tol: float,
    workers: int = 1,
) -> CriterionReport:
    """For each m <= m_max, some n <= n_max with
    w~(m-n+1, m) / w~(m+1, m+n) <= e^tol"""
    return _salas(SALAS_SUPERCYCLIC, ws, m_max, n_max, tol, workers)


# -- inf-type cyclicity conditions -----------------------------------------
def _root_product_row(
    j: int,
    ws: WeightSequence,
    a: int,
    m_max: int,
) -> Tuple[float, int, int] | None:
    ms = np.arange(a, m_max + 1, dtype=np.int64)
    if ms.size == 0:
        return None
    values = -ws.range_log_many(np.ones_like(ms), ms) + ws.range_log_many(
        -j * (ms - a), np.zeros_like(ms)
    ) / j
    best = int(np.argmin(values))
    return float(values[best]), int(ms[best]), j


def root_product_value(ws: WeightSequence, a: int, j: int, m: int) -> LogMagnitude:
    """log of w~(1, m)^-1 w~(-j(m-a), 0)^(1/j)"""
    return -ws.range_log(1, m) + ws.range_log(-j * (m - a), 0) / j


def root_product_infimum(
    ws: WeightSequence,
    a: int,
    j_max: int,
    m_max: int,
    tol: float,
    workers: int = 1,
) -> CriterionReport:
    """inf over j <= j_max, a <= m <= m_max of w~(1, m)^-1 w~(-j(m-a), 0)^(1/j)

    A value below the tolerance for every a >= 1 makes the shift cyclic.
    """
    if a < 1 or j_max < 1 or m_max < a:
        raise ValueError(
            f"Expected a >= 1, j_max >= 1, m_max >= a, got {a}, {j_max}, {m_max}"
        )
    row = partial(_root_product_row, ws=ws, a=a, m_max=m_max)
    rows = sweep(row, list(range(1, j_max + 1)), workers)
    value, m, j = lexicographic_min(r for r in rows if r is not None)
    return _report(
        "root_product_infimum",
        value <= tol,
        {"j": j, "m": m},
        value,
        tol,
        {"a": a, "j_max": j_max, "m_max": m_max},
    )


def quasinilpotent(ws: WeightSequence, n_max: int, tol: float) -> CriterionReport:
    """liminf w~(1-n, 0)^(1/n); the trace estimates the log spectral radius"""
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    trace = ws.range_log_many(1 - ns, np.zeros_like(ns)) / ns
    best = int(np.argmin(trace))
    return _report(
        "quasinilpotent",
        trace[best] <= tol,
        {"n": best + 1},
        trace[best],
        tol,
        {"n_max": n_max},
        trace=[float(x) for x in trace],
    )


def fixed_power_ratio(
    ws: WeightSequence,
    j: int,
    a: int,
    m_max: int,
    tol: float,
) -> CriterionReport:
    """liminf over m of w~(a-jm, 0) / w~(1, m)^j for a fixed j

    m starts at ceil(a/j) so the numerator range is never empty.
    """
    if j < 1 or a < 1 or m_max < 1:
        raise ValueError(f"Expected j, a, m_max >= 1, got {j}, {a}, {m_max}")
    m_min = max(1, -(-a // j))
    ms = np.arange(m_min, max(m_max, m_min) + 1, dtype=np.int64)
    values = ws.range_log_many(a - j * ms, np.zeros_like(ms)) - j * ws.range_log_many(
        np.ones_like(ms), ms
    )
    best = int(np.argmin(values))
    return _report(
        "fixed_power_ratio",
        values[best] <= tol,
        {"m": int(ms[best])},
        values[best],
        tol,
        {"j": j, "a": a, "m_max": m_max},
    )


# -- direct sums -----------------------------------------------------------
def conjugate_exponent(p: float) -> float:
    """p' with 1/p + 1/p' = 1"""
    check_p(p)
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def check_p(p: float, name: str = "p") -> None:
    if math.isnan(p) or p < 1:
        raise ValueError(f"{name} must be in [1, inf], got {p}")


def q_exponent(p1: float, p2: float) -> float:
    """q with 1/q = 1 - 1/p1 - 1/p2 when positive, otherwise inf"""
    check_p(p1, "p1")
    check_p(p2, "p2")
    if math.isinf(p1) and math.isinf(p2):
        return 1.0
    if math.isinf(p1) or math.isinf(p2):
        p = p2 if math.isinf(p1) else p1
        return p / (p - 1) if p > 1 else math.inf
    if p1 + p2 < p1 * p2:
        return p1 * p2 / (p1 * p2 - p1 - p2)
    return math.inf


def a_sequence_log(ws: WeightSequence, m: int, n_max: int) -> np.ndarray:
    """log a_n = log w~(m+1, m+n) - log w~(m-n+1, m) for n = 1..n_max"""
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    return ws.range_log_many(np.full_like(ns, m + 1), m + ns) - ws.range_log_many(
        m - ns + 1, np.full_like(ns, m)
    )


def _last_block_log_fraction(log_terms: np.ndarray) -> float:
    """log of the share of the last dyadic block in the sum of e^log_terms"""
    total = logsumexp(log_terms)
    if not math.isfinite(total):
        return -math.inf
    return float(logsumexp(log_terms[len(log_terms) // 2 :]) - total)


def direct_sum_lq(
    ws: WeightSequence,
    p1: float,
    p2: float,
    m: int,
    n_max: int,
    tol: float = math.log(1e-6),
) -> CriterionReport:
    """Membership of {a_n} in l_q, which makes T_{w,p1} + T_{w,p2} non-cyclic

    For q = inf the value is the log of how far the trace still grows past
    the best n* <= n_max / 2, zero growth giving -inf. For finite q it is
    a last dyadic block of the partial sums of a_n^q contributing less
    than e^tol.
    """
    q = q_exponent(p1, p2)
    if m < 0 or n_max < 1:
        raise ValueError(f"Expected m >= 0 and n_max >= 1, got {m}, {n_max}")
    trace = a_sequence_log(ws, m, n_max)
    sup = float(trace.max())
    horizon = {"m": m, "n_max": n_max}
    details: Dict[str, Any] = {
        "p1": _p_label(p1),
        "p2": _p_label(p2),
        "q": _p_label(q),
        "sup_log": sup,
    }

    if math.isinf(q):
        # growth of the trace past each candidate n* <= n_max / 2
        head = max(1, n_max // 2)
        suffix = np.maximum.accumulate(trace[::-1])[::-1]
        growth = suffix[:head] - trace[:head]
        best = int(np.argmin(growth))
        value = math.log(growth[best]) if growth[best] > 0 else -math.inf
        found = value <= tol and math.isfinite(sup)
        details.update(best_n_star=best + 1, growth_log=value)
        return _report(
            "direct_sum_lq",
            found,
            {"n_star": best + 1 if found else None},
            value,
            tol,
            horizon,
            trace=[float(x) for x in trace],
            details=details,
        )

    log_terms = q * trace
    partial_sums = np.logaddexp.accumulate(log_terms)
    fraction = _last_block_log_fraction(log_terms)
    half = max(1, n_max // 2)
    ns = np.arange(1, n_max + 1, dtype=float)
    if n_max - half >= 2:
        slope = float(np.polyfit(np.log(ns[half:]), trace[half:], 1)[0])
    else:
        slope = math.nan
    details.update(
        partial_sum_log=float(partial_sums[-1]),
        tail_exponent=slope,
        block_fraction_log=fraction,
    )
    return _report(
        "direct_sum_lq",
        fraction <= tol,
        {"n": n_max},
        fraction,
        tol,
        horizon,
        trace=[float(x) for x in partial_sums],
        details=details,
    )


def _p_label(p: float) -> float | str:
    return "inf" if math.isinf(p) else p


# -- the alpha_n sequence test ---------------------------------------------
@dataclass(frozen=True)
class Rho:
    """A positive weight sequence rho_n given by a closed form in |n|

    constant: rho_n = c; power: (1 + |n|)^d; subexp: exp(c |n|^beta).
    Submultiplicativity is the caller's claim, not checked here.
    """

    kind: str
    params: Tuple[float, ...] = ()

    KINDS = {"constant": 1, "power": 1, "subexp": 2}

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(
                f"Unknown rho kind {self.kind!r}, expected one of {sorted(self.KINDS)}"
            )
        if len(self.params) != self.KINDS[self.kind]:
            raise ValueError(
                f"rho {self.kind} takes {self.KINDS[self.kind]} parameter(s), "
                f"got {len(self.params)}"
            )
        if self.kind == "constant" and not self.params[0] > 0:
            raise ValueError("rho constant must be positive")

    @classmethod
    def parse(cls, text: str) -> Rho:
        """'constant:1', 'power:2' or 'subexp:5,0.25'"""
        kind, _, args = text.partition(":")
        try:
            params = tuple(float(x) for x in args.split(",") if x.strip())
        except ValueError:
            raise ValueError(f"Malformed rho: {text!r}") from None
        return cls(kind.strip(), params)

    def log(self, n: np.ndarray) -> np.ndarray:
        n = np.abs(np.asarray(n, dtype=float))
        if self.kind == "constant":
            return np.full_like(n, math.log(self.params[0]))
        if self.kind == "power":
            return self.params[0] * np.log1p(n)
        c, beta = self.params
        return c * n**beta

    def __str__(self) -> str:
        return f"{self.kind}:{','.join(format(x, 'g') for x in self.params)}"


def _excess(trace: np.ndarray) -> float:
    """Growth of the last half over the first half; <= 0 means bounded"""
    half = len(trace) // 2
    return float(trace[half:].max() - trace[:half].max()) - TRACE_RTOL * max(
        1.0, float(np.abs(trace).max())
    )


def aag_cyclic(
    ws: WeightSequence,
    p: float,
    k: float,
    rho: Rho | None,
    n_max: int,
    tol: float,
) -> CriterionReport:
    """Heuristic check of the alpha_n hypotheses for cyclicity on l_p

    On [1, n_max]: (i) log rho_n / sqrt(n) decays, (ii) log alpha_{-n} -
    k log n and (iii) log alpha_n - log rho_n stay bounded above, and
    (iv) {alpha_n^-1} is not in l_q, 1/p + 1/q = 1. A hypothesis "holds"
    when its trace does not grow over the second half of the horizon.
    value_log is tol plus the largest excess, so it is <= tol exactly when
    all four hold.
    """
    if rho is None:
        raise ValueError("aag_cyclic needs a rho sequence")
    check_p(p)
    if k < 1 or n_max < 4:
        raise ValueError(f"Expected k >= 1 and n_max >= 4, got {k}, {n_max}")

    ns = np.arange(1, n_max + 1, dtype=np.int64)
    log_rho = rho.log(ns)
    alpha_pos = ws.alpha_log_many(ns)
    alpha_neg = ws.alpha_log_many(-ns)

    excess = {
        "rho_subexponential": _excess(np.abs(log_rho / np.sqrt(ns))),
        "alpha_negative_polynomial": _excess(alpha_neg - k * np.log(ns)),
        "alpha_positive_rho": _excess(alpha_pos - log_rho),
    }

    q = conjugate_exponent(p)
    # log alpha_n^-1 over n = -n_max..n_max, ordered by |n|
    inv = -ws.alpha_log_many(np.concatenate(([0], np.stack([ns, -ns], 1).ravel())))
    details: Dict[str, Any] = {"q": _p_label(q), "heuristic": True, "rho": str(rho)}
    if math.isinf(q):
        growth = _excess(inv)
        details["lq_membership"] = growth <= 0
        excess["alpha_inverse_not_in_lq"] = -growth
    else:
        fraction = _last_block_log_fraction(q * inv)
        share = -math.log(2 * math.log2(len(inv)))
        details["lq_membership"] = fraction < share
        details["block_fraction_log"] = fraction
        excess["alpha_inverse_not_in_lq"] = share - fraction

    details["hypotheses"] = {name: value <= 0 for name, value in excess.items()}
    value = tol + max(excess.values())
    return _report(
        "aag_cyclic",
        all(value <= 0 for value in excess.values()),
        {"k": k, "p": _p_label(p)},
        value,
        tol,
        {"n_max": n_max},
        details=details,
    )


# -- Supercyclicity Criterion on finitely supported vectors ----------------
def sc_values(ws: WeightSequence, support_radius: int, n_max: int) -> np.ndarray:
    """max_s w~(s-n+1, s) - min_t w~(t+1, t+n) over |s|, |t| <= radius"""
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    worst = np.full(n_max, -np.inf)
    best_forward = np.full(n_max, np.inf)
    for s in range(-support_radius, support_radius + 1):
        worst = np.maximum(worst, ws.range_log_many(s - ns + 1, np.full_like(ns, s)))
        best_forward = np.minimum(
            best_forward, ws.range_log_many(np.full_like(ns, s + 1), s + ns)
        )
    return worst - best_forward


def sc_witness(
    ws: WeightSequence,
    support_radius: int,
    n_max: int,
    tol: float,
) -> CriterionReport:
    """Greedy n_1 < n_2 < ... with ||T^n e_s|| ||S^n e_t|| <= e^(tol - i log 2)

    The i-th element (from 0) must beat the tolerance by a factor 2^-i,
    uniformly over basis vectors e_s, e_t with |s|, |t| <= support_radius.
    """
    if support_radius < 0 or n_max < 1:
        raise ValueError(
            "Expected support_radius >= 0 and n_max >= 1, "
            f"got {support_radius}, {n_max}"
        )
    values = sc_values(ws, support_radius, n_max)
    prefix: List[int] = []
    for i, value in enumerate(values):
        if value <= tol - len(prefix) * math.log(2):
            prefix.append(i + 1)

    found = bool(prefix)
    if found:
        value = float(values[prefix[0] - 1])
    else:
        value = float(values.min())
    return _report(
        "sc_witness",
        found,
        {"n_1": prefix[0] if prefix else int(np.argmin(values)) + 1},
        value,
        tol,
        {"support_radius": support_radius, "n_max": n_max},
        details={"prefix": prefix},
    )

"""Weight sequences of bilateral shifts and their log-domain products.

Every product of weights is handled as a sum of logarithms. Each sequence
keeps prefix sums of log|w_j| anchored at index 0, so that any range product
w~(a, b) = |w_a| * ... * |w_b| costs O(1) once the covered window has been
built. The window grows lazily by doubling.
"""
from __future__ import annotations

import logging
import math
import threading
from abc import ABC, abstractmethod
from os import PathLike
from typing import Any, ClassVar, Dict, Mapping, NamedTuple, Tuple

import numpy as np
from simpleconf import Config

from .utils import LogMagnitude, compensated_cumsum, unit

logger = logging.getLogger(__name__)

EVENTUALLY_MONOTONE = "eventually_monotone"
UNKNOWN = "unknown"


class WeightSpecError(ValueError):
    """A weight specification could not be understood"""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"[{field}] {message}")


class WeightDomainError(ValueError):
    """A weight was requested where the sequence is not defined"""


class TailRule(NamedTuple):
    """Behaviour of |w_n| beyond `threshold` (going away from the center)

    `outward` is either "nonincreasing" or "nondecreasing"; `limit_log` is
    the limit of log|w_n| along the tail (only needed when nondecreasing).
    """

    threshold: int
    outward: str
    limit_log: LogMagnitude = 0.0


class WeightSequence(ABC):
    """A bounded nonvanishing bilateral weight sequence"""

    family: ClassVar[str] = ""
    params: ClassVar[Tuple[str, ...]] = ()
    # False when every weight is a positive real, so phases can be skipped
    has_phase: ClassVar[bool] = False

    def __init__(self) -> None:
        self._lock = threading.Lock()
        # Prefix sums P(k) = sum_{0 <= j < k} log|w_j| for k in [0, right],
        # and S(i) = sum_{1 <= t <= i} log|w_{-t}| so P(-i) = -S(i).
        self._right = 0
        self._left = 0
        self._right_sums = (np.zeros(1), np.zeros(1))
        self._left_sums = (np.zeros(1), np.zeros(1))
        self._right_phase = np.ones(1, dtype=complex)
        self._left_phase = np.ones(1, dtype=complex)

    # -- family definition -------------------------------------------------
    @abstractmethod
    def values(self, idx: np.ndarray) -> np.ndarray:
        """The weights w_n for an integer array of indices"""

    @property
    @abstractmethod
    def sup_abs(self) -> float:
        """An upper bound for sup_n |w_n|"""

    @property
    @abstractmethod
    def tails(self) -> Tuple[TailRule | None, TailRule | None]:
        """(left, right) tail rules, None where the tail is not known"""

    @abstractmethod
    def to_spec(self) -> Dict[str, Any]:
        """The JSON weight-spec of this sequence"""

    def log_abs(self, idx: np.ndarray) -> np.ndarray:
        return np.log(np.abs(self.values(idx)))

    def unit_phases(self, idx: np.ndarray) -> np.ndarray:
        """w_n / |w_n|, taken as 1 where |w_n| underflows"""
        values = np.asarray(self.values(idx), dtype=complex)
        mags = np.abs(values)
        return np.where(mags > 0, values / np.where(mags > 0, mags, 1.0), 1.0)

    # -- queries -----------------------------------------------------------
    @property
    def tail_monotonicity(self) -> Tuple[str, str]:
        return tuple(  # type: ignore[return-value]
            UNKNOWN if tail is None else EVENTUALLY_MONOTONE for tail in self.tails
        )

    @property
    def label(self) -> str:
        spec = self.to_spec()
        args = ", ".join(
            f"{key}={spec[key]!r}" for key in self.params if key in spec
        )
        return f"{self.family}({args})"

    def weight_at(self, n: int) -> complex:
        """w_n"""
        return complex(self.values(np.array([n], dtype=np.int64))[0])

    def w_tilde_log(self, a: int, b: int) -> LogMagnitude:
        """log w~(a, b), the log of |w_a * ... * w_b|"""
        if a > b:
            raise ValueError(f"Empty product range: a={a} > b={b}")
        return self.range_log(a, b)

    def range_log(self, a: int, b: int) -> LogMagnitude:
        """log w~(a, b), allowing the empty range b = a - 1 (value 0)"""
        if b < a - 1:
            raise ValueError(f"Invalid product range: [{a}, {b}]")
        self._ensure(a, b + 1)
        hi_b, lo_b = self._prefix_scalar(b + 1)
        hi_a, lo_a = self._prefix_scalar(a)
        return math.fsum((hi_b, -hi_a, lo_b, -lo_a))

    def range_log_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorized `range_log` for arrays of range bounds"""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.size == 0:
            return np.zeros(np.broadcast(a, b).shape)
        if np.any(b < a - 1):
            raise ValueError("Invalid product range in batch")
        self._ensure(int(a.min()), int(b.max()) + 1)
        hi_b, lo_b = self._prefix_many(b + 1)
        hi_a, lo_a = self._prefix_many(a)
        return (hi_b - hi_a) + (lo_b - lo_a)

    def range_phase(self, a: int, b: int) -> complex:
        """Phase of w_a * ... * w_b (1 for the empty range)"""
        if not self.has_phase or b < a:
            return 1 + 0j
        self._ensure(a, b + 1)
        return unit(self._phase_at(b + 1) * self._phase_at(a).conjugate())

    def alpha_log(self, n: int) -> LogMagnitude:
        """log alpha_n: alpha_0 = 1, 1/w~(1, n) for n > 0, w~(1+n, 0) for n < 0"""
        if n == 0:
            return 0.0
        if n > 0:
            return -self.range_log(1, n)
        return self.range_log(1 + n, 0)

    def alpha_log_many(self, ns: np.ndarray) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        pos = np.maximum(ns, 0)
        neg = np.minimum(ns, 0)
        out = np.where(
            ns > 0,
            -self.range_log_many(np.ones_like(pos), pos),
            self.range_log_many(1 + neg, np.zeros_like(neg)),
        )
        return np.where(ns == 0, 0.0, out)

    def shift_power_norm_log(
        self,
        n: int,
        window: Tuple[int, int],
    ) -> Tuple[LogMagnitude, LogMagnitude]:
        """(lower, upper) bounds for log ||T^n||

        lower is the largest n-term product w~(k-n+1, k) for k in the window.
        upper is the exact supremum over all k when both tails are eventually
        monotone and the window reaches both tail thresholds, otherwise
        n * log(sup_abs).
        """
        if n < 1:
            raise ValueError(f"Power must be positive, got {n}")
        lo, hi = window
        if lo > hi:
            raise ValueError(f"Empty window: {window}")

        ks = np.arange(lo, hi + 1, dtype=np.int64)
        lower = float(self.range_log_many(ks - n + 1, ks).max())

        left, right = self.tails
        if (
            left is None
            or right is None
            or lo > left.threshold
            or hi < right.threshold
        ):
            return lower, max(lower, n * math.log(self.sup_abs))

        scan = np.arange(
            min(lo, left.threshold),
            max(hi, right.threshold + n - 1) + 1,
            dtype=np.int64,
        )
        upper = float(self.range_log_many(scan - n + 1, scan).max())
        for tail in (left, right):
            if tail.outward == "nondecreasing":
                upper = max(upper, n * tail.limit_log)
        return lower, max(lower, upper)

    def modulus(self) -> Modulus:
        """The sequence |w_n|, isometrically similar as a shift"""
        return Modulus(self)

    # -- prefix cache ------------------------------------------------------
    def domain(self) -> Tuple[int | None, int | None]:
        """Smallest and largest n with a defined weight, None if unbounded"""
        return None, None

    def _ensure(self, lo: int, hi: int) -> None:
        """Make P(k) available for every k in [lo, hi]"""
        if -self._left <= lo and hi <= self._right:
            return
        first, last = self.domain()
        with self._lock:
            if hi > self._right:
                size = max(2 * self._right, 16)
                if last is not None:
                    size = min(size, last + 1)
                self._build_right(max(hi, size))
            if lo < -self._left:
                size = max(2 * self._left, 16)
                if first is not None:
                    size = min(size, -first)
                self._build_left(max(-lo, size))

    def _build_right(self, size: int) -> None:
        idx = np.arange(0, size, dtype=np.int64)
        self._check_nonzero(idx)
        self._right_sums = compensated_cumsum(self.log_abs(idx))
        if self.has_phase:
            self._right_phase = _phase_prefix(self.unit_phases(idx))
        self._right = size
        logger.debug(
            "%s: prefix cache grown to [%d, %d]", self.label, -self._left, size
        )

    def _build_left(self, size: int) -> None:
        idx = -np.arange(1, size + 1, dtype=np.int64)
        self._check_nonzero(idx)
        self._left_sums = compensated_cumsum(self.log_abs(idx))
        if self.has_phase:
            self._left_phase = _phase_prefix(self.unit_phases(idx))
        self._left = size
        logger.debug(
            "%s: prefix cache grown to [%d, %d]", self.label, -size, self._right
        )

    def _check_nonzero(self, idx: np.ndarray) -> None:
        logs = self.log_abs(idx)
        zeros = idx[np.isneginf(logs) | np.isnan(logs)]
        if zeros.size:
            raise WeightDomainError(
                f"{self.label}: zero weight at n={int(zeros[0])}"
            )

    def _prefix_scalar(self, k: int) -> Tuple[float, float]:
        if k >= 0:
            return float(self._right_sums[0][k]), float(self._right_sums[1][k])
        return -float(self._left_sums[0][-k]), -float(self._left_sums[1][-k])

    def _prefix_many(self, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        right = np.clip(k, 0, None)
        left = np.clip(-k, 0, None)
        hi = np.where(k >= 0, self._right_sums[0][right], -self._left_sums[0][left])
        lo = np.where(k >= 0, self._right_sums[1][right], -self._left_sums[1][left])
        return hi, lo

    def _phase_at(self, k: int) -> complex:
        if k >= 0:
            return complex(self._right_phase[k])
        return complex(self._left_phase[-k]).conjugate()

    # -- pickling (for worker processes) -----------------------------------
    def __getstate__(self) -> Dict[str, Any]:
        state = self.__dict__.copy()
        state.pop("_lock", None)
        return state

    def __setstate__(self, state: Dict[str, Any]) -> None:
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"<WeightSequence {self.label}>"


def _phase_prefix(phases: np.ndarray) -> np.ndarray:
    """Running products of unit `phases`, starting at 1"""
    out = np.ones(len(phases) + 1, dtype=complex)
    acc = 1 + 0j
    for i, phase in enumerate(phases):
        acc = unit(acc * complex(phase))
        out[i + 1] = acc
    return out


def _positive(field: str, value: Any) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise WeightSpecError(field, f"expected a number, got {value!r}") from None
    if not value > 0:
        raise WeightSpecError(field, f"must be positive, got {value!r}")
    return value


def _nonzero(field: str, value: Any) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        value = complex(float(value[0]), float(value[1]))
    try:
        value = complex(value)
    except (TypeError, ValueError):
        raise WeightSpecError(field, f"expected a number, got {value!r}") from None
    if value == 0:
        raise WeightSpecError(field, "weights must be nonzero")
    return value


def _real_or_complex(value: complex) -> float | list:
    if value.imag == 0:
        return value.real
    return [value.real, value.imag]


class Constant(WeightSequence):
    """w_n = c for every n"""

    family = "constant"
    params = ("c",)

    def __init__(self, c: complex = 1.0) -> None:
        super().__init__()
        self.c = _nonzero("c", c)
        self.has_phase = self.c != abs(self.c)

    def values(self, idx: np.ndarray) -> np.ndarray:
        return np.full(np.shape(idx), self.c, dtype=complex)

    @property
    def sup_abs(self) -> float:
        return abs(self.c)

    @property
    def tails(self) -> Tuple[TailRule, TailRule]:
        return TailRule(0, "nonincreasing"), TailRule(0, "nonincreasing")

    def to_spec(self) -> Dict[str, Any]:
        return {"family": self.family, "c": _real_or_complex(self.c)}


class Beauzamy(WeightSequence):
    """w_n = a for n <= 0 and w_n = b for n > 0"""

    family = "beauzamy"
    params = ("a", "b")

    def __init__(self, a: complex, b: complex) -> None:
        super().__init__()
        self.a = _nonzero("a", a)
        self.b = _nonzero("b", b)
        self.has_phase = self.a != abs(self.a) or self.b != abs(self.b)

    def values(self, idx: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(idx) <= 0, self.a, self.b).astype(complex)

    @property
    def sup_abs(self) -> float:
        return max(abs(self.a), abs(self.b))

    @property
    def tails(self) -> Tuple[TailRule, TailRule]:
        return TailRule(0, "nonincreasing"), TailRule(1, "nonincreasing")

    def to_spec(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "a": _real_or_complex(self.a),
            "b": _real_or_complex(self.b),
        }


class PolyDecay(WeightSequence):
    """w_n = 1 - a n^-alpha (n >= n0), 1 - b (-n)^-alpha (n <= -n0), else 1

    n0 defaults to the smallest positive integer keeping every weight
    positive.
    """

    family = "polydecay"
    params = ("a", "b", "alpha", "n0")

    def __init__(self, a: float, b: float, alpha: float, n0: int | None = None):
        super().__init__()
        self.a = _positive("a", a)
        self.b = _positive("b", b)
        self.alpha = _positive("alpha", alpha)
        top = max(self.a, self.b)
        if n0 is None:
            n0 = max(1, math.floor(top ** (1.0 / self.alpha)) + 1)
        try:
            n0 = int(n0)
        except (TypeError, ValueError):
            raise WeightSpecError("n0", f"expected an integer, got {n0!r}") from None
        if n0 < 1:
            raise WeightSpecError("n0", f"must be at least 1, got {n0}")
        if top * n0 ** (-self.alpha) >= 1:
            raise WeightSpecError(
                "n0",
                f"n0={n0} makes some weight nonpositive "
                f"(max(a, b) * n0^-alpha = {top * n0 ** (-self.alpha):.6g} >= 1)",
            )
        self.n0 = n0

    def log_abs(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        mag = np.maximum(np.abs(idx), self.n0).astype(float) ** (-self.alpha)
        coef = np.where(idx > 0, self.a, self.b)
        out = np.log1p(-coef * mag)
        return np.where(np.abs(idx) >= self.n0, out, 0.0)

    def values(self, idx: np.ndarray) -> np.ndarray:
        return np.exp(self.log_abs(idx)).astype(complex)

    @property
    def sup_abs(self) -> float:
        return 1.0

    @property
    def tails(self) -> Tuple[TailRule, TailRule]:
        return (
            TailRule(-self.n0, "nondecreasing", 0.0),
            TailRule(self.n0, "nondecreasing", 0.0),
        )

    def to_spec(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "a": self.a,
            "b": self.b,
            "alpha": self.alpha,
            "n0": self.n0,
        }


class SupExp(WeightSequence):
    """w_n = exp(-gamma |n|), the model compact (quasinilpotent) shift"""

    family = "supexp"
    params = ("gamma",)

    def __init__(self, gamma: float = 1.0) -> None:
        super().__init__()
        self.gamma = _positive("gamma", gamma)

    def log_abs(self, idx: np.ndarray) -> np.ndarray:
        return -self.gamma * np.abs(np.asarray(idx, dtype=np.int64)).astype(float)

    def values(self, idx: np.ndarray) -> np.ndarray:
        return np.exp(self.log_abs(idx)).astype(complex)

    @property
    def sup_abs(self) -> float:
        return 1.0

    @property
    def tails(self) -> Tuple[TailRule, TailRule]:
        return TailRule(0, "nonincreasing"), TailRule(0, "nonincreasing")

    def to_spec(self) -> Dict[str, Any]:
        return {"family": self.family, "gamma": self.gamma}


class OneSided(WeightSequence):
    """w_n = 1 for n <= 1 and w_n = 1 - n^-alpha for n >= 2

    Its cyclicity on l_p is an open question at alpha = 1/2.
    """

    family = "onesided"
    params = ("alpha",)

    def __init__(self, alpha: float = 0.5) -> None:
        super().__init__()
        self.alpha = _positive("alpha", alpha)

    def log_abs(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        safe = np.maximum(idx, 2).astype(float)
        return np.where(idx >= 2, np.log1p(-(safe ** (-self.alpha))), 0.0)

    def values(self, idx: np.ndarray) -> np.ndarray:
        return np.exp(self.log_abs(idx)).astype(complex)

    @property
    def sup_abs(self) -> float:
        return 1.0

    @property
    def tails(self) -> Tuple[TailRule, TailRule]:
        return TailRule(1, "nonincreasing"), TailRule(2, "nondecreasing", 0.0)

    def to_spec(self) -> Dict[str, Any]:
        return {"family": self.family, "alpha": self.alpha}


REPEAT_LAST = "repeat_last"


class Table(WeightSequence):
    """Explicit weights on a finite window plus a rule for each tail

    A tail rule is ("constant", c), ("repeat_last", None) or None, in which
    case the weights beyond the window are undefined.
    """

    family = "table"
    params = ("entries", "left_tail", "right_tail")

    def __init__(
        self,
        entries: Mapping[int, complex],
        left_tail: Tuple[str, complex | None] | None = None,
        right_tail: Tuple[str, complex | None] | None = None,
    ) -> None:
        super().__init__()
        if not entries:
            raise WeightSpecError("entries", "at least one entry is required")
        self.entries = {
            int(n): _nonzero(f"entries[{n}]", value) for n, value in entries.items()
        }
        self.first = min(self.entries)
        self.last = max(self.entries)
        missing = set(range(self.first, self.last + 1)) - set(self.entries)
        if missing:
            raise WeightSpecError(
                "entries", f"window has gaps, missing n={min(missing)}"
            )
        self.left_tail = self._tail("left_tail", left_tail, self.entries[self.first])
        self.right_tail = self._tail("right_tail", right_tail, self.entries[self.last])
        if (self.left_tail is None or self.right_tail is None) and not (
            self.first <= 0 <= self.last
        ):
            raise WeightSpecError(
                "entries", "the window must contain n=0 when a tail rule is missing"
            )
        self._window = np.array(
            [self.entries[n] for n in range(self.first, self.last + 1)], dtype=complex
        )
        self.has_phase = bool(np.any(self._window != np.abs(self._window))) or any(
            tail is not None and tail[1] != abs(tail[1])
            for tail in (self.left_tail, self.right_tail)
        )

    @staticmethod
    def _tail(
        field: str,
        rule: Tuple[str, complex | None] | None,
        edge: complex,
    ) -> Tuple[str, complex] | None:
        if rule is None:
            return None
        kind, value = rule
        if kind == REPEAT_LAST:
            return REPEAT_LAST, edge
        if kind == "constant":
            return "constant", _nonzero(field, value)
        raise WeightSpecError(field, f"unknown tail rule {kind!r}")

    def values(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size == 0:
            return np.zeros(idx.shape, dtype=complex)
        below = idx < self.first
        above = idx > self.last
        if (below.any() and self.left_tail is None) or (
            above.any() and self.right_tail is None
        ):
            bad = int(idx[below][0]) if below.any() else int(idx[above][0])
            raise WeightDomainError(
                f"{self.label}: no tail rule defines w_n at n={bad}"
            )
        inside = np.clip(idx - self.first, 0, len(self._window) - 1)
        out = self._window[inside]
        if self.left_tail is not None:
            out = np.where(below, self.left_tail[1], out)
        if self.right_tail is not None:
            out = np.where(above, self.right_tail[1], out)
        return out

    def domain(self) -> Tuple[int | None, int | None]:
        return (
            None if self.left_tail else self.first,
            None if self.right_tail else self.last,
        )

    @property
    def sup_abs(self) -> float:
        values = [abs(v) for v in self.entries.values()]
        values.extend(
            abs(tail[1]) for tail in (self.left_tail, self.right_tail) if tail
        )
        return max(values)

    @property
    def tails(self) -> Tuple[TailRule | None, TailRule | None]:
        left = right = None
        if self.left_tail is not None:
            left = TailRule(self.first - 1, "nonincreasing")
        if self.right_tail is not None:
            right = TailRule(self.last + 1, "nonincreasing")
        return left, right

    @property
    def label(self) -> str:
        return f"table([{self.first}, {self.last}])"

    def to_spec(self) -> Dict[str, Any]:
        def tail_spec(tail: Tuple[str, complex] | None) -> Any:
            if tail is None:
                return None
            if tail[0] == REPEAT_LAST:
                return REPEAT_LAST
            return {"constant": _real_or_complex(tail[1])}

        return {
            "family": self.family,
            "entries": [
                [n, v.real, v.imag] for n, v in sorted(self.entries.items())
            ],
            "left_tail": tail_spec(self.left_tail),
            "right_tail": tail_spec(self.right_tail),
        }


class Modulus(WeightSequence):
    """|w_n| of another sequence"""

    family = "modulus"

    def __init__(self, base: WeightSequence) -> None:
        super().__init__()
        self.base = base

    def log_abs(self, idx: np.ndarray) -> np.ndarray:
        return self.base.log_abs(idx)

    def values(self, idx: np.ndarray) -> np.ndarray:
        return np.abs(self.base.values(idx)).astype(complex)

    @property
    def sup_abs(self) -> float:
        return self.base.sup_abs

    @property
    def tails(self) -> Tuple[TailRule | None, TailRule | None]:
        return self.base.tails

    @property
    def label(self) -> str:
        return f"|{self.base.label}|"

    def to_spec(self) -> Dict[str, Any]:
        return {"family": self.family, "base": self.base.to_spec()}


class Rephased(WeightSequence):
    """Another sequence with some weights multiplied by unit phases"""

    family = "rephased"
    has_phase = True

    def __init__(self, base: WeightSequence, phases: Mapping[int, complex]) -> None:
        super().__init__()
        self.base = base
        self.phases = {int(n): unit(complex(z)) for n, z in phases.items()}

    def log_abs(self, idx: np.ndarray) -> np.ndarray:
        return self.base.log_abs(idx)

    def values(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.array(self.base.values(idx), dtype=complex)
        for n, phase in self.phases.items():
            out = np.where(idx == n, out * phase, out)
        return out

    def unit_phases(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.array(self.base.unit_phases(idx), dtype=complex)
        for n, phase in self.phases.items():
            out = np.where(idx == n, out * phase, out)
        return out

    @property
    def sup_abs(self) -> float:
        return self.base.sup_abs

    @property
    def tails(self) -> Tuple[TailRule | None, TailRule | None]:
        return self.base.tails

    @property
    def label(self) -> str:
        flips = ", ".join(f"{n}" for n in sorted(self.phases))
        return f"{self.base.label}~[{flips}]"

    def to_spec(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "base": self.base.to_spec(),
            "phases": [
                [n, z.real, z.imag] for n, z in sorted(self.phases.items())
            ],
        }


FAMILIES: Dict[str, type] = {
    cls.family: cls for cls in (Constant, Beauzamy, PolyDecay, SupExp, OneSided, Table)
}


def _parse_tail(field: str, raw: Any) -> Tuple[str, Any] | None:
    if raw is None:
        return None
    if raw == REPEAT_LAST:
        return REPEAT_LAST, None
    if isinstance(raw, Mapping):
        if "constant" in raw:
            return "constant", raw["constant"]
        if raw.get(REPEAT_LAST):
            return REPEAT_LAST, None
    raise WeightSpecError(
        field, f"expected {{'constant': c}} or 'repeat_last', got {raw!r}"
    )


def _parse_entries(raw: Any) -> Dict[int, complex]:
    if not isinstance(raw, (list, tuple)):
        raise WeightSpecError("entries", "expected a list of [n, re, im]")
    out = {}
    for i, item in enumerate(raw):
        if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
            raise WeightSpecError(
                f"entries[{i}]", f"expected [n, re, im], got {item!r}"
            )
        try:
            n = int(item[0])
            value = complex(float(item[1]), float(item[2]) if len(item) == 3 else 0.0)
        except (TypeError, ValueError):
            raise WeightSpecError(f"entries[{i}]", f"not numeric: {item!r}") from None
        if value == 0:
            raise WeightSpecError(f"entries[{i}]", f"zero weight at n={n}")
        if n in out:
            raise WeightSpecError(f"entries[{i}]", f"duplicate index n={n}")
        out[n] = value
    return out


def from_spec(spec: Mapping[str, Any]) -> WeightSequence:
    """Build a weight sequence from its spec mapping

    >>> from_spec({"family": "beauzamy", "a": 2.0, "b": 1.0})
    <WeightSequence beauzamy(a=2.0, b=1.0)>
    """
    if not isinstance(spec, Mapping):
        raise WeightSpecError("family", f"expected a mapping, got {spec!r}")
    if "family" not in spec:
        raise WeightSpecError("family", "missing")

    family = spec["family"]
    if family == "table":
        return Table(
            _parse_entries(spec.get("entries")),
            left_tail=_parse_tail("left_tail", spec.get("left_tail")),
            right_tail=_parse_tail("right_tail", spec.get("right_tail")),
        )
    if family == "modulus":
        return Modulus(from_spec(spec.get("base")))
    if family == "rephased":
        phases = {
            int(item[0]): complex(float(item[1]), float(item[2]))
            for item in spec.get("phases", [])
        }
        return Rephased(from_spec(spec.get("base")), phases)

    try:
        cls = FAMILIES[family]
    except KeyError:
        raise WeightSpecError(
            "family", f"unknown family {family!r}, expected one of {sorted(FAMILIES)}"
        ) from None

    unknown = set(spec) - {"family"} - set(cls.params)
    if unknown:
        raise WeightSpecError(sorted(unknown)[0], f"not a parameter of {family}")
    kwargs = {key: spec[key] for key in cls.params if key in spec}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise WeightSpecError("family", f"bad parameters for {family}: {exc}") from None


def load_weight_spec(path: str | PathLike) -> WeightSequence:
    """Load a weight spec file (JSON, TOML, ...)"""
    try:
        conf = Config.load(str(path))
    except OSError:
        raise
    except Exception as exc:
        raise WeightSpecError("file", f"cannot parse {path}: {exc}") from None
    return from_spec(dict(conf))


# Module-level spellings of the queries
def weight_at(ws: WeightSequence, n: int) -> complex:
    return ws.weight_at(n)


def w_tilde_log(ws: WeightSequence, a: int, b: int) -> LogMagnitude:
    return ws.w_tilde_log(a, b)


def alpha_log(ws: WeightSequence, n: int) -> LogMagnitude:
    return ws.alpha_log(n)


def shift_power_norm_log(
    ws: WeightSequence,
    n: int,
    window: Tuple[int, int],
) -> Tuple[LogMagnitude, LogMagnitude]:
    return ws.shift_power_norm_log(n, window)

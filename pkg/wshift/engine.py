"""Functional calculus of weighted shifts on finitely supported vectors.

Vectors and polynomial coefficients keep every amplitude as
(unit phase, log-magnitude), so orbits can run far outside the double range.
T e_n = w_n e_{n-1} is the weighted shift and S e_n = w_{n+1} e_{n+1} its
dual shift.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Tuple,
)

import numpy as np
from scipy.special import logsumexp

from .utils import (
    NEG_INF,
    Amplitude,
    LogMagnitude,
    anchored_sum,
    relative_log_error,
    unit,
)
from .weights import WeightSequence

# Writers switch to the log form of a vector beyond this |log-magnitude|
LOG_FORM_THRESHOLD = 600.0


def _accumulate(
    terms: Iterable[Tuple[int, Amplitude]],
    spread: float | Mapping[int, float] = 0.0,
) -> Dict[int, Amplitude]:
    """Merge (key, amplitude) terms, adding the colliding ones

    `spread` (global or per key) is passed on to `anchored_sum`.
    """
    grouped: Dict[int, List[Amplitude]] = defaultdict(list)
    for key, amp in terms:
        grouped[key].append(amp)

    out = {}
    for key in sorted(grouped):
        key_spread = spread.get(key, 0.0) if isinstance(spread, Mapping) else spread
        total = anchored_sum(grouped[key], key_spread)
        if total is not None:
            out[key] = total
    return out


class SparseVector:
    """A finitely supported vector over the integers (immutable)"""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, Amplitude] | None = None) -> None:
        entries = entries or {}
        self._entries = MappingProxyType(
            {
                int(n): amp
                for n, amp in sorted(entries.items())
                if amp is not None and amp.log_mag != NEG_INF
            }
        )

    @classmethod
    def zero(cls) -> SparseVector:
        return cls()

    @classmethod
    def basis(cls, n: int, amplitude: Amplitude | None = None) -> SparseVector:
        """e_n, or amplitude * e_n"""
        return cls({n: amplitude or Amplitude(1 + 0j, 0.0)})

    @classmethod
    def from_complex(cls, values: Mapping[int, complex]) -> SparseVector:
        return cls({n: Amplitude.from_complex(v) for n, v in values.items()})

    @classmethod
    def from_terms(
        cls,
        terms: Iterable[Tuple[int, Amplitude]],
        spread: float | Mapping[int, float] = 0.0,
    ) -> SparseVector:
        """Sum of amplitude * e_n terms, indices may repeat"""
        return cls(_accumulate(terms, spread))

    def subtract(self, other: SparseVector, spread: float = 0.0) -> SparseVector:
        """self - other, flushing differences below the given error scale"""
        return SparseVector.from_terms(list(self) + list(-other), spread)

    @property
    def entries(self) -> Mapping[int, Amplitude]:
        return self._entries

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Tuple[int, Amplitude]]:
        return iter(self._entries.items())

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __getitem__(self, n: int) -> Amplitude:
        return self._entries[n]

    def get(self, n: int) -> Amplitude | None:
        return self._entries.get(n)

    def value(self, n: int) -> complex:
        """The amplitude at n as a complex number (may overflow)"""
        amp = self._entries.get(n)
        return 0j if amp is None else amp.to_complex()

    def scale(self, phase: complex, log_mag: LogMagnitude) -> SparseVector:
        if log_mag == NEG_INF:
            return SparseVector()
        return SparseVector(
            {n: amp.scale(phase, log_mag) for n, amp in self._entries.items()}
        )

    def __neg__(self) -> SparseVector:
        return self.scale(-1 + 0j, 0.0)

    def __add__(self, other: SparseVector) -> SparseVector:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return SparseVector.from_terms(list(self) + list(other))

    def __sub__(self, other: SparseVector) -> SparseVector:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return dict(self._entries) == dict(other._entries)

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        body = ", ".join(
            f"{n}: {amp.phase:.3g}*e^{amp.log_mag:.6g}" for n, amp in self
        )
        return f"SparseVector({{{body}}})"

    def to_json(self) -> Dict[str, Any]:
        """{"entries": [[n, re, im]]}, or the log form for extreme magnitudes"""
        if any(abs(amp.log_mag) > LOG_FORM_THRESHOLD for _, amp in self):
            return {
                "entries_log": [
                    [n, amp.phase.real, amp.phase.imag, amp.log_mag]
                    for n, amp in self
                ]
            }
        return {
            "entries": [
                [n, amp.to_complex().real, amp.to_complex().imag] for n, amp in self
            ]
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> SparseVector:
        if "entries_log" in data:
            return cls(
                {
                    int(n): Amplitude(unit(complex(re, im)), float(lm))
                    for n, re, im, lm in data["entries_log"]
                }
            )
        return cls.from_complex(
            {int(n): complex(re, im) for n, re, im in data.get("entries", [])}
        )


class LogPolynomial:
    """A polynomial sum_d c_d z^d with log-domain coefficients"""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, Amplitude] | None = None) -> None:
        coeffs = coeffs or {}
        for degree in coeffs:
            if degree < 0:
                raise ValueError(f"Negative degree {degree} in polynomial")
        self._coeffs = MappingProxyType(
            {
                int(d): amp
                for d, amp in sorted(coeffs.items())
                if amp is not None and amp.log_mag != NEG_INF
            }
        )

    @classmethod
    def monomial(cls, degree: int, coeff: Amplitude | None = None) -> LogPolynomial:
        return cls({degree: coeff or Amplitude(1 + 0j, 0.0)})

    @classmethod
    def from_complex(cls, coeffs: Mapping[int, complex]) -> LogPolynomial:
        return cls({d: Amplitude.from_complex(c) for d, c in coeffs.items()})

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, Amplitude]]) -> LogPolynomial:
        return cls(_accumulate(terms))

    @property
    def coeffs(self) -> Mapping[int, Amplitude]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Largest stored degree, -1 for the zero polynomial"""
        return max(self._coeffs, default=-1)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self) -> Iterator[Tuple[int, Amplitude]]:
        return iter(self._coeffs.items())

    def __add__(self, other: LogPolynomial) -> LogPolynomial:
        if not isinstance(other, LogPolynomial):
            return NotImplemented
        return LogPolynomial.from_terms(list(self) + list(other))

    def compose_power(self, j: int) -> LogPolynomial:
        """r(z^j)"""
        return LogPolynomial({d * j: amp for d, amp in self})

    def shift_degree(self, t: int) -> LogPolynomial:
        """z^t r(z)"""
        return LogPolynomial({d + t: amp for d, amp in self})

    def __repr__(self) -> str:
        body = " + ".join(
            f"{amp.phase:.3g}*e^{amp.log_mag:.6g}*z^{d}" for d, amp in self
        )
        return f"LogPolynomial({body or '0'})"

    def to_json(self) -> Dict[str, Any]:
        return {
            "terms": [
                [d, amp.phase.real, amp.phase.imag, amp.log_mag] for d, amp in self
            ]
        }


def apply_shift_power(ws: WeightSequence, v: SparseVector, d: int) -> SparseVector:
    """T^d v, with e_k -> (w_{k-d+1} ... w_k) e_{k-d}"""
    if d < 0:
        raise ValueError(f"Power must be non-negative, got {d}")
    if d == 0:
        return v
    return SparseVector(
        {
            k - d: amp.scale(ws.range_phase(k - d + 1, k), ws.range_log(k - d + 1, k))
            for k, amp in v
        }
    )


def apply_dual_shift_power(
    ws: WeightSequence,
    v: SparseVector,
    d: int,
) -> SparseVector:
    """S^d v, with e_k -> (w_{k+1} ... w_{k+d}) e_{k+d}"""
    if d < 0:
        raise ValueError(f"Power must be non-negative, got {d}")
    if d == 0:
        return v
    return SparseVector(
        {
            k + d: amp.scale(ws.range_phase(k + 1, k + d), ws.range_log(k + 1, k + d))
            for k, amp in v
        }
    )


def apply_polynomial(
    ws: WeightSequence,
    r: LogPolynomial,
    v: SparseVector,
) -> SparseVector:
    """r(T) v; colliding terms are added on a common scale

    A term's log-magnitude is assembled from the coefficient, the entry and
    a weight product; colliding terms cancel up to rounding of those parts.
    """
    terms = []
    spread: Dict[int, float] = defaultdict(float)
    for degree, coeff, k, scaled, parts in _polynomial_terms(ws, r, v):
        terms.append((k - degree, scaled))
        spread[k - degree] = max(spread[k - degree], parts)
    return SparseVector.from_terms(terms, spread)


def _polynomial_terms(
    ws: WeightSequence,
    r: LogPolynomial,
    v: SparseVector,
) -> Iterator[Tuple[int, Amplitude, int, Amplitude, float]]:
    for degree, coeff in r:
        for k, amp in v:
            product = ws.range_log(k - degree + 1, k)
            scaled = amp.scale(coeff.phase, coeff.log_mag).scale(
                ws.range_phase(k - degree + 1, k), product
            )
            parts = abs(coeff.log_mag) + abs(amp.log_mag) + abs(product)
            yield degree, coeff, k, scaled, parts


def polynomial_spread(ws: WeightSequence, r: LogPolynomial, v: SparseVector) -> float:
    """Error scale of the log-magnitudes produced by `apply_polynomial`"""
    return max((parts for *_, parts in _polynomial_terms(ws, r, v)), default=0.0)


def lp_norm_log(v: SparseVector, p: float) -> LogMagnitude:
    """log ||v||_p; p = inf is the sup norm of c_0"""
    if p < 1:
        raise ValueError(f"p must be in [1, inf], got {p}")
    if not v:
        return NEG_INF
    logs = np.array([amp.log_mag for _, amp in v])
    if math.isinf(p) or len(logs) == 1:
        return float(logs.max())
    return float(logsumexp(p * logs)) / p


def amplitude_discrepancy(a: SparseVector, b: SparseVector) -> float:
    """Largest relative difference between matching entries

    An index present in only one of the vectors counts as 1.
    """
    worst = 0.0
    for n in sorted(set(a.support) | set(b.support)):
        x, y = a.get(n), b.get(n)
        if x is None or y is None:
            worst = max(worst, 1.0)
            continue
        ref = max(x.log_mag, y.log_mag)
        diff = x.phase * math.exp(x.log_mag - ref) - y.phase * math.exp(y.log_mag - ref)
        worst = max(worst, abs(diff))
    return worst


def apply_diagonal(
    d: Mapping[int, complex],
    v: SparseVector,
    inverse: bool = False,
) -> SparseVector:
    """D v (or D^-1 v) for the unimodular diagonal D e_n = d_n e_n"""
    out = {}
    for n, amp in v:
        factor = d[n].conjugate() if inverse else d[n]
        out[n] = amp.scale(unit(factor), 0.0)
    return SparseVector(out)


@dataclass
class DiagonalSimilarity:
    """The unimodular diagonal conjugating T_u into T_w on a window"""

    window: Tuple[int, int]
    d: Dict[int, complex]
    modulus_error: float
    conjugation_residual: float


def diagonal_similarity(
    w: WeightSequence,
    u: WeightSequence,
    window: Tuple[int, int],
    rtol: float = 1e-12,
) -> DiagonalSimilarity:
    """The diagonal D with T_w = D^-1 T_u D, for |w_n| = |u_n|

    d_0 = 1, d_n = prod_{j=1}^{n} w_j/u_j for n > 0 and
    d_n = prod_{j=n+1}^{0} u_j/w_j for n < 0.
    """
    lo, hi = window
    if lo > hi:
        raise ValueError(f"Empty window: {window}")
    first, last = min(lo - 1, 0), max(hi, 0)
    idx = np.arange(first, last + 1, dtype=np.int64)
    wl, ul = w.log_abs(idx), u.log_abs(idx)
    wv, uv = w.unit_phases(idx), u.unit_phases(idx)

    mismatch = np.abs(wl - ul) > rtol * np.maximum(1.0, np.abs(ul))
    checked = (idx >= lo - 1) & (idx <= hi)
    if np.any(mismatch & checked):
        bad = int(idx[mismatch & checked][0])
        raise ValueError(f"Modulus mismatch |w_n| != |u_n| at n={bad}")

    ratio = {int(n): unit(x / y) for n, x, y in zip(idx, wv, uv)}
    d = {0: 1 + 0j}
    for n in range(1, last + 1):
        d[n] = unit(d[n - 1] * ratio[n])
    for n in range(-1, first - 1, -1):
        d[n] = unit(d[n + 1] * ratio[n + 1].conjugate())

    residual = 0.0
    for n in range(lo, hi + 1):
        e_n = SparseVector.basis(n)
        lhs = apply_diagonal(d, apply_shift_power(u, apply_diagonal(d, e_n), 1), True)
        rhs = apply_shift_power(w, e_n, 1)
        residual = max(residual, amplitude_discrepancy(lhs, rhs))

    return DiagonalSimilarity(
        window=(lo, hi),
        d={n: d[n] for n in range(lo - 1, hi + 1)},
        modulus_error=max(abs(abs(d[n]) - 1.0) for n in d),
        conjugation_residual=residual,
    )


def intertwiner_coefficient(ws: WeightSequence, m: int, n: int) -> Amplitude:
    """d_n of J e_n = d_n e_{2m-n}

    d_0 = 1, d_n = prod_{j=1}^{n} w_j / w_{2m+1-j} for n > 0 and
    d_n = prod_{j=1}^{|n|} w_{2m+j} / w_{1-j} for n < 0.
    """
    if n == 0:
        return Amplitude(1 + 0j, 0.0)
    if n > 0:
        num, den = (1, n), (2 * m + 1 - n, 2 * m)
    else:
        num, den = (2 * m + 1, 2 * m - n), (1 + n, 0)
    phase = ws.range_phase(*num) * ws.range_phase(*den).conjugate()
    return Amplitude(unit(phase), ws.range_log(*num) - ws.range_log(*den))


def apply_intertwiner(ws: WeightSequence, m: int, v: SparseVector) -> SparseVector:
    """J v with J e_n = d_n e_{2m-n}"""
    return SparseVector(
        {
            2 * m - n: amp.scale(*intertwiner_coefficient(ws, m, n))
            for n, amp in v
        }
    )


@dataclass
class IntertwinerCheck:
    """Coefficients of J and how well its two identities hold"""

    m: int
    window: Tuple[int, int]
    d: Dict[int, Amplitude]
    closed_form_residual: float
    intertwining_residual: float

    @property
    def identity_residual(self) -> float:
        return max(self.closed_form_residual, self.intertwining_residual)


def intertwiner_J(ws: WeightSequence, m: int, N: int) -> IntertwinerCheck:
    """Build J for the direct sum obstruction and verify it on [-N, 2m+N]

    Checks d_{n+m} = d_{m-n} = w~(m+1, 2m)^-1 w~(1, m) a_n for n in (m, N]
    and S J e_n = J T e_n for every basis vector of the window.
    """
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    window = (-N, 2 * m + N)
    d = {n: intertwiner_coefficient(ws, m, n) for n in range(-N - 1, 2 * m + N + 1)}

    base = ws.range_log(1, m) - ws.range_log(m + 1, 2 * m)
    closed = 0.0
    for n in range(m + 1, N + 1):
        expected = base + ws.range_log(m + 1, m + n) - ws.range_log(m - n + 1, m)
        closed = max(
            closed,
            relative_log_error(d[n + m].log_mag, expected),
            relative_log_error(d[m - n].log_mag, expected),
        )

    intertwining = 0.0
    for n in range(window[0], window[1] + 1):
        e_n = SparseVector.basis(n)
        lhs = apply_dual_shift_power(ws, apply_intertwiner(ws, m, e_n), 1)
        rhs = apply_intertwiner(ws, m, apply_shift_power(ws, e_n, 1))
        intertwining = max(intertwining, amplitude_discrepancy(lhs, rhs))

    return IntertwinerCheck(
        m=m,
        window=window,
        d=d,
        closed_form_residual=closed,
        intertwining_residual=intertwining,
    )


def _pairing(g: SparseVector, y: SparseVector) -> Tuple[LogMagnitude, complex]:
    """Bilinear pairing sum_i g_i y_i as (anchor, value / e^anchor)"""
    terms = [
        (amp.phase * y[n].phase, amp.log_mag + y[n].log_mag)
        for n, amp in g
        if n in y.entries
    ]
    if not terms:
        return NEG_INF, 0j
    anchor = max(lm for _, lm in terms)
    return anchor, sum(ph * math.exp(lm - anchor) for ph, lm in terms)


@dataclass
class OrbitFunctional:
    """Size of F(T^n x, S^n f) = f(T^n x) - (S^n f)(x) along an orbit"""

    n_max: int
    max_abs_log: LogMagnitude
    max_relative: float
    values_log: List[LogMagnitude] = field(default_factory=list)


def adjoint_orbit_functional(
    ws: WeightSequence,
    x: SparseVector,
    f: SparseVector,
    n_max: int,
) -> OrbitFunctional:
    """Evaluate the annihilating functional on the orbit of (x, f)

    The pairing is the finite bilinear sum over the common support; the
    value must vanish for every n. Relative sizes are taken against the
    largest pairing term.
    """
    max_abs = NEG_INF
    max_rel = 0.0
    trace = []
    for n in range(n_max + 1):
        a_left, v_left = _pairing(f, apply_shift_power(ws, x, n))
        a_right, v_right = _pairing(apply_dual_shift_power(ws, f, n), x)
        anchor = max(a_left, a_right)
        if anchor == NEG_INF:
            trace.append(NEG_INF)
            continue
        diff = abs(
            v_left * math.exp(a_left - anchor) - v_right * math.exp(a_right - anchor)
        )
        value = anchor + math.log(diff) if diff > 0 else NEG_INF
        trace.append(value)
        max_abs = max(max_abs, value)
        max_rel = max(max_rel, diff)
    return OrbitFunctional(
        n_max=n_max, max_abs_log=max_abs, max_relative=max_rel, values_log=trace
    )

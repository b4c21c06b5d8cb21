from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence, Tuple

import numpy as np

# A log-magnitude is a plain float; -inf encodes magnitude 0.
LogMagnitude = float
NEG_INF = -math.inf

# Flush threshold for colliding amplitudes, relative to the anchor.
CANCEL_RTOL = 1e-15
# Log-magnitudes are only known to ~eps * |log|; sums closer than this to
# zero are indistinguishable from an exact cancellation.
ULP_SLACK = 64.0
_EPS = float(np.finfo(float).eps)


class Amplitude(NamedTuple):
    """A nonzero complex number stored as (unit phase, log-magnitude)"""

    phase: complex
    log_mag: LogMagnitude

    @classmethod
    def from_complex(cls, value: complex) -> Amplitude | None:
        """Split a complex number, None for zero"""
        mag = abs(value)
        if mag == 0.0:
            return None
        return cls(complex(value) / mag, math.log(mag))

    def to_complex(self) -> complex:
        return self.phase * math.exp(self.log_mag)

    def scale(self, phase: complex, log_mag: LogMagnitude) -> Amplitude:
        return Amplitude(unit(self.phase * phase), self.log_mag + log_mag)


def unit(z: complex) -> complex:
    """Renormalize a complex number of modulus close to 1"""
    mag = abs(z)
    if mag == 1.0:
        return complex(z)
    return complex(z) / mag


def compensated_cumsum(values: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Running sums as (hi, lo) pairs, Neumaier-compensated.

    out[i] holds the sum of values[:i], so out[0] == 0 and the arrays
    are one longer than the input.
    """
    count = len(values)
    hi = np.zeros(count + 1)
    lo = np.zeros(count + 1)
    total = 0.0
    comp = 0.0
    for i, value in enumerate(values):
        value = float(value)
        tmp = total + value
        if abs(total) >= abs(value):
            comp += (total - tmp) + value
        else:
            comp += (value - tmp) + total
        total = tmp
        hi[i + 1] = total
        lo[i + 1] = comp
    return hi, lo


def cancel_threshold(
    log_mags: Iterable[LogMagnitude],
    spread: float = 0.0,
) -> float:
    """Relative size below which an anchored sum counts as zero

    `spread` is the magnitude of the logs the terms were assembled from,
    when larger than the terms themselves.
    """
    spread = max(
        spread,
        max((abs(lm) for lm in log_mags if math.isfinite(lm)), default=0.0),
    )
    return CANCEL_RTOL + ULP_SLACK * _EPS * spread


def anchored_sum(
    terms: Sequence[Amplitude],
    spread: float = 0.0,
) -> Amplitude | None:
    """Add amplitudes on a common scale anchored at the largest one.

    Returns None when the terms cancel (below `cancel_threshold`).
    """
    if not terms:
        return None
    if len(terms) == 1:
        return terms[0]

    anchor = max(term.log_mag for term in terms)
    total = 0j
    for term in terms:
        total += term.phase * math.exp(term.log_mag - anchor)

    mag = abs(total)
    if mag <= cancel_threshold((term.log_mag for term in terms), spread):
        return None
    return Amplitude(total / mag, anchor + math.log(mag))


def log_abs_diff(a: LogMagnitude, b: LogMagnitude) -> float:
    """|a - b| with equal infinities counted as agreement"""
    if a == b:
        return 0.0
    return abs(a - b)


def relative_log_error(actual: LogMagnitude, expected: LogMagnitude) -> float:
    """Discrepancy of two log-magnitudes, relative to their scale"""
    return log_abs_diff(actual, expected) / max(1.0, abs(expected))


def render_float(value: float) -> float | str:
    """Make a float JSON-safe, keeping finite values bit-exact"""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def format17(value: float) -> str:
    """Render a float with 17 significant digits (round-trip safe)"""
    rendered = render_float(value)
    if isinstance(rendered, str):
        return rendered
    return format(rendered, ".17g")

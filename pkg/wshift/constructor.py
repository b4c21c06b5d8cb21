"""Finite transitions between the rescaled basis vectors f_n = c_n e_{-n}

The shift moves f_n to f_{n+1}. Reaching f_{-n} from a perturbation of
f_{-k} with n > k needs a polynomial: the telescoping polynomial q_{j,m}
applied to x_m = f_{-k} - eps e_m leaves f_{-n} plus a single residual
term, whose size is controlled by a bound minimized over (j, m).
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .engine import (
    LogPolynomial,
    SparseVector,
    amplitude_discrepancy,
    apply_polynomial,
    apply_shift_power,
    lp_norm_log,
    polynomial_spread,
)
from .sweep import lexicographic_min, sweep
from .utils import NEG_INF, Amplitude, LogMagnitude, render_float, unit
from .weights import WeightSequence

logger = logging.getLogger(__name__)

# Relative agreement required between the direct and closed-form residuals
RESIDUAL_AGREEMENT = 1e-9


class CertificateError(RuntimeError):
    """A constructed transition failed its own verification"""


@dataclass(frozen=True)
class FVector:
    """f_n = c_n e_{-n}"""

    n: int
    c: Amplitude
    realization: SparseVector

    @property
    def c_log(self) -> LogMagnitude:
        return self.c.log_mag


def f_coefficient(ws: WeightSequence, n: int) -> Amplitude:
    """c_0 = 1, c_n = w_{1-n} ... w_0 for n > 0, 1 / (w_1 ... w_{-n}) for n < 0"""
    if n == 0:
        return Amplitude(1 + 0j, 0.0)
    if n > 0:
        return Amplitude(ws.range_phase(1 - n, 0), ws.range_log(1 - n, 0))
    return Amplitude(ws.range_phase(1, -n).conjugate(), -ws.range_log(1, -n))


def f_vector(ws: WeightSequence, n: int) -> FVector:
    c = f_coefficient(ws, n)
    return FVector(n=n, c=c, realization=SparseVector.basis(-n, c))


@dataclass(frozen=True)
class JMWitness:
    j: int
    m: int
    bound_log: LogMagnitude


@dataclass(frozen=True)
class NotFound:
    """No admissible (j, m) within the budgets; not an error"""

    best_bound_log: LogMagnitude
    best_params: Tuple[int, ...] = ()
    reason: str = "no (j, m) with bound <= log(eps) within budgets"

    def to_json(self) -> Dict[str, Any]:
        return {
            "found": False,
            "reason": self.reason,
            "best_bound_log": render_float(self.best_bound_log),
            "best_params": list(self.best_params),
        }


def _check_transition(k: int, n: int, eps: float) -> None:
    if not n > k >= 1:
        raise ValueError(f"Expected n > k >= 1, got k={k}, n={n}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")


def norm_upper_log(ws: WeightSequence, n: int, m_max: int) -> LogMagnitude:
    """Upper bound of log ||T^n|| used by the transition bound"""
    return ws.shift_power_norm_log(n, (-n - m_max, m_max + n))[1]


def transition_bound_log(
    ws: WeightSequence,
    j: int,
    m: int,
    k: int,
    n: int,
    eps: float,
    norm_log: LogMagnitude,
) -> LogMagnitude:
    """j (log|c_{-m}| - log eps) + (j-1) log||T^n|| + log|c_{(m-n-k) j}|"""
    a = n + k
    return (
        j * (-ws.range_log(1, m) - math.log(eps))
        + (j - 1) * norm_log
        + ws.range_log(1 - (m - a) * j, 0)
    )


def _bound_row(
    j: int,
    ws: WeightSequence,
    k: int,
    n: int,
    log_eps: float,
    m_max: int,
    norm_log: LogMagnitude,
) -> Tuple[float, int, int] | None:
    """Smallest (bound, j, m) over m in [n + k, m_max] for a fixed j"""
    a = n + k
    ms = np.arange(a, m_max + 1, dtype=np.int64)
    if ms.size == 0:
        return None
    idx = (ms - a) * j
    bounds = (
        j * (-ws.range_log_many(np.ones_like(ms), ms) - log_eps)
        + (j - 1) * norm_log
        + ws.range_log_many(1 - idx, np.zeros_like(idx))
    )
    best = int(np.argmin(bounds))
    return float(bounds[best]), j, int(ms[best])


def search_jm(
    ws: WeightSequence,
    k: int,
    n: int,
    eps: float,
    j_max: int,
    m_max: int,
    workers: int = 1,
) -> JMWitness | NotFound:
    """Minimize the residual bound over j in [1, j_max], m in [n + k, m_max]

    Ties go to the smallest j, then the smallest m. The minimizer is only
    accepted when its bound is at most log(eps).
    """
    _check_transition(k, n, eps)
    if j_max < 1:
        raise ValueError(f"j_max must be positive, got {j_max}")

    norm_log = norm_upper_log(ws, n, m_max)
    row = partial(
        _bound_row,
        ws=ws,
        k=k,
        n=n,
        log_eps=math.log(eps),
        m_max=m_max,
        norm_log=norm_log,
    )
    rows = sweep(row, list(range(1, j_max + 1)), workers)
    best = lexicographic_min(item for item in rows if item is not None)
    if best is None:
        return NotFound(math.inf, (), f"empty grid: m_max={m_max} < n + k")

    bound, j, m = best
    logger.debug("search_jm: best bound %.6g at j=%d, m=%d", bound, j, m)
    if bound <= math.log(eps):
        return JMWitness(j=j, m=m, bound_log=bound)
    return NotFound(bound, (j, m))


def build_qjm(
    ws: WeightSequence,
    j: int,
    m: int,
    k: int,
    n: int,
    eps: float,
) -> LogPolynomial:
    """q(z) = -(c_{-m} z^{m-n} / eps) sum_{l<j} (c_{-m} z^{m-k} / eps)^l"""
    if j < 1:
        raise ValueError(f"j must be positive, got {j}")
    if not m >= n > k:
        raise ValueError(f"Expected m >= n > k, got m={m}, n={n}, k={k}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")

    c = f_coefficient(ws, -m)
    ratio_log = c.log_mag - math.log(eps)
    return LogPolynomial(
        {
            (m - n) + l * (m - k): Amplitude(
                unit(-(c.phase ** (l + 1))), (l + 1) * ratio_log
            )
            for l in range(j)
        }
    )


@dataclass
class CyclicApproxResult:
    """A certified transition from near f_{-k} to near f_{-n}"""

    k: int
    n: int
    j: int
    m: int
    eps: float
    q: LogPolynomial
    u: SparseVector
    residual: SparseVector
    residual_direct_log: LogMagnitude
    residual_closedform_log: LogMagnitude
    perturbation_log: LogMagnitude
    bound_log: LogMagnitude
    path: str = "telescoping"

    @property
    def residual_index(self) -> int | None:
        support = self.residual.support
        return support[0] if len(support) == 1 else None

    def to_json(self) -> Dict[str, Any]:
        return {
            "found": True,
            "path": self.path,
            "k": self.k,
            "n": self.n,
            "j": self.j,
            "m": self.m,
            "eps": render_float(self.eps),
            "poly": _render_nested(self.q.to_json()),
            "u": _render_nested(self.u.to_json()),
            "residual_direct_log": render_float(self.residual_direct_log),
            "residual_closedform_log": render_float(self.residual_closedform_log),
            "perturbation_log": render_float(self.perturbation_log),
            "bound_log": render_float(self.bound_log),
        }


def _render_nested(data: Dict[str, List[List[float]]]) -> Dict[str, Any]:
    return {
        key: [
            [render_float(x) if isinstance(x, float) else x for x in row]
            for row in rows
        ]
        for key, rows in data.items()
    }


def _monomial_transition(
    ws: WeightSequence,
    k: int,
    n: int,
    eps: float,
    p: float,
) -> CyclicApproxResult:
    # T^{k-n} f_{-k} = f_{-n}, so r(z) = z^{k-n} and u = f_{-k}
    u = f_vector(ws, -k).realization
    target = f_vector(ws, -n).realization
    q = LogPolynomial.monomial(k - n)
    residual = apply_polynomial(ws, q, u).subtract(
        target, polynomial_spread(ws, q, u)
    )
    return CyclicApproxResult(
        k=k,
        n=n,
        j=0,
        m=k,
        eps=eps,
        q=q,
        u=u,
        residual=residual,
        residual_direct_log=lp_norm_log(residual, p),
        residual_closedform_log=NEG_INF,
        perturbation_log=NEG_INF,
        bound_log=NEG_INF,
        path="monomial",
    )


def approximate_transition(
    ws: WeightSequence,
    k: int,
    n: int,
    eps: float,
    budgets: Any,
    p: float = 2.0,
    workers: int = 1,
) -> CyclicApproxResult | NotFound:
    """Find u with ||u - f_{-k}|| = eps and q with ||q(T)u - f_{-n}|| <= eps

    `budgets` provides j_max and m_max.

    Raises:
        CertificateError: if the constructed transition does not verify
    """
    if k < 1 or n < 1:
        raise ValueError(f"k and n must be positive, got k={k}, n={n}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if n <= k:
        return _monomial_transition(ws, k, n, eps, p)

    found = search_jm(
        ws, k, n, eps, budgets.j_max, budgets.m_max, workers=workers
    )
    if isinstance(found, NotFound):
        logger.info(
            "No transition f_-%d -> f_-%d within budgets (best bound %.6g)",
            k,
            n,
            found.best_bound_log,
        )
        return found

    j, m = found.j, found.m
    f_k = f_vector(ws, -k).realization
    u = f_k - SparseVector.basis(m, Amplitude(1 + 0j, math.log(eps)))
    q = build_qjm(ws, j, m, k, n, eps)

    target = f_vector(ws, -n).realization
    residual = apply_polynomial(ws, q, u).subtract(
        target, polynomial_spread(ws, q, u)
    )
    direct = lp_norm_log(residual, p)
    closed = j * (-ws.range_log(1, m) - math.log(eps)) + f_coefficient(
        ws, (m - k) * j - n
    ).log_mag
    perturbation = lp_norm_log(u - f_k, p)

    result = CyclicApproxResult(
        k=k,
        n=n,
        j=j,
        m=m,
        eps=eps,
        q=q,
        u=u,
        residual=residual,
        residual_direct_log=direct,
        residual_closedform_log=closed,
        perturbation_log=perturbation,
        bound_log=found.bound_log,
    )

    expected_index = n - (m - k) * j
    if result.residual_index != expected_index:
        raise CertificateError(
            f"Residual support {residual.support}, expected [{expected_index}]"
        )
    slack = RESIDUAL_AGREEMENT * max(1.0, abs(closed))
    if abs(direct - closed) > slack:
        raise CertificateError(
            f"Residual mismatch: direct {direct!r} vs closed form {closed!r}"
        )
    if direct > math.log(eps) + slack:
        raise CertificateError(f"Residual {direct!r} exceeds log(eps)")

    logger.info(
        "Transition f_-%d -> f_-%d: j=%d, m=%d, residual %.6g", k, n, j, m, direct
    )
    return result


@dataclass
class DirectSumCertificate:
    """Checks behind u = (x, ..., x) being cyclic for T + zT + ... + z^{j-1}T"""

    j: int
    z: complex
    u: Tuple[SparseVector, ...]
    det_abs: float
    det_formula: float
    identity_residual: float
    reconstruction_residual: float
    samples: int
    vandermonde_ok: bool = field(init=False)

    def __post_init__(self) -> None:
        self.vandermonde_ok = (
            self.det_abs > 0
            and abs(self.det_abs - self.det_formula) <= 1e-10 * self.det_formula
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "j": self.j,
            "z": [render_float(self.z.real), render_float(self.z.imag)],
            "vandermonde_ok": self.vandermonde_ok,
            "det_abs": render_float(self.det_abs),
            "det_formula": render_float(self.det_formula),
            "identity_residual": render_float(self.identity_residual),
            "reconstruction_residual": render_float(self.reconstruction_residual),
            "samples": self.samples,
        }


def root_power(j: int, e: int) -> complex:
    """z^e for z = exp(2 pi i / j), with e reduced mod j"""
    return cmath.exp(2j * math.pi * (e % j) / j)


def vandermonde(j: int) -> np.ndarray:
    """The matrix {z^{kl}}, k, l = 0..j-1"""
    return np.array(
        [[root_power(j, k * l) for l in range(j)] for k in range(j)], dtype=complex
    )


def sample_polynomials(seed: int = 0, n_random: int = 4) -> List[LogPolynomial]:
    """Monomials z^t (t <= 8) and a few seeded random cubics"""
    rng = np.random.default_rng(seed)
    samples = [LogPolynomial.monomial(t) for t in range(9)]
    for _ in range(n_random):
        coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
        samples.append(LogPolynomial.from_complex(dict(enumerate(coeffs))))
    return samples


def _rotated(r: LogPolynomial, j: int, i: int) -> LogPolynomial:
    """r with z replaced by z^i z (the i-th summand z^i T)"""
    return LogPolynomial({d: amp.scale(root_power(j, i * d), 0.0) for d, amp in r})


def direct_sum_cyclic_vector(
    ws: WeightSequence,
    x: SparseVector,
    j: int,
    seed: int = 0,
    samples: Sequence[LogPolynomial] | None = None,
) -> DirectSumCertificate:
    """Verify the algebra behind (x, ..., x) for T + zT + ... + z^{j-1}T

    For each sample r and t < j, S^t r(S^j) u is compared with
    (z^{it} T^t r(T^j) x)_i, and a Vandermonde solve splits it back into
    the single frequency t.
    """
    if j < 1:
        raise ValueError(f"j must be positive, got {j}")
    z = root_power(j, 1)
    matrix = vandermonde(j)
    lu, piv = lu_factor(matrix)
    det_abs = float(np.prod(np.abs(np.diag(lu))))
    det_formula = math.prod(
        abs(root_power(j, l) - root_power(j, k))
        for l in range(j)
        for k in range(l)
    )

    samples = list(samples) if samples is not None else sample_polynomials(seed)
    identity = 0.0
    reconstruction = 0.0
    for r in samples:
        for t in range(j):
            poly = r.compose_power(j).shift_degree(t)
            base = apply_polynomial(ws, poly, x)
            coords = [apply_polynomial(ws, _rotated(poly, j, i), x) for i in range(j)]
            for i, coord in enumerate(coords):
                expected = base.scale(root_power(j, i * t), 0.0)
                identity = max(identity, amplitude_discrepancy(coord, expected))
            reconstruction = max(
                reconstruction, _frequency_split(coords, base, t, lu, piv)
            )

    logger.debug(
        "Direct sum of %d copies: |det| %.6g, identity %.3g, reconstruction %.3g",
        j,
        det_abs,
        identity,
        reconstruction,
    )
    return DirectSumCertificate(
        j=j,
        z=z,
        u=tuple(x for _ in range(j)),
        det_abs=det_abs,
        det_formula=det_formula,
        identity_residual=identity,
        reconstruction_residual=reconstruction,
        samples=len(samples),
    )


def _frequency_split(
    coords: Sequence[SparseVector],
    base: SparseVector,
    t: int,
    lu: np.ndarray,
    piv: np.ndarray,
) -> float:
    """Solve V a = (coords_i[n])_i per index; a must be base[n] at slot t"""
    worst = 0.0
    j = len(coords)
    for n, target in base:
        amps = [coord.get(n) for coord in coords]
        anchor = max(
            [target.log_mag] + [amp.log_mag for amp in amps if amp is not None]
        )
        rhs = np.array(
            [
                0j if amp is None else amp.phase * math.exp(amp.log_mag - anchor)
                for amp in amps
            ]
        )
        solved = lu_solve((lu, piv), rhs)
        expected = np.zeros(j, dtype=complex)
        expected[t] = target.phase * math.exp(target.log_mag - anchor)
        worst = max(worst, float(np.max(np.abs(solved - expected))))
    return worst

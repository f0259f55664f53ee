"""Certified evaluation of the partial theta series and its companions.

The central object is the entire function

    theta(q, x) = sum_{j>=0} q^(j(j+1)/2) x^j,        0 < |q| < 1,

together with its bilateral completion Theta (evaluated through the Jacobi
triple product) and the negative-index tail G:

    Theta(q, x) = sum_{j in Z} q^(j(j+1)/2) x^j = Q * P * R,
        Q = prod_{m>=1} (1 - q^m),
        P = prod_{m>=1} (1 + x q^m),
        R = prod_{m>=1} (1 + q^(m-1) / x),
    G(q, x) = sum_{j>=1} q^(j(j-1)/2) x^(-j),

so that theta = Theta - G whenever x != 0.

Every public evaluator returns a rigorous truncation bound next to the value.
Coefficient magnitudes are carried as (log-magnitude, sign) pairs: the factor
q^(j(j+1)/2) underflows binary64 near j ~ 50 already for moderate q, so terms
are assembled by exponent subtraction against the largest term before
anything is exponentiated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PrecisionBudgetError

# Supported base range.  Above 0.98 truncation degrees explode; callers get a
# clean error instead of a silently degraded value.
SUPPORTED_ABS_Q_MIN = 1e-6
SUPPORTED_ABS_Q_MAX = 0.98

# Printed reference digits for the first spectral bases.  They anchor the
# nested parameter intervals and serve as test targets; they are not used in
# any certified bound.
FIRST_POSITIVE_SPECTRAL_Q = 0.3092
SECOND_POSITIVE_SPECTRAL_Q = 0.5169
FIRST_NEGATIVE_SPECTRAL_Q = -0.727133

_LOG_HALF = math.log(0.5)
_PRODUCT_CUTOFF = 1e-18          # per-factor threshold for the triple product
_ROUNDING_UNIT = 2.0 ** -50      # per-term assembly slop (exp + phase error)
_EXP_OVERFLOW = 700.0            # log magnitude binary64 cannot materialize
_SCALED_DROP = 45.0              # nats below the peak term that we may drop


def _tri(j: int) -> int:
    return j * (j + 1) // 2


def _interval_index(abs_q: float) -> int:
    """Smallest n with abs_q <= 1 - 1/(n+1); equals 1 for abs_q <= 1/2."""
    if abs_q <= 0.5:
        return 1
    return max(1, math.ceil(1.0 / (1.0 - abs_q) - 1.0 - 1e-12))


@dataclass(frozen=True)
class QParam:
    """A validated real base q with 0 < |q| < 1.

    ``regime`` records the sign.  ``n`` is the index of the smallest nested
    parameter interval containing q: for q > 0 these are
    [first spectral base, 1 - 1/(n+1)], so n = 1 iff q <= 1/2 and otherwise
    1 - 1/n < q <= 1 - 1/(n+1); the negative side is indexed the same way
    through |q|.
    """

    q: float
    n: int
    regime: str

    def __init__(self, q: float):
        q = float(q)
        aq = abs(q)
        if not (SUPPORTED_ABS_Q_MIN <= aq <= SUPPORTED_ABS_Q_MAX):
            raise DomainError(
                f"|q| = {aq!r} outside supported range "
                f"[{SUPPORTED_ABS_Q_MIN}, {SUPPORTED_ABS_Q_MAX}]"
            )
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "regime", "positive" if q > 0 else "negative")
        object.__setattr__(self, "n", _interval_index(aq))

    @property
    def abs_q(self) -> float:
        return abs(self.q)

    @property
    def log_abs_q(self) -> float:
        return math.log(abs(self.q))


def _as_qparam(q) -> QParam:
    return q if isinstance(q, QParam) else QParam(q)


@dataclass(frozen=True)
class EvalOutput:
    """A computed value with a rigorous bound on |true - value|.

    ``tail_bound`` covers the dropped series/product tail plus the binary64
    assembly rounding of the retained terms, so recomputing at higher
    precision moves the value by less than it.
    """

    value: complex
    tail_bound: float
    terms_used: int


@dataclass(frozen=True)
class TripleProductFactors:
    """The three truncated factors of the triple product, kept separately.

    ``factor_tail_bound`` is the relative error bound shared by the factors;
    the accompanying EvalOutput converts it to an absolute one.
    """

    Q_val: float
    P_val: complex
    R_val: complex
    truncation_m: int
    factor_tail_bound: float


def truncation_degree(q, R: float, eps: float, hard_cap: int = 20000) -> int:
    """Smallest N whose dropped tail sum_{j>N} |q|^(j(j+1)/2) R^j is <= eps.

    Uses the geometric majorant: consecutive dropped terms shrink by
    |q|^(j+1) R, so once that ratio is below 1/2 the tail is at most twice
    its first term.  Monotone in both R and |q|.
    """
    qp = _as_qparam(q)
    if R <= 1.0:
        raise DomainError(f"radius R = {R!r} must exceed 1")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps = {eps!r} must lie in (0, 1)")
    lq = qp.log_abs_q
    lr = math.log(R)
    log_eps = math.log(eps)
    log2 = math.log(2.0)
    for n in range(hard_cap + 1):
        # ratio bound for terms beyond n+1
        if (n + 2) * lq + lr > _LOG_HALF:
            continue
        log_tail = log2 + _tri(n + 1) * lq + (n + 1) * lr
        if log_tail <= log_eps:
            return n
    raise PrecisionBudgetError(
        f"truncation degree exceeds hard cap {hard_cap} for |q|={qp.abs_q}, R={R}"
    )


def _safe_exp(log_value: float) -> float:
    if log_value > _EXP_OVERFLOW:
        raise PrecisionBudgetError(
            f"magnitude exp({log_value:.1f}) exceeds binary64 range"
        )
    return math.exp(log_value)


def _signs(qp: QParam, exponents: np.ndarray) -> np.ndarray:
    """Signs of q^e for integer exponents e."""
    if qp.q > 0:
        return np.ones(len(exponents))
    return np.where(exponents % 2 == 0, 1.0, -1.0)


def theta(q, x: complex, eps: float = 1e-12) -> EvalOutput:
    """Truncated partial theta sum with certified absolute tail bound.

    The truncation degree comes from ``truncation_degree`` at radius
    max(|x|, 1.01); exponents j(j+1)/2 are exact integers, magnitudes are
    assembled in the log domain, and the final sums are compensated (fsum).
    """
    qp = _as_qparam(q)
    if not eps > 0.0:
        raise DomainError("eps must be positive")
    z = complex(x)
    R = max(abs(z), 1.01)
    n_top = truncation_degree(qp, R, eps)
    lq = qp.log_abs_q

    if z == 0:
        return EvalOutput(complex(1.0, 0.0), 0.0, 1)

    j = np.arange(n_top + 1)
    e = j * (j + 1) // 2
    logmag = e * lq + j * math.log(abs(z))
    log_max = float(logmag.max())
    scale = _safe_exp(log_max)
    mags = np.exp(logmag - log_max) * _signs(qp, e)

    if z.imag == 0.0:
        if z.real < 0.0:
            mags = mags * np.where(j % 2 == 0, 1.0, -1.0)
        value = complex(math.fsum(mags) * scale, 0.0)
    else:
        terms = mags * np.exp(1j * j * cmath.phase(z))
        value = complex(math.fsum(terms.real), math.fsum(terms.imag)) * scale

    log_tail = math.log(2.0) + _tri(n_top + 1) * lq + (n_top + 1) * math.log(R)
    tail = math.exp(log_tail) if log_tail > -740.0 else 5e-324
    rounding = _ROUNDING_UNIT * (n_top + 1) * scale
    return EvalOutput(value, tail + rounding, n_top + 1)


def _product_cut(qp: QParam, abs_x: float) -> int:
    """Smallest m with |q|^m and |q|^(m-1)/|x| both below the factor cutoff."""
    lq = qp.log_abs_q
    need = math.log(_PRODUCT_CUTOFF)
    m = max(1, int(max(need / lq, 1.0 + (need + math.log(abs_x)) / lq)))
    while m * lq >= need or (m - 1) * lq - math.log(abs_x) >= need:
        m += 1
        if m > 200000:
            raise PrecisionBudgetError("triple product truncation exceeds cap")
    return m


def _log_abs_product(factors: np.ndarray) -> float:
    a = np.abs(factors)
    if np.any(a == 0.0):
        return -math.inf
    return float(np.log(a).sum())


def theta_star(q, x: complex) -> tuple[EvalOutput, TripleProductFactors]:
    """Bilateral theta via the triple product Q * P * R, factors kept apart.

    Each infinite product is cut at the first index where the dropped factors
    are below 1e-18 individually; the returned relative tail bound is
    2 (|q|^m + |q|^(m-1)/|x|) / (1 - |q|) at the cut.
    """
    qp = _as_qparam(q)
    z = complex(x)
    if z == 0:
        raise DomainError("the R factor of the triple product is undefined at x = 0")
    aq = qp.abs_q
    az = abs(z)
    m_star = _product_cut(qp, az)
    m = np.arange(1, m_star + 1)
    qm = np.exp(m * qp.log_abs_q)
    if qp.q < 0:
        qm = np.where(m % 2 == 0, qm, -qm)
    qm_prev = np.empty_like(qm)          # q^(m-1)
    qm_prev[0] = 1.0
    qm_prev[1:] = qm[:-1]

    q_factors = 1.0 - qm
    Q_val = float(np.prod(q_factors))

    if z.imag == 0.0:
        p_factors = 1.0 + z.real * qm
        r_factors = 1.0 + qm_prev / z.real
        log_p = _log_abs_product(p_factors)
        log_r = _log_abs_product(r_factors)
        if log_p == -math.inf or log_r == -math.inf:
            P_val = complex(0.0 if log_p == -math.inf else _safe_exp(log_p), 0.0)
            R_val = complex(0.0 if log_r == -math.inf else _safe_exp(log_r), 0.0)
        else:
            _safe_exp(math.log(abs(Q_val)) + log_p + log_r)   # overflow guard
            p_sign = -1.0 if int(np.sum(p_factors < 0)) % 2 else 1.0
            r_sign = -1.0 if int(np.sum(r_factors < 0)) % 2 else 1.0
            P_val = complex(p_sign * _safe_exp(log_p), 0.0)
            R_val = complex(r_sign * _safe_exp(log_r), 0.0)
    else:
        p_factors = 1.0 + z * qm
        r_factors = 1.0 + qm_prev / z
        log_p = _log_abs_product(p_factors)
        log_r = _log_abs_product(r_factors)
        if log_p == -math.inf or log_r == -math.inf:
            P_val = complex(0.0, 0.0)
            R_val = complex(0.0, 0.0)
        else:
            _safe_exp(math.log(abs(Q_val)) + log_p + log_r)   # overflow guard
            ph_p = float(np.angle(p_factors).sum())
            ph_r = float(np.angle(r_factors).sum())
            P_val = _safe_exp(log_p) * complex(math.cos(ph_p), math.sin(ph_p))
            R_val = _safe_exp(log_r) * complex(math.cos(ph_r), math.sin(ph_r))

    value = Q_val * P_val * R_val
    rel_tail = 2.0 * (aq ** m_star + aq ** (m_star - 1) / az) / (1.0 - aq)
    rel_round = _ROUNDING_UNIT * 3.0 * m_star
    out = EvalOutput(value, (rel_tail + rel_round) * abs(value), m_star)
    return out, TripleProductFactors(Q_val, P_val, R_val, m_star, rel_tail)


def tail_g(q, x: complex) -> EvalOutput:
    """Negative-index tail G(q, x) = sum_{j>=1} q^(j(j-1)/2) x^(-j), |x| > 1.

    Terms never exceed 1/|x| in magnitude, so the sum is assembled directly;
    the dropped tail is bounded by the geometric majorant
    |x|^(-M-1) / (1 - 1/|x|).
    """
    qp = _as_qparam(q)
    z = complex(x)
    az = abs(z)
    if az <= 1.0:
        raise DomainError(f"|x| = {az!r} must exceed 1 (the tail majorant diverges)")
    lx = math.log(az)
    target = 1e-16
    m_top = max(1, math.ceil(-math.log(target * (1.0 - 1.0 / az)) / lx))
    if m_top > 10 ** 6:
        raise PrecisionBudgetError("tail series length exceeds cap (|x| too close to 1)")

    j = np.arange(1, m_top + 1)
    e = j * (j - 1) // 2
    logmag = e * qp.log_abs_q - j * lx
    mags = np.exp(logmag) * _signs(qp, e)
    max_term = float(np.exp(logmag.max()))

    if z.imag == 0.0:
        if z.real < 0.0:
            mags = mags * np.where(j % 2 == 0, 1.0, -1.0)
        value = complex(math.fsum(mags), 0.0)
    else:
        terms = mags * np.exp(-1j * j * cmath.phase(z))
        value = complex(math.fsum(terms.real), math.fsum(terms.imag))

    tail = az ** (-m_top - 1) / (1.0 - 1.0 / az)
    rounding = _ROUNDING_UNIT * m_top * max_term
    return EvalOutput(value, tail + rounding, m_top)


def g_bound(x: complex) -> float:
    """Pointwise majorant 1/(|x| - 1) of |G(q, x)|, valid for every base q."""
    az = abs(complex(x))
    if az <= 1.0:
        raise DomainError(f"|x| = {az!r} must exceed 1")
    return 1.0 / (az - 1.0)


# ---------------------------------------------------------------------------
# Scaled internal evaluators.
#
# Zero finding and winding counts work at moduli where theta itself overflows
# binary64.  These helpers return theta divided by its largest series term at
# the evaluation point (plus the log of that term), which is also the natural
# unit for residual tolerances.
# ---------------------------------------------------------------------------


def _scaled_degree(qp: QParam, radius: float) -> int:
    """Terms beyond this index are below e^-45 of the peak at the radius."""
    lq = qp.log_abs_q
    lr = math.log(radius) if radius > 0 else -math.inf
    if lr == -math.inf:
        return 1
    j_peak = max(0, int(lr / -lq - 0.5))
    peak = max(_tri(j_peak) * lq + j_peak * lr, _tri(j_peak + 1) * lq + (j_peak + 1) * lr)
    n = j_peak + 1
    while (_tri(n) * lq + n * lr > peak - _SCALED_DROP) or ((n + 1) * lq + lr > _LOG_HALF):
        n += 1
        if n > 200000:
            raise PrecisionBudgetError("scaled series degree exceeds cap")
    return n


def _scaled_theta_deriv(qp: QParam, z: complex) -> tuple[complex, complex, float]:
    """(theta, dtheta/dx, log scale) at z, both scaled by the peak term.

    Scalar path with compensated summation; used by root polishing,
    bisection, and residual checks.
    """
    az = abs(z)
    if az < 1e-280:
        return complex(1.0, 0.0), complex(0.0, 0.0), 0.0
    lq = qp.log_abs_q
    n_top = _scaled_degree(qp, az)
    j = np.arange(n_top + 1)
    e = j * (j + 1) // 2
    logmag = e * lq + j * math.log(az)
    log_max = float(logmag.max())
    mags = np.exp(logmag - log_max) * _signs(qp, e)
    if z.imag == 0.0:
        if z.real < 0.0:
            mags = mags * np.where(j % 2 == 0, 1.0, -1.0)
        th = complex(math.fsum(mags), 0.0)
        dmags = mags * j
        dth = complex(math.fsum(dmags), 0.0) / z
    else:
        terms = mags * np.exp(1j * j * cmath.phase(z))
        th = complex(math.fsum(terms.real), math.fsum(terms.imag))
        dterms = terms * j
        dth = complex(math.fsum(dterms.real), math.fsum(dterms.imag)) / z
    return th, dth, log_max


def _scaled_theta_many(qp: QParam, zs: np.ndarray, j_lo: int = 0,
                       j_hi: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(theta, dtheta/dx) over a point array, each scaled by its own peak term.

    Restricting [j_lo, j_hi] evaluates a windowed slice of the series, which
    is what the per-annulus root solves use; the scaling still makes the
    dominant retained terms O(1) pointwise.
    """
    zs = np.asarray(zs, dtype=complex)
    az = np.maximum(np.abs(zs), 1e-280)
    if j_hi is None:
        j_hi = max(_scaled_degree(qp, float(az.max())), j_lo + 1)
    j = np.arange(j_lo, j_hi + 1)
    e = j * (j + 1) // 2
    logmag = np.outer(np.log(az), j) + e * qp.log_abs_q   # (points, terms)
    log_max = logmag.max(axis=1, keepdims=True)
    mags = np.exp(logmag - log_max) * _signs(qp, e)
    phases = np.exp(1j * np.outer(np.angle(zs), j))
    terms = mags * phases
    th = terms.sum(axis=1)
    dth = (terms * j).sum(axis=1) / zs
    return th, dth


def _circle_coefficients(qp: QParam, radius: float) -> np.ndarray:
    """Scaled series coefficients at fixed modulus: theta(radius e^{i phi})
    equals exp(peak) * sum_j d_j e^{i j phi} with max |d_j| = 1."""
    lq = qp.log_abs_q
    n_top = _scaled_degree(qp, radius)
    j = np.arange(n_top + 1)
    e = j * (j + 1) // 2
    logmag = e * lq + j * math.log(radius)
    d = np.exp(logmag - logmag.max()) * _signs(qp, e)
    return d


def _theta_star_log_abs(q, xs: np.ndarray) -> np.ndarray:
    """log |Theta(q, x)| over an array of points, robust to huge magnitudes."""
    qp = _as_qparam(q)
    xs = np.asarray(xs, dtype=complex)
    az = np.abs(xs)
    if np.any(az == 0.0):
        raise DomainError("x = 0 is outside the triple product domain")
    m_star = _product_cut(qp, float(az.min()))
    m = np.arange(1, m_star + 1)
    qm = np.exp(m * qp.log_abs_q)
    if qp.q < 0:
        qm = np.where(m % 2 == 0, qm, -qm)
    qm_prev = np.empty_like(qm)
    qm_prev[0] = 1.0
    qm_prev[1:] = qm[:-1]
    log_q = float(np.log(np.abs(1.0 - qm)).sum())
    p = 1.0 + np.outer(qm, xs)
    r = 1.0 + np.outer(qm_prev, 1.0 / xs)
    return log_q + np.log(np.abs(p)).sum(axis=0) + np.log(np.abs(r)).sum(axis=0)

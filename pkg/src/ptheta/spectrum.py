"""Complex-pair census over the base q, spectral values, and continuation.

As q moves from 0 toward 1 (or toward -1), theta(q, .) repeatedly trades two
simple real zeros for a complex conjugate pair: the two reals coalesce into a
double zero at an isolated spectral value of q and split off the axis just
past it.  The census disk is chosen large enough that every conjugate pair
provably lies inside, so the pair count is an integer observable and the
spectral values can be pinned down by bisecting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError
from .evaluate import QParam, _as_qparam, _scaled_theta_deriv
from .zeros import classify_zeros, disk_radius, find_zeros_in_disk

# Census disks must strictly contain the regions where pairs can live, so a
# pair escaping the claimed region would still be seen and reported.
CENSUS_MIN_RADIUS = {"positive": 6000.0, "negative": 400.0}

# Double zeros are confined to these real windows (positive / negative base).
DOUBLE_ZERO_WINDOW = {"positive": (-1226.0, 0.0), "negative": (-237.0, 237.0)}

DEFAULT_BRACKET_TOL = 1e-6
TRACK_RESIDUAL_REL = 1e-9


@dataclass(frozen=True)
class SpectralValue:
    """A located base where a double zero is born.

    The bracket is an interval in q across which the pair count changes by
    exactly one; ``double_zero_x`` estimates the coalescence abscissa from
    the nascent pair just on the complex side of the bracket.
    """

    index_j: int
    q_value: float
    bracket: tuple[float, float]
    double_zero_x: float
    regime: str


@dataclass(frozen=True)
class CcpTrajectory:
    """Continuation samples (q, z) of one upper-half-plane zero."""

    samples: tuple[tuple[float, complex], ...]
    birth_q: float


def census_disk_index(q, min_radius: float | None = None) -> int:
    """Smallest circle index whose radius clears the census threshold."""
    qp = _as_qparam(q)
    threshold = min_radius if min_radius is not None else CENSUS_MIN_RADIUS[qp.regime]
    k = max(0, math.floor(math.log(threshold) / -qp.log_abs_q - 0.5))
    while disk_radius(qp, k) <= threshold:
        k += 1
    return k


def count_ccps(q, R=None, eps: float = 1e-12, residual_relax: float = 1.0) -> int:
    """Conjugate pairs (with multiplicity) inside the disk of radius R.

    R defaults to the regime's census disk; it may also be a circle index.
    """
    qp = _as_qparam(q)
    disk = R if R is not None else census_disk_index(qp)
    zs = find_zeros_in_disk(qp, disk, eps, residual_relax=residual_relax)
    _, pairs = classify_zeros(zs)
    return sum(up.multiplicity for up, _ in pairs)


def _census(qp: QParam, residual_relax: float = 1.0):
    zs = find_zeros_in_disk(qp, census_disk_index(qp), residual_relax=residual_relax)
    return classify_zeros(zs)


def find_spectral_value(regime: str, j: int, bracket0: tuple[float, float],
                        tol: float = DEFAULT_BRACKET_TOL) -> SpectralValue:
    """Bisect the pair count to the base where pair number j is born.

    For the positive regime the count climbs with q; for the negative regime
    it climbs as q falls toward -1.  The initial bracket must straddle
    exactly one unit step of the count (j-1 on the tame side, j beyond).
    """
    if regime not in ("positive", "negative"):
        raise DomainError(f"unknown regime {regime!r}")
    if j < 1:
        raise DomainError("spectral index j must be >= 1")
    lo, hi = sorted(float(b) for b in bracket0)
    if (regime == "positive") != (lo > 0):
        raise DomainError(f"bracket {bracket0} does not match regime {regime!r}")

    counts: dict[float, int] = {}

    def count_at(qv: float, relax: float = 1.0) -> int:
        if qv not in counts:
            counts[qv] = count_ccps(qv, residual_relax=relax)
        return counts[qv]

    # the side nearer 0 carries j-1 pairs; the far side may hold later births
    # as well, which bisection on the predicate (count >= j) walks past
    tame, far = (lo, hi) if regime == "positive" else (hi, lo)
    c_tame = count_at(tame)
    c_far = count_at(far)
    if c_tame == c_far:
        raise DomainError(
            f"pair count is {c_tame} on both sides of {bracket0}; the bracket "
            "does not straddle a count change"
        )
    if c_tame != j - 1 or c_far < j:
        raise DomainError(
            f"bracket {bracket0} carries counts {c_tame} (near side) to "
            f"{c_far} (far side) and does not isolate the birth of pair {j}; "
            "refine the bracket"
        )

    while abs(far - tame) > tol:
        mid = 0.5 * (tame + far)
        relax = 1e3 if abs(far - tame) < 1e-4 else 1.0
        if count_at(mid, relax) >= j:
            far = mid
        else:
            tame = mid

    # nascent pair on the complex side of the bracket
    relax = 1e3
    _, pairs = _census(QParam(far), residual_relax=relax)
    if not pairs:
        raise ConvergenceError("no pair visible on the complex side of the bracket")
    nascent = min(pairs, key=lambda p: abs(p[0].location.imag))
    double_x = nascent[0].location.real

    window = DOUBLE_ZERO_WINDOW[regime]
    if not (window[0] <= double_x <= window[1]):
        raise ConvergenceError(
            f"double zero abscissa {double_x} escapes its window {window}"
        )
    bracket = (tame, far) if tame < far else (far, tame)
    return SpectralValue(j, 0.5 * (tame + far), bracket, double_x, regime)


def _corrector(qp: QParam, z: complex, max_iters: int = 8
               ) -> tuple[complex, float, int]:
    """Newton in x at fixed q; returns (point, residual, iterations used)."""
    for it in range(1, max_iters + 1):
        th, dth, _ = _scaled_theta_deriv(qp, z)
        if dth == 0:
            break
        step = th / dth
        z = z - step
        if abs(step) <= 1e-14 * (1.0 + abs(z)):
            th, _, _ = _scaled_theta_deriv(qp, z)
            return z, abs(th), it
    th, _, _ = _scaled_theta_deriv(qp, z)
    return z, abs(th), max_iters + 1


def track_ccp(birth: SpectralValue, q_end: float, max_step: float = 0.05
              ) -> CcpTrajectory:
    """Predictor-corrector continuation of the newborn upper zero in q.

    ``max_step`` caps the zero's displacement per accepted step; the q
    stride is halved whenever the corrector needs more than 5 iterations or
    the displacement overshoots, and every accepted sample satisfies the
    residual tolerance.
    """
    direction = 1.0 if birth.regime == "positive" else -1.0
    if (q_end - birth.q_value) * direction <= 0:
        raise DomainError(
            f"q_end {q_end} is not beyond the birth value {birth.q_value} "
            f"for regime {birth.regime!r}"
        )

    q0 = birth.q_value + direction * max(4.0 * (birth.bracket[1] - birth.bracket[0]),
                                         1e-4)
    _, pairs = _census(QParam(q0), residual_relax=1e3)
    if not pairs:
        raise ConvergenceError(f"no pair found just past birth at q = {q0}")
    z = min(pairs, key=lambda p: abs(p[0].location.real - birth.double_zero_x)
            )[0].location
    samples: list[tuple[float, complex]] = [(q0, z)]

    q_prev, z_prev = q0, z
    q_prev2, z_prev2 = None, None
    q_stride = min(1e-4, abs(q_end - q0))
    while (q_end - q_prev) * direction > 1e-12:
        q_stride = min(q_stride, abs(q_end - q_prev))
        q_next = q_prev + direction * q_stride
        if z_prev2 is not None and q_prev != q_prev2:
            slope = (z_prev - z_prev2) / (q_prev - q_prev2)
            z_guess = z_prev + slope * (q_next - q_prev)
        else:
            slope = None
            z_guess = z_prev
        z_next, res, iters = _corrector(QParam(q_next), z_guess)
        moved = abs(z_next - z_prev)
        if iters > 5 or moved > max_step or res > TRACK_RESIDUAL_REL \
                or z_next.imag <= 0:
            q_stride *= 0.5
            if q_stride < 1e-10:
                raise ConvergenceError(
                    f"continuation step underflow near q = {q_prev} "
                    "(spectral collision or range limit)"
                )
            continue
        samples.append((q_next, z_next))
        q_prev2, z_prev2 = q_prev, z_prev
        q_prev, z_prev = q_next, z_next
        if iters <= 3 and moved < 0.5 * max_step:
            # aim the next stride at ~0.6 max_step of motion
            if slope is not None and abs(slope) > 0:
                q_stride = min(2.0 * q_stride, 0.6 * max_step / abs(slope), 0.02)
            else:
                q_stride = min(2.0 * q_stride, 0.02)
    return CcpTrajectory(tuple(samples), birth.q_value)

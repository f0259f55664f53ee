"""Zero localization for the partial theta function inside half-integer disks.

The zeros of theta(q, .) organize themselves around the moduli |q|^-k: the
circles |x| = |q|^(-k-1/2) are zero free, so disks and annuli bounded by them
carry well-defined zero counts that we obtain from the argument principle.
Counting drives the search: an annulus holding a single zero is resolved by
bracketed bisection on the real axis (a lone zero of a real-coefficient
function must be real), while annuli holding several zeros are handed to a
simultaneous Aberth iteration on a rescaled window of the series.  Every
reported zero is polished on the certified evaluator and the multiplicity
bookkeeping must reproduce the argument-principle count exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, CountMismatchError, DomainError
from .evaluate import (
    QParam,
    _as_qparam,
    _circle_coefficients,
    _scaled_degree,
    _scaled_theta_deriv,
    _scaled_theta_many,
    _signs,
    _tri,
)

RESIDUAL_REL = 1e-10        # residual tolerance in units of the peak term
CLUSTER_REL = 1e-6          # multiplicity clustering radius, relative
DEFAULT_PAIRING_TOL = 1e-8
_MAX_CIRCLE_SAMPLES = 1 << 22


@dataclass(frozen=True)
class Zero:
    """A polished zero.

    ``residual`` is |theta(q, location)| measured relative to the largest
    series term at that point (the absolute value overflows binary64 at
    census scales).  ``annulus_k`` = 0 marks the inner disk |x| < |q|^-1/2,
    k >= 1 the annulus |q|^(-k+1/2) < |x| < |q|^(-k-1/2).
    """

    location: complex
    residual: float
    multiplicity: int
    annulus_k: int


@dataclass(frozen=True)
class ZeroSet:
    """All zeros of theta(q, .) inside a validated half-integer disk.

    The multiplicity sum always equals ``argument_count``; a mismatch raises
    during construction of the set rather than being returned.
    """

    q: QParam
    disk_radius: float
    zeros: tuple[Zero, ...]
    argument_count: int


def disk_radius(q, k: int) -> float:
    """Radius |q|^(-k-1/2) of the k-th zero-free circle."""
    qp = _as_qparam(q)
    if k < 0:
        raise DomainError("circle index k must be >= 0")
    return math.exp(-(k + 0.5) * qp.log_abs_q)


def annulus_index(q, abs_x: float) -> int:
    """Index k of the annulus containing modulus abs_x (0 = inner disk)."""
    qp = _as_qparam(q)
    if abs_x <= 0.0:
        return 0
    return max(0, math.floor(math.log(abs_x) / -qp.log_abs_q + 0.5))


def _radius_index(qp: QParam, radius: float) -> int:
    k_float = math.log(radius) / -qp.log_abs_q - 0.5
    k = round(k_float)
    if k < 0 or abs(disk_radius(qp, k) - radius) > 1e-9 * radius:
        raise DomainError(
            f"radius {radius!r} is not |q|^-(k+1/2) for any integer k >= 0; "
            "only half-integer-exponent circles are provably zero free"
        )
    return k


def taylor_coefficients(q, N: int) -> list[tuple[float, int]]:
    """Series coefficients q^(j(j+1)/2), j = 0..N, as (log magnitude, sign)."""
    qp = _as_qparam(q)
    if N < 1:
        raise DomainError("N must be >= 1")
    out = [(0.0, 1)]
    for j in range(1, N + 1):
        e = _tri(j)
        sign = 1 if qp.q > 0 or e % 2 == 0 else -1
        out.append((e * qp.log_abs_q, sign))
    return out


def count_zeros_in_circle(q, radius: float) -> int:
    """Zeros (with multiplicity) inside |x| < radius by the argument principle.

    The radius must be a half-integer-exponent circle |q|^(-k-1/2).  The
    winding number of theta around the circle is accumulated from uniformly
    sampled phases, doubling the sample count until consecutive phase jumps
    stay below pi/2.
    """
    qp = _as_qparam(q)
    k = _radius_index(qp, float(radius))
    return _winding_count(qp, k)


def _winding_count(qp: QParam, k: int) -> int:
    r = disk_radius(qp, k)
    d = _circle_coefficients(qp, r)
    m = 256
    while m < max(8 * (k + 2), 2 * len(d)):
        m <<= 1
    while m <= _MAX_CIRCLE_SAMPLES:
        values = np.fft.ifft(d, n=m) * m
        if not np.any(np.abs(values) == 0.0):
            steps = np.angle(np.roll(values, -1) / values)
            if np.max(np.abs(steps)) < 0.5 * math.pi:
                winding = float(steps.sum()) / (2.0 * math.pi)
                if abs(winding - round(winding)) < 0.01:
                    return int(round(winding))
        m <<= 1
    raise ConvergenceError(
        f"phase continuation on circle k={k} failed at maximum refinement "
        "(a zero lies too close to the circle, or precision is exhausted)"
    )


# -- real-axis bracketing ----------------------------------------------------


def _theta_scaled_real(qp: QParam, t: float) -> float:
    th, _, _ = _scaled_theta_deriv(qp, complex(t, 0.0))
    return th.real


def _bisect(qp: QParam, a: float, b: float, fa: float, fb: float) -> float:
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        fm = _theta_scaled_real(qp, mid)
        if fm == 0.0:
            return mid
        if (fa < 0) != (fm < 0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
        if abs(b - a) <= 1e-14 * (abs(a) + abs(b)):
            break
    return 0.5 * (a + b)


def _locate_single_real(qp: QParam, k: int) -> complex | None:
    """Bracket the lone real zero of an annulus with unit count, if it shows
    a sign change on one of the real segments crossing the annulus."""
    r_out = disk_radius(qp, k)
    r_in = disk_radius(qp, k - 1) if k > 0 else 0.0
    segments = [(-r_out, -r_in)]
    if qp.q < 0:
        segments.append((r_in, r_out))
    hits = []
    for a, b in segments:
        fa = _theta_scaled_real(qp, a)
        fb = _theta_scaled_real(qp, b)
        if fa == 0.0 or fb == 0.0:
            continue
        if (fa < 0) != (fb < 0):
            hits.append(_bisect(qp, a, b, fa, fb))
    if len(hits) != 1:
        return None
    return complex(hits[0], 0.0)


# -- simultaneous iteration on a series window --------------------------------


def _window_halfwidth(qp: QParam) -> int:
    # terms 60+ nats below the annulus peak cannot move roots at tolerance
    return math.ceil(math.sqrt(120.0 / -qp.log_abs_q)) + 2


def _aberth_annulus(qp: QParam, k: int, expected: int
                    ) -> list[tuple[complex, int]] | None:
    """All zeros in annulus k via Aberth iteration on the windowed series.

    Iterates live in the x plane; window values are rescaled pointwise so
    the dominant terms stay O(1).  Returns None when the iteration fails to
    deliver the expected number of annulus members.
    """
    w = _window_halfwidth(qp)
    j_lo = max(0, k - w)
    j_hi = k + w
    r_out = disk_radius(qp, k)
    r_in = disk_radius(qp, k - 1) if k > 0 else 0.0

    for rot, iters in ((0.35, 250), (0.71, 500)):
        guesses = []
        for j in range(j_lo + 1, j_hi + 1):
            mag = math.exp(-j * qp.log_abs_q)
            sign = -1.0 if (qp.q > 0 or j % 2 == 0) else 1.0
            guesses.append(sign * mag * cmath.exp(1j * rot))
        z = np.array(guesses, dtype=complex)

        # window-edge iterates never settle fully (their coefficients are cut
        # off); require tight convergence only inside the annulus band, which
        # is all that survives into the polish stage.  Near-coincident roots
        # stall at their conditioning limit, so a long stall below 1e-9 is
        # also accepted and left to the polish + residual gates.
        converged = False
        best = math.inf
        stall = 0
        for _ in range(iters):
            th, dth = _scaled_theta_many(qp, z, j_lo, j_hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = np.where(dth != 0, th / dth, 0.1 * np.abs(z))
                if j_lo:
                    newton = 1.0 / (1.0 / newton - j_lo / z)
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, np.inf)
                repulsion = (1.0 / diff).sum(axis=1)
                step = newton / (1.0 - newton * repulsion)
            step = np.where(np.isfinite(step), step, 0.0)
            z = z - step
            rel = np.abs(step) / (1.0 + np.abs(z))
            band = np.abs(z) < r_out * 1.1
            if k > 0:
                band &= np.abs(z) > r_in * 0.9
            if float(rel.max()) < 1e-8:
                cur = float(rel[band].max()) if band.any() else 0.0
                if cur < 1e-13:
                    converged = True
                    break
                if cur < 0.5 * best:
                    best, stall = cur, 0
                else:
                    stall += 1
                    if stall > 25 and cur < 1e-9:
                        converged = True
                        break
        if not converged:
            continue
        slack = 1.0 + 1e-9
        members = z[(np.abs(z) > r_in * slack) & (np.abs(z) < r_out / slack)] if k > 0 else \
            z[np.abs(z) < r_out / slack]
        clusters = _cluster(list(members))
        if sum(size for _, size in clusters) == expected:
            return clusters
    return None


def _cluster(points: list[complex]) -> list[tuple[complex, int]]:
    """Greedy clustering at relative radius CLUSTER_REL; size = multiplicity."""
    remaining = sorted(points, key=lambda p: (p.real, p.imag))
    clusters: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop()
        group = [seed]
        keep = []
        for p in remaining:
            if abs(p - seed) <= CLUSTER_REL * (1.0 + abs(seed)):
                group.append(p)
            else:
                keep.append(p)
        remaining = keep
        centroid = sum(group) / len(group)
        clusters.append((centroid, len(group)))
    return clusters


def _polish(qp: QParam, z: complex, multiplicity: int) -> tuple[complex, float]:
    """Multiplicity-aware Newton on the full certified series; returns the
    refined point and its peak-term-relative residual."""
    for _ in range(80):
        th, dth, _ = _scaled_theta_deriv(qp, z)
        if dth == 0:
            break
        step = multiplicity * th / dth
        z = z - step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    th, _, _ = _scaled_theta_deriv(qp, z)
    return z, abs(th)


def find_zeros_in_disk(q, R, eps: float = 1e-12,
                       pairing_tol: float = DEFAULT_PAIRING_TOL,
                       residual_relax: float = 1.0) -> ZeroSet:
    """All zeros of theta(q, .) with |x| < R, R = |q|^(-k-1/2).

    ``R`` may be the radius itself or the integer circle index k.  Zeros are
    located annulus by annulus, polished on the certified evaluator, forced
    into exact conjugate pairs, and cross-checked against the argument
    principle; a count mismatch raises instead of returning bad data.
    ``residual_relax`` loosens the residual gate (used near coalescence,
    where a nascent double zero conditions the polish quadratically).
    """
    qp = _as_qparam(q)
    if not eps > 0.0:
        raise DomainError("eps must be positive")
    k_out = int(R) if isinstance(R, (int, np.integer)) else _radius_index(qp, float(R))
    if k_out < 0:
        raise DomainError("disk index must be >= 0")
    radius = disk_radius(qp, k_out)

    cumulative = [_winding_count(qp, k) for k in range(k_out + 1)]
    zeros: list[Zero] = []
    previous = 0
    for k in range(k_out + 1):
        count = cumulative[k] - previous
        previous = cumulative[k]
        if count < 0:
            raise CountMismatchError(f"negative annulus count at k={k}")
        if count == 0:
            continue
        clusters = None
        if count == 1:
            single = _locate_single_real(qp, k)
            if single is not None:
                clusters = [(single, 1)]
        if clusters is None:
            clusters = _aberth_annulus(qp, k, count)
        if clusters is None:
            raise CountMismatchError(
                f"annulus k={k} holds {count} zeros but the solver could not "
                "resolve them (raise precision or adjust the disk)"
            )
        for center, mult in clusters:
            if mult > 2:
                raise CountMismatchError(
                    f"cluster of size {mult} at {center}: multiplicities above "
                    "2 never occur and signal a solver failure"
                )
            z, res = _polish(qp, center, mult)
            tol = RESIDUAL_REL * residual_relax * (1e3 if mult > 1 else 1.0)
            if res > tol:
                raise ConvergenceError(
                    f"zero near {z} polished to residual {res:.2e} > {tol:.2e}"
                )
            k_actual = annulus_index(qp, abs(z))
            if k_actual != k:
                raise CountMismatchError(
                    f"zero {z} drifted from annulus {k} to {k_actual} during polish"
                )
            zeros.append(Zero(z, res, mult, k))

    total = sum(z.multiplicity for z in zeros)
    if total != cumulative[k_out]:
        raise CountMismatchError(
            f"located multiplicity total {total} != argument principle count "
            f"{cumulative[k_out]}"
        )
    zeros = _symmetrize(zeros, pairing_tol)
    zeros.sort(key=lambda z: (z.annulus_k, z.location.real, z.location.imag))
    return ZeroSet(qp, radius, tuple(zeros), cumulative[k_out])


def _symmetrize(zeros: list[Zero], pairing_tol: float) -> list[Zero]:
    """Snap near-real zeros onto the axis and force conjugate pairs to be
    exact mirror images; an unpaired non-real zero is a hard failure."""
    out: list[Zero] = []
    uppers: list[Zero] = []
    lowers: list[Zero] = []
    for z in zeros:
        if abs(z.location.imag) <= pairing_tol * (1.0 + abs(z.location)):
            out.append(Zero(complex(z.location.real, 0.0), z.residual,
                            z.multiplicity, z.annulus_k))
        elif z.location.imag > 0:
            uppers.append(z)
        else:
            lowers.append(z)
    for up in uppers:
        match = None
        for low in lowers:
            if abs(up.location.conjugate() - low.location) <= \
                    pairing_tol * (1.0 + abs(up.location)):
                match = low
                break
        if match is None or match.multiplicity != up.multiplicity:
            raise CountMismatchError(
                f"unpaired non-real zero {up.location} (real coefficients force "
                "conjugate symmetry; this signals a numerical failure upstream)"
            )
        lowers.remove(match)
        mean = 0.5 * (up.location + match.location.conjugate())
        out.append(Zero(mean, up.residual, up.multiplicity, up.annulus_k))
        out.append(Zero(mean.conjugate(), match.residual, match.multiplicity,
                        match.annulus_k))
    if lowers:
        raise CountMismatchError(
            f"unpaired non-real zero {lowers[0].location} in the lower half plane"
        )
    return out


def classify_zeros(zs: ZeroSet, pairing_tol: float = DEFAULT_PAIRING_TOL
                   ) -> tuple[list[Zero], list[tuple[Zero, Zero]]]:
    """Partition a validated ZeroSet into real zeros and conjugate pairs.

    Returns (real_zeros, pairs) with each pair ordered (upper, lower); every
    zero lands in exactly one class.
    """
    reals: list[Zero] = []
    uppers: list[Zero] = []
    lowers: dict[int, Zero] = {}
    for z in zs.zeros:
        if abs(z.location.imag) <= pairing_tol * (1.0 + abs(z.location)):
            if z.location.imag != 0.0:
                z = Zero(complex(z.location.real, 0.0), z.residual,
                         z.multiplicity, z.annulus_k)
            reals.append(z)
        elif z.location.imag > 0:
            uppers.append(z)
        else:
            lowers[id(z)] = z
    pairs: list[tuple[Zero, Zero]] = []
    for up in uppers:
        match_id = None
        for key, low in lowers.items():
            if abs(up.location.conjugate() - low.location) <= \
                    pairing_tol * (1.0 + abs(up.location)):
                match_id = key
                break
        if match_id is None:
            raise CountMismatchError(f"unpaired non-real zero {up.location}")
        pairs.append((up, lowers.pop(match_id)))
    if lowers:
        raise CountMismatchError("unpaired zeros remain in the lower half plane")
    return reals, pairs

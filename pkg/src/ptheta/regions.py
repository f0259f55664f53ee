"""Empirical containment harness for the conjugate-pair regions.

For positive bases every conjugate pair must land in the union of the open
rectangle Re x in (-5792.7, 0), |Im x| < 132 with the open disk |x| < 18; for
negative bases in the open rectangle |Re x| < 364.2, |Im x| < 132.  The
harness sweeps a base grid, computes every zero inside a census disk that
strictly contains the claimed region, and reports each violation rather than
asserting a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .evaluate import _as_qparam
from .spectrum import census_disk_index
from .zeros import classify_zeros, find_zeros_in_disk

POS_RECT_RE_MIN = -5792.7
POS_SMALL_DISK = 18.0
NEG_RECT_RE_MAX = 364.2
STRIP_IM_MAX = 132.0

GRAZE_REL = 1e-6
_CENSUS_FACTOR = 1.2


@dataclass(frozen=True)
class RegionSpec:
    """Primitive-region union for one sign of the base.

    Components are ('rect', re_min, re_max, im_max) and ('disk', radius),
    all open sets.
    """

    kind: str
    components: tuple[tuple, ...]

    def membership(self, z: complex, graze_tol: float | None = None) -> str:
        """'inside', 'outside', or 'boundary' (within the grazing tolerance
        of an edge, where open-set membership is not numerically decidable)."""
        tol = GRAZE_REL * (1.0 + abs(z)) if graze_tol is None else graze_tol
        best = -math.inf
        for comp in self.components:
            if comp[0] == "rect":
                _, re_min, re_max, im_max = comp
                margin = min(z.real - re_min, re_max - z.real,
                             im_max - abs(z.imag))
            else:
                margin = comp[1] - abs(z)
            best = max(best, margin)
        if best > tol:
            return "inside"
        if best < -tol:
            return "outside"
        return "boundary"

    def inward_margin(self, z: complex) -> float:
        """Signed distance-like margin, positive strictly inside."""
        best = -math.inf
        for comp in self.components:
            if comp[0] == "rect":
                _, re_min, re_max, im_max = comp
                margin = min(z.real - re_min, re_max - z.real,
                             im_max - abs(z.imag))
            else:
                margin = comp[1] - abs(z)
            best = max(best, margin)
        return best


def theorem_region(kind: str) -> RegionSpec:
    """The claimed conjugate-pair region for the given base sign."""
    if kind == "positive_q":
        return RegionSpec(kind, (
            ("rect", POS_RECT_RE_MIN, 0.0, STRIP_IM_MAX),
            ("disk", POS_SMALL_DISK),
        ))
    if kind == "negative_q":
        return RegionSpec(kind, (
            ("rect", -NEG_RECT_RE_MAX, NEG_RECT_RE_MAX, STRIP_IM_MAX),
        ))
    raise DomainError(f"unknown region kind {kind!r}")


@dataclass(frozen=True)
class RegionReport:
    """Outcome of a containment sweep.

    ``violations`` holds (q, zero location, reason) triples; boundary-grazing
    zeros are listed separately and do not fail the sweep.  Zero-finder
    failures at individual grid points are recorded in ``errors`` and fail
    the sweep, never swallowed.
    """

    kind: str
    q_grid: tuple[float, ...]
    total_ccps: int
    violations: tuple[tuple[float, complex, str], ...]
    grazing: tuple[tuple[float, complex], ...]
    errors: tuple[tuple[float, str], ...]
    max_re_magnitude_seen: float
    max_im_seen: float
    passed: bool


def _census_index(qp, kind: str) -> int:
    if kind == "positive_q":
        threshold = max(6000.0, math.hypot(POS_RECT_RE_MIN, STRIP_IM_MAX)) * _CENSUS_FACTOR
    else:
        threshold = 440.0
    return census_disk_index(qp, min_radius=threshold)


def verify_containment(kind: str, q_grid, disk_k_margin: int = 0) -> RegionReport:
    """Sweep the grid, census all zeros, and test every pair for membership.

    Also checks the global facts that hold for all zeros (not only pairs):
    for q > 0 a zero has Re < 0 with |Im| < 132, or lies in |x| < 18; for
    q < 0 every zero satisfies |Im| < 132.
    """
    region = theorem_region(kind)
    want_positive = kind == "positive_q"
    violations: list[tuple[float, complex, str]] = []
    grazing: list[tuple[float, complex]] = []
    errors: list[tuple[float, str]] = []
    total = 0
    max_re = 0.0
    max_im = 0.0

    grid = tuple(float(q) for q in q_grid)
    for qv in grid:
        qp = _as_qparam(qv)
        if (qp.q > 0) != want_positive:
            raise DomainError(f"grid point {qv} does not match region {kind!r}")
        try:
            zs = find_zeros_in_disk(qp, _census_index(qp, kind) + disk_k_margin)
            reals, pairs = classify_zeros(zs)
        except Exception as exc:  # noqa: BLE001 - recorded, never swallowed
            errors.append((qv, f"{type(exc).__name__}: {exc}"))
            continue

        for up, low in pairs:
            total += up.multiplicity
            for z in (up.location, low.location):
                max_re = max(max_re, abs(z.real))
                max_im = max(max_im, abs(z.imag))
            verdict = region.membership(up.location)
            if verdict == "outside":
                violations.append((qv, up.location, "pair outside region"))
            elif verdict == "boundary":
                grazing.append((qv, up.location))

        for z in [r.location for r in reals] + \
                 [w.location for pr in pairs for w in pr]:
            if want_positive:
                in_left = z.real < 0 and abs(z.imag) < STRIP_IM_MAX
                in_disk = abs(z) < POS_SMALL_DISK
                if not (in_left or in_disk):
                    violations.append((qv, z, "zero outside the half-plane/disk fact"))
            else:
                if abs(z.imag) >= STRIP_IM_MAX:
                    violations.append((qv, z, "zero outside the horizontal strip"))

    passed = not violations and not errors
    return RegionReport(kind, grid, total, tuple(violations), tuple(grazing),
                        tuple(errors), max_re, max_im, passed)

"""Numerical replay of the zero-free-line machinery and its constant chains.

On the vertical line Re x = -|q|^(-nu-1/2) the triple product dominates the
tail, |Theta| > |G|, so theta cannot vanish there.  This module evaluates the
two sides with margins, replays the inequality chains that certify the
domination uniformly over the nested parameter intervals, and reproduces the
explicit sequences (gamma_n, b_n) used to march the lines across the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PrecisionBudgetError
from .evaluate import (
    FIRST_POSITIVE_SPECTRAL_Q,
    QParam,
    _as_qparam,
    _theta_star_log_abs,
    g_bound,
    theta_star,
)

ALPHA0 = math.sqrt(3.0) / (2.0 * math.pi)

# Reference floor constants of the n = 1 domination chain (the products at
# q = 1/2 truncated to their leading printed digits, as used in the chain
# arithmetic itself).
N1_FLOORS = {
    "Q": 0.288,
    "P_flat": 36.3,
    "P_dagger": 0.129,
    "product": 4.68,
    "theta_star": 0.388,
    "g": 0.046,
}

_DEFAULT_IM_RANGE = 200.0
_DEFAULT_SAMPLES = 256


def ell(n: int, regime: str = "positive") -> int:
    """Smallest admissible line exponent for interval index n."""
    if n < 1:
        raise DomainError("interval index n must be >= 1")
    if regime == "positive":
        return 4 if n == 1 else 4 * (n + 1)
    if regime == "negative":
        return 4 * (n + 1)
    raise DomainError(f"unknown regime {regime!r}")


def line_abscissa(q, nu: int) -> float:
    """Abscissa -|q|^(-nu-1/2) of the nu-th zero-free line."""
    qp = _as_qparam(q)
    if nu < 1:
        raise DomainError("line index nu must be >= 1")
    log_a = (nu + 0.5) * -qp.log_abs_q
    if log_a > 700.0:
        raise PrecisionBudgetError(f"line abscissa overflows for nu={nu}, q={qp.q}")
    return -math.exp(log_a)


@dataclass(frozen=True)
class LineSpec:
    """One vertical test line for a given base.

    side='left' places the line at Re x = -|q|^(-nu-1/2); side='right'
    (negative bases only) mirrors it to +|q|^(-nu-1/2).
    """

    q: QParam
    nu: int
    side: str
    abscissa: float = field(init=False)

    def __init__(self, q, nu: int, side: str = "left"):
        qp = _as_qparam(q)
        if side not in ("left", "right"):
            raise DomainError(f"unknown side {side!r}")
        if side == "right" and qp.q > 0:
            raise DomainError("right-hand lines exist only for negative bases")
        if nu < ell(qp.n, qp.regime):
            raise DomainError(
                f"nu = {nu} is below the admissible minimum "
                f"{ell(qp.n, qp.regime)} for interval index {qp.n}"
            )
        object.__setattr__(self, "q", qp)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "side", side)
        a = line_abscissa(qp, nu)
        object.__setattr__(self, "abscissa", -a if side == "right" else a)


@dataclass(frozen=True)
class LineCheckReport:
    """Margins of |Theta| over the tail majorant along one line.

    ``cross_sign_margin`` (negative bases only) is the excess of |Theta| at
    the line's axis point over its positive-base counterpart at the mirrored
    abscissa.
    """

    spec: LineSpec
    theta_star_at_axis: float
    g_bound_at_axis: float
    margin: float
    sampled_min_gap: float
    passed: bool
    cross_sign_margin: float | None = None


def check_line(spec: LineSpec, im_range: float = _DEFAULT_IM_RANGE,
               samples: int = _DEFAULT_SAMPLES) -> LineCheckReport:
    """Compare |Theta| against the tail majorant pointwise along the line.

    Sampling is geometric in Im x (densest near the axis, where |Theta| is
    smallest).  For negative bases the report also carries the cross-sign
    domination margin against the positive base at the matched abscissa.
    """
    if samples < 64:
        raise DomainError("need at least 64 samples per line")
    a = spec.abscissa
    half = samples // 2
    t = np.geomspace(1e-3, im_range, half)
    ts = np.concatenate([-t[::-1], [0.0], t])
    xs = a + 1j * ts

    log_abs = _theta_star_log_abs(spec.q, xs)
    majorant = 1.0 / (np.hypot(a, ts) - 1.0)
    gaps = np.exp(np.minimum(log_abs, 700.0)) - majorant
    sampled_min_gap = float(gaps.min())

    axis_out, _ = theta_star(spec.q, complex(a, 0.0))
    axis_abs = abs(axis_out.value)
    gb = g_bound(complex(a, 0.0))
    margin = axis_abs - gb

    cross = None
    if spec.q.q < 0:
        mirrored, _ = theta_star(QParam(spec.q.abs_q), complex(-abs(a), 0.0))
        cross = axis_abs - abs(mirrored.value)

    passed = margin > 0.0 and sampled_min_gap > 0.0 and (cross is None or cross > 0.0)
    return LineCheckReport(spec, axis_abs, gb, margin, sampled_min_gap, passed, cross)


# -- domination chains --------------------------------------------------------


@dataclass(frozen=True)
class ChainLink:
    """One asserted inequality lhs > rhs inside a chain."""

    name: str
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class Lemma1Report:
    """Replay of the uniform domination chain on interval index n.

    For n = 1 the chain runs through the explicit products at q = 1/2; for
    n >= 2 it runs at the worst-case corner q = 1 - 1/(n+1), nu = 4(n+1).
    ``theta_star_actual`` is the directly evaluated |Theta| at the corner and
    must exceed ``theta_star_lower``, the chained analytic floor.
    """

    n: int
    Q_lower: float
    P_dagger: float
    P_flat_or_sharp: float
    theta_star_lower: float
    g_upper: float
    theta_star_actual: float
    chain_values: tuple[ChainLink, ...]
    passed: bool


def _partial_products(qc: float, nu: int) -> tuple[float, float]:
    """(P_sharp, P_dagger) at base qc: the finite product over half-integer
    exponents 1/2 .. nu - 1/2 and its infinite extension."""
    p_sharp = 1.0
    for m in range(1, nu + 1):
        p_sharp *= 1.0 - qc ** (nu + 0.5 - m)
    p_dagger = p_sharp
    t = nu + 0.5
    while qc ** t > 1e-20:
        p_dagger *= 1.0 - qc ** t
        t += 1.0
    return p_sharp, p_dagger


def lemma1_chain(n: int) -> Lemma1Report:
    """Replay every inequality certifying |Theta| > |G| on interval index n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    links: list[ChainLink] = []

    def link(name: str, lhs: float, rhs: float) -> None:
        links.append(ChainLink(name, float(lhs), float(rhs), bool(lhs > rhs)))

    if n == 1:
        qc, nu = 0.5, 4
        axis = line_abscissa(qc, nu)
        out, factors = theta_star(qc, complex(axis, 0.0))
        q_val = factors.Q_val
        r_val = factors.R_val.real
        p_val = factors.P_val.real

        p_flat = 1.0
        for t in (3.5, 2.5, 1.5, 0.5):
            p_flat *= 1.0 - qc ** (-t)
        _, p_dagger = _partial_products(qc, nu)

        link("Q(1/2) >= 0.288", q_val, N1_FLOORS["Q"])
        link("R > Q on the axis", r_val, q_val)
        link("P_axis >= P_flat * P_dagger", p_val,
             p_flat * p_dagger * (1.0 - 1e-12))
        link("P_flat >= 36.3", p_flat, N1_FLOORS["P_flat"])
        link("P_dagger >= 0.129", p_dagger, N1_FLOORS["P_dagger"])

        product_floor = N1_FLOORS["P_flat"] * N1_FLOORS["P_dagger"]
        link("P_flat * P_dagger > 4.68", p_flat * p_dagger, product_floor)
        theta_floor = product_floor * N1_FLOORS["Q"] ** 2
        actual = abs(out.value)
        link("|Theta| > 4.68 * 0.288^2", actual, theta_floor)

        g_up = 1.0 / (-axis - 1.0)
        # the majorant over the whole interval peaks at q = 1/2, nu = 4
        qs = np.linspace(FIRST_POSITIVE_SPECTRAL_Q, 0.5, 20)
        worst = max(1.0 / (-line_abscissa(qv, v) - 1.0)
                    for qv in qs for v in range(4, 9))
        link("tail majorant peaks at the corner", g_up * (1.0 + 1e-12), worst)
        link("g < theta lower bound", theta_floor, g_up)

        return Lemma1Report(
            n=1, Q_lower=q_val, P_dagger=p_dagger, P_flat_or_sharp=p_flat,
            theta_star_lower=theta_floor, g_upper=g_up, theta_star_actual=actual,
            chain_values=tuple(links), passed=all(l.holds for l in links),
        )

    qc = 1.0 - 1.0 / (n + 1)
    nu = 4 * (n + 1)
    axis = line_abscissa(qc, nu)
    out, factors = theta_star(qc, complex(axis, 0.0))
    q_val = factors.Q_val
    r_val = factors.R_val.real
    actual = abs(out.value)

    q_floor = math.exp(-(math.pi ** 2 / 6.0) * n)
    link("Q >= exp(-(pi^2/6) n)", q_val, q_floor * (1.0 - 1e-12))
    link("R > Q on the axis", r_val, q_val)

    p_sharp, p_dagger = _partial_products(qc, nu)
    link("P_sharp > P_dagger", p_sharp, p_dagger)
    link("P_dagger > (1 - sqrt(q)) Q", p_dagger, (1.0 - math.sqrt(qc)) * q_val)

    pow_log = (nu ** 2 / 2.0) * -math.log(qc)
    power = math.exp(pow_log)
    f_star = (1.0 - 1.0 / (n + 1)) ** (-(n + 1))
    ident = (8 * (n + 1)) * math.log(f_star)
    link("q^(-nu^2/2) = f*(n+1)^(8(n+1))  [identity, as >= with slack]",
         pow_log * (1.0 + 1e-12), ident * (1.0 - 1e-12))
    link("f*(n+1)^(8(n+1)) > e^(8(n+1))", ident, 8.0 * (n + 1))

    tau = (1.0 - math.sqrt(qc)) ** 2
    link("tau > 1/(4(n+1)^2)", tau, 1.0 / (4.0 * (n + 1) ** 2))

    # |P| = q^(-nu^2/2) P_sharp P_dagger > q^(-nu^2/2) P_dagger^2
    p_abs = abs(factors.P_val)
    link("|P_axis| >= q^(-nu^2/2) P_sharp P_dagger", p_abs,
         power * p_sharp * p_dagger * (1.0 - 1e-10))
    link("|Theta| > Q^2 |P|", actual, q_val ** 2 * p_abs * (1.0 - 1e-10))
    link("Q^2 |P| > Q^4 tau q^(-nu^2/2)",
         q_val ** 2 * power * p_dagger ** 2, q_val ** 4 * tau * power)

    e_chain = math.exp((8.0 - 2.0 * math.pi ** 2 / 3.0) * n + 8.0) * tau
    link("Q^4 tau q^(-nu^2/2) > e^((8-2pi^2/3)n+8) tau",
         q_val ** 4 * tau * power, e_chain * (1.0 - 1e-12))
    theta_floor = math.exp(n + 8.0) / (4.0 * (n + 1) ** 2)
    link("e-chain > e^(n+8)/(4(n+1)^2)", e_chain, theta_floor)
    link("|Theta| > chained floor", actual, theta_floor)

    g_actual = 1.0 / (-axis - 1.0)
    g_corner = 1.0 / (qc ** (-4.0 * (n + 1) - 0.5) - 1.0)
    g_e4 = 1.0 / (math.exp(4.0) / math.sqrt(qc) - 1.0)
    g_up = 1.0 / (math.exp(4.0) - 1.0)
    link("g(axis) <= corner bound", g_corner * (1.0 + 1e-12), g_actual)
    link("corner bound <= e^4 bound", g_e4 * (1.0 + 1e-12), g_corner)
    link("e^4 bound <= 1/(e^4 - 1)", g_up * (1.0 + 1e-12), g_e4)
    link("g upper < theta floor", theta_floor, g_up)

    return Lemma1Report(
        n=n, Q_lower=q_floor, P_dagger=p_dagger, P_flat_or_sharp=p_sharp,
        theta_star_lower=theta_floor, g_upper=g_up, theta_star_actual=actual,
        chain_values=tuple(links), passed=all(l.holds for l in links),
    )


# -- explicit sequences --------------------------------------------------------


def gamma_n(n: int) -> float:
    """Modulus envelope (1 - 1/(alpha0 (n-1)))^(-n+1/2) for double zeros."""
    if n < 6:
        raise DomainError("gamma_n needs n >= 6 (the base must lie in (0, 1))")
    base = 1.0 - 1.0 / (ALPHA0 * (n - 1))
    return base ** (-n + 0.5)


def gamma_is_decreasing(n_hi: int = 30) -> bool:
    values = [gamma_n(n) for n in range(6, n_hi + 1)]
    return all(a > b for a, b in zip(values, values[1:]))


def b_n(n: int) -> float:
    """Corner abscissa -(1 - 1/n)^(-4(n+1)-1/2) of the marching lines."""
    if n < 2:
        raise DomainError("b_n needs n >= 2")
    return -((1.0 - 1.0 / n) ** (-4.0 * (n + 1) - 0.5))


def b_is_increasing(n_hi: int = 30) -> bool:
    values = [b_n(n) for n in range(2, n_hi + 1)]
    return all(a < b for a, b in zip(values, values[1:]))


# -- negative-base factor comparison ------------------------------------------


@dataclass(frozen=True)
class FactorComparison:
    """Matched triple-product factors at +/- base, same line modulus.

    Case A is the positive base q* on its left line; case B is the base -q*
    on the requested side.  The moduli in case B dominate factorwise, with
    equality exactly on the parity branch recorded per factor.
    """

    q_star: float
    nu: int
    m: int
    x_sign: int
    mu_a: float
    mu_b: float
    re_lambda_a: float
    re_lambda_b: float
    re_chi_a: float
    re_chi_b: float
    mu_equal: bool
    lambda_equal: bool
    chi_equal: bool
    passed: bool


def factor_comparison(q_star: float, nu: int, m: int, x_sign: int
                      ) -> FactorComparison:
    """Compare the m-th factors mu = 1 - q^m, lambda = 1 + x q^m and
    chi = 1 + q^(m-1)/x across the sign flip of the base."""
    if not 0.0 < q_star < 1.0:
        raise DomainError("q_star must lie in (0, 1)")
    if nu < 1 or m < 1:
        raise DomainError("nu and m must be >= 1")
    if x_sign not in (1, -1):
        raise DomainError("x_sign must be +1 or -1")

    y_lambda = q_star ** (-(nu + 0.5) + m)
    y_chi = q_star ** (nu + m - 0.5)

    mu_a = 1.0 - q_star ** m
    mu_b = 1.0 - (-1.0) ** m * q_star ** m
    re_lambda_a = 1.0 - y_lambda
    re_lambda_b = 1.0 + x_sign * (-1.0) ** m * y_lambda
    re_chi_a = 1.0 - y_chi
    re_chi_b = 1.0 + x_sign * (-1.0) ** (m - 1) * y_chi

    mu_equal = m % 2 == 0
    lambda_equal = x_sign * (-1.0) ** m == -1.0
    chi_equal = x_sign * (-1.0) ** (m - 1) == -1.0

    def branch_ok(b: float, a: float, equal: bool, y: float) -> bool:
        if abs(b) < abs(a) - 1e-15:
            return False
        if y <= 1e-15:
            # 1 +/- y rounds to 1; the two branches are indistinguishable
            return True
        return (abs(b) == abs(a)) == equal

    ok = (
        branch_ok(mu_b, mu_a, mu_equal, q_star ** m)
        and branch_ok(re_lambda_b, re_lambda_a, lambda_equal, y_lambda)
        and branch_ok(re_chi_b, re_chi_a, chi_equal, y_chi)
    )
    return FactorComparison(
        q_star, nu, m, x_sign, mu_a, mu_b, re_lambda_a, re_lambda_b,
        re_chi_a, re_chi_b, mu_equal, lambda_equal, chi_equal, ok,
    )

"""Closed-form limit prediction for series iteration on a group simplex.

The pipeline for a series p and a starting point x:

1. reduce x along x -> x * c_x until the return time is stable; call the
   stabilized point y and let m be its period.
2. solve the same series on the cyclic quotient Z_m, where the limit
   coefficient at residue r is exactly the scalar limit
   L_r = lim_n sum_k a^[n]_{k m + r}.
3. pull the quotient answer back to the group:
   c_y * sum_r y^r L_r + (e - c_y) * a.

The last term vanishes identically when c_y is the point mass at the
identity, so one formula covers both branches.  Divergence is decided by
the exact coset criterion on the quotient, never by failed numerics; a
float-iteration oracle is provided separately for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import algebra
from .algebra import ApproxElement, SimplexPoint, element_to_map
from .dynamics import AccumulationSet, DynamicsProfile, profile, reduce_to_stable
from .errors import InternalConsistencyError, PurePowerError
from .modm import (ModMReport, extinction_fraction, regularity_mod_m,
                   residue_cycle)
from .series import ProbPoly

ITERATION_SLACK_RATE = 1e-12
REGULAR_HORIZON = 500
CESARO_HORIZON = 2000
SCALAR_SUM_TOL = 1e-10


@dataclass(frozen=True)
class LimitReport:
    """Everything the closed forms say about lim p^[n](x).

    scalar_limits holds the per-residue mass limits L_0 .. L_{m-1} (the
    Cesaro versions for a Cesaro report); they are present only when the
    reported limit exists.
    """

    digest: dict
    profile: DynamicsProfile
    reduction_steps: int
    exists: bool
    limit: SimplexPoint | None
    accumulation: AccumulationSet
    cesaro: SimplexPoint
    a: float
    scalar_limits: tuple[float, ...] | None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.exists != (self.limit is not None):
            raise ValueError("limit must be present exactly when exists is true")
        if self.scalar_limits is not None:
            total = sum(self.scalar_limits)
            if abs(total - 1.0) > SCALAR_SUM_TOL:
                raise ValueError(f"scalar limits sum to {total}, not 1")


def _digest(series_label: str, x: SimplexPoint) -> dict:
    return {
        "group_order": x.group.order,
        "element": element_to_map(x),
        "series": series_label,
    }


def _series_label(p: ProbPoly) -> str:
    return str(p)


def _synthesize(y: SimplexPoint, prof: DynamicsProfile,
                quotient_coeffs, a: Fraction) -> SimplexPoint:
    """c_y * sum_r y^r * L_r + (e - c_y) * a with exact arithmetic.

    quotient_coeffs lists L_0 .. L_{m-1}; the subtracted mass a / |G_y|
    stays below the r = 0 contribution because a > 0 forces the quotient
    point to carry at least mass a at residue 0.
    """
    group = y.group
    m = prof.period
    if len(quotient_coeffs) != m:
        raise InternalConsistencyError(
            f"quotient point has {len(quotient_coeffs)} coefficients, expected {m}")
    coeffs = [Fraction(0)] * group.order
    cur = prof.idempotent
    for r in range(m):
        L = Fraction(quotient_coeffs[r])
        if L:
            for g, c in enumerate(cur.coeffs):
                if c:
                    coeffs[g] += L * c
        if r + 1 < m:
            cur = algebra.multiply(cur, y)
    if a:
        size = len(prof.support_group)
        coeffs[group.identity] += a
        for g in prof.support_group.members:
            coeffs[g] -= a / size
    try:
        return SimplexPoint(group=group, coeffs=tuple(coeffs))
    except ValueError as exc:
        raise InternalConsistencyError(
            f"synthesized limit left the simplex: {exc}") from exc


def _stabilized(p: ProbPoly, x: SimplexPoint):
    if p.is_pure_power:
        raise PurePowerError(
            "pure powers t^r follow the support rotation alone; "
            "use pure_power_report")
    y, steps = reduce_to_stable(x)
    prof = profile(y)
    rep = regularity_mod_m(p, prof.period)
    return y, steps, prof, rep


def _diagnostics(rep: ModMReport, horizon: int) -> dict:
    return {
        "quotient_modulus": rep.m,
        "cycle_preperiod": rep.cycle.preperiod,
        "cycle_d": rep.cycle.d,
        "cycle_residues": list(rep.cycle.residues),
        "extinction_value": rep.a,
        "oracle_horizon": horizon,
    }


def regular_limit(p: ProbPoly, x: SimplexPoint) -> LimitReport:
    """Decide lim_n p^[n](x) and produce its closed form when it exists.

    The verdict comes from the exact coset criterion on the cyclic
    quotient of the stabilized point; the accumulation set lists the
    distinct subsequential limits either way.
    """
    y, steps, prof, rep = _stabilized(p, x)
    a = extinction_fraction(p)
    points = tuple(_synthesize(y, prof, pt.coeffs, a)
                   for pt in rep.accumulation.points)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points[i].coeffs == points[j].coeffs:
                raise InternalConsistencyError(
                    "distinct quotient limits collapsed under synthesis")
    limit = _synthesize(y, prof, rep.limit.coeffs, a) if rep.exists else None
    cesaro = _synthesize(y, prof, rep.cesaro.coeffs, a)
    scalar = tuple(float(c) for c in rep.limit.coeffs) if rep.exists else None
    return LimitReport(
        digest=_digest(_series_label(p), x),
        profile=prof,
        reduction_steps=steps,
        exists=rep.exists,
        limit=limit,
        accumulation=AccumulationSet(points=points, source="closed_form"),
        cesaro=cesaro,
        a=rep.a,
        scalar_limits=scalar,
        diagnostics=_diagnostics(rep, REGULAR_HORIZON),
    )


def cesaro_limit(p: ProbPoly, x: SimplexPoint) -> LimitReport:
    """Cesaro limit of p^[n](x); exists for every series and every x."""
    y, steps, prof, rep = _stabilized(p, x)
    a = extinction_fraction(p)
    cesaro = _synthesize(y, prof, rep.cesaro.coeffs, a)
    return LimitReport(
        digest=_digest(_series_label(p), x),
        profile=prof,
        reduction_steps=steps,
        exists=True,
        limit=cesaro,
        accumulation=AccumulationSet(points=(cesaro,), source="closed_form"),
        cesaro=cesaro,
        a=rep.a,
        scalar_limits=tuple(float(c) for c in rep.cesaro.coeffs),
        diagnostics=_diagnostics(rep, CESARO_HORIZON),
    )


def pure_power_report(r: int, x: SimplexPoint) -> LimitReport:
    """Accumulation set of x^(r^n): {c_x * x^(m_i)} over the cycle of
    r^n mod m_x, with the divisibility test for it being a singleton.

    The singleton criterion (m_x divides r^k (r - 1) for some k <= m_x)
    is evaluated independently and must agree with d = 1.
    """
    if r < 2:
        raise ValueError(f"pure-power exponent must be >= 2, got {r}")
    prof = profile(x)
    m = prof.period
    cycle = residue_cycle(r, m)
    xpow = [None] * m
    cur = algebra.delta(x.group, x.group.identity)
    for k in range(m):
        xpow[k] = cur
        if k + 1 < m:
            cur = algebra.multiply(cur, x)
    points = tuple(algebra.multiply(prof.idempotent, xpow[res])
                   for res in cycle.residues)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points[i].coeffs == points[j].coeffs:
                raise InternalConsistencyError(
                    "powers at distinct cycle residues must stay distinct")
    divisible = any(r ** k * (r - 1) % m == 0 for k in range(m + 1))
    if divisible != (cycle.d == 1):
        raise InternalConsistencyError(
            f"divisibility test ({divisible}) disagrees with cycle length "
            f"d={cycle.d} for r={r}, m={m}")
    d = cycle.d
    coeffs = [sum(pt.coeffs[g] for pt in points) / d
              for g in range(x.group.order)]
    cesaro = SimplexPoint(group=x.group, coeffs=tuple(coeffs))
    exists = d == 1
    return LimitReport(
        digest=_digest(f"pure-power:{r}", x),
        profile=prof,
        reduction_steps=0,
        exists=exists,
        limit=points[0] if exists else None,
        accumulation=AccumulationSet(points=points, source="closed_form"),
        cesaro=cesaro,
        a=0.0,
        scalar_limits=None,
        diagnostics={
            "cycle_preperiod": cycle.preperiod,
            "cycle_d": d,
            "cycle_residues": list(cycle.residues),
            "divisibility_singleton": divisible,
        },
    )


def iterate_map(p: ProbPoly, x: SimplexPoint, n: int) -> list[ApproxElement]:
    """Float oracle trace p^[1](x) .. p^[n](x); accepts pure powers too."""
    terms = [(e, float(c)) for e, c in p.terms]
    return algebra.series_trace(x.group, terms, algebra.float_coeffs(x), n,
                                slack_rate=ITERATION_SLACK_RATE)


def empirical_cesaro(p: ProbPoly, x: SimplexPoint, n: int,
                     burn_in: int = 0) -> ApproxElement:
    """Average of the oracle trace over steps burn_in+1 .. n.

    A burn-in window discards the transient; choosing the window length
    as a multiple of the cycle length d balances the subsequence classes
    exactly, which the plain from-the-start average cannot do at any
    horizon reachable in tests.
    """
    if not 0 <= burn_in < n:
        raise ValueError(f"need 0 <= burn_in < n, got {burn_in}, {n}")
    trace = iterate_map(p, x, n)
    window = np.mean([t.coeffs for t in trace[burn_in:]], axis=0)
    return ApproxElement(group=x.group, coeffs=window,
                         slack=ITERATION_SLACK_RATE * n)

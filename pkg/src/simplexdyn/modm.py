"""Series iteration on a cyclic quotient: p^[n] evaluated in R[Z_m].

Identifying t^k with t^(k mod m) turns iterated composition into a
dynamical system on the simplex of Z_m.  Its limit behaviour is decided
by two pieces of integer data: the subgroup of Z_m generated by the
offsets of p, and the eventual cycle of r^n mod m where r is the minimal
exponent of p.  The limit (when the coset criterion grants one) and the
Cesaro average both have closed forms built from the uniform measure on
that subgroup; a direct float iteration is kept alongside as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import algebra
from .algebra import ApproxElement, SimplexPoint
from .dynamics import AccumulationSet
from .errors import InternalConsistencyError, PurePowerError
from .groups import ElementSet, FiniteGroup, generated_subgroup, make_cyclic
from .series import ProbPoly, extinction_value

ITERATION_SLACK_RATE = 1e-12
EXTINCTION_SNAP_DENOMINATOR = 10 ** 6


@dataclass(frozen=True)
class ResidueCycle:
    """Eventual cycle of the sequence r^n mod m, n counted from 1.

    residues[i] is r^(preperiod+1+i) mod m, the cycle in order of first
    appearance; a trace index n > preperiod belongs to class
    (n - preperiod - 1) mod d.
    """

    modulus: int
    base: int
    preperiod: int
    residues: tuple[int, ...]

    def __post_init__(self) -> None:
        m, r = self.modulus, self.base
        if m < 1:
            raise ValueError("modulus must be >= 1")
        if r < 0 or self.preperiod < 0 or not self.residues:
            raise ValueError("malformed residue cycle")
        if len(set(self.residues)) != len(self.residues):
            raise ValueError("cycle residues must be pairwise distinct")
        d = len(self.residues)
        for i, res in enumerate(self.residues):
            n = self.preperiod + 1 + i
            if pow(r, n, m) != res or pow(r, n + d, m) != res:
                raise ValueError(f"residue {res} at slot {i} breaks the cycle")
        if self.preperiod and pow(r, self.preperiod, m) == pow(r, self.preperiod + d, m):
            raise ValueError("preperiod is not minimal")

    @property
    def d(self) -> int:
        return len(self.residues)

    def class_of(self, n: int) -> int:
        """Cycle slot of trace index n (n > preperiod)."""
        if n <= self.preperiod:
            raise ValueError(f"index {n} precedes the cycle")
        return (n - self.preperiod - 1) % self.d


def residue_cycle(r: int, m: int) -> ResidueCycle:
    """Detect the eventual cycle of r^n mod m by first-repeat search."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    if r < 0:
        raise ValueError("base must be >= 0")
    seen: dict[int, int] = {}
    seq = []
    value = r % m
    while value not in seen:
        seen[value] = len(seq)
        seq.append(value)
        value = (value * r) % m
    start = seen[value]
    return ResidueCycle(modulus=m, base=r, preperiod=start,
                        residues=tuple(seq[start:]))


def series_group(p: ProbPoly, m: int) -> ElementSet:
    """Subgroup of Z_m generated by the offsets of p.

    Equals the multiples of gcd(q_1, ..., q_{l-1}, m); cross-checked
    against breadth-first closure seeded with every offset (the zero
    offset alone would only ever generate the trivial subgroup).
    """
    if p.is_pure_power:
        raise PurePowerError("a pure power has no offset subgroup; "
                             "use the pure-power prediction path")
    if m < 1:
        raise ValueError("modulus must be >= 1")
    g = math.gcd(m, *[q for q in p.offsets if q])
    group = make_cyclic(m)
    members = tuple(range(0, m, g))
    closure = generated_subgroup(group, [q % m for q in p.offsets if q])
    expected = ElementSet(group=group, members=members)
    if closure.members != expected.members:
        raise InternalConsistencyError(
            f"gcd subgroup {expected.members} disagrees with closure {closure.members}")
    return expected


@dataclass(frozen=True)
class ModMReport:
    """Limit data of p^[n] on R[Z_m]: existence, limit, accumulation, Cesaro."""

    m: int
    series_group: ElementSet
    cycle: ResidueCycle
    exists: bool
    limit: SimplexPoint | None
    accumulation: AccumulationSet
    cesaro: SimplexPoint
    a: float

    def __post_init__(self) -> None:
        if self.exists != (self.limit is not None):
            raise ValueError("limit must be present exactly when the limit exists")
        if self.cycle.modulus != self.m:
            raise ValueError("cycle modulus disagrees with report modulus")
        if self.exists and len(self.accumulation) != 1:
            raise ValueError("a convergent trace has a single accumulation point")


def _coset_point(group: FiniteGroup, subgroup_members: tuple[int, ...],
                 shift: int, a: Fraction) -> SimplexPoint:
    """The point delta_{t^shift} * c_G + (delta_e - c_G) * a, exactly.

    a > 0 only happens when the minimal exponent is 0, in which case
    shift = 0 and the subtracted mass a/|G| stays below the coset mass,
    so the result is a genuine simplex point.
    """
    m = group.order
    size = len(subgroup_members)
    coeffs = [Fraction(0)] * m
    for g in subgroup_members:
        coeffs[(shift + g) % m] += Fraction(1, size)
    if a:
        coeffs[group.identity] += a
        for g in subgroup_members:
            coeffs[g] -= a / size
    return SimplexPoint(group=group, coeffs=tuple(coeffs))


def extinction_fraction(p: ProbPoly) -> Fraction:
    """Extinction value for the closed forms, embedded as an exact rational.

    Shifted series (no constant term) have value 0, and series with mean
    exponent <= 1 have value 1 (their only fixed point in [a_0, 1] is 1);
    both classifications are exact rational arithmetic.  At exact
    criticality the fixed-point iteration slows to steps of order 1/n^2
    and would exhaust any fixed budget, so this shortcut is what keeps
    the closed forms total.  The remaining (supercritical) case iterates
    in floats; when a nearby small-denominator rational is verified to be
    an exact fixed point it is returned (p - id is convex, so [0, 1) holds
    at most one fixed point and the snap is unambiguous), otherwise the
    float converts without rounding (floats are dyadic), clamped into
    [0, 1] so endpoint rounding can never push a coefficient negative.
    """
    if p.shift >= 1:
        return Fraction(0)
    if p.mean_exponent <= 1:
        return Fraction(1)
    approx = Fraction(extinction_value(p))
    candidate = approx.limit_denominator(EXTINCTION_SNAP_DENOMINATOR)
    if candidate < 1 and p.evaluate(candidate) == candidate:
        return candidate
    return min(max(approx, Fraction(0)), Fraction(1))


def regularity_mod_m(p: ProbPoly, m: int) -> ModMReport:
    """Decide lim p^[n](t mod t^m - 1) and build the closed forms.

    The limit exists iff all cosets residues[i] + G coincide; it is then
    delta_{t^(m_0)} * c_G + (delta_e - c_G) * a.  Otherwise the distinct
    coset points form the accumulation set, one per subsequence class.
    """
    if p.is_pure_power:
        raise PurePowerError("pure powers follow the support rotation only; "
                             "use the pure-power prediction path")
    group = make_cyclic(m)
    sub = series_group(p, m)
    cycle = residue_cycle(p.shift, m)
    members = set(sub.members)
    base = cycle.residues[0]
    exists = all((res - base) % m in members for res in cycle.residues)
    a = extinction_fraction(p)
    points = [_coset_point(group, sub.members, res, a) for res in cycle.residues]
    distinct: list[SimplexPoint] = []
    for pt in points:
        if all(pt.coeffs != q.coeffs for q in distinct):
            distinct.append(pt)
    accumulation = AccumulationSet(points=tuple(distinct), source="closed_form")
    limit = points[0] if exists else None
    cesaro = _cesaro_point(group, sub.members, cycle, a)
    return ModMReport(m=m, series_group=sub, cycle=cycle, exists=exists,
                      limit=limit, accumulation=accumulation, cesaro=cesaro,
                      a=float(a))


def _cesaro_point(group: FiniteGroup, subgroup_members: tuple[int, ...],
                  cycle: ResidueCycle, a: Fraction) -> SimplexPoint:
    """(1/d) sum_i delta_{t^(m_i)} * c_G + a * (delta_e - c_G), exactly.

    Repeated cosets keep their multiplicity: the average weights each
    subsequence class equally, not each distinct limit point.
    """
    m = group.order
    size = len(subgroup_members)
    d = cycle.d
    coeffs = [Fraction(0)] * m
    for res in cycle.residues:
        for g in subgroup_members:
            coeffs[(res + g) % m] += Fraction(1, size * d)
    if a:
        coeffs[group.identity] += a
        for g in subgroup_members:
            coeffs[g] -= a / size
    return SimplexPoint(group=group, coeffs=tuple(coeffs))


def cesaro_mod_m(p: ProbPoly, m: int) -> SimplexPoint:
    """Cesaro limit of p^[n](t mod t^m - 1); defined whether or not the
    plain limit exists."""
    if p.is_pure_power:
        raise PurePowerError("pure powers follow the support rotation only; "
                             "use the pure-power prediction path")
    group = make_cyclic(m)
    sub = series_group(p, m)
    cycle = residue_cycle(p.shift, m)
    return _cesaro_point(group, sub.members, cycle, extinction_fraction(p))


def iterate_mod_m(p: ProbPoly, m: int, n: int) -> list[ApproxElement]:
    """Oracle trace y_1 = p(delta_t), y_{k+1} = p(y_k) in float arithmetic."""
    group = make_cyclic(m)
    terms = [(e, float(c)) for e, c in p.terms]
    start = algebra.float_coeffs(algebra.delta(group, 1 % m))
    return algebra.series_trace(group, terms, start, n,
                                slack_rate=ITERATION_SLACK_RATE)


def report_record(report: ModMReport) -> dict:
    """Flat, JSON-ready summary of a ModMReport."""

    def point_map(point: SimplexPoint | None):
        if point is None:
            return None
        return {label: repr(float(c))
                for label, c in zip(point.group.labels, point.coeffs) if c}

    return {
        "m": report.m,
        "r": report.cycle.base,
        "preperiod": report.cycle.preperiod,
        "d": report.cycle.d,
        "residues": list(report.cycle.residues),
        "group": list(report.series_group.members),
        "exists": report.exists,
        "a": report.a,
        "limit": point_map(report.limit),
        "cesaro": point_map(report.cesaro),
    }

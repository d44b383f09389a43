"""Dynamical invariants of convolution powers of a simplex point.

For x in the simplex of R[G] the power sequence x, x^2, x^3, ... does
not converge in general; it settles onto a finite cycle.  The three
integers and one idempotent computed here describe that cycle exactly:

  return_time    least k >= 1 with the identity in Supp(x^k)
  support_group  subgroup generated by Supp(x^{return_time})
  period         least k >= 1 with Supp(x^k) inside support_group;
                 always divides return_time
  idempotent     uniform distribution on support_group; commutes with x

The accumulation set of the powers is {idempotent * x^r : 0 <= r < period},
which limit_set returns exactly and empirical_limit_set recovers from a
float trace for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import ApproxElement, SimplexPoint, multiply, support, to_approx, uniform_on
from .errors import InconclusiveError, InternalConsistencyError
from .groups import ElementSet, FiniteGroup, generated_subgroup

DEFAULT_BURN_IN = 200
DEFAULT_HORIZON = 600
DEFAULT_MERGE_TOL = 1e-9
ITERATION_SLACK_RATE = 1e-12


@dataclass(frozen=True)
class DynamicsProfile:
    return_time: int
    period: int
    support_group: ElementSet
    idempotent: SimplexPoint

    def __post_init__(self) -> None:
        if self.return_time % self.period:
            raise InternalConsistencyError(
                f"period {self.period} does not divide return time {self.return_time}")


@dataclass(frozen=True)
class AccumulationSet:
    """Limit points of an iteration, exact (closed_form) or float (empirical)."""

    points: tuple
    source: str  # "closed_form" | "empirical"

    def __len__(self) -> int:
        return len(self.points)


def _support_powers(x: SimplexPoint) -> list[frozenset[int]]:
    """Supports of x^1, x^2, ... up to the first power containing the identity.

    Supports of powers are built as elementwise product sets, which is
    exact for nonnegative coefficients: no cancellation can remove a
    product from the support.
    """
    g = x.group
    cay = g.cayley
    base = frozenset(support(x).members)
    powers = [base]
    cur = base
    for _ in range(g.order):
        if g.identity in cur:
            return powers
        cur = frozenset(cay[a][b] for a in cur for b in base)
        powers.append(cur)
    raise InternalConsistencyError(
        f"no power up to {g.order} has the identity in its support")


def profile(x: SimplexPoint) -> DynamicsProfile:
    """Compute the return time, support group, period and idempotent of x."""
    g = x.group
    powers = _support_powers(x)
    return_time = len(powers)
    subgroup = generated_subgroup(g, powers[-1])
    inside = subgroup._member_set
    period = next(k for k, supp in enumerate(powers, start=1) if supp <= inside)
    return DynamicsProfile(
        return_time=return_time,
        period=period,
        support_group=subgroup,
        idempotent=uniform_on(subgroup),
    )


def limit_set(x: SimplexPoint) -> AccumulationSet:
    """The exact accumulation set {idempotent * x^r : 0 <= r < period}.

    Also verifies that the idempotent commutes with x; the returned
    points are pairwise distinct.
    """
    prof = profile(x)
    c = prof.idempotent
    if multiply(c, x) != multiply(x, c):
        raise InternalConsistencyError("idempotent fails to commute with x")
    points = [c]
    for _ in range(1, prof.period):
        points.append(multiply(points[-1], x))
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points[i] == points[j]:
                raise InternalConsistencyError(
                    f"accumulation points {i} and {j} coincide")
    return AccumulationSet(points=tuple(points), source="closed_form")


def empirical_limit_set(x: SimplexPoint,
                        burn_in: int = DEFAULT_BURN_IN,
                        horizon: int = DEFAULT_HORIZON,
                        merge_tol: float = DEFAULT_MERGE_TOL) -> AccumulationSet:
    """Brute-force oracle: cluster the float power trace past a burn-in.

    Iterates x^k in floating point for burn_in < k <= horizon and merges
    iterates within merge_tol (greedy, deterministic).  If the window is
    too short to show each cluster at least three times in a periodic
    pattern, raises InconclusiveError rather than returning a guess.
    """
    if burn_in < 0 or horizon <= burn_in:
        raise ValueError(f"need 0 <= burn_in < horizon, got {burn_in}, {horizon}")
    g = x.group
    xv = algebra.float_coeffs(x)
    vec = xv.copy()
    reps: list[np.ndarray] = []
    rep_steps: list[int] = []
    labels: list[int] = []
    for k in range(2, horizon + 1):
        vec = algebra.convolve_floats(g, vec, xv)
        if k <= burn_in:
            continue
        for idx, rep in enumerate(reps):
            if float(np.max(np.abs(rep - vec))) <= merge_tol:
                labels.append(idx)
                break
        else:
            reps.append(vec.copy())
            rep_steps.append(k)
            labels.append(len(reps) - 1)

    d = len(reps)
    window = len(labels)
    periodic = all(labels[i + d] == labels[i] for i in range(window - d))
    if window < 3 * d or not periodic:
        raise InconclusiveError(
            f"power trace did not stabilize into clusters by step {horizon} "
            f"({d} clusters over a window of {window})",
            iterations=horizon)
    points = tuple(
        ApproxElement(g, rep, slack=ITERATION_SLACK_RATE * step)
        for rep, step in zip(reps, rep_steps))
    return AccumulationSet(points=points, source="empirical")


def match_accumulation_sets(expected: AccumulationSet,
                            observed: AccumulationSet,
                            tol: float = 1e-8) -> bool:
    """Greedy nearest-neighbor matching of two accumulation sets.

    True when the sets have equal cardinality and each observed point is
    within tol (sup distance) of a distinct expected point.
    """
    if len(expected) != len(observed):
        return False
    remaining = list(expected.points)
    for pt in observed.points:
        dists = [algebra.sup_distance(pt, q) for q in remaining]
        best = min(range(len(dists)), key=dists.__getitem__)
        if dists[best] > tol:
            return False
        remaining.pop(best)
    return True


def exact_rank(rows: list[list]) -> int:
    """Row rank by Gaussian elimination over exact rationals."""
    rows = [list(row) for row in rows]
    if not rows:
        return 0
    rank = 0
    for col in range(len(rows[0])):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        head = rows[rank]
        for i in range(rank + 1, len(rows)):
            factor = rows[i][col] / head[col]
            if factor:
                rows[i] = [a - factor * b for a, b in zip(rows[i], head)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def power_rank(x: SimplexPoint) -> int:
    """Rank over the rationals of the vectors e, x, x^2, .., x^(n-1),
    where n is the return time.  These are always independent, so the
    value equals the return time; exposed for the verification suites."""
    prof = profile(x)
    rows = []
    cur = algebra.delta(x.group, x.group.identity)
    for _ in range(prof.return_time):
        rows.append(list(cur.coeffs))
        cur = multiply(cur, x)
    return exact_rank(rows)


def reduce(x: SimplexPoint) -> SimplexPoint:
    """One absorption step: x times its own idempotent."""
    return multiply(x, profile(x).idempotent)


def reduce_to_stable(x: SimplexPoint) -> tuple[SimplexPoint, int]:
    """Apply reduce until the return time survives one more absorption.

    Returns (y, steps) where y satisfies return_time(y * idempotent(y)) =
    return_time(y).  Each reduce strictly lowers the return time, so at
    most |G| steps can occur; the cap raises InternalConsistencyError.
    """
    y = x
    prof = profile(y)
    for steps in range(x.group.order + 1):
        z = multiply(y, prof.idempotent)
        prof_z = profile(z)
        if prof_z.return_time > prof.period:
            raise InternalConsistencyError(
                f"absorption raised the return time above the period "
                f"({prof_z.return_time} > {prof.period})")
        if prof_z.return_time == prof.return_time:
            return y, steps
        y, prof = z, prof_z
    raise InternalConsistencyError(
        f"absorption chain exceeded {x.group.order} steps without stabilizing")

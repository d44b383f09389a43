"""Arithmetic in the group algebra R[G] and its probability simplex.

Exact rationals are the canonical representation; every invariant that
feeds a support computation is threshold-free.  Floats appear only in
ApproxElement, the carrier for long oracle iteration runs, which tracks
an explicit slack bound instead of pretending to be exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .groups import ElementSet, FiniteGroup

DEFAULT_APPROX_SLACK = 1e-12

RationalLike = Fraction | int | str


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse an exact rational from a "p/q" string (or int/Fraction)."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational {text!r}: {exc}") from None


def format_rational(q: Fraction) -> str:
    return str(q)


def _same_group(a: FiniteGroup, b: FiniteGroup, what: str) -> None:
    if a is not b and a != b:
        raise ValueError(f"{what} requires elements of the same group")


@dataclass(frozen=True)
class AlgebraElement:
    """An element sum_g x_g * g of R[G], as a dense exact coefficient vector."""

    group: FiniteGroup
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != self.group.order:
            raise ValueError(
                f"expected {self.group.order} coefficients, got {len(coeffs)}")

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __repr__(self) -> str:
        inside = ", ".join(
            f"{self.group.labels[i]}: {c}" for i, c in enumerate(self.coeffs) if c)
        return f"{type(self).__name__}({inside or '0'})"


class SimplexPoint(AlgebraElement):
    """A probability distribution on G: coefficients >= 0 summing to exactly 1."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if any(c < 0 for c in self.coeffs):
            raise ValueError("simplex point has a negative coefficient")
        total = sum(self.coeffs)
        if total != 1:
            raise ValueError(f"simplex point coefficients sum to {total}, not 1")


@dataclass(frozen=True, eq=False)
class ApproxElement:
    """Float coefficient vector with an explicit slack bound.

    Invariants: sum(coeffs) within [1 - slack, 1 + slack] and every
    coefficient >= -slack.
    """

    group: FiniteGroup
    coeffs: np.ndarray
    slack: float = DEFAULT_APPROX_SLACK

    def __post_init__(self) -> None:
        vec = np.asarray(self.coeffs, dtype=np.float64)
        vec.setflags(write=False)
        object.__setattr__(self, "coeffs", vec)
        if vec.shape != (self.group.order,):
            raise ValueError(
                f"expected {self.group.order} coefficients, got shape {vec.shape}")
        if self.slack < 0:
            raise ValueError("slack must be nonnegative")
        total = float(vec.sum())
        if not (1 - self.slack <= total <= 1 + self.slack):
            raise ValueError(
                f"coefficient sum {total} outside 1 +/- {self.slack}")
        if vec.size and float(vec.min()) < -self.slack:
            raise ValueError(
                f"coefficient {float(vec.min())} below -slack {-self.slack}")


def delta(group: FiniteGroup, i: int) -> SimplexPoint:
    """Point mass at element index i."""
    if not 0 <= i < group.order:
        raise ValueError(f"element index {i} out of range")
    return SimplexPoint(group, tuple(
        Fraction(1) if j == i else Fraction(0) for j in range(group.order)))


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Convolution product: (xy)_g = sum over h*k = g of x_h * y_k, exact."""
    _same_group(x.group, y.group, "multiply")
    g = x.group
    cay = g.cayley
    out = [Fraction(0)] * g.order
    for h, xh in enumerate(x.coeffs):
        if not xh:
            continue
        row = cay[h]
        for k, yk in enumerate(y.coeffs):
            if yk:
                out[row[k]] += xh * yk
    cls = SimplexPoint if isinstance(x, SimplexPoint) and isinstance(y, SimplexPoint) \
        else AlgebraElement
    return cls(g, tuple(out))


def power(x: AlgebraElement, k: int) -> AlgebraElement:
    """x^k by square-and-multiply; x^0 is the point mass at the identity."""
    if k < 0:
        raise ValueError(f"exponent must be >= 0, got {k}")
    result = delta(x.group, x.group.identity)
    if not isinstance(x, SimplexPoint):
        result = AlgebraElement(x.group, result.coeffs)
    base = x
    while k:
        if k & 1:
            result = multiply(result, base)
        k >>= 1
        if k:
            base = multiply(base, base)
    return result


def support(x: AlgebraElement) -> ElementSet:
    """Indices with nonzero coefficient (exact test, no threshold)."""
    return ElementSet(x.group, tuple(i for i, c in enumerate(x.coeffs) if c))


def uniform_on(h: ElementSet) -> SimplexPoint:
    """Uniform distribution on a nonempty element set."""
    if not h.members:
        raise ValueError("uniform_on requires a nonempty set")
    share = Fraction(1, len(h.members))
    coeffs = [Fraction(0)] * h.group.order
    for i in h.members:
        coeffs[i] = share
    return SimplexPoint(h.group, tuple(coeffs))


def weight(x: AlgebraElement) -> Fraction:
    """Total coefficient mass L(x) = sum_g x_g."""
    return sum(x.coeffs, Fraction(0))


def add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _same_group(x.group, y.group, "add")
    return AlgebraElement(x.group, tuple(a + b for a, b in zip(x.coeffs, y.coeffs)))


def scale(q: RationalLike, x: AlgebraElement) -> AlgebraElement:
    qq = Fraction(q)
    return AlgebraElement(x.group, tuple(qq * c for c in x.coeffs))


def to_approx(x: AlgebraElement, slack: float = DEFAULT_APPROX_SLACK) -> ApproxElement:
    return ApproxElement(x.group, np.array([float(c) for c in x.coeffs]), slack)


def sup_distance(a: ApproxElement | AlgebraElement,
                 b: ApproxElement | AlgebraElement) -> float:
    """max_g |a_g - b_g|; exact elements are converted to floats first."""
    _same_group(a.group, b.group, "sup_distance")
    return float(np.max(np.abs(float_coeffs(a) - float_coeffs(b))))


def float_coeffs(x: ApproxElement | AlgebraElement) -> np.ndarray:
    if isinstance(x, ApproxElement):
        return x.coeffs
    return np.array([float(c) for c in x.coeffs])


def convolve_floats(group: FiniteGroup, xv: np.ndarray, yv: np.ndarray) -> np.ndarray:
    """Float convolution via the precomputed h^{-1}g gather table."""
    return xv @ yv[group.conv_index]


def evaluate_series_floats(group: FiniteGroup,
                           terms: Sequence[tuple[int, float]],
                           xv: np.ndarray) -> np.ndarray:
    """Evaluate sum of c * x^k over (k, c) term pairs, in floats.

    Powers are built incrementally, so terms must be sorted by exponent.
    """
    n = group.order
    out = np.zeros(n)
    pw = np.zeros(n)
    pw[group.identity] = 1.0
    cur = 0
    for exponent, coeff in terms:
        while cur < exponent:
            pw = convolve_floats(group, pw, xv)
            cur += 1
        out += coeff * pw
    return out


def series_trace(group: FiniteGroup, terms: Sequence[tuple[int, float]],
                 start: np.ndarray, n: int,
                 slack_rate: float = 1e-12) -> list["ApproxElement"]:
    """Float orbit y_1 = p(start), y_{k+1} = p(y_k) for p given by terms.

    Each step renormalizes the total mass to 1.  The true orbit has mass
    exactly 1, but in floats the mass direction is a repelling mode with
    multiplier p'(1) whenever the mean exponent exceeds 1, so rounding
    noise in the sum would grow exponentially; dividing it out projects
    back onto the invariant simplex without changing the dynamics.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    vec = np.asarray(start, dtype=np.float64)
    out: list[ApproxElement] = []
    for k in range(1, n + 1):
        vec = evaluate_series_floats(group, terms, vec)
        vec = vec / vec.sum()
        out.append(ApproxElement(group=group, coeffs=vec,
                                 slack=slack_rate * k))
    return out


def simplex_from_map(group: FiniteGroup,
                     mapping: Mapping[str, RationalLike]) -> SimplexPoint:
    """Build a simplex point from a label -> rational-string map.

    Unlisted labels get coefficient 0; the simplex invariants are
    enforced exactly on the result.
    """
    coeffs = [Fraction(0)] * group.order
    for label, text in mapping.items():
        i = group.index_of(str(label))
        if coeffs[i]:
            raise ValueError(f"label {label!r} listed twice")
        coeffs[i] = parse_rational(text)
    return SimplexPoint(group, tuple(coeffs))


def element_to_map(x: AlgebraElement) -> dict[str, str]:
    """Nonzero coefficients as a label -> "p/q" map (inverse of simplex_from_map)."""
    return {x.group.labels[i]: format_rational(c)
            for i, c in enumerate(x.coeffs) if c}

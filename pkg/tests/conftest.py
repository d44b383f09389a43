"""Shared fixtures: the group zoo and seeded random generators.

Random draws use integer weights 1..20 normalized to exact rationals, so
every generated element and series lives in exact arithmetic and every
test run is reproducible from its seed.
"""

import random
from fractions import Fraction

import pytest

from simplexdyn import (FiniteGroup, ProbPoly, SimplexPoint, direct_product,
                        make_cyclic, make_dihedral, make_symmetric)

WEIGHT_MAX = 20


def build_zoo() -> dict:
    zoo = {f"cyclic-{n}": make_cyclic(n) for n in range(2, 13)}
    zoo["klein"] = direct_product(make_cyclic(2), make_cyclic(2))
    zoo["sym-3"] = make_symmetric(3)
    zoo["dihedral-4"] = make_dihedral(4)
    return zoo


@pytest.fixture(scope="session")
def zoo() -> dict:
    return build_zoo()


def random_simplex_point(group: FiniteGroup, rng: random.Random,
                         support_size: int | None = None) -> SimplexPoint:
    """Exact random point: random support, integer weights 1..20."""
    if support_size is None:
        support_size = rng.randint(1, group.order)
    indices = rng.sample(range(group.order), support_size)
    weights = {i: rng.randint(1, WEIGHT_MAX) for i in indices}
    total = sum(weights.values())
    coeffs = [Fraction(weights[i], total) if i in weights else Fraction(0)
              for i in range(group.order)]
    return SimplexPoint(group=group, coeffs=tuple(coeffs))


def random_prob_poly(rng: random.Random, max_degree: int = 8,
                     allow_critical: bool = True) -> ProbPoly:
    """Exact random series with 2 to 4 distinct exponents.

    With allow_critical=False, redraws any p with no constant shift whose
    mean exponent is exactly 1; such p sit on the boundary between the
    two convergence regimes and their iterates approach the limit at rate
    1/n, too slow for any fixed-horizon float oracle.
    """
    while True:
        count = rng.randint(2, 4)
        exponents = rng.sample(range(max_degree + 1), count)
        weights = [rng.randint(1, WEIGHT_MAX) for _ in exponents]
        total = sum(weights)
        p = ProbPoly(tuple((e, Fraction(w, total))
                           for e, w in zip(exponents, weights)))
        if not allow_critical and p.shift == 0 and p.mean_exponent == 1:
            continue
        return p


def random_group(zoo: dict, rng: random.Random) -> FiniteGroup:
    name = rng.choice(sorted(zoo))
    return zoo[name]

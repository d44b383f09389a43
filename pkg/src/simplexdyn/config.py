"""Experiment configuration: group, starting element, series, parameters.

A config is a JSON object.  The group is one of the built-in families or
a Cayley-table CSV; the element is an explicit label -> rational map, a
point mass, or a seeded random interior point; the series is an exponent
-> rational map or a pure power.  Everything validates down to exact
domain objects, and every failure names the offending field.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .algebra import SimplexPoint, delta, parse_rational, simplex_from_map
from .groups import (FiniteGroup, direct_product, make_cyclic, make_dihedral,
                     make_symmetric, read_cayley_csv)
from .series import ProbPoly

RANDOM_WEIGHT_MAX = 20


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def build_group(spec, where: str = "group") -> FiniteGroup:
    if not isinstance(spec, Mapping):
        raise ConfigError(f"{where}: expected an object with a 'kind' field")
    kind = spec.get("kind")
    try:
        if kind == "cyclic":
            return make_cyclic(int(spec["n"]))
        if kind == "dihedral":
            return make_dihedral(int(spec["n"]))
        if kind == "symmetric":
            return make_symmetric(int(spec["n"]))
        if kind == "product":
            factors = spec["factors"]
            if not isinstance(factors, list) or len(factors) < 2:
                raise ConfigError(
                    f"{where}.factors: need a list of at least two group specs")
            built = build_group(factors[0], f"{where}.factors[0]")
            for i, sub in enumerate(factors[1:], start=1):
                built = direct_product(built, build_group(sub, f"{where}.factors[{i}]"))
            return built
        if kind == "table-file":
            return read_cayley_csv(str(spec["path"]))
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"{where}: missing field {exc.args[0]!r} for kind {kind!r}") from exc
    except (ValueError, OSError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(
        f"{where}.kind: expected one of cyclic, dihedral, symmetric, product, "
        f"table-file; got {kind!r}")


def random_interior_point(group: FiniteGroup, seed: int) -> SimplexPoint:
    """Seeded exact interior point: integer weights 1..20, normalized."""
    rng = random.Random(seed)
    weights = [rng.randint(1, RANDOM_WEIGHT_MAX) for _ in range(group.order)]
    total = sum(weights)
    return SimplexPoint(group=group,
                        coeffs=tuple(Fraction(w, total) for w in weights))


def build_element(group: FiniteGroup, spec, where: str = "element") -> SimplexPoint:
    if isinstance(spec, str):
        head, sep, arg = spec.partition(":")
        if head == "point-mass" and sep:
            if arg not in group.labels:
                raise ConfigError(f"{where}: label {arg!r} not in the group")
            return delta(group, group.index_of(arg))
        if head == "interior-random" and sep:
            try:
                return random_interior_point(group, int(arg))
            except ValueError as exc:
                raise ConfigError(f"{where}: bad seed {arg!r}") from exc
        raise ConfigError(
            f"{where}: string form must be 'point-mass:<label>' or "
            f"'interior-random:<seed>', got {spec!r}")
    if isinstance(spec, Mapping):
        try:
            return simplex_from_map(group, spec)
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: expected a map or a string form")


def build_series(spec, where: str = "series") -> ProbPoly:
    if isinstance(spec, str):
        head, sep, arg = spec.partition(":")
        if head == "pure-power" and sep:
            try:
                r = int(arg)
            except ValueError as exc:
                raise ConfigError(f"{where}: bad exponent {arg!r}") from exc
            if r < 0:
                raise ConfigError(f"{where}: exponent must be >= 0, got {r}")
            return ProbPoly.pure_power(r)
        raise ConfigError(
            f"{where}: string form must be 'pure-power:<r>', got {spec!r}")
    if isinstance(spec, Mapping):
        try:
            terms = tuple((int(k), parse_rational(v)) for k, v in spec.items())
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
        try:
            return ProbPoly(terms)
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: expected a map or 'pure-power:<r>'")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment: group, optional element and series, parameters."""

    group: FiniteGroup
    element: SimplexPoint | None
    series: ProbPoly | None
    horizon: int | None
    tol: float | None
    truncation: int | None
    seed: int | None
    burn_in: int | None

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ExperimentConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError("config: expected a JSON object")
        unknown = set(raw) - {"group", "element", "series", "horizon", "tol",
                              "truncation", "seed", "burn_in"}
        if unknown:
            raise ConfigError(f"config: unknown fields {sorted(unknown)}")
        if "group" not in raw:
            raise ConfigError("config: missing required field 'group'")
        group = build_group(raw["group"])
        element = build_element(group, raw["element"]) if "element" in raw else None
        series = build_series(raw["series"]) if "series" in raw else None

        def opt_int(name: str, minimum: int):
            if name not in raw:
                return None
            try:
                value = int(raw[name])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{name}: expected an integer") from exc
            if value < minimum:
                raise ConfigError(f"{name}: must be >= {minimum}, got {value}")
            return value

        tol = None
        if "tol" in raw:
            try:
                tol = float(raw["tol"])
            except (TypeError, ValueError) as exc:
                raise ConfigError("tol: expected a number") from exc
            if tol <= 0:
                raise ConfigError(f"tol: must be positive, got {tol}")
        return cls(group=group, element=element, series=series,
                   horizon=opt_int("horizon", 1), tol=tol,
                   truncation=opt_int("truncation", 1),
                   seed=opt_int("seed", 0), burn_in=opt_int("burn_in", 0))

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def require_element(self) -> SimplexPoint:
        if self.element is None:
            raise ConfigError("element: required for this command")
        return self.element

    def require_series(self) -> ProbPoly:
        if self.series is None:
            raise ConfigError("series: required for this command")
        return self.series

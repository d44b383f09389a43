"""Batch experiment runner.

Subcommands: profile | limit-set | predict | iterate | cesaro | scalar |
verify.  Each reads a JSON config (see config.py) naming a group, a
starting element and/or a series, runs the requested computation, and
writes JSON or CSV to --out or stdout.

Exit codes: 0 success, 1 invalid input, 2 inconclusive numerics
(iteration budget exhausted before the tolerance was met), 3
verification failure (an oracle contradicted a closed form).
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from . import algebra, dynamics, series as scalar
from .algebra import ApproxElement, element_to_map, multiply, sup_distance
from .config import ConfigError, ExperimentConfig
from .dynamics import (DEFAULT_BURN_IN, DEFAULT_HORIZON, empirical_limit_set,
                       limit_set, match_accumulation_sets, power_rank, profile,
                       reduce)
from .errors import InconclusiveError, InternalConsistencyError, PurePowerError
from .predict import (CESARO_HORIZON, REGULAR_HORIZON, LimitReport,
                      cesaro_limit, empirical_cesaro, iterate_map,
                      pure_power_report, regular_limit)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INCONCLUSIVE = 2
EXIT_VERIFY_FAILED = 3

DEFAULT_MATCH_TOL = 1e-8
DEFAULT_SCALAR_HORIZON = 200


def _decimal_map(x) -> dict:
    vec = algebra.float_coeffs(x)
    return {label: float(v) for label, v in zip(x.group.labels, vec) if v}


def _point_record(x) -> dict:
    if isinstance(x, ApproxElement):
        return {"decimal": _decimal_map(x)}
    return {"exact": element_to_map(x), "decimal": _decimal_map(x)}


def _profile_record(prof: dynamics.DynamicsProfile) -> dict:
    return {
        "return_time": prof.return_time,
        "period": prof.period,
        "support_group": list(prof.support_group.label_list()),
        "idempotent": element_to_map(prof.idempotent),
    }


def _report_record(rep: LimitReport) -> dict:
    return {
        "digest": rep.digest,
        "profile": _profile_record(rep.profile),
        "reduction_steps": rep.reduction_steps,
        "exists": rep.exists,
        "limit": _point_record(rep.limit) if rep.limit is not None else None,
        "accumulation": [_point_record(pt) for pt in rep.accumulation.points],
        "cesaro": _point_record(rep.cesaro),
        "a": rep.a,
        "scalar_limits": list(rep.scalar_limits) if rep.scalar_limits else None,
        "diagnostics": rep.diagnostics,
    }


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload) -> None:
    _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _emit_csv(args, header: list, rows: list) -> None:
    import csv as csv_mod
    buf = io.StringIO()
    writer = csv_mod.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buf.getvalue())


def cmd_profile(cfg: ExperimentConfig, args) -> int:
    prof = profile(cfg.require_element())
    _emit_json(args, _profile_record(prof))
    return EXIT_OK


def cmd_limit_set(cfg: ExperimentConfig, args) -> int:
    x = cfg.require_element()
    closed = limit_set(x)
    horizon = args.horizon or cfg.horizon or DEFAULT_HORIZON
    burn_in = cfg.burn_in if cfg.burn_in is not None else min(DEFAULT_BURN_IN,
                                                              horizon // 3)
    tol = args.tol or cfg.tol or DEFAULT_MATCH_TOL
    payload = {"closed_form": [_point_record(pt) for pt in closed.points]}
    try:
        observed = empirical_limit_set(x, burn_in=burn_in, horizon=horizon)
    except InconclusiveError as exc:
        payload["status"] = "inconclusive"
        payload["detail"] = str(exc)
        _emit_json(args, payload)
        return EXIT_INCONCLUSIVE
    matched = match_accumulation_sets(closed, observed, tol=tol)
    payload["empirical"] = [_point_record(pt) for pt in observed.points]
    payload["matched"] = matched
    payload["status"] = "ok" if matched else "mismatch"
    _emit_json(args, payload)
    return EXIT_OK if matched else EXIT_VERIFY_FAILED


def cmd_predict(cfg: ExperimentConfig, args) -> int:
    x = cfg.require_element()
    p = cfg.require_series()
    if p.is_pure_power:
        r = p.shift
        if r < 2:
            raise ConfigError(
                f"series: pure-power prediction needs exponent >= 2, got {r}")
        rep = pure_power_report(r, x)
        _emit_json(args, {"kind": "pure-power", "report": _report_record(rep)})
        return EXIT_OK
    regular = regular_limit(p, x)
    cesaro = cesaro_limit(p, x)
    _emit_json(args, {
        "kind": "series",
        "regular": _report_record(regular),
        "cesaro": _report_record(cesaro),
    })
    return EXIT_OK


def cmd_iterate(cfg: ExperimentConfig, args) -> int:
    x = cfg.require_element()
    p = cfg.require_series()
    horizon = args.horizon or cfg.horizon or REGULAR_HORIZON
    trace = iterate_map(p, x, horizon)
    labels = x.group.labels
    if args.format == "json":
        rows = []
        prev = x
        for k, t in enumerate(trace, start=1):
            rows.append({"step": k, "coeffs": _decimal_map(t),
                         "sup_delta": sup_distance(t, prev)})
            prev = t
        _emit_json(args, {"trace": rows})
        return EXIT_OK
    header = ["step", *labels, "sup_delta"]
    rows = []
    prev = x
    for k, t in enumerate(trace, start=1):
        rows.append([k, *[repr(float(v)) for v in t.coeffs],
                     repr(sup_distance(t, prev))])
        prev = t
    _emit_csv(args, header, rows)
    return EXIT_OK


def cmd_cesaro(cfg: ExperimentConfig, args) -> int:
    x = cfg.require_element()
    p = cfg.require_series()
    rep = cesaro_limit(p, x)
    horizon = args.horizon or cfg.horizon or CESARO_HORIZON
    if cfg.burn_in is not None:
        burn_in = cfg.burn_in
    else:
        d = rep.diagnostics["cycle_d"]
        window = max(d, (horizon // 2 // d) * d)
        burn_in = max(0, horizon - window)
    avg = empirical_cesaro(p, x, horizon, burn_in=burn_in)
    _emit_json(args, {
        "report": _report_record(rep),
        "empirical": _decimal_map(avg),
        "sup_distance": sup_distance(avg, rep.cesaro),
        "horizon": horizon,
        "burn_in": burn_in,
    })
    return EXIT_OK


def cmd_scalar(cfg: ExperimentConfig, args) -> int:
    p = cfg.require_series()
    if p.is_pure_power:
        raise ConfigError("series: the scalar trace needs at least two terms; "
                          "pure powers keep all mass on one exponent")
    horizon = args.horizon or cfg.horizon or DEFAULT_SCALAR_HORIZON
    truncation = args.truncation or cfg.truncation
    states = scalar.iterate_coeffs(p, horizon, truncation, mode="float")
    averages = scalar.cesaro_coeffs(states)
    header = ["n", "a0", "sup", "tail_mass", "avg_a0", "avg_sup", "avg_tail_mass"]
    rows = []
    for st, av in zip(states, averages):
        rows.append([st.n, repr(float(st.a0)), repr(st.sup_nonconstant()),
                     repr(float(st.tail_mass)), repr(float(av.a0)),
                     repr(av.sup_nonconstant()), repr(float(av.tail_mass))])
    if args.format == "json":
        _emit_json(args, {"trace": [
            {"n": st.n, "a0": float(st.a0), "sup": st.sup_nonconstant(),
             "tail_mass": float(st.tail_mass), "avg_a0": float(av.a0),
             "avg_sup": av.sup_nonconstant(), "avg_tail_mass": float(av.tail_mass)}
            for st, av in zip(states, averages)]})
    else:
        _emit_csv(args, header, rows)
    return EXIT_OK


def _verify_checks(cfg: ExperimentConfig, args) -> list[dict]:
    x = cfg.require_element()
    checks: list[dict] = []

    def record(name: str, ok: bool, detail: str = "") -> None:
        checks.append({"name": name, "status": "pass" if ok else "fail",
                       "detail": detail})

    prof = profile(x)
    c = prof.idempotent
    record("profile-consistency",
           prof.return_time % prof.period == 0
           and multiply(c, c) == c
           and multiply(c, x) == multiply(x, c),
           f"return_time={prof.return_time} period={prof.period}")
    record("power-independence", power_rank(x) == prof.return_time,
           f"rank of {prof.return_time} power vectors")
    closed = limit_set(x)
    wrapped = multiply(closed.points[-1], x)
    record("limit-cycle-wraps", wrapped == closed.points[0],
           f"{len(closed)} points on the cycle")
    y = reduce(x)
    prof_y = profile(y)
    ok4 = prof_y.return_time <= prof.period <= prof.return_time
    if prof_y.return_time == prof.return_time:
        ok4 = ok4 and prof.return_time == prof.period == prof_y.period
    record("reduction-inequalities", ok4,
           f"absorbed return_time={prof_y.return_time}")
    inside = all(i in prof.support_group for i in algebra.support(x).members)
    record("singleton-criterion", (len(closed) == 1) == inside,
           f"support inside group: {inside}")

    horizon = args.horizon or cfg.horizon or DEFAULT_HORIZON
    burn_in = cfg.burn_in if cfg.burn_in is not None else min(DEFAULT_BURN_IN,
                                                              horizon // 3)
    try:
        observed = empirical_limit_set(x, burn_in=burn_in, horizon=horizon)
        record("limit-set-oracle",
               match_accumulation_sets(closed, observed,
                                       tol=args.tol or cfg.tol or DEFAULT_MATCH_TOL),
               f"{len(observed)} empirical clusters")
    except InconclusiveError as exc:
        checks.append({"name": "limit-set-oracle", "status": "inconclusive",
                       "detail": str(exc)})

    p = cfg.series
    if p is None:
        return checks
    if p.is_pure_power:
        if p.shift < 2:
            raise ConfigError(
                f"series: pure-power verification needs exponent >= 2, got {p.shift}")
        rep = pure_power_report(p.shift, x)
        vec = algebra.float_coeffs(x)
        steps = max(12, 3 * prof.period)
        hits = [False] * len(rep.accumulation)
        ok = True
        for _ in range(steps):
            nxt = vec
            for _ in range(p.shift - 1):
                nxt = algebra.convolve_floats(x.group, nxt, vec)
            vec = nxt
            approx = ApproxElement(x.group, vec, slack=1e-9)
            dists = [sup_distance(approx, pt) for pt in rep.accumulation.points]
            best = min(range(len(dists)), key=dists.__getitem__)
            if dists[best] <= (args.tol or cfg.tol or DEFAULT_MATCH_TOL):
                hits[best] = True
        ok = all(hits)
        record("power-accumulation-oracle", ok,
               f"{sum(hits)}/{len(hits)} predicted points visited")
        return checks

    critical = p.shift == 0 and p.mean_exponent == 1
    reg = regular_limit(p, x)
    if critical:
        checks.append({
            "name": "regular-oracle", "status": "inconclusive",
            "detail": "mean exponent is exactly 1; iterates approach the "
                      "limit at rate 1/n, beyond any fixed float horizon"})
    else:
        reg_h = args.horizon or cfg.horizon or REGULAR_HORIZON
        trace = iterate_map(p, x, reg_h)
        tol = args.tol or cfg.tol or 1e-7
        if reg.exists:
            dev = sup_distance(trace[-1], reg.limit)
            record("regular-oracle", dev <= tol, f"sup deviation {dev:.2e}")
        else:
            d = reg.diagnostics["cycle_d"]
            pre = reg.diagnostics["cycle_preperiod"]
            ok = True
            for i in range(d):
                n = reg_h
                while n > pre and (n - pre - 1) % d != i:
                    n -= 1
                pt = trace[n - 1]
                dists = [sup_distance(pt, q) for q in reg.accumulation.points]
                if min(dists) > tol:
                    ok = False
            record("regular-oracle", ok,
                   f"{d} subsequence classes vs {len(reg.accumulation)} points")

    ces = cesaro_limit(p, x)
    if critical:
        checks.append({
            "name": "cesaro-oracle", "status": "inconclusive",
            "detail": "averages of a 1/n-converging trace need horizons "
                      "beyond the float budget"})
    else:
        ces_h = args.horizon or cfg.horizon or CESARO_HORIZON
        d = ces.diagnostics["cycle_d"]
        window = max(d, (ces_h // 2 // d) * d)
        avg = empirical_cesaro(p, x, ces_h, burn_in=max(0, ces_h - window))
        dev = sup_distance(avg, ces.cesaro)
        record("cesaro-oracle", dev <= 1e-4, f"sup deviation {dev:.2e}")

    exact_states = scalar.iterate_coeffs(
        p, 3, max(p.degree, min(scalar.default_truncation(p), 64)), mode="exact")
    ok = True
    for st in exact_states[:-1]:
        nxt = scalar.compose(p, st)
        for k in range(min(8, st.truncation) + 1):
            if scalar.recursion_coeffs(p, st, k) != nxt.coeffs[k]:
                ok = False
    record("scalar-recursion", ok, "composition vs derivative recursion, exact")
    return checks


def cmd_verify(cfg: ExperimentConfig, args) -> int:
    checks = _verify_checks(cfg, args)
    statuses = {c["status"] for c in checks}
    if args.format == "json":
        overall = ("fail" if "fail" in statuses
                   else "inconclusive" if "inconclusive" in statuses else "pass")
        _emit_json(args, {"checks": checks, "status": overall})
    else:
        lines = []
        for c in checks:
            tag = {"pass": "PASS", "fail": "FAIL",
                   "inconclusive": "INCONCLUSIVE"}[c["status"]]
            detail = f" ({c['detail']})" if c["detail"] else ""
            lines.append(f"{tag} {c['name']}{detail}\n")
        _emit(args, "".join(lines))
    if "fail" in statuses:
        return EXIT_VERIFY_FAILED
    if "inconclusive" in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


_COMMANDS = {
    "profile": cmd_profile,
    "limit-set": cmd_limit_set,
    "predict": cmd_predict,
    "iterate": cmd_iterate,
    "cesaro": cmd_cesaro,
    "scalar": cmd_scalar,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexdyn",
        description="Exact and empirical limit analysis of simplex dynamics "
                    "on finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True,
                         help="path to a JSON experiment config")
        cmd.add_argument("--out", help="output file (default stdout)")
        cmd.add_argument("--horizon", type=int, help="iteration horizon")
        cmd.add_argument("--tol", type=float, help="comparison tolerance")
        cmd.add_argument("--truncation", type=int,
                         help="scalar truncation degree K")
        cmd.add_argument("--seed", type=int,
                         help="override the interior-random element seed")
        cmd.add_argument("--format", choices=("json", "csv"),
                         help="output format where a choice exists")
    return parser


def _load_config(args) -> ExperimentConfig:
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    if args.seed is not None:
        element = raw.get("element")
        if isinstance(element, str) and element.startswith("interior-random:"):
            raw["element"] = f"interior-random:{args.seed}"
        else:
            raw["seed"] = args.seed
    for name in ("horizon", "tol", "truncation"):
        value = getattr(args, name)
        if value is not None:
            raw[name] = value
    return ExperimentConfig.from_dict(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, PurePowerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except InternalConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED


if __name__ == "__main__":
    sys.exit(main())

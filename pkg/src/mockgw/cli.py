"""Command line interface.

Exit codes: 0 success / verification passed, 1 verification failed,
2 missing data, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import List, Optional

import mpmath as mp

from . import genseries as gs
from . import mockverify as mv
from .numtheory import HurwitzTable
from .qseries import to_dict
from .toricgeo import correspondence_record, fan_table

log = logging.getLogger("mockgw")

EXIT_OK, EXIT_FAIL, EXIT_MISSING, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class Config:
    truncation_order: int = 60
    precision_digits: int = 34
    tolerance: float = 1e-6
    tau_grid: List[List[float]] = field(default_factory=list)
    data_paths: List[str] = field(default_factory=list)

    def validate(self) -> "Config":
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.truncation_order < 10:
            raise ValueError("truncation_order must be at least 10")
        return self

    @classmethod
    def load(cls, path: Optional[str], overrides: dict) -> "Config":
        values = {}
        if path:
            with open(path) as fh:
                values.update(json.load(fh))
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values).validate()


def _frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _write_csv(rows, header, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _rank3(paths):
    return gs.load_rank3(paths) if paths else None


# -- commands --------------------------------------------------------------


def cmd_expand(args, out=sys.stdout) -> int:
    rank3 = _rank3(args.data)
    spec = gs.SeriesSpec(args.r, args.c1, args.order)
    try:
        s = gs.h_gw(spec, rank3) if args.series == "gw" else gs.h_vw(spec, rank3)
    except gs.MissingDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    if args.format == "json":
        payload = {"series": args.series, "r": args.r, "c1": args.c1, **to_dict(s)}
        out.write(json.dumps(payload) + "\n")
    else:
        _write_csv(([_frac_str(e), _frac_str(c)] for e, c in s.terms()), ["exponent", "coefficient"], out)
    return EXIT_OK


def cmd_invariants(args, out=sys.stdout) -> int:
    rank3 = _rank3(args.data)
    spec = gs.SeriesSpec(args.r, args.c1, args.c2max + 2)
    try:
        recs = gs.extract_invariants(spec, range(args.c2min, args.c2max + 1), rank3)
    except gs.MissingDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    _write_csv((r.csv_row() for r in recs), gs.CSV_HEADER, out)
    return EXIT_OK


def cmd_correspond(args, out=sys.stdout) -> int:
    out.write(json.dumps(correspondence_record((args.r, args.c1, args.c2))) + "\n")
    return EXIT_OK


def cmd_hurwitz(args, out=sys.stdout) -> int:
    table = HurwitzTable(args.max)
    _write_csv(([n, h.numerator, h.denominator] for n, h in table.rows()), ["N", "H_num", "H_den"], out)
    return EXIT_OK


def cmd_bps(args, out=sys.stdout) -> int:
    rows, diagnostic = gs.integrality_probe(args.r, args.c1, args.c2max, args.c2min)
    _write_csv(
        (
            [
                p.gamma.r, p.gamma.c1, p.gamma.c2, _frac_str(gs.to_lattice(p.gamma)[2]),
                p.omegabar.numerator, p.omegabar.denominator,
                p.omega.numerator, p.omega.denominator, int(p.integral),
            ]
            for p in rows
        ),
        ["r", "c1", "c2", "ch2", "omegabar_num", "omegabar_den", "omega_num", "omega_den", "integral"],
        out,
    )
    if diagnostic:
        print(f"diagnostic: {diagnostic}", file=sys.stderr)
    return EXIT_OK


def cmd_fan(args, out=sys.stdout) -> int:
    _write_csv(([w[0], w[1], s] for w, s in fan_table()), ["ray_x", "ray_y", "self_intersection"], out)
    return EXIT_OK


def verification_components(r: int, element: str, order: int, completed: bool = True, rank3=None):
    """``(labels, weight, callables)`` of the vector checked for rank ``r``."""
    if r == 1:
        h = gs.h_vw(gs.SeriesSpec(1, 0, order))
        return ["h_1,0"], Fraction(-3, 2), [mv.series_function(h)]
    if r == 2:
        comps = []
        for c1 in (0, 1):
            f = gs.f2(c1, order)
            if completed:
                spec = mv.f2_completion(c1)
                comps.append(lambda tau, f=f, spec=spec: mv.complete_depth1(f, spec, tau))
            else:
                comps.append(mv.series_function(f))
        labels = ["fhat_2,0", "fhat_2,1"] if completed else ["f_2,0", "f_2,1"]
        return labels, Fraction(3, 2), comps
    if r == 3:
        if not rank3:
            raise gs.MissingDataError("rank-3 coefficients not loaded")
        if element == "T" or not completed:
            c1s = sorted(rank3)
            return [f"f_3,{c}" for c in c1s], Fraction(3, 2), [mv.series_function(rank3[c]) for c in c1s]
        if 0 not in rank3:
            raise gs.MissingDataError("the depth-two completion needs f_3,0")
        specs = mv.f3_completion_terms(order)
        f3 = rank3[0]
        log.warning("only f_3,0 has a known completion; fitting a one-component vector")
        return ["fhat_3,0"], Fraction(3, 2), [lambda tau: mv.complete_depth2(f3, specs, tau)]
    raise ValueError(f"no verification for rank {r}")


def cmd_verify(args, out=sys.stdout) -> int:
    cfg: Config = args.config_obj
    mp.mp.dps = cfg.precision_digits
    try:
        rank3 = _rank3(cfg.data_paths)
        labels, weight, comps = verification_components(
            args.r, args.element, cfg.truncation_order, not args.uncompleted, rank3
        )
        if cfg.tau_grid:
            pts = [mv.TauPoint(*p) for p in cfg.tau_grid]
            half = max(len(comps), len(pts) // 2)
            fit, hold = pts[:half], pts[half:]
        else:
            fit = mv.sample_points(args.points, args.seed, args.element)
            hold = mv.sample_points(args.points, args.seed + 1000, args.element)
            hold = [p for p in hold if p not in fit]
        report = mv.fit_transformation(
            comps, args.element, weight, fit, hold, cfg.tolerance, cfg.truncation_order, labels=labels
        )
    except gs.MissingDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (mv.NumericalError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = report.to_json(sort_keys=True)
    out.write(text + "\n")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mockgw", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", help="q-expansion of h^VW or h^GW")
    e.add_argument("--series", choices=("vw", "gw"), default="vw")
    e.add_argument("--r", type=int, required=True)
    e.add_argument("--c1", type=int, default=0)
    e.add_argument("--order", type=int, default=10)
    e.add_argument("--format", choices=("json", "csv"), default="json")
    e.add_argument("--data", action="append", default=[], help="rank-3 data file (repeatable)")
    e.set_defaults(func=cmd_expand)

    i = sub.add_parser("invariants", help="VW/GW invariants with signs and contact orders (CSV)")
    i.add_argument("--r", type=int, required=True)
    i.add_argument("--c1", type=int, default=0)
    i.add_argument("--c2min", type=int, default=0)
    i.add_argument("--c2max", type=int, default=10)
    i.add_argument("--data", action="append", default=[])
    i.set_defaults(func=cmd_invariants)

    c = sub.add_parser("correspond", help="contact order and curve class of a charge")
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--c1", type=int, required=True)
    c.add_argument("--c2", type=int, required=True)
    c.set_defaults(func=cmd_correspond)

    v = sub.add_parser("verify", help="fit and hold out a modular transformation matrix")
    v.add_argument("--r", type=int, required=True)
    v.add_argument("--element", choices=("S", "T"), default="S")
    v.add_argument("--order", type=int, dest="truncation_order")
    v.add_argument("--dps", type=int, dest="precision_digits")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--points", type=int, default=6)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--uncompleted", action="store_true", help="drop the Eichler correction")
    v.add_argument("--data", action="append", dest="data_paths")
    v.add_argument("--report", help="also write the JSON report here")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hurwitz", help="Hurwitz class numbers H(0..max) (CSV)")
    h.add_argument("--max", type=int, required=True)
    h.set_defaults(func=cmd_hurwitz)

    b = sub.add_parser("bps", help="BPS invariants by Moebius inversion (CSV)")
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--c1", type=int, default=0)
    b.add_argument("--c2min", type=int, default=0)
    b.add_argument("--c2max", type=int, required=True)
    b.set_defaults(func=cmd_bps)

    f = sub.add_parser("fan", help="rays and self-intersections (CSV)")
    f.set_defaults(func=cmd_fan)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "verify":
        overrides = {
            "truncation_order": args.truncation_order,
            "precision_digits": args.precision_digits,
            "tolerance": args.tolerance,
            "data_paths": args.data_paths,
        }
        try:
            args.config_obj = Config.load(args.config, overrides)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_MISSING
    return args.func(args, out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

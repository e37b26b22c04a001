"""Command line: ``verify``, ``compute`` and ``sweep``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from ..besov import BesovQuadConfig, besov_seminorm, lp_norm
from ..capset.capacity import CapacityFamilyConfig, GoldenSection, GridScan, besov_capacity_upper
from ..capset.perimeter import PerimeterMCConfig, fractional_perimeter
from ..core import CORPUS_CATALOG, BesovParams, CorpusSpec, LorentzParams, make_corpus
from ..lorentz import LebesgueVolume, RadialWeight, lorentz_norm, weak_norm
from ..rearrange import equimeasurable, rearrange
from .config import SuiteConfig, load_config
from .report import emit_report
from .suites import capacity_profile, geometric_corpus, run_suite, unit_set

THREADS_ENV = "BESOVLAB_THREADS"


def _threads(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    return int(env) if env else 1


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _entry(spec: CorpusSpec):
    return make_corpus(spec)[0][1]


def _geometric(name: str, dim: int):
    if name == "unit":
        return unit_set(dim)
    sets = dict(geometric_corpus(dim))
    if name not in sets:
        raise SystemExit(f"unknown set {name!r}; choose unit, {', '.join(sets)}")
    return sets[name]


def _params(args) -> BesovParams:
    return BesovParams(args.beta, args.p, args.q, args.dim)


def _content(text: str):
    if text == "lebesgue":
        return LebesgueVolume()
    kind, _, gamma = text.partition(":")
    if kind == "radial" and gamma:
        return RadialWeight(float(gamma))
    raise SystemExit(f"unknown content {text!r}; use lebesgue or radial:<gamma>")


# ---------------------------------------------------------------------------
# commands

def cmd_verify(args) -> int:
    cfg = load_config(args.config) if args.config else SuiteConfig()
    over = {"threads": _threads(args.threads)}
    if args.seed is not None:
        over["seed"] = args.seed
    cfg = cfg.with_overrides(**over)
    out = args.out or cfg.out_path or "-"
    reports = run_suite(cfg)
    emit_report(reports, args.format, out, cfg.echo())
    failed = [r for r in reports if not r.passed]
    if out != "-":
        print(f"{len(reports) - len(failed)}/{len(reports)} checks passed -> {out}",
              file=sys.stderr)
    for r in failed:
        print(f"FAIL {r.check_id} [{r.params}] lhs={r.lhs:.6g} rhs={r.rhs:.6g}", file=sys.stderr)
    return 1 if failed else 0


def cmd_compute(args) -> int:
    quad = BesovQuadConfig()
    what = args.quantity
    if what in ("besov", "lorentz", "rearrange"):
        f = _entry(CorpusSpec((args.entry,), args.dim, args.resolution))
    if what == "besov":
        out = {"besov_seminorm": besov_seminorm(f, _params(args), quad)}
    elif what == "lorentz":
        nu = _content(args.content)
        if args.q0 == "inf":
            out = {"weak_norm": weak_norm(f, args.p0, nu)}
        else:
            out = {"lorentz_norm": lorentz_norm(f, LorentzParams(args.p0, float(args.q0)), nu)}
    elif what == "rearrange":
        prof = rearrange(f)
        ok, dev = equimeasurable(f, prof)
        out = {"radii": prof.radii.tolist(), "values": prof.values.tolist(),
               "equimeasurable": ok, "max_volume_deviation": dev}
    elif what == "perimeter":
        E = _geometric(args.set, args.dim).scaled(args.scale)
        est = fractional_perimeter(E, _params(args),
                                   PerimeterMCConfig(outer_samples=args.samples, seed=args.seed,
                                                     threads=_threads(args.threads)))
        out = {"perimeter": est.value, "stderr": est.stderr, "samples": est.samples}
    else:
        K = _geometric(args.set, args.dim).scaled(args.scale)
        eps = tuple(2.0 ** -k for k in range(1, args.levels + 1))
        opt = GoldenSection() if args.golden else GridScan()
        fam = CapacityFamilyConfig(eps, capacity_profile(args.profile), opt, args.resolution)
        bound = besov_capacity_upper(K, _params(args), fam, quad)
        out = {"capacity_upper": bound.value, "argmin_eps": bound.eps}
    json.dump(out, sys.stdout)
    sys.stdout.write("\n")
    return 0


SWEEP_COLUMNS = ("beta", "p", "q", "regime", "besov", "lp_sobolev", "lorentz_sobolev",
                 "ratio_left_middle", "ratio_middle_right", "error")


def cmd_sweep(args) -> int:
    base = {"beta": args.beta, "p": args.p, "q": args.q}
    f = _entry(CorpusSpec((args.entry,), args.dim, args.resolution))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for v in np.linspace(args.start, args.stop, args.steps):
        vals = dict(base, **{args.param: float(v)})
        try:
            P = BesovParams(vals["beta"], vals["p"], vals["q"], args.dim)
        except ValueError as exc:
            w.writerow([repr(vals["beta"]), repr(vals["p"]), repr(vals["q"]), "", "", "", "",
                        "", "", str(exc)])
            continue
        r, s = P.sobolev_exponent, P.pq_max
        b = besov_seminorm(f, P)
        left = lp_norm(f, r)
        mid = lorentz_norm(f, LorentzParams(r, s), LebesgueVolume())
        row = [P.beta, P.p, P.q, P.regime, b, left, mid, left / mid,
               mid / b if b > 0 else math.nan]
        w.writerow([x if isinstance(x, str) else repr(float(x)) for x in row] + [""])
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_params(sp):
    sp.add_argument("--beta", type=float, default=0.3)
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--q", type=float, default=1.0)
    sp.add_argument("--dim", type=int, default=1, choices=(1, 2, 3))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="besovlab",
                                 description="Numerical checks of fractional Besov inequalities.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the configured suites and write a report")
    v.add_argument("--config", help="flat key = value config file (defaults if omitted)")
    v.add_argument("--out", help="report path, '-' for stdout")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--seed", type=_u64)
    v.add_argument("--threads", type=int, help=f"worker threads (else ${THREADS_ENV}, else 1)")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compute", help="evaluate one quantity and print JSON")
    c.add_argument("quantity", choices=("besov", "lorentz", "perimeter", "capacity", "rearrange"))
    c.add_argument("--entry", default="bump", help=f"corpus entry: {', '.join(CORPUS_CATALOG)}")
    c.add_argument("--resolution", type=int, default=64, help="cells per unit length")
    _add_params(c)
    c.add_argument("--p0", type=float, default=1.0)
    c.add_argument("--q0", default="1", help="number or 'inf' for the weak norm")
    c.add_argument("--content", default="lebesgue", help="lebesgue or radial:<gamma>")
    c.add_argument("--set", default="unit", help="unit, ball, box or union")
    c.add_argument("--scale", type=float, default=1.0)
    c.add_argument("--samples", type=int, default=10_000)
    c.add_argument("--seed", type=_u64, default=42)
    c.add_argument("--threads", type=int)
    c.add_argument("--levels", type=int, default=5,
                   help="eps grid 2^-1 .. 2^-levels; needs resolution >= 2^(levels+1)")
    c.add_argument("--profile", choices=("linear", "smooth3", "smooth5"), default="linear")
    c.add_argument("--golden", action="store_true", help="refine eps with a bounded search")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", help="sweep one parameter and emit CSV")
    s.add_argument("--param", choices=("beta", "p", "q"), default="beta")
    s.add_argument("--from", dest="start", type=float, required=True)
    s.add_argument("--to", dest="stop", type=float, required=True)
    s.add_argument("--steps", type=int, default=5)
    s.add_argument("--entry", default="bump")
    s.add_argument("--resolution", type=int, default=64)
    _add_params(s)
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every subcommand writes a CSV table (default) or a JSON document with the
full configuration echoed. Settings can also come from a ``key=value`` file
passed with ``--config``; command-line flags win over file values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .combinatorics import log_narayana, narayana_row
from .ensembles import SEED_ENV_VAR, EnsembleConfig, EntryDistribution, check_seed, default_seed
from .experiments import (
    available_workers,
    pp_plot_data,
    run_clt_check,
    run_largest_eigenvalue_mc,
    run_mp_ks,
    run_trace_moment_check,
    run_universality_pair,
)
from .mp_law import MPDistribution, mp_cdf_array, mp_density, mp_moment_narayana, mp_moment_numeric
from .rescaling import CONVENTIONS
from .special_functions import tw_cdf, tw_quantiles


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _dist(text: str) -> EntryDistribution:
    try:
        return EntryDistribution.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    try:
        return check_seed(int(text, 0))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ensemble_flags(sp, reps=None):
    sp.add_argument("--n", type=int, required=True, help="rows N")
    sp.add_argument("--p", type=int, required=True, help="columns p")
    sp.add_argument("--dist", type=_dist, default="gaussian", help="gaussian[:s2], mix:w,v1,v2, t:nu, rademacher")
    sp.add_argument("--beta", type=int, choices=(1, 2), default=1, help="1 real, 2 complex")
    sp.add_argument("--seed", type=_seed, default=None, help=f"master seed (default ${SEED_ENV_VAR} or built-in)")
    if reps is not None:
        sp.add_argument("--reps", type=int, default=reps, help="number of replications R")
    sp.add_argument("--threads", type=int, default=None, help="worker processes (default: available cores)")


def _output_flags(sp):
    sp.add_argument("--out", "--csv", dest="out", default=None, help="output file; .json selects JSON, anything else CSV")
    sp.add_argument("--format", choices=("csv", "json"), default=None, help="override the output format")
    sp.add_argument("--config", default=None, help="key=value file mirroring the flags")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="covuniv",
        description="Edge statistics of sample covariance matrices: exact combinatorics, "
        "Tracy-Widom laws and seeded Monte Carlo.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sp = sub.add_parser("narayana", help="Narayana numbers N(s, k) for one s")
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--gamma", type=float, default=1.0, help="weight gamma^k for the log column")
    _output_flags(sp)

    sp = sub.add_parser("mp", help="Marchenko-Pastur moments: Narayana sum vs quadrature")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--sigma2", type=float, default=1.0)
    sp.add_argument("--moments", type=int, default=10, help="largest moment order L")
    sp.add_argument("--grid", type=int, default=0, help="also emit density and CDF at this many points")
    _output_flags(sp)

    sp = sub.add_parser("tw", help="Tracy-Widom quantiles or CDF values")
    sp.add_argument("--beta", type=int, choices=(1, 2), default=1)
    sp.add_argument("--quantiles", type=_floats, default=None, help="probabilities, comma separated")
    sp.add_argument("--cdf", type=_floats, default=None, help="abscissae, comma separated")
    sp.add_argument("--grid", type=int, default=0, help="emit the CDF at this many points of [-8, 4]")
    _output_flags(sp)

    for name, help_text in (
        ("mc-table", "empirical CDF of the rescaled largest eigenvalue at the anchor points"),
        ("pp-plot", "probability-plot pairs (TW quantile, sorted rescaled value)"),
    ):
        sp = sub.add_parser(name, help=help_text)
        _ensemble_flags(sp, reps=10000)
        sp.add_argument("--a1", type=float, default=0.0, help="shift of N in the adjusted rescaling")
        sp.add_argument("--a2", type=float, default=0.0, help="shift of p in the adjusted rescaling")
        sp.add_argument("--convention", choices=CONVENTIONS, default="adjusted")
        _output_flags(sp)

    sp = sub.add_parser("mp-ks", help="KS distance between one spectrum and the MP law")
    _ensemble_flags(sp)
    sp.add_argument("--index", type=int, default=0, help="replication index")
    _output_flags(sp)

    sp = sub.add_parser("trace-moment", help="mean of Tr(M^s)/N against the Narayana formula")
    _ensemble_flags(sp, reps=200)
    sp.add_argument("--s", type=int, required=True)
    _output_flags(sp)

    sp = sub.add_parser("clt", help="variance of Tr(M/u_+)^s")
    _ensemble_flags(sp, reps=4000)
    sp.add_argument("--s", type=int, required=True)
    _output_flags(sp)

    sp = sub.add_parser("universality", help="normalised trace power under two entry laws")
    _ensemble_flags(sp, reps=2000)
    sp.add_argument("--dist-b", type=_dist, default="mix:0.5,1,3", help="entry law of the second ensemble")
    sp.add_argument("--seed-b", type=_seed, default=None, help="seed of the second ensemble (default seed + 1)")
    sp.add_argument("--c", type=float, default=1.0, help="power s = round(c N^{2/3})")
    sp.add_argument("--s", type=int, default=None, help="explicit power, overrides --c")
    sp.add_argument("--gamma-inf", action="store_true", help="use XX*/p with the v_+ normalisation")
    _output_flags(sp)

    lines = ["flags per command (negative lists need '=', e.g. --cdf=-3,0):"]
    for name, p in sub.choices.items():
        flags = ["/".join(a.option_strings) for a in p._actions if a.option_strings and a.dest != "help"]
        lines.append(f"  {name}: " + " ".join(flags))
    ap.epilog = "\n".join(lines)
    ap.formatter_class = argparse.RawDescriptionHelpFormatter
    return ap


def _read_config(path: str, sp: argparse.ArgumentParser) -> dict:
    known = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not eq:
            raise UsageError(f"{path}:{num}: expected key=value")
        if key not in known:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        value = value.strip()
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            low = value.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"{path}:{num}: {key} expects true/false")
            out[key] = low in ("true", "1", "yes")
        else:
            try:
                v = action.type(value) if action.type else value
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"{path}:{num}: bad value for {key}: {exc}") from None
            if action.choices is not None and v not in action.choices:
                raise UsageError(f"{path}:{num}: {key} must be one of {list(action.choices)}")
            out[key] = v
    return out


def _echo(args) -> dict:
    skip = {"out", "format", "config", "threads"}
    echo = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, EntryDistribution):
            v = str(v)
        echo[k] = v
    return echo


def _ensemble(args, dist=None, seed=None) -> EnsembleConfig:
    return EnsembleConfig(
        args.n,
        args.p,
        args.beta,
        dist if dist is not None else args.dist,
        args.seed if seed is None else seed,
    )


def _cmd_narayana(args):
    if not args.gamma > 0:
        raise UsageError("--gamma must be positive")
    lg = math.log(args.gamma)
    rows = [(args.s, k, v, log_narayana(args.s, k) + k * lg) for k, v in enumerate(narayana_row(args.s), 1)]
    return ["s", "k", "N", "log_N_gamma_k"], rows, {}


def _cmd_mp(args):
    d = MPDistribution(args.gamma, args.sigma2)
    # decimal reading of the flags keeps the Narayana sum exact
    g, s2 = Fraction(repr(args.gamma)), Fraction(repr(args.sigma2))
    rows = []
    for L in range(1, args.moments + 1):
        exact = mp_moment_narayana(L, g, s2)
        rows.append(("moment", L, exact, mp_moment_numeric(d, L)))
    if args.grid:
        if args.grid < 2:
            raise UsageError("--grid needs at least 2 points")
        xs = np.linspace(d.u_minus, d.u_plus, args.grid)
        dens = mp_density(d, xs)
        cdf = mp_cdf_array(d, xs)
        rows += [("grid", float(x), float(a), float(b)) for x, a, b in zip(xs, dens, cdf)]
    # moment rows: (L, narayana, quadrature); grid rows: (x, density, cdf)
    return ["kind", "arg", "value_a", "value_b"], rows, {"u_minus": d.u_minus, "u_plus": d.u_plus}


def _cmd_tw(args):
    if args.quantiles is None and args.cdf is None and not args.grid:
        raise UsageError("tw needs --quantiles, --cdf or --grid")
    rows = []
    if args.quantiles:
        qs = tw_quantiles(args.beta, args.quantiles)
        rows += [(args.beta, "quantile", p, float(x)) for p, x in zip(args.quantiles, qs)]
    xs = list(args.cdf or [])
    if args.grid:
        if args.grid < 2:
            raise UsageError("--grid needs at least 2 points")
        xs += [float(x) for x in np.linspace(-8.0, 4.0, args.grid)]
    rows += [(args.beta, "cdf", float(tw_cdf(args.beta, x)), x) for x in xs]
    return ["beta", "kind", "prob", "x"], rows, {}


def _mc(args):
    return run_largest_eigenvalue_mc(
        _ensemble(args), args.reps, args.a1, args.a2, threads=args.threads, convention=args.convention
    )


def _cmd_mc_table(args):
    rep = _mc(args)
    return ["anchor_x", "F1_target", "empirical"], rep.rows(), {"R": rep.R}


def _cmd_pp_plot(args):
    pairs = pp_plot_data(_mc(args))
    return ["theoretical", "empirical"], [tuple(map(float, r)) for r in pairs], {}


def _cmd_mp_ks(args):
    cfg = _ensemble(args)
    ks = run_mp_ks(cfg, args.index)
    return ["N", "p", "ks"], [(cfg.N, cfg.p, ks)], {}


def _report_rows(rep):
    d = rep.as_dict()
    fields = [k for k, v in d.items() if not isinstance(v, dict)]
    return fields, [tuple(d[k] for k in fields)], {}


def _cmd_trace_moment(args):
    return _report_rows(run_trace_moment_check(_ensemble(args), args.s, args.reps, args.threads))


def _cmd_clt(args):
    return _report_rows(run_clt_check(_ensemble(args), args.s, args.reps, args.threads))


def _cmd_universality(args):
    seed_b = args.seed_b if args.seed_b is not None else (args.seed + 1) % (1 << 64)
    rep = run_universality_pair(
        _ensemble(args),
        _ensemble(args, dist=args.dist_b, seed=seed_b),
        c=args.c,
        R=args.reps,
        gamma_inf=args.gamma_inf,
        s=args.s,
        threads=args.threads,
    )
    return _report_rows(rep)


COMMANDS = {
    "narayana": _cmd_narayana,
    "mp": _cmd_mp,
    "tw": _cmd_tw,
    "mc-table": _cmd_mc_table,
    "pp-plot": _cmd_pp_plot,
    "mp-ks": _cmd_mp_ks,
    "trace-moment": _cmd_trace_moment,
    "clt": _cmd_clt,
    "universality": _cmd_universality,
}


def _render(fmt, command, args, header, rows, extra) -> str:
    if fmt == "json":
        doc = {
            "command": command,
            "version": __version__,
            "config": _echo(args),
            "columns": header,
            "rows": [list(r) for r in rows],
        }
        if extra:
            doc["extra"] = extra
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _prescan(argv):
    """Subcommand and --config path, found before the real parse."""
    command = next((a for a in argv if not a.startswith("-")), None)
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    return command, path


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    subs = ap._subparsers._group_actions[0].choices
    command, cfg_path = _prescan(argv)
    if cfg_path and command in subs:
        sub = subs[command]
        try:
            file_vals = _read_config(cfg_path, sub)
        except UsageError as exc:
            print(f"covuniv {command}: error: {exc}", file=sys.stderr)
            return 2
        sub.set_defaults(**file_vals)
        # required flags may come from the file
        for a in sub._actions:
            if a.dest in file_vals:
                a.required = False
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        if getattr(args, "threads", None) is None and hasattr(args, "threads"):
            args.threads = available_workers()
        fmt = args.format or ("json" if args.out and args.out.lower().endswith(".json") else "csv")
        header, rows, extra = COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, ValueError) as exc:
        print(f"covuniv {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"covuniv {args.command}: runtime error: {exc}", file=sys.stderr)
        return 1

    text = _render(fmt, args.command, args, header, rows, extra)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"covuniv {args.command}: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end.

Subcommands: ``simulate``, ``estimate``, ``compare``, ``gamma``,
``tailcheck``.  Every run takes a mandatory ``--seed`` (no wall-clock
default), writes its outputs plus a ``manifest.json`` sufficient to reproduce
them bit-exactly, and always gives the same results for any ``--workers``
value.  Exit codes: 0 success, 2 configuration error, 3 runtime abort
(cycle-cap exceeded).

Model selection: either ``--config file.json`` (a model configuration
dictionary, possibly with extra run parameters) or inline flags such as
``--model geometric_jump --p 0.3``.  Flags override config-file values; the
``REGENEXT_OUTDIR`` environment variable overrides the default output
directory only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import DEFAULT_CYCLE_CAP, CycleCapExceeded, make_stream, simulate_cycle, write_cycles_csv
from .extremes import enumerate_J, gamma
from .models import model_from_dict, model_to_dict
from .montecarlo import (
    compare,
    estimate_profile,
    simulate_order_stats,
    tail_equivalence_check,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class ConfigError(ValueError):
    pass


def _parse_step(text: str) -> dict:
    """Parse a step-distribution spec like 'pareto:1.5:shift=-4' or 'const:-1'."""
    parts = text.split(":")
    kind = parts[0]
    if kind == "const":
        if len(parts) != 2:
            raise ConfigError(f"const step needs one value, got {text!r}")
        return {"kind": "const", "value": float(parts[1])}
    if kind == "pareto":
        if len(parts) < 2:
            raise ConfigError(f"pareto step needs an alpha, got {text!r}")
        out = {"kind": "pareto", "alpha": float(parts[1])}
        for extra in parts[2:]:
            key, _, val = extra.partition("=")
            if key not in ("scale", "shift"):
                raise ConfigError(f"unknown pareto step field {key!r}")
            out[key] = float(val)
        return out
    raise ConfigError(f"unknown step kind {kind!r} (use 'pareto' or 'const')")


def _model_dict_from_args(args, config: dict) -> dict:
    d = dict(config.get("model", config if "variant" in config else {}))
    if getattr(args, "model", None):
        d["variant"] = args.model
    if getattr(args, "p", None) is not None:
        d["p"] = args.p
    if getattr(args, "step", None):
        d["step"] = _parse_step(args.step)
    if getattr(args, "beta", None):
        d["beta"] = [float(x) for x in args.beta.split(",")]
    if getattr(args, "f_alpha", None) is not None:
        d["f_alpha"] = args.f_alpha
    if getattr(args, "m_rule", None):
        if args.m_rule == "default":
            d["m_rule"] = "default"
        else:
            d["m_rule"] = {"kind": "const", "value": int(args.m_rule)}
    if getattr(args, "cluster_law", None):
        text = args.cluster_law
        if os.path.exists(text):
            text = Path(text).read_text()
        d["cluster_law"] = json.loads(text)
    if not d.get("variant"):
        raise ConfigError("no model specified: use --model or --config")
    return d


def _load_config(args) -> dict:
    if getattr(args, "config", None):
        try:
            return json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    return {}


def _outdir(args) -> Path:
    out = getattr(args, "out", None) or os.environ.get("REGENEXT_OUTDIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(outdir: Path, command: str, model_dict, params: dict) -> None:
    manifest = {
        "command": command,
        "model": model_dict,
        "params": params,
        "versions": {
            "regenext": __version__,
            "numpy": np.__version__,
        },
        "argv": sys.argv[1:],
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _grid_from_args(args):
    spec = getattr(args, "grid", "auto")
    if spec in (None, "auto"):
        return None
    try:
        lo, hi, num = spec.split(":")
        return np.linspace(float(lo), float(hi), int(num))
    except ValueError:
        raise ConfigError(
            f"grid must be 'auto' or 'lo:hi:count', got {spec!r}"
        ) from None


def _thresholds_from_args(args):
    if getattr(args, "thresholds", None):
        return sorted(float(x) for x in args.thresholds.split(","))
    grid = _grid_from_args(args)
    if grid is None:
        raise ConfigError("this command needs --thresholds or --grid lo:hi:count")
    return grid


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    config = _load_config(args)
    model_dict = _model_dict_from_args(args, config)
    model = model_from_dict(model_dict)
    outdir = _outdir(args)
    if args.cycles is not None:
        rng = make_stream(args.seed, 0)
        records = [
            simulate_cycle(model, args.r, rng, cap=args.cap)
            for _ in range(args.cycles)
        ]
        path = outdir / "cycles.csv"
        write_cycles_csv(records, path)
        params = {"cycles": args.cycles, "r": args.r, "seed": args.seed, "cap": args.cap}
        print(f"wrote {args.cycles} cycles to {path}")
    elif args.steps is not None:
        sample = simulate_order_stats(
            model, args.steps, args.qmax, args.replicas, args.seed, args.workers
        )
        path = outdir / "order_stats.csv"
        sample.to_csv(path)
        params = {
            "n": args.steps, "q_max": args.qmax, "replicas": args.replicas,
            "seed": args.seed, "workers": args.workers,
        }
        print(f"wrote {args.replicas} replicas of top-{args.qmax} over {args.steps} steps to {path}")
    else:
        raise ConfigError("simulate needs --cycles K (cycle mode) or --steps n (order-stat mode)")
    _write_manifest(outdir, "simulate", model_dict, params)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    config = _load_config(args)
    model_dict = _model_dict_from_args(args, config)
    model = model_from_dict(model_dict)
    outdir = _outdir(args)
    thresholds = _thresholds_from_args(args)
    est = estimate_profile(model, args.cycles, args.r, thresholds, args.seed, cap=args.cap)
    path = outdir / "profile.csv"
    with open(path, "w", newline="") as fh:
        import csv as _csv

        w = _csv.writer(fh)
        w.writerow(
            ["x", "exceed_count", "G_hat"]
            + [f"beta{i}_hat" for i in range(1, args.r)]
            + ["vacuous"]
        )
        prof = est.profile()
        for t, x in enumerate(est.thresholds):
            w.writerow(
                [x, int(est.exceed_counts[t]), format(prof.G(float(x)), ".10g")]
                + [format(b, ".10g") for b in est.beta_hat[t]]
                + [bool(est.vacuous[t])]
            )
    summary = {
        "mu_hat": est.mu_hat, "mu_stderr": est.mu_stderr,
        "num_cycles": est.num_cycles, "seed": args.seed,
    }
    with open(outdir / "profile_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"mu_hat = {est.mu_hat:.6g} +- {est.mu_stderr:.3g}  ({args.cycles} cycles)")
    print(f"wrote per-threshold profile to {path}")
    _write_manifest(outdir, "estimate", model_dict, {
        "cycles": args.cycles, "r": args.r, "seed": args.seed,
        "thresholds": list(map(float, thresholds)),
    })
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _load_config(args)
    model_dict = _model_dict_from_args(args, config)
    model = model_from_dict(model_dict)
    outdir = _outdir(args)
    report = compare(
        model,
        n=args.steps,
        q_max=args.qmax,
        N=args.replicas,
        grid=_grid_from_args(args),
        beta_source=args.beta_source,
        seed=args.seed,
        workers=args.workers,
        estimate_cycles=args.estimate_cycles,
        cap=args.cap,
    )
    report.to_csv(outdir / "report.csv")
    report.save_summary(outdir / "summary.json")
    for q in range(1, report.q_max + 1):
        print(f"sup_gap(q={q}) = {report.sup_gap[q - 1]:.6f}")
    _write_manifest(outdir, "compare", model_dict, {
        "n": args.steps, "q_max": args.qmax, "replicas": args.replicas,
        "seed": args.seed, "beta_source": args.beta_source,
        "workers": args.workers,
    })
    return EXIT_OK


def _cmd_gamma(args) -> int:
    members = enumerate_J(args.q, args.k)
    value = gamma(args.q, args.k, args.beta)
    print(f"J_{{{args.q},{args.k}}} = {list(members.members)}")
    print(f"gamma_{{{args.q},{args.k}}} = {value:.12g}")
    return EXIT_OK


def _cmd_tailcheck(args) -> int:
    config = _load_config(args)
    model_dict = _model_dict_from_args(args, config)
    model = model_from_dict(model_dict)
    outdir = _outdir(args)
    thresholds = _thresholds_from_args(args)
    try:
        table = tail_equivalence_check(model, args.cycles, thresholds, args.seed, cap=args.cap)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    path = outdir / "tailcheck.csv"
    table.to_csv(path)
    for t, x in enumerate(table.thresholds):
        tag = " (vacuous)" if table.vacuous[t] else ""
        print(f"x={x:g}: ratio={table.ratio[t]:.4f} +- {table.ratio_stderr[t]:.4f}{tag}")
    print(f"wrote {path}")
    _write_manifest(outdir, "tailcheck", model_dict, {
        "cycles": args.cycles, "seed": args.seed,
        "thresholds": list(map(float, thresholds)),
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_model_flags(sub):
    sub.add_argument("--config", help="JSON config file (flags override it)")
    sub.add_argument("--model", choices=[
        "geometric_jump", "reflected_walk", "lindley", "prescribed_beta", "iid_block",
    ])
    sub.add_argument("--p", type=float, help="jump/up probability")
    sub.add_argument("--step", help="lindley step, e.g. pareto:1.5:shift=-4 or const:-1")
    sub.add_argument("--beta", help="prescribed cluster probabilities, e.g. 0.5,0.3,0.2")
    sub.add_argument("--f-alpha", dest="f_alpha", type=float,
                     help="Pareto shape of the prescribed-beta reference tail")
    sub.add_argument("--m-rule", dest="m_rule",
                     help="'default' or a constant integer block width")
    sub.add_argument("--cluster-law", dest="cluster_law",
                     help="iid_block p(m,i) table: JSON text or a path to it")
    sub.add_argument("--out", help="output directory (default '.', env REGENEXT_OUTDIR)")
    sub.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")
    sub.add_argument("--cap", type=int, default=DEFAULT_CYCLE_CAP,
                     help="hard cap on single-cycle length")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regenext",
        description="Order statistics of regenerative processes: simulate, "
                    "approximate, compare.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="simulate cycles or order statistics")
    _add_model_flags(sim)
    sim.add_argument("--cycles", type=int, help="cycle mode: number of cycles")
    sim.add_argument("--r", type=int, default=3, help="top-r maxima per cycle")
    sim.add_argument("--steps", type=int, help="order-stat mode: trajectory length n")
    sim.add_argument("--qmax", type=int, default=3)
    sim.add_argument("--replicas", type=int, default=1000)
    sim.add_argument("--workers", type=int, default=1)
    sim.set_defaults(func=_cmd_simulate)

    est = subs.add_parser("estimate", help="estimate mu, G and beta_i(x) from cycles")
    _add_model_flags(est)
    est.add_argument("--cycles", type=int, default=1_000_000)
    est.add_argument("--r", type=int, default=5)
    est.add_argument("--thresholds", help="comma-separated list of x values")
    est.add_argument("--grid", help="'lo:hi:count' threshold grid")
    est.set_defaults(func=_cmd_estimate)

    cmp_ = subs.add_parser("compare", help="empirical vs approximate CDF of M_n^(q)")
    _add_model_flags(cmp_)
    cmp_.add_argument("--steps", type=int, default=2000, help="trajectory length n")
    cmp_.add_argument("--qmax", type=int, default=3)
    cmp_.add_argument("--replicas", type=int, default=100_000)
    cmp_.add_argument("--grid", default="auto", help="'auto' or 'lo:hi:count'")
    cmp_.add_argument("--beta-source", dest="beta_source", default="closed_form",
                      choices=["closed_form", "estimated", "threshold_dependent"])
    cmp_.add_argument("--estimate-cycles", dest="estimate_cycles", type=int,
                      default=1_000_000)
    cmp_.add_argument("--workers", type=int, default=1)
    cmp_.set_defaults(func=_cmd_compare)

    gam = subs.add_parser("gamma", help="print gamma_{q,k} and the index set J_{q,k}")
    gam.add_argument("q", type=int)
    gam.add_argument("k", type=int)
    gam.add_argument("beta", type=float, nargs="*", default=[])
    gam.set_defaults(func=_cmd_gamma)

    tc = subs.add_parser("tailcheck", help="cycle-maximum tail vs reference tail")
    _add_model_flags(tc)
    tc.add_argument("--cycles", type=int, default=1_000_000)
    tc.add_argument("--thresholds", help="comma-separated list of x values")
    tc.add_argument("--grid", help="'lo:hi:count' threshold grid")
    tc.set_defaults(func=_cmd_tailcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, which matches our config-error code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CycleCapExceeded as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

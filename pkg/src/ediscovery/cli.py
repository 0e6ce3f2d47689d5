"""Command line interface.

Exit codes: 0 success (all verdicts pass), 1 a verdict failed, 2 usage or
input error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import EmptyInstanceError, OneDimInstance, format_transcript, nrd, recall
from .datagen import (
    GaussianConfig,
    InstanceParseError,
    dump_instance,
    enforce_realizable,
    gaussian_mixture,
    load_instance,
    lower_bound_family,
    random_threshold_instance,
    save_instance,
)
from .harness import (
    CAMPAIGNS,
    HIGHDIM_CAMPAIGNS,
    ExperimentConfig,
    aggregate,
    fmt,
    load_config,
    lower_bound_check,
    run_figure_campaign,
    verify_bounds,
    write_csv,
)
from .parties import AliceOracle
from .protocols import (
    ClassifierReportConfig,
    LabelReportConfig,
    run_classifier_report,
    run_label_report,
    run_reveal_all,
)


def _common(p: argparse.ArgumentParser, *names):
    flags = {
        "seed": dict(type=int, help="root seed"),
        "trials": dict(type=int, help="Monte Carlo trials / repeats"),
        "delta": dict(type=float, help="failure probability"),
        "k": dict(type=int, help="error tolerance of the label-report protocol"),
        "iterations": dict(type=int, help="CAL iterations T"),
        "batch": dict(type=int, help="documents per CAL iteration"),
        "out": dict(help="output path"),
        "config": dict(help="INI config file; flags override it"),
        "highdim": dict(action="store_true", default=None,
                        help="use the all-optima protocol (small instances only)"),
    }
    for n in names:
        p.add_argument(f"--{n}", **flags[n])


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    keys = ("seed", "trials", "delta", "k", "iterations", "batch", "out", "protocol", "alice",
            "n", "d", "positive_ratio", "mean_separation", "instance")
    return cfg.merged(**{k: getattr(args, k, None) for k in keys})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ediscovery", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--d", type=int, default=20)
    p.add_argument("--positive-ratio", type=float, default=0.05)
    p.add_argument("--mean-separation", type=float, default=2.0)
    p.add_argument("--realizable", action="store_true", help="reflect misclassified points")
    p.add_argument("--one-dim", action="store_true", help="1-D threshold instance with a few flips")
    _common(p, "seed", "out")

    p = sub.add_parser("run-protocol", help="run one label-verification protocol on an instance file")
    p.add_argument("instance")
    p.add_argument("--protocol", choices=("label-report", "classifier-report", "reveal-all"))
    p.add_argument("--alice", help="truthful | hide-near-threshold:J | hide-outlier-fp | report-threshold:T")
    p.add_argument("--transcript", action="store_true", help="print the event transcript")
    _common(p, "seed", "delta", "k", "highdim", "config", "out")

    p = sub.add_parser("run-cal", help="CAL with a verification subprotocol")
    p.add_argument("--protocol", choices=("label-report", "classifier-report", "reveal-all"))
    p.add_argument("--instance", help="corpus file (default: Gaussian mixture)")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--positive-ratio", type=float)
    p.add_argument("--mean-separation", type=float)
    _common(p, "seed", "trials", "delta", "k", "iterations", "batch", "config", "out")

    p = sub.add_parser("crit", help="critical points of a realizable instance")
    p.add_argument("instance")
    p.add_argument("--naive", action="store_true", help="per-point LP reference")
    _common(p, "out")

    p = sub.add_parser("lower-bound", help="emit the lower-bound instance family")
    p.add_argument("--n", type=int, default=8, help="N, a power of two")
    _common(p, "out")

    p = sub.add_parser("verify", help="Monte Carlo bound verification")
    p.add_argument("--campaign", default="all",
                   choices=["all", *CAMPAIGNS, *HIGHDIM_CAMPAIGNS])
    _common(p, "seed", "trials", "delta", "k", "highdim", "out")

    p = sub.add_parser("figures", help="figure campaigns to CSV")
    p.add_argument("--figure", default="all", choices=("all", "fig1", "fig2", "fig3", "fig4"))
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--timing", action="store_true", help="fill the ms column (breaks byte equality)")
    _common(p, "seed", "trials", "delta", "k", "iterations", "batch", "config", "out")
    return ap


def cmd_gen(args) -> int:
    seed = args.seed or 0
    if args.one_dim:
        inst = random_threshold_instance(args.n, seed).to_instance()
    else:
        inst = gaussian_mixture(GaussianConfig(args.n, args.d, args.positive_ratio,
                                               args.mean_separation, seed))
        if args.realizable:
            inst = enforce_realizable(inst)
    if args.out:
        save_instance(inst, args.out)
        print(f"wrote {inst.n} documents (d={inst.d}, {inst.n_plus} positive) to {args.out}")
    else:
        sys.stdout.write(dump_instance(inst))
    return 0


def cmd_run_protocol(args) -> int:
    cfg = _config(args)
    inst = load_instance(args.instance)
    alice = AliceOracle.parse(cfg.alice)
    seed = cfg.seed
    if args.highdim:
        from .highdim import run_highdim_sampling
        out = run_highdim_sampling(inst, alice, cfg=LabelReportConfig(cfg.k, cfg.delta), rng=seed)
        target = inst
    else:
        one = OneDimInstance.from_instance(inst)
        target = one
        if cfg.protocol == "label-report":
            out = run_label_report(one, alice, cfg=LabelReportConfig(cfg.k, cfg.delta), rng=seed)
        elif cfg.protocol == "classifier-report":
            out = run_classifier_report(one, alice, cfg=ClassifierReportConfig(cfg.delta), rng=seed)
        else:
            out = run_reveal_all(one)
    if args.transcript:
        print(format_transcript(out.transcript))
    rec = recall(out, target) if inst.n_plus else float("nan")
    print(f"recall={fmt(rec)} nrd={nrd(out, target)} revealed={len(out.revealed)} "
          f"full_reveal={int(out.full_reveal_triggered)}")
    if cfg.out:
        Path(cfg.out).write_text(format_transcript(out.transcript) + "\n")
    return 0


def cmd_run_cal(args) -> int:
    from .cal import CalConfig, run_cal
    from .harness import ResultRow
    from .seeding import split_seed
    cfg = _config(args)
    corpus = load_instance(cfg.instance) if cfg.instance else gaussian_mixture(cfg.corpus_config())
    proto = args.protocol or "reveal-all"
    cc = CalConfig(T=cfg.iterations, N_batch=cfg.batch, subprotocol=proto,
                   label_cfg=LabelReportConfig(cfg.k, cfg.delta),
                   classifier_cfg=ClassifierReportConfig(cfg.delta))
    rows = []
    for r in range(cfg.trials):
        s = split_seed(cfg.seed, r)
        rec = run_cal(corpus, cc, seed=s)
        rows += [ResultRow("cal", proto, it.iteration, s, it.recall, it.nrd, it.full_reveal)
                 for it in rec.iterations]
        if rec.truncated:
            print(f"run {r}: corpus exhausted, truncated", file=sys.stderr)
    for a in aggregate(rows):
        print(f"t={a.iteration:3d} {a.metric:6s} mean={fmt(a.mean)} min={fmt(a.min)} max={fmt(a.max)}")
    if cfg.out:
        write_csv(rows, cfg.out)
    return 0


def cmd_crit(args) -> int:
    from .critical import critical_points_fast, critical_points_naive, nrd_ratio
    inst = load_instance(args.instance)
    crit = critical_points_naive(inst) if args.naive else critical_points_fast(inst)
    ids = sorted(crit)
    print(f"critical={len(ids)} negatives={inst.n_minus} nrd_ratio={fmt(nrd_ratio(inst, crit))}")
    print(" ".join(map(str, ids)))
    if args.out:
        Path(args.out).write_text("\n".join(map(str, ids)) + "\n")
    return 0


def cmd_lower_bound(args) -> int:
    fam = lower_bound_family(args.n)
    for j, (inst, (t, e)) in enumerate(zip(fam.instances, fam.optima), start=1):
        print(f"instance {j}: positives={inst.N_plus} t*={fmt(t)} err*={e}")
        if args.out:
            d = Path(args.out)
            d.mkdir(parents=True, exist_ok=True)
            save_instance(inst, d / f"lower_bound_N{args.n}_{j}.txt")
    if args.n <= 16:
        holds, count = lower_bound_check(args.n)
        print(f"exhaustive check: {'holds' if holds else 'FAILS'} ({count} qualifying sets)")
        return 0 if holds else 1
    return 0


def cmd_verify(args) -> int:
    verdicts = verify_bounds(args.campaign, args.trials, args.seed or 0, args.delta, args.k,
                             highdim=bool(args.highdim))
    lines = [v.line() for v in verdicts]
    print("\n".join(lines))
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    return 1 if any(v.verdict == "fail" for v in verdicts) else 0


def cmd_figures(args) -> int:
    cfg = _config(args)
    if args.timing:
        cfg = cfg.merged(timing=True)
    names = ["fig1", "fig2", "fig3", "fig4"] if args.figure == "all" else [args.figure]
    out = Path(cfg.out or ".")
    rows = []
    for name in names:
        res = run_figure_campaign(name, cfg)
        rows += res.rows
        for proto, ratios in res.ratios.items():
            print(f"{name} {proto} nrd_ratio mean={fmt(sum(ratios) / len(ratios))}")
    if out.suffix == ".csv":
        write_csv(rows, out)
    else:
        out.mkdir(parents=True, exist_ok=True)
        write_csv(rows, out / "figures.csv")
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "run-protocol": cmd_run_protocol,
    "run-cal": cmd_run_cal,
    "crit": cmd_crit,
    "lower-bound": cmd_lower_bound,
    "verify": cmd_verify,
    "figures": cmd_figures,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InstanceParseError, EmptyInstanceError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

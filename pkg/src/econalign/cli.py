"""Command-line entry point: ``econalign <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import estimation, harness, pricing
from .agents.client import ChatCompletionClient, CompletionConfig, CompletionError
from .agents.scripted import ConstantPrice, FixedText, MyopicBestResponse, OptimalGamePlayer, UndercutByDelta
from .datagen import DatasetSpec, generate_dataset, parse_generator_agent, validate_file
from .preferences import PreferenceParams, parse_agent
from .scenarios import human_beliefs, scenario_table

log = logging.getLogger("econalign")

PROFIT_NOTE = ("the reference figures 44.6 (Nash) and 67.5 (monopoly) are two-firm totals; "
               "read per firm they would contradict the demand system, which gives about 22.29 and 33.75 per firm.")


class UsageError(Exception):
    pass


# --- agent selection ----------------------------------------------------------------


def build_agent(spec: str, remote: dict | None = None):
    """Backends by name.

    ``optimal:<type>`` (game player, e.g. ``optimal:moralis:0.5``),
    ``constant:<p>``, ``myopic[:<start>]``, ``undercut:<d>[:<initial>]``,
    ``fixed:<text>`` and ``remote:<model>``.
    """
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "optimal":
            return OptimalGamePlayer(parse_agent(arg or "economicus"))
        if kind == "constant":
            return ConstantPrice(float(arg))
        if kind == "myopic":
            return MyopicBestResponse(start=float(arg)) if arg else MyopicBestResponse()
        if kind == "undercut":
            d, _, initial = arg.partition(":")
            return UndercutByDelta(float(d), float(initial)) if initial else UndercutByDelta(float(d))
        if kind == "fixed":
            return FixedText(arg)
        if kind == "remote":
            if not arg:
                raise UsageError("remote agents need a model name, e.g. remote:gpt-4o")
            return ChatCompletionClient(CompletionConfig(model_name=arg, **(remote or {})))
    except ValueError as exc:
        raise UsageError(f"bad agent spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown agent kind {kind!r} in {spec!r}")


# --- output handling --------------------------------------------------------------


def _claim(out_dir: Path, names: list[str], overwrite: bool) -> list[Path]:
    paths = [out_dir / n for n in names]
    taken = [p for p in paths if p.exists()]
    if taken and not overwrite:
        raise UsageError(f"refusing to overwrite {', '.join(map(str, taken))} (pass --overwrite)")
    out_dir.mkdir(parents=True, exist_ok=True)
    return paths


def _config_of(args: argparse.Namespace) -> dict:
    skip = {"func", "overwrite", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


# --- commands ------------------------------------------------------------------------


def cmd_benchmarks(args) -> int:
    t0 = time.perf_counter()
    b = pricing.benchmarks()
    elapsed = time.perf_counter() - t0
    out = args.output_dir
    (path, mpath) = _claim(out, ["benchmarks.json", "benchmarks.manifest.json"], args.overwrite)
    data = {**asdict(b), "seconds": elapsed, "note": PROFIT_NOTE}
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    harness.write_manifest(out, "benchmarks", _config_of(args), args.seed, [path])
    print(f"Nash price        {b.nash_price:.4f}   (FOC residual {b.nash_foc_residual:.1e})")
    print(f"Monopoly price    {b.monopoly_price:.4f}   (FOC residual {b.monopoly_foc_residual:.1e})")
    print(f"Nash profit       total {b.nash_profit_total:.3f}   per firm {b.nash_profit_per_firm:.3f}")
    print(f"Monopoly profit   total {b.monopoly_profit_total:.3f}   per firm {b.monopoly_profit_per_firm:.3f}")
    print(f"Note: {PROFIT_NOTE}")
    return 0


def cmd_eval(args) -> int:
    agent = build_agent(args.agent or "optimal:economicus", args.remote)
    out = args.output_dir
    names = ["sessions.jsonl", "responses.jsonl", "aggregate.csv", "eval.manifest.json"]
    sessions_p, responses_p, agg_p, _ = _claim(out, names, args.overwrite)
    try:
        result = harness.run_evaluation(agent, sessions=args.sessions, seed=args.seed,
                                        agent_label=args.agent or "optimal:economicus",
                                        point_value=args.point_value,
                                        original_instructions=args.original_instructions)
    except harness.EvaluationAborted as exc:
        harness.write_session_logs(sessions_p, exc.logs)
        harness.write_manifest(out, "eval", {**_config_of(args), "aborted": str(exc)}, args.seed, [sessions_p])
        raise
    harness.write_session_logs(sessions_p, result.logs)
    estimation.write_responses(responses_p, harness.observed_responses(result.logs))
    harness.write_aggregate_csv(agg_p, result.report)
    harness.write_manifest(out, "eval", _config_of(args), args.seed, [sessions_p, responses_p, agg_p])
    rep = result.report
    print(f"{rep.parsed}/{rep.issued} responses parsed (exclusion rate {rep.exclusion_rate:.3f})")
    for row in rep.rows:
        if row.label == "All":
            xs = "n/a" if row.empty else " ".join(f"{v:.2f}" for v in row.x_mean)
            ys = "n/a" if row.empty else " ".join(f"{v:.2f}" for v in row.y_mean)
            print(f"{row.protocol:<3} All   x: {xs}   y: {ys}")
    return 0


def cmd_simulate(args) -> int:
    theta = PreferenceParams(*(float(v) for v in args.theta.split(",")))
    scenarios = [(s.protocol, s.payoffs, human_beliefs(s)) for s in scenario_table()]
    data = estimation.simulate_responses(scenarios, theta, args.lam, args.sessions, seed=args.seed)
    out = args.output_dir
    path, _ = _claim(out, ["responses.jsonl", "simulate.manifest.json"], args.overwrite)
    estimation.write_responses(path, data)
    harness.write_manifest(out, "simulate", _config_of(args), args.seed, [path])
    print(f"wrote {len(data)} simulated responses to {path}")
    return 0


def cmd_estimate(args) -> int:
    data = estimation.read_responses(args.responses)
    out = args.output_dir
    path, _ = _claim(out, ["estimate.json", "estimate.manifest.json"], args.overwrite)
    result = estimation.estimate(data, restarts=args.restarts, replicates=args.replicates,
                                 seed=args.seed, workers=args.workers)
    path.write_text(json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")
    harness.write_manifest(out, "estimate", _config_of(args), args.seed, [path])
    se = result.standard_errors
    for name, value in result.params.items():
        print(f"{name:<7} {value: .4f}  (se {se.get(name, float('nan')):.4f})")
    print(f"log-likelihood {result.log_likelihood:.3f} over {result.n_obs} responses, "
          f"{result.replicates} bootstrap replicates")
    if result.boundary or not result.converged:
        print("warning: fit at a boundary or not converged", file=sys.stderr)
    return 0


def cmd_gen_data(args) -> int:
    agent = parse_generator_agent(args.agent or "economicus")
    spec = DatasetSpec(agent=agent, n_examples=args.n, identifiable_fraction=args.identifiable_fraction,
                       seed=args.seed, identity_cues=not args.no_identity_cues)
    name = args.output or f"finetune_{agent.name}.jsonl"
    out = args.output_dir
    path, meta_p, _ = _claim(out, [name, Path(name).stem + ".meta.json", "gen-data.manifest.json"],
                             args.overwrite)
    ds = generate_dataset(spec)
    ds.write(path)
    report = validate_file(path)
    harness.write_manifest(out, "gen-data", _config_of(args), args.seed, [path, meta_p])
    print(f"wrote {len(ds.lines)} dialogues ({ds.n_identifiable} identifiable, {ds.draws} draws) to {path}")
    print(f"validator: {'ok' if report.ok else 'FAILED'} ({report.expressions} arithmetic checks)")
    for err in report.errors[:10]:
        print(f"  {err}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_price_sim(args) -> int:
    variants = ["P1", "P2"] if args.variant == "both" else [args.variant]
    spec_a = args.agent or "myopic"
    spec_b = args.agent_b or spec_a
    out = args.output_dir
    names = [f"run_{v}_{k + 1}.jsonl" for v in variants for k in range(args.runs)]
    paths = _claim(out, names + ["markup_summary.csv", "price-sim.manifest.json"], args.overwrite)
    run_paths, summary_p = paths[:-2], paths[-2]
    runs_by_variant: dict[str, list] = {}
    written = []
    it = iter(run_paths)
    for v in variants:
        for k in range(args.runs):
            cfg = pricing.RunConfig(rounds=args.rounds, prompt_variant=v, history_window=args.window,
                                    price_ceiling=args.ceiling, seed=args.seed + k)
            path = next(it)
            try:
                rounds = pricing.run_duopoly(build_agent(spec_a, args.remote), build_agent(spec_b, args.remote), cfg)
            except pricing.DuopolyAborted as exc:
                pricing.write_run_log(path, exc.rounds)
                written.append(path)
                harness.write_manifest(out, "price-sim", {**_config_of(args), "aborted": str(exc)},
                                       args.seed, written)
                raise
            pricing.write_run_log(path, rounds)
            written.append(path)
            runs_by_variant.setdefault(v, []).append(rounds)
    summary = pricing.markup_summary(runs_by_variant, tail=min(args.tail, args.rounds), label=f"{spec_a} vs {spec_b}")
    pricing.write_markup_csv(summary_p, summary)
    harness.write_manifest(out, "price-sim", _config_of(args), args.seed, written + [summary_p])
    for row in summary["rows"]:
        print(f"{row.prompt_variant}: mean price {row.mean_price:.4f} over {row.n_obs} obs "
              f"(vs Nash {row.rel_nash:+.4f}, vs monopoly {row.rel_monopoly:+.4f})")
    if summary["delta_p1_p2"] is not None:
        print(f"P1 - P2: {summary['delta_p1_p2']:+.4f}")
    return 0


def cmd_moral_machine(args) -> int:
    if not args.agent:
        raise UsageError("moral-machine needs --agent (e.g. remote:<model> or fixed:<answer>)")
    agent = build_agent(args.agent, args.remote)
    out = args.output_dir
    stem = f"moral_machine_{args.study}"
    csv_p, ref_p, _ = _claim(out, [stem + ".csv", stem + "_excluded.jsonl", "moral-machine.manifest.json"],
                             args.overwrite)
    reports = harness.run_moral_machine(agent, args.study, args.sessions)
    harness.write_moral_machine_csv(csv_p, reports)
    with open(ref_p, "w", encoding="utf-8") as fh:
        for rep in reports:
            for raw in rep.refusals:
                fh.write(json.dumps({"condition": rep.condition, "raw": raw}, ensure_ascii=False) + "\n")
    harness.write_manifest(out, "moral-machine", _config_of(args), args.seed, [csv_p, ref_p])
    for rep in reports:
        stats = ", ".join("n/a" if it.mean is None else f"{it.name} {it.mean:.2f} ({it.spread_label} {it.spread:.3f})"
                          for it in rep.items)
        print(f"{rep.study}/{rep.condition}: {rep.parsed}/{rep.issued} parsed; {stats}")
    return 0


# --- parser -------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--config", default=s, help="JSON file with option defaults (keys are option names)")
    p.add_argument("--seed", type=int, default=s)
    p.add_argument("--output-dir", type=Path, default=s)
    p.add_argument("--agent", default=s, help="agent backend (or target type for gen-data)")
    p.add_argument("--overwrite", action="store_true", default=s)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="econalign", parents=[common], description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("benchmarks", parents=[common], help="Nash and monopoly prices and profits")
    p.set_defaults(func=cmd_benchmarks)

    p = sub.add_parser("eval", parents=[common], help="run the 18-scenario game evaluation")
    p.add_argument("--sessions", type=int, default=50)
    p.add_argument("--point-value", default="$0.50")
    p.add_argument("--original-instructions", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", parents=[common], help="draw synthetic responses from the logit model")
    p.add_argument("--theta", default="0.16,0.24,0.10", help="alpha,beta,kappa")
    p.add_argument("--lam", type=float, default=7.19)
    p.add_argument("--sessions", type=int, default=200)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="MLE and block bootstrap from a response file")
    p.add_argument("--responses", type=Path, required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--replicates", type=int, default=300)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("gen-data", parents=[common], help="write a fine-tuning JSONL dataset")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--identifiable-fraction", type=float, default=0.8)
    p.add_argument("--no-identity-cues", action="store_true")
    p.add_argument("--output", help="file name inside the output directory")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("price-sim", parents=[common], help="repeated duopoly runs")
    p.add_argument("--agent-b", help="second firm's backend (defaults to --agent)")
    p.add_argument("--variant", choices=["P1", "P2", "both"], default="both")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--rounds", type=int, default=300)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--ceiling", type=float, default=4.51)
    p.add_argument("--tail", type=int, default=20)
    p.set_defaults(func=cmd_price_sim)

    p = sub.add_parser("moral-machine", parents=[common], help="Moral Machine study")
    p.add_argument("--study", choices=["Study1", "Study3"], default="Study1")
    p.add_argument("--sessions", type=int, default=200)
    p.set_defaults(func=cmd_moral_machine)
    return parser


GLOBAL_DEFAULTS = {"seed": 0, "output_dir": Path("out"), "agent": None, "overwrite": False, "config": None}


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    """Command line first, then the ``--config`` JSON, then built-in defaults."""
    pre, _ = _common().parse_known_args(argv)
    cfg: dict = {}
    if getattr(pre, "config", None):
        try:
            cfg = json.loads(Path(pre.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(f"econalign: error: cannot read config {pre.config}: {exc}")
        if not isinstance(cfg, dict):
            raise SystemExit("econalign: error: config file must hold a JSON object")
    remote = cfg.pop("remote", {})
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    parser = build_parser()
    for sub in parser._subparsers._group_actions[0].choices.values():
        dests = {a.dest for a in sub._actions}
        sub.set_defaults(**{k: v for k, v in cfg.items() if k in dests and k not in GLOBAL_DEFAULTS})
    args = parser.parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, cfg.get(key, value))
    args.output_dir = Path(args.output_dir)
    args.remote = remote
    return args


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"econalign: error: {exc}", file=sys.stderr)
        return 2
    except (CompletionError, RuntimeError, ValueError, OSError) as exc:
        print(f"econalign: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

"""Command line front end.

Subcommands: run (full crowdsourcing experiment), cluster (one-shot
clustering of a vote file), next (one selection step), eval (score a
clustering against gold), synth (generate a synthetic world).  Run options
can also come from a key-value config file; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .clustering import scc_cluster
from .fileio import (load_graph, read_clusters_csv, read_gold_csv,
                     read_records_csv, read_votes_csv, write_clusters_csv,
                     write_gold_csv, write_records_csv)
from .harness import (ExperimentConfig, precision_recall_f1, report,
                      run_experiment, synth_world)
from .crowd import ReplayOracle
from .reliability import ReliabilityParams
from .selection import build_state, pair_priority, select_batch

_RUN_DEFAULTS = {
    "strategy": "perc",
    "budget": 100,
    "batch": 1,
    "initial": 0,
    "workers": 5,
    "error-rate": 0.1,
    "mc-samples": 1000,
    "epsilon": 1e-12,
    "exact-edge-limit": 18,
    "seed": 0,
    "eval-every": 1,
    "intra-sample-fraction": None,
    "out": "out",
}

_RUN_TYPES = {
    "records": str, "gold": str, "replay": str, "out": str, "strategy": str,
    "budget": int, "batch": int, "initial": int, "workers": int,
    "error-rate": float, "mc-samples": int, "epsilon": float,
    "exact-edge-limit": int, "seed": int, "eval-every": int,
    "intra-sample-fraction": float,
}


def read_config_file(path) -> dict[str, str]:
    """key = value lines mirroring the run flags; # starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("_", "-")
        if key not in _RUN_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
        values[key] = value.strip()
    return values


def _merged_option(key: str, flag_value, file_values: dict[str, str]):
    if flag_value is not None:
        return flag_value
    if key in file_values:
        return _RUN_TYPES[key](file_values[key])
    return _RUN_DEFAULTS.get(key)


def cmd_run(args) -> int:
    file_values = read_config_file(args.config) if args.config else {}

    def opt(key, flag_value):
        return _merged_option(key, flag_value, file_values)

    records_path = opt("records", args.records)
    if records_path is None:
        raise ValueError("run needs --records (or a records entry in the config file)")
    gold_path = opt("gold", args.gold)
    replay_path = opt("replay", args.replay)
    if gold_path is None and replay_path is None:
        raise ValueError("run needs --gold or --replay to answer questions")

    records = read_records_csv(records_path)
    gold = read_gold_csv(gold_path) if gold_path else None
    replay = ReplayOracle(read_votes_csv(replay_path)) if replay_path else None
    config = ExperimentConfig(
        strategy=opt("strategy", args.strategy),
        budget=opt("budget", args.budget),
        batch_size=opt("batch", args.batch),
        initial_pairs=opt("initial", args.initial),
        workers_per_pair=opt("workers", args.workers),
        error_rate=opt("error-rate", args.error_rate),
        mc_samples=opt("mc-samples", args.mc_samples),
        epsilon=opt("epsilon", args.epsilon),
        exact_edge_limit=opt("exact-edge-limit", args.exact_edge_limit),
        seed=opt("seed", args.seed),
        eval_every=opt("eval-every", args.eval_every),
        intra_sample_fraction=opt("intra-sample-fraction", args.intra_sample_fraction),
    )
    result = run_experiment(config, records, gold=gold, replay=replay)
    report(result, opt("out", args.out))
    return 0


def cmd_cluster(args) -> int:
    graph = load_graph(args.records, args.graph)
    clustering = scc_cluster(graph)
    if args.out:
        write_clusters_csv(args.out, clustering)
    else:
        sys.stdout.write("record_id,cluster_id\n")
        rows = sorted((r, block[0]) for block in clustering.blocks for r in block)
        for r, cid in rows:
            sys.stdout.write(f"{r},{cid}\n")
    return 0


def cmd_next(args) -> int:
    graph = load_graph(args.records, args.graph)
    clustering = scc_cluster(graph)
    params = ReliabilityParams(mc_samples=args.mc_samples, epsilon=args.epsilon,
                               exact_edge_limit=args.exact_edge_limit, seed=args.seed)
    state = build_state(graph, clustering, params)
    batch = select_batch(state, args.batch) if len(state) else []
    if not batch:
        sys.stderr.write("no candidate pairs remain\n")
        return 1
    for pair in batch:
        # + 0.0 folds negative zero so resolved pairs print as 0.0
        gain = pair_priority(graph, clustering, pair, params).gain + 0.0
        sys.stdout.write(f"{pair[0]},{pair[1]},{gain!r}\n")
    return 0


def cmd_eval(args) -> int:
    clustering = read_clusters_csv(args.clusters)
    gold = read_gold_csv(args.gold)
    precision, recall, f1 = precision_recall_f1(clustering, gold)
    sys.stdout.write(f"precision={precision!r}\nrecall={recall!r}\nf1={f1!r}\n")
    return 0


def cmd_synth(args) -> int:
    records, gold = synth_world(args.records, args.entities, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records_csv(out / "records.csv", records)
    write_gold_csv(out / "gold.csv", gold)
    sys.stdout.write(f"wrote {len(records)} records over {args.entities} entities to {out}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perc",
                                     description="crowdsourced entity resolution on uncertain vote graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a crowdsourcing experiment")
    run.add_argument("--records", help="records.csv path")
    run.add_argument("--gold", help="gold.csv path (enables the simulated crowd and metrics)")
    run.add_argument("--replay", help="votes.csv log to replay instead of simulating")
    run.add_argument("--strategy", choices=["perc", "tc", "dense"])
    run.add_argument("--budget", type=int)
    run.add_argument("--batch", type=int)
    run.add_argument("--initial", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--error-rate", type=float)
    run.add_argument("--mc-samples", type=int)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--exact-edge-limit", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--eval-every", type=int)
    run.add_argument("--intra-sample-fraction", type=float)
    run.add_argument("--out")
    run.add_argument("--config", help="key = value file mirroring the run flags")
    run.set_defaults(func=cmd_run)

    cluster = sub.add_parser("cluster", help="cluster a vote file once")
    cluster.add_argument("--graph", required=True, help="votes.csv path")
    cluster.add_argument("--records", required=True, help="records.csv path")
    cluster.add_argument("--out", help="clusters.csv path (default: stdout)")
    cluster.set_defaults(func=cmd_cluster)

    nxt = sub.add_parser("next", help="print the next question(s) to ask")
    nxt.add_argument("--graph", required=True, help="votes.csv path")
    nxt.add_argument("--records", required=True, help="records.csv path")
    nxt.add_argument("--batch", type=int, default=1)
    nxt.add_argument("--mc-samples", type=int, default=1000)
    nxt.add_argument("--epsilon", type=float, default=1e-12)
    nxt.add_argument("--exact-edge-limit", type=int, default=18)
    nxt.add_argument("--seed", type=int, default=0)
    nxt.set_defaults(func=cmd_next)

    ev = sub.add_parser("eval", help="score a clustering against gold")
    ev.add_argument("--clusters", required=True, help="clusters.csv path")
    ev.add_argument("--gold", required=True, help="gold.csv path")
    ev.set_defaults(func=cmd_eval)

    synth = sub.add_parser("synth", help="generate a synthetic world")
    synth.add_argument("--entities", type=int, required=True)
    synth.add_argument("--records", type=int, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", default="synth-out")
    synth.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

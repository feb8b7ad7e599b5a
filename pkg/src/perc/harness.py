"""End-to-end crowdsourcing loop and evaluation.

One experiment: seed the graph with some initial questions, cluster, then
round after round pick a batch with the configured strategy, collect crowd
answers, fold them in, re-cluster when an answer disagrees with the
current clustering, and snapshot quality metrics.  The budget counts
distinct pairs ever asked, seeding included.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass

from .baselines import dense_batch, tc_batch
from .clustering import mlc_unchanged, scc_cluster
from .crowd import (GoldClustering, Oracle, ReplayOracle, SimulatedOracle,
                    UnrecordedPairError, VoteTally, WorkerModel)
from .graph import Clustering, Pair, UncertainGraph
from .reliability import ReliabilityParams, reliability
from .selection import build_state, refresh_after_answer, select_batch
from .util import canonical_pair, derive_seed, make_rng

log = logging.getLogger(__name__)

STRATEGIES = ("perc", "tc", "dense")

NAN = float("nan")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs beyond the records and the answer source."""

    strategy: str = "perc"
    budget: int = 100
    batch_size: int = 1
    initial_pairs: int = 0
    workers_per_pair: int = 5
    error_rate: float = 0.1
    mc_samples: int = 1000
    epsilon: float = 1e-12
    exact_edge_limit: int = 18
    seed: int = 0
    eval_every: int = 1
    intra_sample_fraction: float | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}, pick one of {STRATEGIES}")
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")
        if not 0 <= self.initial_pairs <= self.budget:
            raise ValueError(
                f"initial_pairs={self.initial_pairs} must sit in 0..budget ({self.budget})")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.budget > 0 and self.batch_size > self.budget:
            raise ValueError(
                f"batch_size={self.batch_size} exceeds budget={self.budget}")
        if self.eval_every < 1:
            raise ValueError(f"eval_every must be >= 1, got {self.eval_every}")
        if self.intra_sample_fraction is not None and not 0.0 < self.intra_sample_fraction <= 1.0:
            raise ValueError("intra_sample_fraction must sit in (0, 1]")

    def worker_model(self) -> WorkerModel:
        return WorkerModel(workers_per_pair=self.workers_per_pair,
                           error_rate=self.error_rate)

    def reliability_params(self, round_index: int = 0) -> ReliabilityParams:
        """Params for work performed during one round; the round index is
        folded into the seed so sampling inside a round shares streams."""
        return ReliabilityParams(mc_samples=self.mc_samples, epsilon=self.epsilon,
                                 exact_edge_limit=self.exact_edge_limit,
                                 seed=derive_seed(self.seed, "round", round_index))


@dataclass(frozen=True)
class MetricsSnapshot:
    """One curve row, taken after a crowdsourcing round."""

    questions_asked: int
    precision: float
    recall: float
    f1: float
    reliability: float
    blocks: int


@dataclass
class RunResult:
    """A finished run: the metric curve plus everything needed to replay it."""

    curve: list[MetricsSnapshot]
    clustering: Clustering
    vote_log: list[tuple[Pair, VoteTally]]
    stats: dict
    flags: dict


def precision_recall_f1(predicted: Clustering, gold: GoldClustering) -> tuple[float, float, float]:
    """Pairwise precision, recall and F1 of a clustering against gold.

    Precision is 0 when the clustering reports no matching pair, recall is
    0 when gold has none, F1 is 0 when either is 0.
    """
    if predicted.records != gold.records:
        raise ValueError("clustering and gold cover different record sets")
    reported = 0
    correct = 0
    for block in predicted.blocks:
        reported += len(block) * (len(block) - 1) // 2
        for i, a in enumerate(block):
            for b in block[i + 1:]:
                if gold.same(a, b):
                    correct += 1
    sizes: dict[str, int] = {}
    for r in gold.records:
        e = gold.entity_of(r)
        sizes[e] = sizes.get(e, 0) + 1
    gold_matching = sum(n * (n - 1) // 2 for n in sizes.values())
    precision = correct / reported if reported else 0.0
    recall = correct / gold_matching if gold_matching else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def questions_to_reach(curve: list[MetricsSnapshot], target_f1: float) -> int | None:
    """Questions asked at the first snapshot with f1 >= target, else None."""
    for snap in curve:
        if snap.f1 >= target_f1:
            return snap.questions_asked
    return None


def _initial_pairs_simulated(records: tuple[str, ...], count: int, seed: int) -> list[Pair]:
    """Seeding questions: a random spanning path first, then uniform pairs.

    The spanning structure guarantees early rounds see every record at
    least once; the remainder is a uniform sample of the leftover pairs.
    """
    rng = make_rng(derive_seed(seed, "initial"))
    order = [records[i] for i in rng.permutation(len(records))]
    chosen: list[Pair] = []
    chosen_set: set[Pair] = set()
    for a, b in zip(order, order[1:]):
        if len(chosen) >= count:
            break
        key = canonical_pair(a, b)
        chosen.append(key)
        chosen_set.add(key)
    if len(chosen) < count:
        rest = [(a, b) for i, a in enumerate(records) for b in records[i + 1:]
                if (a, b) not in chosen_set]
        for idx in rng.permutation(len(rest)):
            if len(chosen) >= count:
                break
            chosen.append(rest[idx])
    return chosen


class _PercState:
    """Strategy adapter: reliability-gain selection with the cached queue."""

    def __init__(self, config: ExperimentConfig, allowed: frozenset | None):
        self.config = config
        self.allowed = allowed
        self.state = None

    def prime(self, graph, clustering, round_index):
        self.state = build_state(graph, clustering,
                                 self.config.reliability_params(round_index),
                                 round_index=round_index, allowed=self.allowed,
                                 intra_fraction=self.config.intra_sample_fraction)

    def select(self, graph, clustering, k, round_index):
        return select_batch(self.state, k)

    def absorb(self, graph, clustering, answered, clustering_changed, round_index):
        if clustering_changed:
            self.prime(graph, clustering, round_index)
            return
        params = self.config.reliability_params(round_index)
        for pair, _ in answered:
            self.state = refresh_after_answer(self.state, graph, clustering, pair,
                                              False, params, round_index=round_index)


class _TcState:
    def __init__(self, config: ExperimentConfig, allowed: frozenset | None):
        self.allowed = allowed
        self.rng = make_rng(derive_seed(config.seed, "tc-stream"))

    def prime(self, graph, clustering, round_index):
        pass

    def select(self, graph, clustering, k, round_index):
        return tc_batch(graph, self.rng, k, allowed=self.allowed)

    def absorb(self, graph, clustering, answered, clustering_changed, round_index):
        pass


class _DenseState:
    def __init__(self, config: ExperimentConfig, allowed: frozenset | None):
        self.allowed = allowed

    def prime(self, graph, clustering, round_index):
        pass

    def select(self, graph, clustering, k, round_index):
        return dense_batch(graph, clustering, k, allowed=self.allowed)

    def absorb(self, graph, clustering, answered, clustering_changed, round_index):
        pass


def _has_unrestricted_candidates(strategy: str, graph: UncertainGraph,
                                 clustering: Clustering) -> bool:
    """Whether the strategy would still propose pairs without a replay
    restriction: any absent pair, except DENSE which only asks across
    blocks."""
    if strategy == "dense":
        return any(not clustering.same_block(a, b) for a, b in graph.absent_pairs())
    return next(graph.absent_pairs(), None) is not None


def run_experiment(config: ExperimentConfig, records, gold: GoldClustering | None = None,
                   replay: ReplayOracle | list | None = None) -> RunResult:
    """Run one crowdsourcing experiment to its budget.

    Answers come from the replay log when one is given, otherwise from a
    simulated crowd against ``gold``.  Metrics need gold; a replay run
    without it still produces the curve with NaN quality columns.  In
    replay mode the seeding phase takes the first initial_pairs rows of the
    log in order, and candidate selection is restricted to logged pairs; a
    selection the log cannot answer ends the run early with a flag.
    """
    recs = tuple(sorted(set(records)))
    if replay is None and gold is None:
        raise ValueError("need a gold clustering or a replay log to answer questions")
    if gold is not None and gold.records != set(recs):
        raise ValueError("gold clustering does not cover exactly the given records")

    oracle: Oracle
    allowed: frozenset | None = None
    if replay is not None:
        oracle = replay if isinstance(replay, ReplayOracle) else ReplayOracle(replay)
        allowed = oracle.pairs
    else:
        oracle = SimulatedOracle(gold, config.worker_model(), seed=config.seed)

    graph = UncertainGraph(recs)
    vote_log: list[tuple[Pair, VoteTally]] = []
    flags: dict = {}

    def ask(pair: Pair) -> VoteTally:
        nonlocal graph
        tally = oracle.answer(pair)
        graph = graph.with_edge(*pair, tally=tally)
        vote_log.append((pair, tally))
        return tally

    total_pairs = len(recs) * (len(recs) - 1) // 2
    seed_count = min(config.initial_pairs, total_pairs)
    if isinstance(oracle, ReplayOracle):
        seed_pairs = [pair for pair, _ in oracle.rows[:seed_count]]
    else:
        seed_pairs = _initial_pairs_simulated(recs, seed_count, config.seed)
    for pair in seed_pairs:
        ask(pair)

    clustering = scc_cluster(graph)
    # TC draws uniformly from its candidate list, so restricting the list in
    # replay mode would shift every draw; it keeps the full universe and
    # relies on the early-termination flag instead.
    strategy_allowed = None if config.strategy == "tc" else allowed
    strategy = {"perc": _PercState, "tc": _TcState,
                "dense": _DenseState}[config.strategy](config, strategy_allowed)
    strategy.prime(graph, clustering, 0)

    mlc_checks = 0
    mlc_failures = 0
    reclusterings = 0
    rounds = 0
    curve: list[MetricsSnapshot] = []

    def snapshot(round_index: int):
        if curve and curve[-1].questions_asked == len(vote_log):
            return
        if gold is not None:
            precision, recall, f1 = precision_recall_f1(clustering, gold)
        else:
            precision = recall = f1 = NAN
        rel = reliability(graph, clustering, config.reliability_params(round_index))
        curve.append(MetricsSnapshot(questions_asked=len(vote_log),
                                     precision=precision, recall=recall, f1=f1,
                                     reliability=rel.value,
                                     blocks=len(clustering.blocks)))

    snapshot(0)
    stop = False
    while not stop and len(vote_log) < config.budget:
        k = min(config.batch_size, config.budget - len(vote_log))
        round_index = rounds + 1
        batch = strategy.select(graph, clustering, k, round_index)
        if not batch:
            flags["exhausted"] = True
            if strategy_allowed is not None and _has_unrestricted_candidates(
                    config.strategy, graph, clustering):
                # the strategy still had wishes; only the log ran out
                flags["replay_exhausted"] = True
            break
        answered: list[tuple[Pair, VoteTally]] = []
        for pair in batch:
            try:
                tally = ask(pair)
            except UnrecordedPairError:
                flags["replay_exhausted"] = True
                flags["unanswered_selection"] = pair
                stop = True
                break
            answered.append((pair, tally))
        if not answered:
            break
        changed_votes = 0
        for pair, tally in answered:
            mlc_checks += 1
            if not mlc_unchanged(clustering, pair, tally.fraction):
                changed_votes += 1
        mlc_failures += changed_votes
        clustering_changed = False
        if changed_votes:
            reclusterings += 1
            fresh = scc_cluster(graph)
            clustering_changed = fresh != clustering
            clustering = fresh
        rounds += 1
        strategy.absorb(graph, clustering, answered, clustering_changed, round_index)
        if rounds % config.eval_every == 0:
            snapshot(round_index)
        log.debug("round %d: asked %d pairs, %d blocks, %d total questions",
                  round_index, len(answered), len(clustering.blocks), len(vote_log))

    snapshot(rounds)
    stats = {
        "questions_asked": len(vote_log),
        "rounds": rounds,
        "mlc_checks": mlc_checks,
        "mlc_failures": mlc_failures,
        "recluster_fraction": (mlc_failures / mlc_checks) if mlc_checks else 0.0,
        "reclusterings": reclusterings,
    }
    if gold is not None:
        from .crowd import crowd_error_rate
        stats["crowd_error_rate"] = crowd_error_rate(vote_log, gold)
    else:
        stats["crowd_error_rate"] = None
    return RunResult(curve=curve, clustering=clustering, vote_log=vote_log,
                     stats=stats, flags=flags)


def report(result: RunResult, out_dir) -> str:
    """Write curve.csv, clusters.csv and votes.csv under out_dir, print the
    final snapshot, and return the curve.csv path."""
    from pathlib import Path

    from .fileio import write_clusters_csv, write_curve_csv, write_votes_csv

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValueError(f"cannot create output directory {out}: {exc}") from exc
    curve_path = out / "curve.csv"
    write_curve_csv(curve_path, result.curve)
    write_clusters_csv(out / "clusters.csv", result.clustering)
    write_votes_csv(out / "votes.csv", result.vote_log)
    final = result.curve[-1]
    err = result.stats.get("crowd_error_rate")
    print(f"questions={final.questions_asked} precision={final.precision:.4f} "
          f"recall={final.recall:.4f} f1={final.f1:.4f} "
          f"reliability={final.reliability:.4f} blocks={final.blocks}")
    print(f"recluster_fraction={result.stats['recluster_fraction']:.4f} "
          f"crowd_error_rate={'n/a' if err is None else format(err, '.2f')}")
    return str(curve_path)


def synth_world(n_records: int, n_entities: int, seed: int = 0) -> tuple[list[str], GoldClustering]:
    """Random ground-truth world: records spread over entities.

    Every entity gets at least one record; the rest are assigned uniformly,
    so entity sizes vary around n_records / n_entities.
    """
    if n_records < 1:
        raise ValueError(f"need at least one record, got {n_records}")
    if not 1 <= n_entities <= n_records:
        raise ValueError(
            f"entity count {n_entities} must sit in 1..{n_records}")
    width = max(2, len(str(n_records - 1)))
    records = [f"r{i:0{width}d}" for i in range(n_records)]
    ewidth = max(2, len(str(n_entities - 1)))
    entities = [f"e{i:0{ewidth}d}" for i in range(n_entities)]
    rng = make_rng(derive_seed(seed, "synth"))
    order = rng.permutation(n_records)
    assignment: dict[str, str] = {}
    for i, idx in enumerate(order):
        if i < n_entities:
            assignment[records[idx]] = entities[i]
        else:
            assignment[records[idx]] = entities[int(rng.integers(n_entities))]
    return records, GoldClustering(assignment)

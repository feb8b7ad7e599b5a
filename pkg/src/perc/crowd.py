"""Crowd answer sources: simulated workers, replayed logs, a live prompt.

The simulated crowd draws each worker's answer independently: the truth
from the gold clustering, flipped with the model's error rate (scaled by
the optional per-record difficulty, averaged over the pair).  Vote
randomness is seeded from (master seed, pair), never from ask order, so a
run asks the same questions in any order and reads the same tallies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import Clustering, Pair, VoteTally
from .util import canonical_pair, derive_seed, make_rng


class GoldClustering:
    """Ground-truth entity per record, with optional difficulty weights."""

    __slots__ = ("entity", "difficulty")

    def __init__(self, entity: dict[str, str], difficulty: dict[str, float] | None = None):
        if not entity:
            raise ValueError("gold clustering has no records")
        self.entity = dict(entity)
        self.difficulty = {r: 1.0 for r in entity}
        for r, d in (difficulty or {}).items():
            if r not in self.entity:
                raise ValueError(f"difficulty given for unknown record {r!r}")
            if d < 0:
                raise ValueError(f"difficulty for {r!r} must be >= 0, got {d}")
            self.difficulty[r] = float(d)

    @property
    def records(self) -> frozenset:
        return frozenset(self.entity)

    def entity_of(self, record: str) -> str:
        try:
            return self.entity[record]
        except KeyError:
            raise KeyError(f"record {record!r} is not in the gold clustering") from None

    def same(self, a: str, b: str) -> bool:
        return self.entity_of(a) == self.entity_of(b)

    def pair_difficulty(self, a: str, b: str) -> float:
        return 0.5 * (self.difficulty[a] + self.difficulty[b])

    def to_clustering(self) -> Clustering:
        groups: dict[str, list[str]] = {}
        for r, e in self.entity.items():
            groups.setdefault(e, []).append(r)
        return Clustering(groups.values())


@dataclass(frozen=True)
class WorkerModel:
    """workers_per_pair independent workers, each wrong with error_rate."""

    workers_per_pair: int = 5
    error_rate: float = 0.1

    def __post_init__(self):
        if self.workers_per_pair < 1:
            raise ValueError(f"need at least one worker, got {self.workers_per_pair}")
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError(f"error rate {self.error_rate} outside [0, 1]")


def simulate_votes(gold: GoldClustering, pair: Pair, model: WorkerModel,
                   rng) -> VoteTally:
    """Draw one tally for ``pair`` from the worker model."""
    a, b = canonical_pair(*pair)
    truth = gold.same(a, b)
    flip_prob = min(1.0, model.error_rate * gold.pair_difficulty(a, b))
    yes = 0
    for _ in range(model.workers_per_pair):
        wrong = rng.random() < flip_prob
        if truth != wrong:
            yes += 1
    return VoteTally(yes=yes, total=model.workers_per_pair)


class Oracle:
    """Answer source interface: ``answer(pair) -> VoteTally``."""

    kind = "abstract"

    def answer(self, pair: Pair) -> VoteTally:
        raise NotImplementedError


class SimulatedOracle(Oracle):
    """Simulated crowd with order-independent per-pair vote streams."""

    kind = "simulated"

    def __init__(self, gold: GoldClustering, model: WorkerModel, seed: int = 0):
        self.gold = gold
        self.model = model
        self.seed = int(seed)

    def answer(self, pair: Pair) -> VoteTally:
        a, b = canonical_pair(*pair)
        rng = make_rng(derive_seed(self.seed, "votes", a, b))
        return simulate_votes(self.gold, (a, b), self.model, rng)


class UnrecordedPairError(KeyError):
    """Raised when a replay oracle is asked a pair missing from its log."""


class ReplayOracle(Oracle):
    """Answers straight from a recorded vote log.

    Keeps the log's row order, which a replaying harness uses to reproduce
    the original run's seeding phase.
    """

    kind = "replay"

    def __init__(self, rows: Iterable[tuple[Pair, VoteTally]]):
        self.rows: list[tuple[Pair, VoteTally]] = []
        self.tallies: dict[Pair, VoteTally] = {}
        for pair, tally in rows:
            key = canonical_pair(*pair)
            if key in self.tallies:
                raise ValueError(f"vote log lists pair {key} twice")
            self.rows.append((key, tally))
            self.tallies[key] = tally

    @property
    def pairs(self) -> frozenset:
        return frozenset(self.tallies)

    def answer(self, pair: Pair) -> VoteTally:
        key = canonical_pair(*pair)
        try:
            return self.tallies[key]
        except KeyError:
            raise UnrecordedPairError(
                f"pair {key} was not crowdsourced in the replayed log") from None


def replay_oracle(rows: Iterable[tuple[Pair, VoteTally]]) -> ReplayOracle:
    """Build a replay oracle from (pair, tally) rows."""
    return ReplayOracle(rows)


class InteractiveOracle(Oracle):
    """Asks a human on a line-based stream, one worker vote at a time.

    Prompt format: ``PAIR <a> <b>? [y/n] (i of w)``.  Any answer other
    than y or n (case-insensitive) is re-prompted.
    """

    kind = "interactive"

    def __init__(self, model: WorkerModel, in_stream, out_stream):
        self.model = model
        self.in_stream = in_stream
        self.out_stream = out_stream

    def answer(self, pair: Pair) -> VoteTally:
        a, b = canonical_pair(*pair)
        w = self.model.workers_per_pair
        yes = 0
        for i in range(1, w + 1):
            while True:
                self.out_stream.write(f"PAIR {a} {b}? [y/n] ({i} of {w})\n")
                self.out_stream.flush()
                line = self.in_stream.readline()
                if not line:
                    raise EOFError(f"input ended while voting on pair {(a, b)}")
                vote = line.strip().lower()
                if vote in ("y", "n"):
                    break
            if vote == "y":
                yes += 1
        return VoteTally(yes=yes, total=w)


def crowd_error_rate(asked: Iterable[tuple[Pair, VoteTally]],
                     gold: GoldClustering) -> float | None:
    """Mean percentage of votes contradicting gold over the asked pairs.

    A matching pair answered 8 yes of 10 contributes 20 percent.  Returns
    None for an empty list, where the rate is undefined.
    """
    shares = []
    for pair, tally in asked:
        a, b = canonical_pair(*pair)
        wrong = (tally.total - tally.yes) if gold.same(a, b) else tally.yes
        shares.append(wrong / tally.total)
    if not shares:
        return None
    return 100.0 * sum(shares) / len(shares)

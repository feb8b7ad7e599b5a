"""Uncertain-graph data model for crowdsourced entity resolution.

Records are opaque string ids.  Crowd answers for a record pair are a
:class:`VoteTally` (yes votes out of total), and the graph stores the YES
fraction as the edge probability.  A pair with no tally is *absent*, which
is a different state from a crowdsourced pair whose probability is 0.

A possible world is a subset of the crowdsourced edges marked present; its
probability is the product of p over present edges times (1 - p) over the
remaining crowdsourced edges.  Absent pairs contribute nothing.  The
likelihood of a clustering is the probability of the single world whose
present edges are exactly its intra-block edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .util import canonical_pair, log10_or_neg_inf

Pair = tuple[str, str]

MAX_PARTITION_RECORDS = 12


@dataclass(frozen=True)
class VoteTally:
    """Crowd answers for one pair: ``yes`` YES votes out of ``total``."""

    yes: int
    total: int

    def __post_init__(self):
        if self.total < 1:
            raise ValueError(f"vote tally needs at least one vote, got total={self.total}")
        if not 0 <= self.yes <= self.total:
            raise ValueError(f"yes={self.yes} outside 0..{self.total}")

    @property
    def fraction(self) -> float:
        """YES-vote fraction, the edge probability this tally induces."""
        return self.yes / self.total


def _check_record_id(rid) -> str:
    if not isinstance(rid, str) or not rid:
        raise ValueError(f"record id must be a non-empty string, got {rid!r}")
    if any(c in rid for c in ",\n\r"):
        raise ValueError(f"record id {rid!r} contains a comma or newline")
    return rid


class UncertainGraph:
    """Immutable-by-convention set of records plus probabilistic edges.

    ``edges`` maps canonical pairs to YES fractions; ``tallies`` keeps the
    raw counts for pairs that came from actual votes (fixtures built from
    bare probabilities leave it sparse).  Updates go through
    :meth:`with_edge`, which returns a new graph, so harness code can treat
    graphs as values.
    """

    __slots__ = ("records", "_record_set", "edges", "tallies")

    def __init__(self, records: Iterable[str], edges: dict[Pair, float] | None = None,
                 tallies: dict[Pair, VoteTally] | None = None):
        recs = sorted({_check_record_id(r) for r in records})
        if not recs:
            raise ValueError("a graph needs at least one record")
        self.records = tuple(recs)
        self._record_set = frozenset(recs)
        self.edges = {}
        self.tallies = dict(tallies or {})
        for pair, p in (edges or {}).items():
            key = self._check_pair(pair)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"edge {key} has probability {p} outside [0, 1]")
            self.edges[key] = float(p)
        for pair in self.tallies:
            if pair not in self.edges:
                raise ValueError(f"tally for {pair} without a matching edge")

    def _check_pair(self, pair: Pair) -> Pair:
        a, b = pair
        key = canonical_pair(a, b)
        for r in key:
            if r not in self._record_set:
                raise ValueError(f"record {r!r} in pair {key} is not declared")
        return key

    @classmethod
    def from_probabilities(cls, records: Iterable[str], probs: dict[Pair, float]) -> "UncertainGraph":
        """Build a fixture graph straight from edge probabilities."""
        return cls(records, edges={canonical_pair(*k): v for k, v in probs.items()})

    def has_edge(self, a: str, b: str) -> bool:
        return canonical_pair(a, b) in self.edges

    def probability(self, a: str, b: str) -> float:
        key = canonical_pair(a, b)
        if key not in self.edges:
            raise KeyError(f"pair {key} has not been crowdsourced")
        return self.edges[key]

    def with_edge(self, a: str, b: str, tally: VoteTally | None = None,
                  probability: float | None = None) -> "UncertainGraph":
        """New graph with one more crowdsourced pair.

        Re-asking a pair is rejected: the question budget counts distinct
        pairs and no pair is ever crowdsourced twice.
        """
        key = self._check_pair((a, b))
        if key in self.edges:
            raise ValueError(f"pair {key} was already crowdsourced")
        if (tally is None) == (probability is None):
            raise ValueError("provide exactly one of tally or probability")
        edges = dict(self.edges)
        tallies = dict(self.tallies)
        if tally is not None:
            edges[key] = tally.fraction
            tallies[key] = tally
        else:
            if not 0.0 <= probability <= 1.0:
                raise ValueError(f"edge {key} has probability {probability} outside [0, 1]")
            edges[key] = float(probability)
        g = UncertainGraph.__new__(UncertainGraph)
        g.records = self.records
        g._record_set = self._record_set
        g.edges = edges
        g.tallies = tallies
        return g

    def edge_items(self) -> list[tuple[Pair, float]]:
        """Edges in canonical (sorted pair) order, for order-independent math."""
        return sorted(self.edges.items())

    def absent_pairs(self) -> Iterator[Pair]:
        """All not-yet-crowdsourced pairs, in lexicographic order."""
        recs = self.records
        for i, a in enumerate(recs):
            for b in recs[i + 1:]:
                if (a, b) not in self.edges:
                    yield (a, b)

    def edges_within(self, members: Iterable[str]) -> list[tuple[Pair, float]]:
        """Crowdsourced edges with both endpoints in ``members``, sorted."""
        ms = sorted(set(members))
        out = []
        for i, a in enumerate(ms):
            for b in ms[i + 1:]:
                p = self.edges.get((a, b))
                if p is not None:
                    out.append(((a, b), p))
        return out

    def edges_between(self, left: Iterable[str], right: Iterable[str]) -> list[tuple[Pair, float]]:
        """Crowdsourced edges spanning the two disjoint member sets, sorted."""
        out = []
        for a in left:
            for b in right:
                key = canonical_pair(a, b)
                p = self.edges.get(key)
                if p is not None:
                    out.append((key, p))
        return sorted(out)

    def __repr__(self):
        return f"UncertainGraph({len(self.records)} records, {len(self.edges)} edges)"


class Clustering:
    """A partition of the records into disjoint non-empty blocks.

    Canonical form everywhere: members sorted inside each block, blocks
    sorted by their minimum member.  Equality and hashing use that form, so
    two clusterings built in different orders compare equal.
    """

    __slots__ = ("blocks", "_owner")

    def __init__(self, blocks: Iterable[Iterable[str]]):
        canon = tuple(sorted(tuple(sorted(b)) for b in blocks))
        if not canon:
            raise ValueError("a clustering needs at least one block")
        owner: dict[str, tuple[str, ...]] = {}
        for block in canon:
            if not block:
                raise ValueError("empty block in clustering")
            for r in block:
                if r in owner:
                    raise ValueError(f"record {r!r} appears in more than one block")
                owner[r] = block
        self.blocks = canon
        self._owner = owner

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[str]]) -> "Clustering":
        return cls(blocks)

    @classmethod
    def singletons(cls, records: Iterable[str]) -> "Clustering":
        return cls([[r] for r in records])

    @property
    def records(self) -> frozenset:
        return frozenset(self._owner)

    def block_of(self, record: str) -> tuple[str, ...]:
        try:
            return self._owner[record]
        except KeyError:
            raise KeyError(f"record {record!r} is not in this clustering") from None

    def same_block(self, a: str, b: str) -> bool:
        return self.block_of(a) is self.block_of(b)

    def block_pairs(self) -> Iterator[tuple[tuple[str, ...], tuple[str, ...]]]:
        """All unordered block pairs, in canonical (j < k) order."""
        for j in range(len(self.blocks)):
            for k in range(j + 1, len(self.blocks)):
                yield self.blocks[j], self.blocks[k]

    def __eq__(self, other):
        return isinstance(other, Clustering) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        inner = ", ".join("{" + ",".join(b) + "}" for b in self.blocks)
        return f"Clustering({inner})"


YES = "YES"
NO = "NO"


class YesNoView:
    """Per-edge YES/NO relabeling of a graph relative to a clustering.

    Intra-block edges keep their YES probability p; cross-block edges carry
    the NO probability 1 - p.  For any edge the two role probabilities sum
    to 1.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: dict[Pair, tuple[str, float]]):
        self.entries = entries

    def label(self, a: str, b: str) -> str:
        return self.entries[canonical_pair(a, b)][0]

    def probability(self, a: str, b: str) -> float:
        return self.entries[canonical_pair(a, b)][1]

    def items(self) -> list[tuple[Pair, str, float]]:
        return [(pair, lab, p) for pair, (lab, p) in sorted(self.entries.items())]

    def __eq__(self, other):
        return isinstance(other, YesNoView) and self.entries == other.entries

    def __len__(self):
        return len(self.entries)


def ingest_votes(records: Iterable[str], pairs: Iterable[tuple[Pair, VoteTally]]) -> UncertainGraph:
    """Build a graph from declared records and per-pair vote tallies.

    Rejects undeclared ids, self-loops and duplicate pairs, naming the
    offending pair in the error.
    """
    graph = UncertainGraph(records)
    edges: dict[Pair, float] = {}
    tallies: dict[Pair, VoteTally] = {}
    for (a, b), tally in pairs:
        key = graph._check_pair((a, b))
        if key in edges:
            raise ValueError(f"duplicate vote tally for pair {key}")
        edges[key] = tally.fraction
        tallies[key] = tally
    return UncertainGraph(graph.records, edges=edges, tallies=tallies)


def possible_world_log_prob(graph: UncertainGraph, present: Iterable[Pair]) -> float:
    """log10 probability of the world whose present edges are ``present``.

    Worlds are over crowdsourced edges only; a present pair that was never
    crowdsourced is rejected.  Worlds forced impossible by a certain edge
    (p of 0 or 1 on the wrong side) come back as -inf.
    """
    present_set = set()
    for pair in present:
        key = canonical_pair(*pair)
        if key not in graph.edges:
            raise ValueError(f"pair {key} is not a crowdsourced edge")
        present_set.add(key)
    total = 0.0
    for pair, p in graph.edge_items():
        total += log10_or_neg_inf(p if pair in present_set else 1.0 - p)
    return total


def clustering_log_likelihood(graph: UncertainGraph, clustering: Clustering) -> float:
    """log10 likelihood of a clustering: the probability of the one world
    whose present edges are exactly the clustering's intra-block edges."""
    if clustering.records != set(graph.records):
        raise ValueError("clustering does not cover exactly the graph's records")
    total = 0.0
    for (a, b), p in graph.edge_items():
        total += log10_or_neg_inf(p if clustering.same_block(a, b) else 1.0 - p)
    return total


def derive_yes_no(graph: UncertainGraph, clustering: Clustering) -> YesNoView:
    """Relabel each edge YES (intra-block, prob p) or NO (cross, prob 1 - p)."""
    if clustering.records != set(graph.records):
        raise ValueError("clustering does not cover exactly the graph's records")
    entries = {}
    for (a, b), p in graph.edge_items():
        if clustering.same_block(a, b):
            entries[(a, b)] = (YES, p)
        else:
            entries[(a, b)] = (NO, 1.0 - p)
    return YesNoView(entries)


def enumerate_partitions(records: Iterable[str]) -> Iterator[Clustering]:
    """Yield every partition of ``records`` exactly once, canonicalized.

    The count is the Bell number of len(records); the hard cap keeps an
    accidental call on a big record set from running for hours.
    """
    recs = sorted(set(records))
    if len(recs) > MAX_PARTITION_RECORDS:
        raise ValueError(
            f"refusing to enumerate partitions of {len(recs)} records "
            f"(limit {MAX_PARTITION_RECORDS})")
    if not recs:
        raise ValueError("cannot partition an empty record set")

    def grow(i: int, parts: list[list[str]]) -> Iterator[list[list[str]]]:
        if i == len(recs):
            yield parts
            return
        r = recs[i]
        for j in range(len(parts)):
            parts[j].append(r)
            yield from grow(i + 1, parts)
            parts[j].pop()
        parts.append([r])
        yield from grow(i + 1, parts)
        parts.pop()

    for parts in grow(1, [[recs[0]]]):
        yield Clustering(parts)

"""Reliability of a clustering over an uncertain vote graph.

A block is reliable when its members are likely to be connected by realized
YES edges; two blocks are reliably separated when at least one spanning NO
edge is likely to be realized.  The clustering score adds the base-10 logs
of both kinds of term, clamping zero components to a small epsilon so one
hopeless component cannot erase every other signal.

Block connectivity is the all-terminal reliability of the intra-block
subgraph, which is #P-hard in general.  Small blocks are solved exactly by
edge factoring (condition on one edge, contract or delete, with pruning);
larger blocks fall back to Monte Carlo sampling that realizes edges lazily
during a BFS and stops as soon as the block is covered.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Clustering, Pair, UncertainGraph
from .util import canonical_pair, derive_seed, log10_clamped, make_rng


@dataclass(frozen=True)
class ReliabilityParams:
    """Knobs for the reliability computations.

    exact_edge_limit is the largest intra-block edge count handed to the
    exact solver; above it the Monte Carlo estimator with mc_samples worlds
    takes over.  epsilon is the clamp floor for zero-probability components.
    seed is the master seed that all sampling streams are derived from.
    """

    mc_samples: int = 1000
    epsilon: float = 1e-12
    exact_edge_limit: int = 18
    seed: int = 0

    def __post_init__(self):
        if self.mc_samples < 1:
            raise ValueError(f"mc_samples must be positive, got {self.mc_samples}")
        if not 0.0 < self.epsilon < 1e-3:
            raise ValueError(f"epsilon must sit in (0, 1e-3), got {self.epsilon}")
        if self.exact_edge_limit < 0:
            raise ValueError(f"exact_edge_limit must be >= 0, got {self.exact_edge_limit}")


@dataclass(frozen=True)
class ConnectivityEstimate:
    """A block connectivity value plus how it was obtained."""

    value: float
    method: str  # "exact" or "monte-carlo"
    samples: int = 0
    seed: int = 0


@dataclass(frozen=True)
class ReliabilityScore:
    """Clustering reliability: summed log10 terms plus the per-part pieces."""

    value: float
    block_connectivity: tuple[ConnectivityEstimate, ...]
    pair_disconnectivity: tuple[float, ...]


def _check_block(clustering: Clustering, block) -> tuple[str, ...]:
    key = tuple(sorted(block))
    if key not in clustering.blocks:
        raise ValueError(f"block {key} is not part of the clustering")
    return key


def disconnectivity(graph: UncertainGraph, clustering: Clustering,
                    block_j, block_k) -> float:
    """Probability that at least one NO edge separates the two blocks.

    Spanning edge e carries NO probability 1 - p(e), so the result is
    1 - prod(p(e)) over spanning edges, and 0 when nothing spans the pair.
    The product runs over edges in canonical order, which makes the value
    independent of graph construction order.
    """
    bj = _check_block(clustering, block_j)
    bk = _check_block(clustering, block_k)
    if bj == bk:
        raise ValueError(f"need two distinct blocks, got {bj} twice")
    spanning = graph.edges_between(bj, bk)
    if not spanning:
        return 0.0
    prod_all_no_fail = 1.0
    for _, p in spanning:
        prod_all_no_fail *= p  # 1 - p_no
    return 1.0 - prod_all_no_fail


def _indexed_intra_edges(graph: UncertainGraph, block: tuple[str, ...],
                         extra_pair: Pair | None = None) -> list[tuple[int, int, float]]:
    index = {r: i for i, r in enumerate(block)}
    edges = [(index[a], index[b], p) for (a, b), p in graph.edges_within(block)]
    if extra_pair is not None:
        a, b = canonical_pair(*extra_pair)
        if a not in index or b not in index:
            raise ValueError(f"extra pair {(a, b)} does not lie inside the block")
        edges.append((index[a], index[b], 1.0))
    return edges


class _UnionFind:
    __slots__ = ("parent", "groups")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.groups = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        self.groups -= 1
        return True

    def copy(self) -> "_UnionFind":
        uf = _UnionFind.__new__(_UnionFind)
        uf.parent = list(self.parent)
        uf.groups = self.groups
        return uf


def _exact_connect_prob(n: int, edges: list[tuple[int, int, float]]) -> float:
    """All-terminal connection probability by edge factoring.

    Conditions on one edge at a time: present with probability p (contract
    its endpoints) or missing with 1 - p (drop it).  Two prunings keep the
    recursion far below 2^m in practice: stop at 1 once everything is in a
    single group, and stop at 0 once the remaining edges cannot join the
    groups that are left.
    """
    if n <= 1:
        return 1.0

    def solve(uf: _UnionFind, idx: int) -> float:
        while idx < len(edges):
            u, v, p = edges[idx]
            if uf.find(u) == uf.find(v):
                idx += 1  # already joined, the edge cannot change anything
                continue
            break
        if uf.groups == 1:
            return 1.0
        if idx >= len(edges):
            return 0.0
        probe = uf.copy()
        for u, v, _ in edges[idx:]:
            probe.union(u, v)
        if probe.groups > 1:
            return 0.0
        u, v, p = edges[idx]
        with_edge = uf.copy()
        with_edge.union(u, v)
        value = p * solve(with_edge, idx + 1)
        if p < 1.0:
            value += (1.0 - p) * solve(uf, idx + 1)
        return value

    return solve(_UnionFind(n), 0)


def _sampled_connect_prob(n: int, edges: list[tuple[int, int, float]],
                          samples: int, rng) -> float:
    """Monte Carlo connectivity: fraction of sampled worlds where a BFS from
    node 0 (the minimum-id member) reaches everyone.

    Edges are realized lazily when the BFS frontier first touches them and
    the coin is remembered, so each edge is flipped at most once per world
    and unreached parts of the graph cost nothing.
    """
    if n <= 1:
        return 1.0
    adjacency: list[list[tuple[int, int, float]]] = [[] for _ in range(n)]
    for eid, (u, v, p) in enumerate(edges):
        adjacency[u].append((v, eid, p))
        adjacency[v].append((u, eid, p))
    if not adjacency[0] and n > 1:
        return 0.0
    hits = 0
    for _ in range(samples):
        decided: dict[int, bool] = {}
        visited = [False] * n
        visited[0] = True
        seen = 1
        stack = [0]
        while stack and seen < n:
            node = stack.pop()
            for other, eid, p in adjacency[node]:
                if visited[other]:
                    continue
                present = decided.get(eid)
                if present is None:
                    present = rng.random() < p
                    decided[eid] = present
                if present:
                    visited[other] = True
                    seen += 1
                    stack.append(other)
        if seen == n:
            hits += 1
    return hits / samples


def connectivity_exact(graph: UncertainGraph, block,
                       edge_limit: int = 18) -> ConnectivityEstimate:
    """Exact block connectivity; rejects blocks whose intra edge count
    exceeds ``edge_limit`` with a pointer at the Monte Carlo path."""
    members = tuple(sorted(set(block)))
    if not members:
        raise ValueError("block is empty")
    edges = _indexed_intra_edges(graph, members)
    if len(edges) > edge_limit:
        raise ValueError(
            f"block has {len(edges)} intra edges, above the exact limit "
            f"{edge_limit}; use connectivity_mc for blocks this dense")
    return ConnectivityEstimate(value=_exact_connect_prob(len(members), edges),
                                method="exact")


def connectivity_mc(graph: UncertainGraph, block,
                    params: ReliabilityParams) -> ConnectivityEstimate:
    """Monte Carlo block connectivity, deterministic for a fixed seed.

    The stream seed folds the block members into params.seed, so every
    evaluation of the same block under the same params reuses one stream
    (common random numbers across re-evaluations within a round).
    """
    members = tuple(sorted(set(block)))
    if not members:
        raise ValueError("block is empty")
    return _mc_estimate(graph, members, params, None)


def _mc_estimate(graph: UncertainGraph, members: tuple[str, ...],
                 params: ReliabilityParams, extra_pair: Pair | None) -> ConnectivityEstimate:
    seed = derive_seed(params.seed, "connectivity", members)
    edges = _indexed_intra_edges(graph, members, extra_pair)
    value = _sampled_connect_prob(len(members), edges, params.mc_samples, make_rng(seed))
    return ConnectivityEstimate(value=value, method="monte-carlo",
                                samples=params.mc_samples, seed=seed)


def block_connectivity(graph: UncertainGraph, block, params: ReliabilityParams,
                       extra_pair: Pair | None = None) -> ConnectivityEstimate:
    """Connectivity with automatic method choice, optionally with one
    hypothetical certain edge added inside the block.

    The method is picked from the edge count including the hypothetical
    edge, so a with/without comparison for the same block always uses one
    method (and, in the sampled case, one stream).
    """
    members = tuple(sorted(set(block)))
    if not members:
        raise ValueError("block is empty")
    count = len(graph.edges_within(members)) + (1 if extra_pair is not None else 0)
    if count <= params.exact_edge_limit:
        edges = _indexed_intra_edges(graph, members, extra_pair)
        return ConnectivityEstimate(value=_exact_connect_prob(len(members), edges),
                                    method="exact")
    return _mc_estimate(graph, members, params, extra_pair)


def reliability(graph: UncertainGraph, clustering: Clustering,
                params: ReliabilityParams | None = None) -> ReliabilityScore:
    """Clustering reliability: sum of log10 block connectivity over blocks
    plus log10 pair disconnectivity over block pairs, zeros clamped to
    params.epsilon."""
    params = params or ReliabilityParams()
    if clustering.records != set(graph.records):
        raise ValueError("clustering does not cover exactly the graph's records")
    connect_parts = []
    total = 0.0
    for block in clustering.blocks:
        est = block_connectivity(graph, block, params)
        connect_parts.append(est)
        total += log10_clamped(est.value, params.epsilon)
    disconnect_parts = []
    for bj, bk in clustering.block_pairs():
        d = disconnectivity(graph, clustering, bj, bk)
        disconnect_parts.append(d)
        total += log10_clamped(d, params.epsilon)
    return ReliabilityScore(value=total,
                            block_connectivity=tuple(connect_parts),
                            pair_disconnectivity=tuple(disconnect_parts))

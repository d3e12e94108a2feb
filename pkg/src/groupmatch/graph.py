"""Match graph construction and cleanup.

Positive pairwise predictions become edges of an undirected match graph;
connected components are the (implied) entity groups. Because a single
false positive edge can fuse two otherwise clean groups, oversized
components are split before the groups are emitted:

* components above the ``gamma`` threshold are cut apart with global
  minimum edge cuts (cheap, removes whole cuts at once);
* components still above the ``mu`` threshold lose their single
  highest-betweenness edge, one at a time, until every component fits.

Setting ``gamma == mu`` gives cut-only cleanup; ``gamma = math.inf``
betweenness-only. Both phases are purely structural: edge scores are
ignored. A separate pre-cleanup pass drops token-overlap-only edges from
very large components so that the per-edge phase does not have to grind
through them.

All algorithms here are exact and deterministic: adjacency is always
iterated in sorted order and ties are broken lexicographically.
"""

import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .blocking import BlockingKind
from .core import Pair, RecordId, canonical_pair
from .matcher import Prediction

log = logging.getLogger(__name__)

_TOKEN_ONLY = frozenset({BlockingKind.TOKEN_OVERLAP})


@dataclass(frozen=True)
class EdgeData:
    provenance: frozenset[BlockingKind] = frozenset()
    score: float = 1.0


class MatchGraph:
    """Simple undirected graph over record ids; edges carry provenance and score."""

    def __init__(self, nodes: Iterable[RecordId] = ()):
        self._adj: dict[RecordId, set[RecordId]] = {n: set() for n in nodes}
        self._edges: dict[Pair, EdgeData] = {}

    def add_node(self, node: RecordId) -> None:
        self._adj.setdefault(node, set())

    def add_edge(self, pair: Pair, data: EdgeData = EdgeData()) -> None:
        """Insert an edge; duplicates keep the max score and union provenance."""
        a, b = canonical_pair(*pair)
        if a not in self._adj or b not in self._adj:
            missing = a if a not in self._adj else b
            raise KeyError(f"unknown record id {missing!r}")
        existing = self._edges.get((a, b))
        if existing is not None:
            data = EdgeData(
                existing.provenance | data.provenance, max(existing.score, data.score)
            )
        self._edges[(a, b)] = data
        self._adj[a].add(b)
        self._adj[b].add(a)

    def remove_edge(self, pair: Pair) -> None:
        a, b = canonical_pair(*pair)
        del self._edges[(a, b)]
        self._adj[a].discard(b)
        self._adj[b].discard(a)

    def has_edge(self, pair: Pair) -> bool:
        return canonical_pair(*pair) in self._edges

    def edge_data(self, pair: Pair) -> EdgeData:
        return self._edges[canonical_pair(*pair)]

    def neighbors(self, node: RecordId) -> set[RecordId]:
        return self._adj[node]

    def nodes(self) -> Iterator[RecordId]:
        return iter(self._adj)

    def edges(self) -> Iterator[Pair]:
        return iter(self._edges)

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def copy(self) -> "MatchGraph":
        out = MatchGraph()
        out._adj = {n: set(nb) for n, nb in self._adj.items()}
        out._edges = dict(self._edges)
        return out


@dataclass(frozen=True)
class Component:
    """A maximal connected node set with its induced edges, both sorted."""

    nodes: tuple[RecordId, ...]
    edges: tuple[Pair, ...]

    def __len__(self) -> int:
        return len(self.nodes)


def build_graph(predictions: Iterable[Prediction], all_ids: Iterable[RecordId]) -> MatchGraph:
    """Graph over every record id, with one edge per positively predicted pair."""
    graph = MatchGraph(all_ids)
    for pred in predictions:
        if pred.is_match:
            graph.add_edge(pred.pair, EdgeData(pred.provenance, pred.score))
    return graph


def _bfs_set(adj: dict[RecordId, set[RecordId]], start: RecordId) -> set[RecordId]:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nb in adj[node]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return seen


def _component_from(nodes: Iterable[RecordId], adj: dict[RecordId, set[RecordId]]) -> Component:
    ordered = tuple(sorted(nodes))
    edges = tuple(
        (a, b) for a in ordered for b in sorted(adj[a]) if a < b
    )
    return Component(ordered, edges)


def connected_components(graph: MatchGraph) -> list[Component]:
    """Maximal connected components, ordered by smallest member id."""
    seen: set[RecordId] = set()
    out: list[Component] = []
    for node in sorted(graph.nodes()):
        if node in seen:
            continue
        members = _bfs_set(graph._adj, node)
        seen.update(members)
        out.append(_component_from(members, graph._adj))
    return out


def _adjacency(component: Component) -> dict[RecordId, set[RecordId]]:
    adj: dict[RecordId, set[RecordId]] = {n: set() for n in component.nodes}
    for a, b in component.edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def min_edge_cut(component: Component) -> list[Pair]:
    """A globally minimum set of edges whose removal disconnects the component.

    Computed as the minimum over max-flow cuts from the smallest node to
    every other node (unit capacities, shortest augmenting paths). Among
    equal-cardinality cuts the lexicographically smallest sorted edge list
    encountered wins, so the result is deterministic.
    """
    if len(component) < 2:
        raise ValueError("minimum edge cut is undefined for a singleton component")
    adj = _adjacency(component)
    root = component.nodes[0]
    if len(_bfs_set(adj, root)) != len(component):
        raise ValueError("component is not connected")
    best: list[Pair] | None = None
    for target in component.nodes[1:]:
        cut = _min_st_cut(adj, root, target)
        if best is None or (len(cut), cut) < (len(best), best):
            best = cut
    assert best is not None
    return best


def _min_st_cut(
    adj: dict[RecordId, set[RecordId]], source: RecordId, sink: RecordId
) -> list[Pair]:
    """Minimum s-t edge cut via BFS augmentation on unit-capacity arcs."""
    residual: dict[RecordId, dict[RecordId, int]] = {
        u: {v: 1 for v in sorted(adj[u])} for u in adj
    }
    while True:
        parent: dict[RecordId, RecordId] = {source: source}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v, cap in residual[u].items():
                if cap > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        node = sink
        while node != source:
            prev = parent[node]
            residual[prev][node] -= 1
            residual[node][prev] += 1
            node = prev
    reachable = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v, cap in residual[u].items():
            if cap > 0 and v not in reachable:
                reachable.add(v)
                queue.append(v)
    return sorted(
        canonical_pair(u, v) for u in reachable for v in adj[u] if v not in reachable
    )


def edge_betweenness(component: Component) -> dict[Pair, float]:
    """Exact edge betweenness centrality, summed over unordered node pairs.

    Uses breadth-first shortest-path counting with backward dependency
    accumulation; the full source sum counts every unordered pair twice,
    so the result is halved.
    """
    adj = {n: sorted(nbs) for n, nbs in _adjacency(component).items()}
    centrality: dict[Pair, float] = {e: 0.0 for e in component.edges}
    for source in component.nodes:
        dist = {source: 0}
        sigma = {source: 1.0}
        preds: dict[RecordId, list[RecordId]] = {n: [] for n in component.nodes}
        order: list[RecordId] = []
        queue = deque([source])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    sigma[w] = 0.0
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {n: 0.0 for n in order}
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                contribution = sigma[v] * coeff
                centrality[canonical_pair(v, w)] += contribution
                delta[v] += contribution
    return {edge: value / 2.0 for edge, value in centrality.items()}


@dataclass(frozen=True)
class CleanupParams:
    """Size thresholds for component splitting.

    ``gamma`` may be ``math.inf`` to disable the cut phase entirely;
    otherwise it must be at least ``mu``. The natural ``mu`` is the number
    of data sources, since each source holds at most one record per entity;
    the CLI falls back to that when no value is given.
    """

    gamma: float = 25
    mu: int = 5
    pre_cleanup_limit: int = 50

    def __post_init__(self) -> None:
        if self.mu < 1:
            raise ValueError(f"mu must be >= 1, got {self.mu}")
        if self.pre_cleanup_limit < 1:
            raise ValueError(f"pre_cleanup_limit must be >= 1, got {self.pre_cleanup_limit}")
        if math.isfinite(self.gamma):
            if self.gamma != int(self.gamma):
                raise ValueError(f"finite gamma must be an integer, got {self.gamma}")
            if self.gamma < self.mu:
                raise ValueError(f"gamma ({self.gamma}) must be >= mu ({self.mu})")


@dataclass
class CleanupResult:
    graph: MatchGraph
    components: list[Component]
    removed: list[tuple[Pair, str]] = field(default_factory=list)  # (edge, phase)


def pre_cleanup(graph: MatchGraph, limit: int = 50) -> tuple[MatchGraph, list[Pair]]:
    """Drop token-overlap-only edges from components larger than ``limit``.

    Iterates to a fixpoint: shattering one oversized component may leave
    smaller ones that are still above the limit. Edges whose provenance
    contains anything besides token overlap are never touched; if only such
    edges remain, the oversized component is left for the main cleanup.
    """
    out = graph.copy()
    removed: list[Pair] = []
    for pass_no in range(1, out.n_edges + 2):
        oversized = [c for c in connected_components(out) if len(c) > limit]
        doomed = [
            edge
            for comp in oversized
            for edge in comp.edges
            if out.edge_data(edge).provenance == _TOKEN_ONLY
        ]
        if not doomed:
            break
        for edge in doomed:
            out.remove_edge(edge)
        removed.extend(doomed)
        log.debug("pre_cleanup pass %d removed %d edges", pass_no, len(doomed))
    return out, removed


def _split_by_edge_removal(
    adj: dict[RecordId, set[RecordId]], doomed: Iterable[Pair]
) -> list[dict[RecordId, set[RecordId]]]:
    for a, b in doomed:
        adj[a].discard(b)
        adj[b].discard(a)
    parts: list[dict[RecordId, set[RecordId]]] = []
    seen: set[RecordId] = set()
    for node in sorted(adj):
        if node in seen:
            continue
        members = _bfs_set(adj, node)
        seen.update(members)
        parts.append({n: adj[n] for n in members})
    return parts


def _clean_component(component: Component, params: CleanupParams) -> tuple[
    list[Component], list[tuple[Pair, str]]
]:
    """Split one component until every piece has at most ``mu`` nodes."""
    finished: list[Component] = []
    removed: list[tuple[Pair, str]] = []
    pending = [component]
    while pending:
        # largest first; ties broken by smallest member id
        pending.sort(key=lambda c: (-len(c), c.nodes[0]))
        current = pending.pop(0)
        if len(current) > params.gamma:
            doomed = min_edge_cut(current)
            phase = "mincut"
        elif len(current) > params.mu:
            centrality = edge_betweenness(current)
            top = min(centrality.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            doomed = [top]
            phase = "betweenness"
        else:
            finished.append(current)
            continue
        removed.extend((edge, phase) for edge in doomed)
        parts = _split_by_edge_removal(_adjacency(current), doomed)
        pending.extend(_component_from(part.keys(), part) for part in parts)
    finished.sort(key=lambda c: c.nodes[0])
    return finished, removed


def graph_cleanup(
    graph: MatchGraph, params: CleanupParams, workers: int = 1
) -> CleanupResult:
    """Split every oversized component of the match graph.

    Components are independent: removing edges inside one never affects
    another, so they are processed separately (optionally on several
    workers) and the result is identical to a single global
    largest-component-first loop.
    """
    initial = connected_components(graph)
    oversized = [c for c in initial if len(c) > params.mu]
    intact = [c for c in initial if len(c) <= params.mu]
    if workers > 1 and len(oversized) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _clean_component(c, params), oversized))
    else:
        results = [_clean_component(c, params) for c in oversized]

    cleaned = graph.copy()
    removed: list[tuple[Pair, str]] = []
    components = list(intact)
    for finished, comp_removed in results:
        components.extend(finished)
        removed.extend(comp_removed)
        for edge, _ in comp_removed:
            cleaned.remove_edge(edge)
    components.sort(key=lambda c: c.nodes[0])
    return CleanupResult(cleaned, components, removed)


def transitive_completion(components: Iterable[Component]) -> set[Pair]:
    """All within-component pairs: each component treated as a complete graph."""
    pairs: set[Pair] = set()
    for comp in components:
        pairs.update(combinations(comp.nodes, 2))
    return pairs

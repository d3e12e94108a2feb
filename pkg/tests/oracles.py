"""Brute-force reference implementations used as test oracles.

Everything here is deliberately naive (exhaustive enumeration, BFS from
every node) and shares no code with the library's graph module, so the two
can meaningfully check each other.
"""

import random
from collections import deque
from itertools import combinations

Pair = tuple[str, str]


def random_connected_graph(
    rng: random.Random, max_nodes: int = 12, max_edges: int = 20
) -> tuple[list[str], list[Pair]]:
    """A random connected graph: spanning tree plus random extra edges."""
    n = rng.randint(2, max_nodes)
    nodes = [f"v{i:02d}" for i in range(n)]
    order = nodes[:]
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        edges.add((a, b) if a < b else (b, a))
    budget = min(max_edges, n * (n - 1) // 2)
    pool = [p for p in combinations(nodes, 2) if p not in edges]
    rng.shuffle(pool)
    for pair in pool[: rng.randint(0, max(0, budget - len(edges)))]:
        edges.add(pair)
    return nodes, sorted(edges)


def adjacency(nodes: list[str], edges: list[Pair]) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def reachable_from(adj: dict[str, set[str]], start: str) -> frozenset[str]:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nb in adj[node]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return frozenset(seen)


def components_brute(nodes: list[str], edges: list[Pair]) -> set[frozenset[str]]:
    """Reachability closure computed independently from every single node."""
    adj = adjacency(nodes, edges)
    return {reachable_from(adj, node) for node in nodes}


def is_connected(nodes: list[str], edges: list[Pair]) -> bool:
    return len(reachable_from(adjacency(nodes, edges), nodes[0])) == len(nodes)


def all_shortest_paths(adj: dict[str, set[str]], s: str, t: str) -> list[list[str]]:
    """Every shortest s-t path, enumerated explicitly."""
    dist = {s: 0}
    queue = deque([s])
    while queue:
        node = queue.popleft()
        for nb in adj[node]:
            if nb not in dist:
                dist[nb] = dist[node] + 1
                queue.append(nb)
    if t not in dist:
        return []

    paths: list[list[str]] = []

    def walk_back(node: str, suffix: list[str]) -> None:
        if node == s:
            paths.append([s, *suffix])
            return
        for prev in adj[node]:
            if dist.get(prev) == dist[node] - 1:
                walk_back(prev, [node, *suffix])

    walk_back(t, [])
    return paths


def edge_betweenness_brute(nodes: list[str], edges: list[Pair]) -> dict[Pair, float]:
    """Sum over unordered node pairs of the fraction of shortest paths per edge."""
    adj = adjacency(nodes, edges)
    centrality = {e: 0.0 for e in edges}
    for s, t in combinations(sorted(nodes), 2):
        paths = all_shortest_paths(adj, s, t)
        if not paths:
            continue
        for path in paths:
            for a, b in zip(path, path[1:]):
                edge = (a, b) if a < b else (b, a)
                centrality[edge] += 1.0 / len(paths)
    return centrality


def edge_connectivity_brute(
    nodes: list[str], edges: list[Pair], max_k: int = 3
) -> int | None:
    """Smallest k <= max_k such that removing some k edges disconnects the graph."""
    for k in range(1, max_k + 1):
        for doomed in combinations(edges, k):
            remaining = [e for e in edges if e not in set(doomed)]
            if not is_connected(nodes, remaining):
                return k
    return None


def planted_community_graph(rng: random.Random) -> tuple[list[str], list[Pair]]:
    """Dense communities loosely joined by a few cross edges."""
    communities = []
    nodes: list[str] = []
    for c in range(rng.randint(2, 5)):
        members = [f"c{c}n{i:02d}" for i in range(rng.randint(3, 8))]
        communities.append(members)
        nodes.extend(members)
    edges: set[Pair] = set()
    for members in communities:
        order = members[:]
        rng.shuffle(order)
        for i in range(1, len(order)):  # keep each community connected
            a, b = order[i], order[rng.randrange(i)]
            edges.add((a, b) if a < b else (b, a))
        for pair in combinations(members, 2):
            if rng.random() < 0.8:
                edges.add(pair)
    for _ in range(rng.randint(1, 3)):  # sparse cross-community bridges
        ca, cb = rng.sample(range(len(communities)), 2)
        a = rng.choice(communities[ca])
        b = rng.choice(communities[cb])
        edges.add((a, b) if a < b else (b, a))
    return nodes, sorted(edges)

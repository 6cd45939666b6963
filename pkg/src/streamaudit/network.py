"""Retweet-network construction and node/network-level measures.

The graph is User x User: an edge points from the retweeting user to the
retweeted source. Parallel edges are collapsed and self-loops dropped.
Centralities run on the main (weakly connected) component; clustering
treats the graph as undirected.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .corpus import Corpus


@dataclass(frozen=True)
class RetweetGraph:
    """Directed simple graph: no parallel edges, no self-loops."""

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on node {u!r}")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u!r}, {v!r}) references missing node")

    @cached_property
    def sorted_nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.nodes))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.sorted_nodes)}

    @cached_property
    def out_adj(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.sorted_nodes]
        for u, v in sorted(self.edges):
            adj[self._index[u]].append(self._index[v])
        return tuple(tuple(a) for a in adj)

    @cached_property
    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.sorted_nodes]
        for u, v in sorted(self.edges):
            adj[self._index[v]].append(self._index[u])
        return tuple(tuple(a) for a in adj)

    def node_count(self) -> int:
        return len(self.nodes)

    def edge_count(self) -> int:
        return len(self.edges)


def build_retweet_graph(corpus: Corpus) -> RetweetGraph:
    """Nodes are all authors plus all retweeted sources; edges retweeter->source."""
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for record in corpus:
        nodes.add(record.author_id)
        source = record.retweet_source_id
        if source is not None:
            nodes.add(source)
            if source != record.author_id:
                edges.add((record.author_id, source))
    return RetweetGraph(nodes=frozenset(nodes), edges=frozenset(edges))


def largest_component(graph: RetweetGraph) -> RetweetGraph:
    """The largest weakly connected component, as an induced subgraph.

    Size ties are broken toward the component containing the smallest id.
    """
    if not graph.nodes:
        raise ValueError("graph is empty")
    n = len(graph.sorted_nodes)
    seen = [False] * n
    best: list[int] = []
    for start in range(n):  # sorted order: first largest component wins ties
        if seen[start]:
            continue
        component = [start]
        seen[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in graph.out_adj[v] + graph.in_adj[v]:
                if not seen[w]:
                    seen[w] = True
                    component.append(w)
                    queue.append(w)
        if len(component) > len(best):
            best = component
    members = {graph.sorted_nodes[i] for i in best}
    edges = frozenset((u, v) for u, v in graph.edges if u in members and v in members)
    return RetweetGraph(nodes=frozenset(members), edges=edges)


def in_degree(graph: RetweetGraph) -> dict[str, int]:
    """Number of distinct users retweeting each node."""
    return {v: len(graph.in_adj[i]) for i, v in enumerate(graph.sorted_nodes)}


def betweenness(graph: RetweetGraph) -> dict[str, float]:
    """Directed shortest-path betweenness (Brandes), unweighted and unscaled."""
    n = len(graph.sorted_nodes)
    scores = [0.0] * n
    out_adj = graph.out_adj
    for s in range(n):
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v]
            for w in out_adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                scores[w] += delta[w]
    return {v: scores[i] for i, v in enumerate(graph.sorted_nodes)}


def potential_reach(graph: RetweetGraph) -> dict[str, float]:
    """Harmonic in-closeness: sum of 1/d(u, v) over nodes u that can reach v."""
    n = len(graph.sorted_nodes)
    scores = [0.0] * n
    out_adj = graph.out_adj
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            dv = dist[v]
            for w in out_adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    scores[w] += 1.0 / dist[w]
                    queue.append(w)
    return {v: scores[i] for i, v in enumerate(graph.sorted_nodes)}


def _undirected_adj(graph: RetweetGraph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in graph.sorted_nodes]
    for u, v in graph.edges:
        i, j = graph._index[u], graph._index[v]
        adj[i].add(j)
        adj[j].add(i)
    return adj


def clustering_coefficient(graph: RetweetGraph) -> float:
    """Average local clustering on the undirected projection.

    Nodes with fewer than two neighbors contribute 0 and stay in the average.
    """
    if not graph.nodes:
        raise ValueError("graph is empty")
    adj = _undirected_adj(graph)
    total = 0.0
    for neighbors in adj:
        deg = len(neighbors)
        if deg < 2:
            continue
        links = sum(len(adj[u] & neighbors) for u in neighbors) // 2
        total += 2.0 * links / (deg * (deg - 1))
    return total / len(adj)


_STAR_MAX = {
    "in_degree": lambda n: n - 1,
    "betweenness": lambda n: (n - 1) * (n - 2),
    "potential_reach": lambda n: n - 1,
}


def centralization(scores: dict[str, float], metric: str) -> float:
    """Freeman centralization of [0,1]-normalized scores.

    Scores are normalized by the metric's star maximum, then
    C = sum(c_max - c_i) / (N - 1), which makes an in-star exactly 1.0.
    """
    if metric not in _STAR_MAX:
        raise ValueError(f"unknown metric {metric!r}; known: {sorted(_STAR_MAX)}")
    n = len(scores)
    if n < 2:
        raise ValueError("centralization needs at least 2 nodes")
    star_max = _STAR_MAX[metric](n)
    values = [scores[v] / star_max if star_max > 0 else 0.0 for v in sorted(scores)]
    c_max = max(values)
    return sum(c_max - c for c in values) / (n - 1)


def top_k_nodes(scores: dict[str, float], k: int) -> list[str]:
    """The k best-scoring nodes under the tie rule (score desc, id asc)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return [v for v, _ in sorted(scores.items(), key=lambda e: (-e[1], e[0]))[:k]]


def top_k_overlap(reference_scores: dict[str, float], sample_scores: dict[str, float], k: int) -> int:
    """How many of the reference's top-k nodes the sample's top-k recovers."""
    return len(set(top_k_nodes(reference_scores, k)) & set(top_k_nodes(sample_scores, k)))


CENTRALITY_FUNCTIONS = {
    "in_degree": in_degree,
    "betweenness": betweenness,
    "potential_reach": potential_reach,
}


@dataclass(frozen=True)
class CentralityReport:
    """Node scores for one metric, with centralization and top-k sets."""

    metric: str
    scores: dict[str, float]
    normalized: dict[str, float]
    centralization: float
    top_k: dict[int, tuple[str, ...]]


def centrality_report(graph: RetweetGraph, metric: str, ks: tuple[int, ...] = (10, 100)) -> CentralityReport:
    if metric not in CENTRALITY_FUNCTIONS:
        raise ValueError(f"unknown metric {metric!r}; known: {sorted(CENTRALITY_FUNCTIONS)}")
    scores = {v: float(s) for v, s in CENTRALITY_FUNCTIONS[metric](graph).items()}
    star_max = _STAR_MAX[metric](len(scores))
    normalized = {v: (s / star_max if star_max > 0 else 0.0) for v, s in scores.items()}
    return CentralityReport(
        metric=metric,
        scores=scores,
        normalized=normalized,
        centralization=centralization(scores, metric),
        top_k={k: tuple(top_k_nodes(scores, k)) for k in ks},
    )


@dataclass(frozen=True)
class NetworkSummary:
    """Network-level measures; component-dependent ones use the main component."""

    nodes: int
    links: int
    din_positive_pct: float
    max_din: int
    main_component_size: int
    main_component_pct: float
    clustering: float
    centralization_in_degree: float
    centralization_betweenness: float
    centralization_potential_reach: float


@dataclass(frozen=True)
class NetworkComparison:
    reference: NetworkSummary
    sample: NetworkSummary
    node_coverage_pct: float
    link_coverage_pct: float
    overlaps: dict[str, dict[int, int]]  # metric -> k -> overlap count


def coverage_pct(sample_count: int, reference_count: int) -> float:
    """Sample volume as a percentage of the reference volume."""
    return 100.0 * sample_count / reference_count


def _summarize(graph: RetweetGraph) -> tuple[NetworkSummary, dict[str, dict[str, float]]]:
    main = largest_component(graph)
    degrees = in_degree(main)
    scores = {
        "in_degree": {v: float(s) for v, s in degrees.items()},
        "betweenness": betweenness(main),
        "potential_reach": potential_reach(main),
    }
    n_main = main.node_count()
    summary = NetworkSummary(
        nodes=graph.node_count(),
        links=graph.edge_count(),
        din_positive_pct=100.0 * sum(1 for d in degrees.values() if d > 0) / n_main,
        max_din=max(degrees.values()),
        main_component_size=n_main,
        main_component_pct=100.0 * n_main / graph.node_count(),
        clustering=clustering_coefficient(main),
        centralization_in_degree=centralization(scores["in_degree"], "in_degree"),
        centralization_betweenness=centralization(scores["betweenness"], "betweenness"),
        centralization_potential_reach=centralization(scores["potential_reach"], "potential_reach"),
    )
    return summary, scores


def network_report(reference: Corpus, sample: Corpus, ks: tuple[int, ...] = (10, 100)) -> NetworkComparison:
    """Build both retweet graphs and compare them at network and node level."""
    ref_summary, ref_scores = _summarize(build_retweet_graph(reference))
    sample_summary, sample_scores = _summarize(build_retweet_graph(sample))
    overlaps = {
        metric: {k: top_k_overlap(ref_scores[metric], sample_scores[metric], k) for k in ks}
        for metric in sorted(CENTRALITY_FUNCTIONS)
    }
    return NetworkComparison(
        reference=ref_summary,
        sample=sample_summary,
        node_coverage_pct=coverage_pct(sample_summary.nodes, ref_summary.nodes),
        link_coverage_pct=coverage_pct(sample_summary.links, ref_summary.links),
        overlaps=overlaps,
    )

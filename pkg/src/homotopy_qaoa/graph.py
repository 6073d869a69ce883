"""Weighted preferential-attachment problem instances and their JSON format."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import GraphParseError

WEIGHT_MIN = 1
WEIGHT_MAX = 10


@dataclass(frozen=True)
class WeightedGraph:
    """Connected simple graph with integer edge weights in [1, 10].

    Edges are (u, v, w) triples with 0 <= u < v < n, kept sorted by (u, v).
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)


def generate_ba_graph(n: int, m: int, seed) -> WeightedGraph:
    """Preferential-attachment graph on ``n`` nodes, ``m`` edges per new node.

    Starts from a clique on the first ``m`` nodes; every later node attaches
    ``m`` edges to distinct existing nodes picked with probability
    proportional to current degree.  Edge weights are drawn i.i.d. uniform
    over the integers 1..10 from the same stream, after the topology is
    fixed, in sorted edge order.  ``seed`` is anything accepted by
    ``numpy.random.default_rng``; identical seeds give identical graphs.
    """
    if m < 1:
        raise ValueError(f"attachment count must be >= 1, got m={m}")
    if n <= m:
        raise ValueError(f"need n > m, got n={n}, m={m}")
    rng = np.random.default_rng(seed)

    edges: list[tuple[int, int]] = [(u, v) for u in range(m) for v in range(u + 1, m)]
    # one entry per unit of degree; drives the preferential choice below
    attachment_pool: list[int] = [node for edge in edges for node in edge]

    for new in range(m, n):
        targets: set[int] = set()
        while len(targets) < m:
            if attachment_pool:
                cand = attachment_pool[int(rng.integers(len(attachment_pool)))]
            else:
                # m == 1 and no edge yet: first attachment is uniform
                cand = int(rng.integers(new))
            targets.add(cand)
        for t in sorted(targets):
            edges.append((t, new))
            attachment_pool.extend((t, new))

    edges.sort()
    weights = rng.integers(WEIGHT_MIN, WEIGHT_MAX + 1, size=len(edges))
    return WeightedGraph(
        n=n, edges=tuple((u, v, int(w)) for (u, v), w in zip(edges, weights))
    )


def serialize_graph(g: WeightedGraph) -> str:
    """Canonical single-line JSON document, edges sorted by (u, v)."""
    doc = {"n": g.n, "edges": [list(e) for e in sorted(g.edges)]}
    return json.dumps(doc, separators=(",", ":"))


def _check_edge(e, idx: int, n: int) -> tuple[int, int, int]:
    label = f"edge #{idx} {e!r}"
    if not (isinstance(e, list) and len(e) == 3 and all(isinstance(x, int) for x in e)):
        raise GraphParseError(f"{label}: expected [u, v, w] with integer entries")
    u, v, w = e
    if u == v:
        raise GraphParseError(f"{label}: self-loop")
    if not (0 <= u < v < n):
        raise GraphParseError(f"{label}: endpoints must satisfy 0 <= u < v < n={n}")
    if not (WEIGHT_MIN <= w <= WEIGHT_MAX):
        raise GraphParseError(
            f"{label}: weight out of range [{WEIGHT_MIN}, {WEIGHT_MAX}]"
        )
    return u, v, w


def _check_connected(n: int, edges) -> None:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v, _ in edges:
        parent[find(u)] = find(v)
    roots = {find(i) for i in range(n)}
    if len(roots) != 1:
        raise GraphParseError(f"graph is not connected ({len(roots)} components)")


def parse_graph(text: str) -> WeightedGraph:
    """Inverse of :func:`serialize_graph`, with full invariant validation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) != {"n", "edges"}:
        raise GraphParseError('expected an object with exactly the keys "n" and "edges"')
    n = doc["n"]
    if not isinstance(n, int) or n < 2:
        raise GraphParseError(f"node count must be an integer >= 2, got {n!r}")
    if not isinstance(doc["edges"], list):
        raise GraphParseError('"edges" must be a list')

    edges = []
    seen = set()
    for idx, e in enumerate(doc["edges"]):
        u, v, w = _check_edge(e, idx, n)
        if (u, v) in seen:
            raise GraphParseError(f"edge #{idx} {e!r}: duplicate edge")
        seen.add((u, v))
        edges.append((u, v, w))
    edges.sort()
    _check_connected(n, edges)
    return WeightedGraph(n=n, edges=tuple(edges))


def graph_hash(g: WeightedGraph) -> str:
    """Short stable identifier of an instance (prefix of the SHA-256 of its JSON)."""
    return hashlib.sha256(serialize_graph(g).encode("ascii")).hexdigest()[:12]


def write_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(serialize_graph(g) + "\n", encoding="ascii")


def read_graph(path) -> WeightedGraph:
    return parse_graph(Path(path).read_text(encoding="ascii"))

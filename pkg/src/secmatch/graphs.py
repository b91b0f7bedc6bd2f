"""Weighted general graphs and exact / greedy maximum-weight matchings.

Graphs are undirected with nonnegative finite edge weights; absent edges
implicitly weigh 0, so every graph behaves like a complete graph padded
with 0-weight edges.  On an even vertex set the returned maximum-weight
matching is therefore always perfect.

Uniqueness of the maximum-weight matching is enforced by a deterministic
tie-break instead of random perturbation:

* for vertex sets with at most ``SMALL_EXACT_LIMIT`` vertices the result is
  the maximum-weight matching whose sorted edge list is lexicographically
  smallest (perfect matchings only, when the set is even);
* for larger sets the positive-weight core is solved first (exact
  lexicographic rule while the core spans at most ``SMALL_EXACT_LIMIT``
  vertices, deterministic blossom output beyond that) and the leftover
  vertices are then paired in ascending order with 0-weight edges.

Both rules are pure functions of the input, which is all the downstream
algorithms require of the uniqueness assumption.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import InputError
from ._blossom import blossom_max_weight_matching

SMALL_EXACT_LIMIT = 10

# Hard cap for the blossom solver; it allocates O(n^2) scratch memory.
BLOSSOM_VERTEX_LIMIT = 4096


def _canon(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Symmetric nonnegative edge weights over vertices ``0..n-1``.

    Absent pairs weigh 0.  Self-loops, duplicate pairs, negative or
    non-finite weights are rejected.
    """

    __slots__ = ("n", "_w", "_pos_cache", "_dense_cache")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]] = ()):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InputError(f"vertex count must be a positive integer, got {n!r}")
        self.n = int(n)
        w: dict[tuple[int, int], float] = {}
        for u, v, wt in edges:
            u = int(u)
            v = int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"vertex id out of range in edge ({u}, {v})")
            if u == v:
                raise InputError(f"self-loop on vertex {u} rejected")
            wt = float(wt)
            if not np.isfinite(wt) or wt < 0.0:
                raise InputError(f"edge ({u}, {v}) has invalid weight {wt!r}")
            key = _canon(u, v)
            if key in w:
                raise InputError(f"duplicate edge ({u}, {v})")
            w[key] = wt
        self._w = w
        self._pos_cache: list[tuple[int, int, float]] | None = None
        self._dense_cache: np.ndarray | None = None

    def weight(self, u: int, v: int) -> float:
        """Weight of pair ``uv``; 0 for absent pairs."""
        if u == v:
            raise InputError("no self-loop weights")
        return self._w.get(_canon(u, v), 0.0)

    def edges(self) -> list[tuple[int, int, float]]:
        """All stored edges as sorted ``(u, v, w)`` triples with ``u < v``."""
        return [(u, v, w) for (u, v), w in sorted(self._w.items())]

    def positive_edges(self) -> list[tuple[int, int, float]]:
        """Stored edges with strictly positive weight, in canonical order."""
        if self._pos_cache is None:
            self._pos_cache = [(u, v, w) for (u, v), w in sorted(self._w.items()) if w > 0.0]
        return self._pos_cache

    def dense(self) -> np.ndarray:
        """Symmetric ``n x n`` float64 weight matrix (cached)."""
        if self._dense_cache is None:
            m = np.zeros((self.n, self.n))
            for (u, v), w in self._w.items():
                m[u, v] = w
                m[v, u] = w
            self._dense_cache = m
        return self._dense_cache

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightedGraph) and self.n == other.n and self._w == other._w

    def __hash__(self):
        return hash((self.n, tuple(sorted(self._w.items()))))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, edges={len(self._w)})"


class Matching:
    """A set of vertex-disjoint edges with partner lookup."""

    __slots__ = ("edges", "_mu")

    def __init__(self, edges: Iterable[tuple[int, int]] = ()):
        canon = sorted(_canon(int(u), int(v)) for u, v in edges)
        mu: dict[int, int] = {}
        for u, v in canon:
            if u == v:
                raise InputError(f"self-loop ({u}, {v}) in matching")
            if u in mu or v in mu:
                raise InputError(f"edge ({u}, {v}) shares a vertex with another matched edge")
            mu[u] = v
            mu[v] = u
        self.edges: tuple[tuple[int, int], ...] = tuple(canon)
        self._mu = mu

    def partner(self, v: int) -> int | None:
        """The vertex matched with ``v``, or None if ``v`` is unmatched."""
        return self._mu.get(v)

    def covers(self, v: int) -> bool:
        return v in self._mu

    def vertices(self) -> frozenset[int]:
        return frozenset(self._mu)

    def __contains__(self, edge: tuple[int, int]) -> bool:
        u, v = edge
        return self._mu.get(u) == v

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matching) and self.edges == other.edges

    def __hash__(self):
        return hash(self.edges)

    def __repr__(self) -> str:
        return f"Matching({list(self.edges)})"


def check_subset(subset: Sequence[int], n: int) -> tuple[int, ...]:
    """Validate a vertex subset of ``0..n-1``: ids in range, no duplicates."""
    out = tuple(int(v) for v in subset)
    seen = set()
    for v in out:
        if not 0 <= v < n:
            raise InputError(f"vertex id {v} out of range for n={n}")
        if v in seen:
            raise InputError(f"duplicate vertex id {v} in subset")
        seen.add(v)
    return out


def matching_weight(mu: Matching, g: WeightedGraph) -> float:
    """Total weight of ``mu`` under ``g``."""
    return float(sum(g.weight(u, v) for u, v in mu.edges))


def restrict_matching(mu: Matching, subset: Sequence[int]) -> Matching:
    """Edges of ``mu`` with both endpoints inside ``subset``."""
    s = set(subset)
    return Matching((u, v) for u, v in mu.edges if u in s and v in s)


def _pad_to_perfect(pairs: list[tuple[int, int]], subset: Sequence[int]) -> list[tuple[int, int]]:
    """Complete ``pairs`` to a perfect matching on the even set ``subset``.

    Leftover vertices are paired consecutively in ascending id order,
    which is the lexicographically smallest completion.
    """
    used = set()
    for u, v in pairs:
        used.add(u)
        used.add(v)
    left = sorted(v for v in subset if v not in used)
    out = list(pairs)
    for i in range(0, len(left), 2):
        out.append((left[i], left[i + 1]))
    return out


def _enumerate_best(vertices: list[int], g: WeightedGraph, perfect: bool) -> list[tuple[int, int]]:
    """Exhaustive maximum-weight matching with the lexicographic tie-break.

    Enumerates matchings on ``vertices`` (perfect ones only when ``perfect``)
    and returns the maximum-weight matching whose sorted edge list is
    lexicographically smallest.  Exponential; callers bound ``len(vertices)``.
    """
    verts = sorted(vertices)
    best_w = -1.0
    best_list: tuple[tuple[int, int], ...] | None = None

    def rec(remaining: tuple[int, ...], acc: list[tuple[int, int]], acc_w: float):
        nonlocal best_w, best_list
        if not remaining:
            key = tuple(sorted(acc))
            if acc_w > best_w or (acc_w == best_w and (best_list is None or key < best_list)):
                best_w = acc_w
                best_list = key
            return
        u = remaining[0]
        rest = remaining[1:]
        if not perfect:
            rec(rest, acc, acc_w)
        for idx, v in enumerate(rest):
            acc.append((u, v))
            rec(rest[:idx] + rest[idx + 1 :], acc, acc_w + g.weight(u, v))
            acc.pop()

    if perfect and len(verts) % 2:
        raise InputError("perfect matching requested on an odd vertex set")
    if perfect:
        rec(tuple(verts), [], 0.0)
    else:
        rec(tuple(verts), [], 0.0)
    assert best_list is not None
    return list(best_list)


def _positive_core(g: WeightedGraph, subset: tuple[int, ...]) -> list[tuple[int, int]]:
    """Deterministic maximum-weight matching over the positive edges in ``subset``."""
    inset = set(subset)
    pos = [(u, v, w) for u, v, w in g.positive_edges() if u in inset and v in inset]
    if not pos:
        return []
    touched = sorted({x for u, v, _ in pos for x in (u, v)})
    if len(touched) <= SMALL_EXACT_LIMIT:
        sub = WeightedGraph(g.n, pos)
        return _enumerate_best(touched, sub, perfect=False)
    if len(touched) > BLOSSOM_VERTEX_LIMIT:
        raise InputError(
            f"positive core spans {len(touched)} vertices, beyond the solver limit {BLOSSOM_VERTEX_LIMIT}"
        )
    remap = {v: i for i, v in enumerate(touched)}
    eu = np.array([remap[u] for u, v, w in pos], dtype=np.int32)
    ev = np.array([remap[v] for u, v, w in pos], dtype=np.int32)
    ew = np.array([w for u, v, w in pos], dtype=np.float64)
    mate = blossom_max_weight_matching(len(touched), eu, ev, ew)
    pairs = []
    for i, j in enumerate(mate):
        if j > i:
            pairs.append(_canon(touched[i], touched[int(j)]))
    return pairs


def max_weight_matching(g: WeightedGraph, subset: Sequence[int] | None = None) -> Matching:
    """Maximum-weight matching on the subgraph induced by ``subset``.

    When ``len(subset)`` is even the result is a perfect matching on the
    subset (0-weight padding makes this free).  Ties are broken by the
    deterministic rule described in the module docstring, so the result
    is a pure function of the input.
    """
    sub = check_subset(subset if subset is not None else range(g.n), g.n)
    if len(sub) == 0:
        return Matching()
    if len(sub) <= SMALL_EXACT_LIMIT:
        perfect = len(sub) % 2 == 0
        return Matching(_enumerate_best(list(sub), g, perfect=perfect))
    pairs = _positive_core(g, sub)
    if len(sub) % 2 == 0:
        pairs = _pad_to_perfect(pairs, sub)
    return Matching(pairs)


def greedy_matching(g: WeightedGraph, subset: Sequence[int] | None = None) -> Matching:
    """Greedy matching: repeatedly take the heaviest available positive edge.

    Ties go to the lexicographically smallest pair.  On an even subset the
    result is padded to a perfect matching with 0-weight edges.  The total
    weight is at least half the maximum-weight matching.
    """
    sub = check_subset(subset if subset is not None else range(g.n), g.n)
    if len(sub) == 0:
        return Matching()
    inset = set(sub)
    pos = [(u, v, w) for u, v, w in g.positive_edges() if u in inset and v in inset]
    pos.sort(key=lambda e: (-e[2], e[0], e[1]))
    used: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for u, v, _w in pos:
        if u not in used and v not in used:
            pairs.append((u, v))
            used.add(u)
            used.add(v)
    if len(sub) % 2 == 0:
        pairs = _pad_to_perfect(pairs, sub)
    return Matching(pairs)


# ---------------------------------------------------------------------------
# JSON graph format: {"n": int, "edges": [[u, v, w], ...]}
# ---------------------------------------------------------------------------

def graph_to_json(g: WeightedGraph) -> dict:
    return {"n": g.n, "edges": [[u, v, w] for u, v, w in g.edges()]}


def graph_from_json(obj: Mapping) -> WeightedGraph:
    try:
        n = obj["n"]
        edges = obj["edges"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"graph object must have 'n' and 'edges' fields: {exc}") from exc
    triples = []
    for entry in edges:
        if len(entry) != 3:
            raise InputError(f"edge entry {entry!r} must be [u, v, w]")
        triples.append((entry[0], entry[1], entry[2]))
    return WeightedGraph(n, triples)


def load_graph(path: str) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(json.load(fh))


def save_graph(g: WeightedGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_json(g), fh)
        fh.write("\n")

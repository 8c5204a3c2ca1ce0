"""Covers: per-vertex color lists plus matchings between lists of adjacent vertices.

A cover assigns every vertex a list of globally unique color ids and every
graph edge a matching between the two endpoint lists. Color ids are dense
integers 0..N-1, assigned vertex-block-contiguously by all generators here.
Covers are immutable after construction; generation is pure in (inputs, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, MalformedInputError
from .graphs import Graph
from .rng import derive_rng


@dataclass(frozen=True, eq=False)
class CoverArrays:
    """Flat views of a cover for the numeric kernels.

    vlist_ptr/vlist_colors: colors grouped by owner vertex (CSR over vertices).
    nbr_ptr/nbr_idx: matched-color adjacency (CSR over colors, ids ascending).
    edge_ptr/pair_x/pair_y: matched pairs grouped by graph edge, x on the
    lower-endpoint side; edge_keys/edge_u/edge_v give the edge order.
    """

    n_colors: int
    owner: np.ndarray
    vlist_ptr: np.ndarray
    vlist_colors: np.ndarray
    nbr_ptr: np.ndarray
    nbr_idx: np.ndarray
    edge_keys: tuple[tuple[int, int], ...]
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_ptr: np.ndarray
    pair_x: np.ndarray
    pair_y: np.ndarray


@dataclass(frozen=True, eq=True)
class Cover:
    """The pair (lists, matchings); derived lookups are cached.

    `lists[v]` is the sorted tuple of color ids of vertex v. `matchings` maps
    a canonical graph edge (u, v) with u < v to matched pairs (x, y) where
    x belongs to u's list and y to v's. Constructors do not validate; use
    `validate_cover` to check the cover conditions as data.
    """

    lists: tuple[tuple[int, ...], ...]
    matchings: dict[tuple[int, int], tuple[tuple[int, int], ...]] = field(hash=False)

    @property
    def n_vertices(self) -> int:
        return len(self.lists)

    @cached_property
    def n_colors(self) -> int:
        top = -1
        for lst in self.lists:
            for x in lst:
                if x > top:
                    top = x
        return top + 1

    @cached_property
    def owner(self) -> np.ndarray:
        """Color id -> owner vertex (first list containing it wins)."""
        own = np.full(self.n_colors, -1, dtype=np.int64)
        for v, lst in enumerate(self.lists):
            for x in lst:
                if own[x] < 0:
                    own[x] = v
        return own

    @cached_property
    def color_neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Color id -> sorted matched color ids, mirrored from all matchings."""
        nbrs: list[set[int]] = [set() for _ in range(self.n_colors)]
        for pairs in self.matchings.values():
            for x, y in pairs:
                nbrs[x].add(y)
                nbrs[y].add(x)
        return tuple(tuple(sorted(s)) for s in nbrs)

    @cached_property
    def partners(self) -> tuple[dict[int, int], ...]:
        """Color id -> {neighbor vertex: matched color there}.

        Well-defined only for covers satisfying the matching condition.
        """
        own = self.owner
        out: list[dict[int, int]] = [dict() for _ in range(self.n_colors)]
        for x in range(self.n_colors):
            for y in self.color_neighbors[x]:
                out[x][int(own[y])] = y
        return tuple(out)

    @cached_property
    def arrays(self) -> CoverArrays:
        nc = self.n_colors
        list_sizes = np.array([len(lst) for lst in self.lists], dtype=np.int64)
        vlist_ptr = np.zeros(len(self.lists) + 1, dtype=np.int64)
        np.cumsum(list_sizes, out=vlist_ptr[1:])
        vlist_colors = np.fromiter(
            (x for lst in self.lists for x in lst), dtype=np.int64, count=int(vlist_ptr[-1])
        )
        degs = np.array([len(a) for a in self.color_neighbors], dtype=np.int64)
        nbr_ptr = np.zeros(nc + 1, dtype=np.int64)
        np.cumsum(degs, out=nbr_ptr[1:])
        nbr_idx = np.fromiter(
            (y for a in self.color_neighbors for y in a),
            dtype=np.int64,
            count=int(nbr_ptr[-1]),
        )
        edge_keys = tuple(sorted(self.matchings))
        edge_u = np.array([u for u, _ in edge_keys], dtype=np.int64)
        edge_v = np.array([v for _, v in edge_keys], dtype=np.int64)
        pair_counts = np.array(
            [len(self.matchings[e]) for e in edge_keys], dtype=np.int64
        )
        edge_ptr = np.zeros(len(edge_keys) + 1, dtype=np.int64)
        np.cumsum(pair_counts, out=edge_ptr[1:])
        pair_x = np.fromiter(
            (x for e in edge_keys for x, _ in self.matchings[e]),
            dtype=np.int64,
            count=int(edge_ptr[-1]),
        )
        pair_y = np.fromiter(
            (y for e in edge_keys for _, y in self.matchings[e]),
            dtype=np.int64,
            count=int(edge_ptr[-1]),
        )
        return CoverArrays(
            n_colors=nc,
            owner=self.owner,
            vlist_ptr=vlist_ptr,
            vlist_colors=vlist_colors,
            nbr_ptr=nbr_ptr,
            nbr_idx=nbr_idx,
            edge_keys=edge_keys,
            edge_u=edge_u,
            edge_v=edge_v,
            edge_ptr=edge_ptr,
            pair_x=pair_x,
            pair_y=pair_y,
        )

    @property
    def k_per_vertex(self) -> tuple[int, ...]:
        return tuple(len(lst) for lst in self.lists)

    def uniform_list_size(self) -> int:
        """The common list size k, or raise if lists differ in size."""
        sizes = set(self.k_per_vertex)
        if len(sizes) != 1:
            raise DomainError(f"list sizes are not uniform: {sorted(sizes)}")
        return sizes.pop()


def _canon_pairs(pairs) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((int(x), int(y)) for x, y in pairs))


def make_cover(lists, matchings) -> Cover:
    """Canonicalize raw lists/matchings into a Cover (no validation)."""
    canon_lists = tuple(tuple(sorted(int(x) for x in lst)) for lst in lists)
    canon_match = {}
    for (u, v), pairs in matchings.items():
        u, v = int(u), int(v)
        if u > v:
            u, v = v, u
            pairs = [(y, x) for x, y in pairs]
        canon_match[(u, v)] = _canon_pairs(pairs)
    return Cover(lists=canon_lists, matchings=canon_match)


def validate_cover(g: Graph, cover: Cover) -> list[str]:
    """Check the two cover conditions plus list disjointness.

    Returns a list of human-readable violations; empty means the cover is
    valid. Violations are data, not exceptions.
    """
    problems = []
    if cover.n_vertices != g.n:
        problems.append(
            f"cover has {cover.n_vertices} lists but graph has {g.n} vertices"
        )
        return problems
    seen: dict[int, int] = {}
    for v, lst in enumerate(cover.lists):
        for x in lst:
            if x < 0:
                problems.append(f"negative color id {x} at vertex {v}")
            elif x in seen:
                problems.append(
                    f"lists not disjoint: color {x} in lists of {seen[x]} and {v}"
                )
            else:
                seen[x] = v
    for (u, v), pairs in cover.matchings.items():
        if not (0 <= u < g.n and 0 <= v < g.n and u != v):
            problems.append(f"matching key ({u},{v}) is not a vertex pair")
            continue
        if not g.has_edge(u, v):
            problems.append(
                f"matched pair on ({u},{v}) but that is not an edge of the graph"
            )
        used_u: set[int] = set()
        used_v: set[int] = set()
        lu, lv = set(cover.lists[u]), set(cover.lists[v])
        for x, y in pairs:
            if x not in lu or y not in lv:
                problems.append(
                    f"pair ({x},{y}) on edge ({u},{v}) leaves the endpoint lists"
                )
            if x in used_u or y in used_v:
                problems.append(
                    f"matching condition violated on edge ({u},{v}):"
                    f" color reused by pair ({x},{y})"
                )
            used_u.add(x)
            used_v.add(y)
    return problems


def _fresh_lists(g: Graph, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(range(v * k, (v + 1) * k)) for v in range(g.n))


def lift_from_lists(g: Graph, label_lists) -> Cover:
    """Canonical cover of a list assignment: equal labels get matched.

    Label lists may repeat labels across vertices; per vertex they are
    deduplicated and sorted, and each (vertex, label) becomes a fresh color id.
    """
    if len(label_lists) != g.n:
        raise DomainError(f"expected {g.n} label lists, got {len(label_lists)}")
    per_vertex = [sorted(set(lst)) for lst in label_lists]
    if any(len(lst) == 0 for lst in per_vertex):
        raise DomainError("every vertex needs a nonempty label list")
    offsets = [0]
    for lst in per_vertex:
        offsets.append(offsets[-1] + len(lst))
    label_to_id = [
        {lab: offsets[v] + i for i, lab in enumerate(lst)}
        for v, lst in enumerate(per_vertex)
    ]
    lists = tuple(tuple(range(offsets[v], offsets[v + 1])) for v in range(g.n))
    matchings = {}
    for u, v in g.edges:
        pairs = [
            (label_to_id[u][lab], label_to_id[v][lab])
            for lab in per_vertex[u]
            if lab in label_to_id[v]
        ]
        matchings[(u, v)] = _canon_pairs(pairs)
    return Cover(lists=lists, matchings=matchings)


def random_cover(
    g: Graph, k: int, seed: int, mode: str = "perfect", q: float = 0.5
) -> Cover:
    """Fresh k-lists everywhere; per edge a uniformly random perfect matching.

    mode "perfect" keeps the whole matching; mode "bernoulli" keeps each pair
    of the drawn matching independently with probability q, yielding partial
    matchings (the general cover definition requires only matchings).
    """
    if k < 1:
        raise DomainError(f"list size must be >= 1, got {k}")
    if mode not in ("perfect", "bernoulli"):
        raise DomainError(f"unknown cover mode {mode!r}")
    if mode == "bernoulli" and not (0.0 <= q <= 1.0):
        raise DomainError(f"bernoulli keep-probability must be in [0,1], got {q}")
    rng = derive_rng(seed, "random-cover", mode)
    lists = _fresh_lists(g, k)
    matchings = {}
    for u, v in g.edges:
        perm = rng.permutation(k)
        pairs = [(u * k + i, v * k + int(perm[i])) for i in range(k)]
        if mode == "bernoulli":
            keep = rng.random(k) < q
            pairs = [p for p, kp in zip(pairs, keep) if kp]
        matchings[(u, v)] = _canon_pairs(pairs)
    return Cover(lists=lists, matchings=matchings)


def cover_from_permutations(g: Graph, k: int, perms) -> Cover:
    """Cover with fresh k-lists whose edge matchings are given permutations.

    `perms` maps each canonical edge (u, v) to a length-k sequence sigma,
    matching color i of u with color sigma[i] of v. Missing edges get the
    identity permutation.
    """
    lists = _fresh_lists(g, k)
    matchings = {}
    for u, v in g.edges:
        sigma = perms.get((u, v), tuple(range(k)))
        if sorted(sigma) != list(range(k)):
            raise DomainError(f"not a permutation of 0..{k-1} on edge ({u},{v}): {sigma}")
        matchings[(u, v)] = _canon_pairs(
            (u * k + i, v * k + int(sigma[i])) for i in range(k)
        )
    return Cover(lists=lists, matchings=matchings)


def shifted_cycle_cover(m: int, k: int = 2) -> Cover:
    """2-lists on an even cycle, identity matchings except one swapped edge.

    The swap makes the parity around the cycle unsatisfiable, so the cover
    admits no coloring; it witnesses that list size 2 is not enough for
    even cycles in the cover setting.
    """
    from .graphs import gen_cycle

    if m % 2 != 0:
        raise DomainError(f"cycle length must be even, got {m}")
    if m < 4:
        raise DomainError(f"cycle length must be >= 4, got {m}")
    if k != 2:
        raise DomainError("the shifted construction is defined for k=2")
    g = gen_cycle(m)
    swap_edge = (0, m - 1)
    perms = {e: (0, 1) for e in g.edges}
    perms[swap_edge] = (1, 0)
    return cover_from_permutations(g, k, perms)


def cover_to_json_dict(cover: Cover) -> dict:
    return {
        "k_per_vertex": list(cover.k_per_vertex),
        "lists": [list(lst) for lst in cover.lists],
        "matchings": {
            f"{u},{v}": [[x, y] for x, y in pairs]
            for (u, v), pairs in sorted(cover.matchings.items())
        },
    }


def cover_from_json_dict(doc) -> Cover:
    if not isinstance(doc, dict) or "lists" not in doc or "matchings" not in doc:
        raise MalformedInputError('cover document needs keys "lists" and "matchings"')
    try:
        lists = [list(map(int, lst)) for lst in doc["lists"]]
        matchings = {}
        for key, pairs in doc["matchings"].items():
            u_str, v_str = key.split(",")
            matchings[(int(u_str), int(v_str))] = [(int(x), int(y)) for x, y in pairs]
    except (TypeError, ValueError, AttributeError) as exc:
        raise MalformedInputError(f"bad cover document: {exc}") from exc
    if "k_per_vertex" in doc:
        declared = [int(x) for x in doc["k_per_vertex"]]
        actual = [len(lst) for lst in lists]
        if declared != actual:
            raise MalformedInputError(
                "k_per_vertex disagrees with list lengths"
            )
    return make_cover(lists, matchings)

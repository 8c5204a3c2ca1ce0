"""Exact decision, counting, and greedy coloring over covers.

The backtracking search uses forward checking (assigning a color deletes its
matched partners from undecided neighbors) with minimum-remaining-values
vertex selection and lowest-color-id tie-breaks, so results are
deterministic for a fixed instance. A node budget separates "no coloring"
from "gave up".
"""

from __future__ import annotations

from dataclasses import dataclass

from .covers import Cover
from .errors import DomainError, MalformedInputError, SearchBudgetExceeded
from .graphs import Graph

DEFAULT_NODE_BUDGET = 10**8

Coloring = dict[int, int]


def check_coloring(
    g: Graph, cover: Cover, coloring: Coloring, vertices=None
) -> str | None:
    """First violated coloring condition, or None if the coloring is valid.

    Raises MalformedInputError when a chosen id is not a color of the cover.
    """
    verts = sorted(vertices) if vertices is not None else range(g.n)
    vert_set = set(verts)
    for v in verts:
        if v not in coloring:
            return f"vertex {v} has no color"
        x = coloring[v]
        if not (0 <= x < cover.n_colors) or cover.owner[x] < 0:
            raise MalformedInputError(f"chosen id {x} is not a color of the cover")
        if x not in cover.lists[v]:
            return f"color {x} at vertex {v} is not in that vertex's list"
    for v in verts:
        x = coloring[v]
        for u, y in cover.partners[x].items():
            if u in vert_set and u in coloring and coloring[u] == y:
                return f"matched colors chosen on edge ({min(u,v)},{max(u,v)})"
    return None


def is_valid_coloring(g: Graph, cover: Cover, coloring: Coloring, vertices=None) -> bool:
    return check_coloring(g, cover, coloring, vertices) is None


def greedy_color(
    g: Graph, cover: Cover, order
) -> tuple[Coloring | None, int | None]:
    """First-fit over the given vertex order.

    At each vertex, picks the lowest color id not matched to an already
    chosen color. Returns (coloring, None) on success or (None, v) with the
    stuck vertex. Succeeds whenever every list beats the vertex degree,
    since each colored neighbor forbids at most one color.
    """
    order = list(order)
    if sorted(order) != list(range(g.n)):
        raise DomainError("order must be a permutation of all vertices")
    chosen: Coloring = {}
    for v in order:
        forbidden = set()
        for u in g.adjacency[v]:
            if u in chosen:
                y = cover.partners[chosen[u]].get(v)
                if y is not None:
                    forbidden.add(y)
        pick = next((x for x in cover.lists[v] if x not in forbidden), None)
        if pick is None:
            return None, v
        chosen[v] = pick
    return chosen, None


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "colorable" or "not-colorable"
    coloring: Coloring | None
    count: int | None
    nodes_explored: int


def _prepared_domains(g: Graph, cover: Cover, restrict, vertices):
    verts = sorted(vertices) if vertices is not None else list(range(g.n))
    domains = {}
    for v in verts:
        dom = set(cover.lists[v])
        if restrict is not None and v in restrict and restrict[v] is not None:
            allowed = set(restrict[v])
            if not allowed <= dom:
                raise DomainError(
                    f"restriction at vertex {v} contains non-list colors"
                )
            dom = allowed
        domains[v] = dom
    return verts, domains


def _search(
    g: Graph,
    cover: Cover,
    restrict,
    vertices,
    node_budget: int,
    count_all: bool,
) -> SolveOutcome:
    verts, domains = _prepared_domains(g, cover, restrict, vertices)
    vert_set = set(verts)
    partners = cover.partners
    undecided = set(verts)
    chosen: Coloring = {}
    nodes = 0
    count = 0
    first: Coloring | None = None

    def assign(v: int, x: int):
        removed = []
        for u in g.adjacency[v]:
            if u in undecided and u != v:
                y = partners[x].get(u)
                if y is not None and y in domains[u]:
                    domains[u].discard(y)
                    removed.append((u, y))
        return removed

    def undo(removed):
        for u, y in removed:
            domains[u].add(y)

    def recurse() -> bool:
        nonlocal nodes, count, first
        if not undecided:
            count += 1
            if first is None:
                first = dict(chosen)
            return not count_all
        v = min(undecided, key=lambda u: (len(domains[u]), u))
        if not domains[v]:
            return False
        undecided.discard(v)
        try:
            for x in sorted(domains[v]):
                nodes += 1
                if nodes > node_budget:
                    raise SearchBudgetExceeded(nodes, node_budget)
                chosen[v] = x
                removed = assign(v, x)
                done = recurse()
                undo(removed)
                del chosen[v]
                if done:
                    return True
            return False
        finally:
            undecided.add(v)

    # The vertex set must not reference anything outside itself via `vertices`.
    for v in verts:
        if not (0 <= v < g.n):
            raise DomainError(f"vertex {v} out of range")
    if vert_set and min(len(domains[v]) for v in verts) == 0:
        return SolveOutcome("not-colorable", None, 0, 0)
    recurse()
    if count > 0:
        return SolveOutcome("colorable", first, count if count_all else None, nodes)
    return SolveOutcome("not-colorable", None, 0 if count_all else None, nodes)


def solve_exact(
    g: Graph,
    cover: Cover,
    restrict=None,
    vertices=None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Coloring | None:
    """One valid coloring, or None if provably none exists.

    `restrict` optionally narrows the allowed colors per vertex (must be
    subsets of the lists); `vertices` optionally solves the induced
    subproblem on that vertex set only.
    """
    out = _search(g, cover, restrict, vertices, node_budget, count_all=False)
    return out.coloring


def count_colorings(
    g: Graph,
    cover: Cover,
    restrict=None,
    vertices=None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> int:
    """Number of valid colorings, by exhaustive backtracking (no early exit)."""
    out = _search(g, cover, restrict, vertices, node_budget, count_all=True)
    return out.count


def solve_report(
    g: Graph,
    cover: Cover,
    restrict=None,
    count: bool = False,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> SolveOutcome:
    """Decision or counting run with node accounting, for report emission."""
    return _search(g, cover, restrict, None, node_budget, count_all=count)


def solve_lists(g: Graph, label_lists) -> list | None:
    """Plain list-coloring backtracker over labels.

    Independent of the cover machinery on purpose: it serves as the oracle
    for the lift construction (same label on adjacent vertices conflicts).
    Returns a per-vertex label assignment or None.
    """
    if len(label_lists) != g.n:
        raise DomainError(f"expected {g.n} label lists, got {len(label_lists)}")
    lists = [sorted(set(lst)) for lst in label_lists]
    assignment: list = [None] * g.n

    def recurse(v: int) -> bool:
        if v == g.n:
            return True
        for lab in lists[v]:
            if any(assignment[u] == lab for u in g.adjacency[v] if u < v):
                continue
            assignment[v] = lab
            if recurse(v + 1):
                return True
            assignment[v] = None
        return False

    return list(assignment) if recurse(0) else None

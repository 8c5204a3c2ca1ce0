"""The randomized nibble: weight-update steps, schedules, and the final coloring.

One step samples a small random set of colors, removes the vertices whose
sampled colors are pairwise unmatched (they keep those colors for later
extension), zeroes the weights of colors that were hit, and rescales the
survivors so every color's expected weight is exactly preserved. Iterating
drives degrees down until the niceness conditions hold, at which point a
single randomized rounding pass colors what is left and the removal history
replays the rest.

Randomized existence arguments are replaced throughout by bounded
resampling with explicit budgets and full failure reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .covers import Cover, validate_cover
from .errors import (
    DomainError,
    HypothesisViolationError,
    InternalConsistencyError,
    IstarInfeasibleError,
)
from .graphs import Graph, is_triangle_free, max_degree
from .rng import derive_int_seed, derive_rng
from .solver import check_coloring
from .weights import (
    NiceCheck,
    ReductRecord,
    ReductState,
    Weighting,
    check_nice,
    edge_mass_all,
    entropy_terms,
    moderate_values,
    vertex_mass_all,
)

# ---------------------------------------------------------------------------
# parameters

SATURATION_EXP = 1.0 / 10.0


@dataclass(frozen=True)
class NibbleParams:
    """All tunable constants of the pipeline.

    Defaults reproduce the analysis constants; `relaxed_params` widens the
    per-step tolerances and shrinks the list-size constant so the machinery
    is exercisable on desk-scale graphs. The deviation exponents apply to
    the degree bound parameter `max_deg`; `tol_scale` multiplies all four
    per-step tolerances.
    """

    ck: float = 120.0
    phat_exp: float = 11.0 / 12.0
    entropy_slack: float = 1.0 / 40.0
    hyp_vertex_dev_exp: float = 1.0 / 10.0
    dev_vertex_exp: float = 1.0 / 6.0
    dev_edge_exp: float = 1.0 / 3.0
    dev_entropy_exp: float = 1.0 / 6.0
    dev_degree_exp: float = 2.0 / 3.0
    shrink_factor: float = 2.0 / 3.0
    edge_mass_cap_factor: float = math.sqrt(2.0)
    niceness_target_factor: float = (3.0 / 5.0) ** 2 * 0.25 / math.sqrt(2.0)
    saturation_exp: float = SATURATION_EXP
    tol_scale: float = 1.0
    max_retries_per_step: int = 20
    max_final_retries: int = 200
    max_steps: int = 200
    istar_cap: int = 10**6

    def __post_init__(self):
        for name in (
            "ck",
            "entropy_slack",
            "shrink_factor",
            "edge_mass_cap_factor",
            "niceness_target_factor",
            "tol_scale",
        ):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")
        for name in (
            "phat_exp",
            "hyp_vertex_dev_exp",
            "dev_vertex_exp",
            "dev_edge_exp",
            "dev_entropy_exp",
            "dev_degree_exp",
            "saturation_exp",
        ):
            if not 0.0 < getattr(self, name) < 1.0:
                raise DomainError(f"{name} must lie strictly between 0 and 1")
        for name in ("max_retries_per_step", "max_final_retries", "max_steps"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be at least 1")

    def k_for(self, max_deg: int) -> int:
        return math.ceil(self.ck * max_deg / math.log(max_deg))

    def p_hat_for(self, max_deg: int) -> float:
        return max_deg ** (-self.phat_exp)

    def alpha_for(self, max_deg: int) -> float:
        return 1.0 / math.log(max_deg)

    def dev_vertex(self, max_deg: int) -> float:
        return self.tol_scale * max_deg ** (-self.dev_vertex_exp)

    def dev_edge(self, max_deg: int, k: int) -> float:
        return self.tol_scale * max_deg ** (-self.dev_edge_exp) / k

    def dev_entropy(self, max_deg: int) -> float:
        return self.tol_scale * math.log(max_deg) * max_deg ** (-self.dev_entropy_exp)

    def dev_degree(self, max_deg: int) -> float:
        return self.tol_scale * max_deg ** self.dev_degree_exp

    def shrink(self, max_deg: int) -> float:
        return self.shrink_factor / math.log(max_deg)

    def edge_mass_cap(self, k: int) -> float:
        return self.edge_mass_cap_factor / k

    def niceness_target(self, k: int) -> float:
        return self.niceness_target_factor * k


def paper_params(**overrides) -> NibbleParams:
    return NibbleParams(**overrides)


def relaxed_params(**overrides) -> NibbleParams:
    """Desk-scale preset: smaller lists, wider tolerances, bigger budgets."""
    defaults = dict(
        ck=6.2,
        shrink_factor=1.0 / 3.0,
        tol_scale=4.0,
        max_retries_per_step=25,
        max_final_retries=300,
        max_steps=80,
    )
    defaults.update(overrides)
    return NibbleParams(**defaults)


# ---------------------------------------------------------------------------
# one randomized step


@dataclass(frozen=True, eq=False)
class StepStats:
    """Post-step quantities evaluated over the whole pre-step graph.

    Updated weights are defined for every color, so masses, entropy, and
    surviving-neighbor counts are reported for removed vertices too; target
    checks then restrict to survivors.
    """

    pre_alive: np.ndarray
    post_alive: np.ndarray
    p_v: np.ndarray
    q_v: np.ndarray
    d_v: np.ndarray
    p_uv: np.ndarray
    pre_edge: np.ndarray
    p_prime: np.ndarray
    sampled: np.ndarray
    removed: tuple[int, ...]
    s_size: int
    w_size: int
    saturated_count: int
    alpha: float
    seed: int


def _resolve_alpha(state: ReductState, alpha: float | None) -> float:
    if alpha is None:
        if state.max_deg is None:
            raise DomainError("state has no degree bound; pass alpha explicitly")
        if state.max_deg < 2:
            raise DomainError("degree bound must be at least 2")
        alpha = 1.0 / math.log(state.max_deg)
    if alpha <= 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if alpha * state.weighting.p_hat > 1.0:
        raise DomainError(
            "alpha * p_hat exceeds 1; sampling probabilities would be invalid"
        )
    return alpha


def reduct_step(
    state: ReductState, seed: int, alpha: float | None = None
) -> tuple[ReductState, StepStats]:
    """Run one randomized weight-update step; pure in (state, seed, alpha).

    Colors at the cap are frozen. Every other color joins the sampled set S
    independently with probability alpha * p(x). A color with no sampled
    matched neighbor is rescaled by its survival product (clamped to the
    cap); a hit color drops to zero, except that a color whose rescaled
    value would overshoot the cap is instead promoted to the cap with
    exactly the probability that preserves its expectation. Vertices whose
    sampled colors are all unhit leave the graph, carrying those colors.
    """
    alpha = _resolve_alpha(state, alpha)
    cover = state.cover
    arrs = cover.arrays
    w = state.weighting
    rng = derive_rng(seed, "reduct-step")
    u_sample = rng.random(arrs.n_colors)
    u_promote = rng.random(arrs.n_colors)
    p_prime, in_s, s_count, _k_factor = kernels.reduct_core(
        w.p, w.p_hat, alpha, arrs.nbr_ptr, arrs.nbr_idx, u_sample, u_promote
    )
    hit = s_count > 0
    sampled_per_vertex = kernels.mask_counts(arrs.vlist_ptr, arrs.vlist_colors, in_s)
    hit_sampled_per_vertex = kernels.mask_counts(
        arrs.vlist_ptr, arrs.vlist_colors, in_s & hit
    )
    removed_mask = state.alive & (sampled_per_vertex > 0) & (hit_sampled_per_vertex == 0)
    removed = tuple(int(v) for v in np.flatnonzero(removed_mask))
    forced = {
        v: tuple(int(x) for x in cover.lists[v] if in_s[x]) for v in removed
    }
    record = ReductRecord(removed=removed, forced=forced)

    post_alive = state.alive & ~removed_mask
    new_p = p_prime.copy()
    new_p[removed_mask[arrs.owner]] = 0.0
    new_state = state.with_step(Weighting(new_p, w.p_hat), post_alive, record)

    if state.max_deg is not None:
        saturation = float(state.max_deg) ** SATURATION_EXP
        saturated = int(np.sum(s_count > saturation))
    else:
        saturated = 0
    stats = StepStats(
        pre_alive=state.alive.copy(),
        post_alive=post_alive,
        p_v=vertex_mass_all(cover, p_prime),
        q_v=vertex_mass_all(cover, entropy_terms(p_prime)),
        d_v=kernels.mask_counts(*state.graph.csr, post_alive),
        p_uv=edge_mass_all(cover, p_prime),
        pre_edge=state.live_edge_mask(),
        p_prime=p_prime,
        sampled=in_s,
        removed=removed,
        s_size=int(in_s.sum()),
        w_size=int((in_s & ~hit).sum()),
        saturated_count=saturated,
        alpha=alpha,
        seed=seed,
    )
    return new_state, stats


def expected_pprime(state: ReductState, x: int, alpha: float | None = None) -> float:
    """Closed-form expectation of the updated weight of color x.

    Evaluates the case split literally (survival product times the clamped
    rescale, plus the promotion branch); algebra makes it collapse to p(x),
    which the tests verify numerically to 1e-12 relative error.
    """
    alpha = _resolve_alpha(state, alpha)
    w = state.weighting
    p, p_hat = w.p, w.p_hat
    if not (0 <= x < state.cover.n_colors):
        raise DomainError(f"color id {x} out of range")
    if p[x] == p_hat:
        return p_hat
    capped = w.capped
    k_x = 1.0
    for y in state.cover.color_neighbors[x]:
        if not capped[y]:
            k_x *= 1.0 - alpha * p[y]
    ratio = p[x] / k_x
    if ratio <= p_hat:
        return k_x * min(ratio, p_hat)
    if not k_x < 1.0:
        raise InternalConsistencyError("promotion branch reached with K(x) >= 1")
    q = (p[x] / p_hat - k_x) / (1.0 - k_x)
    return k_x * p_hat + (1.0 - k_x) * q * p_hat


# ---------------------------------------------------------------------------
# per-step target checks


@dataclass(frozen=True)
class TargetCheck:
    ok: bool
    violations: tuple[tuple[str, int, float, float], ...]


def check_reduct_targets(
    old_state: ReductState, stats: StepStats, params: NibbleParams
) -> TargetCheck:
    """Verify the four per-step conclusions on survivors.

    Vertex mass stays within dev_vertex of its old value; edge mass grows by
    at most dev_edge; entropy loses at most 2 deg/(k ln D) plus dev_entropy;
    the surviving degree is at most the shrunken old degree plus dev_degree.
    Degrees mean degrees in the graph at the start of the step.
    """
    if old_state.max_deg is None or old_state.k is None:
        raise DomainError("target checks need the state's max_deg and k")
    dmax, k = old_state.max_deg, old_state.k
    ln_d = math.log(dmax)
    cover = old_state.cover
    w = old_state.weighting

    old_p_v = vertex_mass_all(cover, w.p)
    old_q_v = vertex_mass_all(cover, entropy_terms(w.p))
    old_p_uv = edge_mass_all(cover, w.p)
    old_deg = old_state.current_degrees()

    tol_v = params.dev_vertex(dmax)
    tol_e = params.dev_edge(dmax, k)
    tol_q = params.dev_entropy(dmax)
    tol_d = params.dev_degree(dmax)
    shrink = params.shrink(dmax)

    violations = []
    for v in np.flatnonzero(stats.post_alive):
        v = int(v)
        dv = abs(stats.p_v[v] - old_p_v[v])
        if dv > tol_v:
            violations.append(("vertex-mass", v, float(dv), float(tol_v)))
        q_floor = old_q_v[v] - 2.0 * old_deg[v] / (k * ln_d) - tol_q
        if stats.q_v[v] < q_floor:
            violations.append(("entropy", v, float(stats.q_v[v]), float(q_floor)))
        d_ceil = old_deg[v] * (1.0 - shrink) + tol_d
        if stats.d_v[v] > d_ceil:
            violations.append(("degree", v, float(stats.d_v[v]), float(d_ceil)))
    arrs = cover.arrays
    post_edge = stats.post_alive[arrs.edge_u] & stats.post_alive[arrs.edge_v]
    for e in np.flatnonzero(post_edge):
        e = int(e)
        ceil_e = old_p_uv[e] + tol_e
        if stats.p_uv[e] > ceil_e:
            violations.append(("edge-mass", e, float(stats.p_uv[e]), float(ceil_e)))
    return TargetCheck(ok=not violations, violations=tuple(violations))


def check_reduct_hypotheses(state: ReductState, params: NibbleParams) -> dict:
    """Diagnostic: do the step analysis' entry conditions currently hold?

    Reported, never enforced; desk-scale runs routinely violate them while
    the step itself keeps working.
    """
    if state.max_deg is None or state.k is None:
        raise DomainError("hypothesis checks need the state's max_deg and k")
    dmax, k = state.max_deg, state.k
    cover, w = state.cover, state.weighting
    live = state.alive
    live_idx = np.flatnonzero(live)
    p_v = vertex_mass_all(cover, w.p)
    q_v = vertex_mass_all(cover, entropy_terms(w.p))
    p_uv = edge_mass_all(cover, w.p)
    live_edges = state.live_edge_mask()
    supp = w.p[state.live_color_mask()]
    report = {
        "vertex_mass_ok": bool(
            live_idx.size == 0
            or np.max(np.abs(p_v[live_idx] - 1.0)) <= dmax ** (-params.hyp_vertex_dev_exp)
        ),
        "edge_mass_ok": bool(
            not live_edges.any()
            or float(p_uv[live_edges].max()) <= params.edge_mass_cap(k)
        ),
        "entropy_ok": bool(
            live_idx.size == 0
            or float(q_v[live_idx].min())
            >= math.log(k) - params.entropy_slack * math.log(dmax)
        ),
        "support_ok": bool(np.all((supp == 0.0) | (supp >= 1.0 / k - 1e-15))),
    }
    return report


# ---------------------------------------------------------------------------
# iteration schedule


def compute_istar(max_deg: int, params: NibbleParams) -> int:
    """Least i with max_deg (1-shrink)^i + i dev_degree <= the niceness target.

    The left side is convex in i, so the scan stops as soon as it starts
    growing while still above the target; small degree bounds where the
    additive term outgrows the target raise IstarInfeasibleError.
    """
    if max_deg < 3:
        raise DomainError(f"degree bound must be at least 3, got {max_deg}")
    k = params.k_for(max_deg)
    target = params.niceness_target(k)
    shrink = params.shrink(max_deg)
    dev = params.dev_degree(max_deg)
    prev = math.inf
    for i in range(params.istar_cap + 1):
        lhs = max_deg * (1.0 - shrink) ** i + i * dev
        if lhs <= target:
            return i
        if lhs > prev:
            raise IstarInfeasibleError(
                f"no iteration count works for max_deg={max_deg}: the left side"
                f" bottoms out at {prev:.6g} > target {target:.6g}"
            )
        prev = lhs
    raise IstarInfeasibleError(
        f"no iteration count up to {params.istar_cap} works for max_deg={max_deg}"
    )


# ---------------------------------------------------------------------------
# final coloring and extension


def final_color(
    state: ReductState, delta: float, seed: int, max_retries: int
) -> tuple[dict[int, int] | None, int]:
    """Randomized rounding over moderate colors, resampled up to max_retries.

    Each round includes every live moderate color independently with
    probability 2 p(x)/delta, then discards both endpoints of every matched
    pair that was jointly included. If every surviving vertex retains a
    color, the lowest id per vertex is returned. Returns (coloring, rounds)
    or (None, max_retries) when the budget runs out.
    """
    if delta <= 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    w = state.weighting
    arrs = state.cover.arrays
    eligible = w.moderate & state.live_color_mask()
    probs = np.where(eligible, 2.0 * w.p / delta, 0.0)
    if probs.size and probs.max() > 1.0:
        raise DomainError(
            "inclusion probability exceeds 1; delta is not a valid niceness slack"
        )
    alive_verts = state.alive_vertices()
    lists = state.cover.lists
    for attempt in range(1, max_retries + 1):
        rng = derive_rng(seed, "final-color", attempt)
        included = rng.random(arrs.n_colors) < probs
        blocked = kernels.mask_counts(arrs.nbr_ptr, arrs.nbr_idx, included) > 0
        survivor = included & ~blocked
        chosen: dict[int, int] = {}
        for v in alive_verts:
            pick = -1
            for x in lists[v]:
                if survivor[x]:
                    pick = x
                    break
            if pick < 0:
                chosen = {}
                break
            chosen[int(v)] = int(pick)
        if chosen or alive_verts.size == 0:
            return chosen, attempt
    return None, max_retries


def extend_coloring(
    inner: dict[int, int], history: tuple[ReductRecord, ...]
) -> dict[int, int]:
    """Replay removal records newest-first, adding one forced color per vertex.

    Forced sets may hold several colors; the lowest id is used, which keeps
    exactly one color per vertex.
    """
    out = dict(inner)
    for record in reversed(history):
        for v in record.removed:
            if v in out:
                raise InternalConsistencyError(
                    f"vertex {v} colored both inside and by a removal record"
                )
            if not record.forced[v]:
                raise InternalConsistencyError(f"empty forced set for vertex {v}")
            out[v] = min(record.forced[v])
    return out


def degree_expectation_bound(
    state: ReductState,
    p1: float,
    p2: float,
    edge_cap: float,
    alpha: float | None = None,
) -> dict[int, float]:
    """Per-vertex upper bound deg(v) (1 - alpha p1 + alpha^2 (p2^2 + cap D)).

    Recomputes the hypotheses (moderate masses within [p1, p2], edge masses
    at most edge_cap over the surviving graph) and refuses to emit bounds
    that would not be justified.
    """
    alpha = _resolve_alpha(state, alpha)
    if state.max_deg is None:
        raise DomainError("degree bound needs the state's max_deg")
    tol = 1e-12
    pm_v = vertex_mass_all(state.cover, moderate_values(state.weighting))
    live_idx = state.alive_vertices()
    if live_idx.size:
        lo, hi = float(pm_v[live_idx].min()), float(pm_v[live_idx].max())
        if lo < p1 - tol or hi > p2 + tol:
            raise HypothesisViolationError(
                f"moderate masses span [{lo}, {hi}], outside [{p1}, {p2}]"
            )
    p_uv = edge_mass_all(state.cover, state.weighting.p)
    live_edges = state.live_edge_mask()
    if live_edges.any() and float(p_uv[live_edges].max()) > edge_cap + tol:
        raise HypothesisViolationError(
            f"an edge mass exceeds the stated cap {edge_cap}"
        )
    factor = 1.0 - alpha * p1 + alpha**2 * (p2**2 + edge_cap * state.max_deg)
    degs = state.current_degrees()
    return {int(v): float(degs[v] * factor) for v in live_idx}


# ---------------------------------------------------------------------------
# the driver


@dataclass(frozen=True)
class TrajectoryRow:
    step: int
    min_pv: float
    max_pv: float
    min_q: float
    max_deg: int
    removed: int
    retries: int

    def to_json_dict(self) -> dict:
        return {
            "step": self.step,
            "min_pv": self.min_pv,
            "max_pv": self.max_pv,
            "min_Q": self.min_q,
            "max_deg": self.max_deg,
            "removed": self.removed,
            "retries": self.retries,
        }


CSV_HEADER = "step,min_pv,max_pv,min_Q,max_deg,removed,retries"


@dataclass(frozen=True, eq=False)
class NibbleResult:
    """Outcome of a full run: a coloring or a distinctly labelled failure.

    status is one of "success", "step-retries-exhausted", "not-nice",
    "final-color-exhausted". The trajectory always covers every committed
    step, so failures are diagnosable.
    """

    status: str
    coloring: dict[int, int] | None
    mode: str
    istar: int | None
    steps: int
    trajectory: tuple[TrajectoryRow, ...]
    nice_delta: float | None
    final_attempts: int
    k: int
    max_deg: int
    seed: int
    detail: str | None

    @property
    def ok(self) -> bool:
        return self.status == "success"

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "coloring": None
            if self.coloring is None
            else {str(v): x for v, x in sorted(self.coloring.items())},
            "mode": self.mode,
            "istar": self.istar,
            "steps": self.steps,
            "trajectory": [row.to_json_dict() for row in self.trajectory],
            "nice_delta": self.nice_delta,
            "final_attempts": self.final_attempts,
            "k": self.k,
            "max_deg": self.max_deg,
            "seed": self.seed,
            "detail": self.detail,
        }


def _trajectory_row(step: int, stats: StepStats, retries: int) -> TrajectoryRow:
    live = np.flatnonzero(stats.post_alive)
    if live.size:
        min_pv = float(stats.p_v[live].min())
        max_pv = float(stats.p_v[live].max())
        min_q = float(stats.q_v[live].min())
        max_deg = int(stats.d_v[live].max())
    else:
        min_pv = max_pv = min_q = 0.0
        max_deg = 0
    return TrajectoryRow(
        step=step,
        min_pv=min_pv,
        max_pv=max_pv,
        min_q=min_q,
        max_deg=max_deg,
        removed=len(stats.removed),
        retries=retries,
    )


def run_nibble(
    g: Graph, cover: Cover, params: NibbleParams, seed: int
) -> NibbleResult:
    """Color a triangle-free graph from a uniform-list cover, or report why not.

    Starts every color at weight 1/k under cap max_deg^{-phat_exp}. When the
    closed-form iteration count exists, exactly that many steps run before
    the terminal niceness check. At desk scale the count is usually
    infeasible, so the driver falls back to an adaptive loop: probe niceness
    before each step, attempt the final rounding whenever it holds, and keep
    stepping otherwise (vertices keep draining into the removal records,
    whose replay alone can finish the coloring). Steps whose target checks
    fail are resampled with fresh derived seeds up to max_retries_per_step.
    """
    problems = validate_cover(g, cover)
    if problems:
        raise DomainError(f"invalid cover: {problems[0]}")
    if not is_triangle_free(g):
        raise DomainError("the graph has a triangle; this pipeline requires none")
    k = cover.uniform_list_size()
    if k < 1:
        raise DomainError("lists must be nonempty")

    if g.m == 0:
        coloring = {v: cover.lists[v][0] for v in range(g.n)}
        return NibbleResult(
            status="success",
            coloring=coloring,
            mode="edgeless",
            istar=None,
            steps=0,
            trajectory=(),
            nice_delta=None,
            final_attempts=0,
            k=k,
            max_deg=0,
            seed=seed,
            detail=None,
        )

    dmax = max_degree(g)
    if dmax < 2:
        raise DomainError(
            "degree bound below 2; use the exact or greedy solver for matchings"
        )
    p_hat = params.p_hat_for(dmax)
    if 1.0 / k >= p_hat:
        raise DomainError(
            f"list size {k} is too small: initial weight 1/k={1.0/k:.6g} reaches"
            f" the cap {p_hat:.6g}"
        )
    state = ReductState.initial(
        g, cover, Weighting.uniform(cover, 1.0 / k, p_hat), max_deg=dmax, k=k
    )

    istar: int | None
    if dmax >= 3:
        try:
            istar = compute_istar(dmax, params)
            mode = "schedule"
        except IstarInfeasibleError:
            istar = None
            mode = "adaptive"
    else:
        istar = None
        mode = "adaptive"

    trajectory: list[TrajectoryRow] = []
    total_final_attempts = 0

    def committed_step(state: ReductState, index: int):
        last = None
        for attempt in range(params.max_retries_per_step):
            cand, stats = reduct_step(
                state, derive_int_seed(seed, "step", index, attempt)
            )
            chk = check_reduct_targets(state, stats, params)
            if chk.ok:
                trajectory.append(_trajectory_row(index, stats, attempt + 1))
                return cand
            last = chk
        detail = f"step {index} violated targets {params.max_retries_per_step} times"
        if last is not None and last.violations:
            kind, where, value, bound = last.violations[0]
            detail += f"; last: {kind} at {where} ({value:.6g} vs {bound:.6g})"
        return detail

    def finish(state: ReductState, nice: NiceCheck, steps: int) -> NibbleResult:
        nonlocal total_final_attempts
        inner, attempts = final_color(
            state,
            nice.delta,
            derive_int_seed(seed, "final", steps),
            params.max_final_retries,
        )
        total_final_attempts += attempts
        if inner is None:
            return NibbleResult(
                status="final-color-exhausted",
                coloring=None,
                mode=mode,
                istar=istar,
                steps=steps,
                trajectory=tuple(trajectory),
                nice_delta=nice.delta,
                final_attempts=total_final_attempts,
                k=k,
                max_deg=dmax,
                seed=seed,
                detail=f"rounding failed {params.max_final_retries} times",
            )
        coloring = extend_coloring(inner, state.history)
        violation = check_coloring(g, cover, coloring)
        if violation is not None:
            raise InternalConsistencyError(
                f"extended coloring is invalid ({violation}); this is a bug"
            )
        return NibbleResult(
            status="success",
            coloring=coloring,
            mode=mode,
            istar=istar,
            steps=steps,
            trajectory=tuple(trajectory),
            nice_delta=nice.delta,
            final_attempts=total_final_attempts,
            k=k,
            max_deg=dmax,
            seed=seed,
            detail=None,
        )

    def drained(state: ReductState, steps: int) -> NibbleResult:
        coloring = extend_coloring({}, state.history)
        violation = check_coloring(g, cover, coloring)
        if violation is not None:
            raise InternalConsistencyError(
                f"extended coloring is invalid ({violation}); this is a bug"
            )
        return NibbleResult(
            status="success",
            coloring=coloring,
            mode=mode,
            istar=istar,
            steps=steps,
            trajectory=tuple(trajectory),
            nice_delta=None,
            final_attempts=total_final_attempts,
            k=k,
            max_deg=dmax,
            seed=seed,
            detail="all vertices drained into removal records",
        )

    def failure(status: str, steps: int, nice_delta, detail: str) -> NibbleResult:
        return NibbleResult(
            status=status,
            coloring=None,
            mode=mode,
            istar=istar,
            steps=steps,
            trajectory=tuple(trajectory),
            nice_delta=nice_delta,
            final_attempts=total_final_attempts,
            k=k,
            max_deg=dmax,
            seed=seed,
            detail=detail,
        )

    if mode == "schedule":
        for i in range(istar):
            outcome = committed_step(state, i)
            if isinstance(outcome, str):
                return failure("step-retries-exhausted", i, None, outcome)
            state = outcome
        if state.n_alive == 0:
            return drained(state, istar)
        nice = check_nice(state)
        if not nice.ok:
            return failure(
                "not-nice", istar, None, f"after the scheduled steps: {nice.reason}"
            )
        return finish(state, nice, istar)

    def stuck_vertex(state: ReductState) -> int | None:
        # A surviving vertex with no moderate color can never be sampled,
        # removed, or rounded; once weights sit at 0 or the cap they stay
        # there, so such a vertex is permanently stuck.
        mod_mass = vertex_mass_all(cover, moderate_values(state.weighting))
        for v in state.alive_vertices():
            if mod_mass[v] == 0.0:
                return int(v)
        return None

    steps_done = 0
    for i in range(params.max_steps):
        if state.n_alive == 0:
            return drained(state, steps_done)
        stuck = stuck_vertex(state)
        if stuck is not None:
            return failure(
                "not-nice",
                steps_done,
                None,
                f"vertex {stuck} has no moderate color left and can never get one",
            )
        nice = check_nice(state)
        if nice.ok:
            result = finish(state, nice, steps_done)
            if result.status == "success":
                return result
            # rounding budget spent this round; keep stepping, more vertices
            # will drain into the history
        outcome = committed_step(state, i)
        if isinstance(outcome, str):
            return failure("step-retries-exhausted", steps_done, None, outcome)
        state = outcome
        steps_done += 1
    if state.n_alive == 0:
        return drained(state, steps_done)
    nice = check_nice(state)
    if not nice.ok:
        hyp = check_reduct_hypotheses(state, params)
        return failure(
            "not-nice",
            steps_done,
            None,
            f"after {steps_done} steps: {nice.reason}; entry conditions: {hyp}",
        )
    return finish(state, nice, steps_done)

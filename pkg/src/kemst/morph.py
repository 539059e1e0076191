"""Edge slides, edge rotations, and swap morph planning.

When the maintained EMST must exchange an edge e for an edge e', the
planners express that exchange as a sequence of single slides or single
rotations, chosen to keep the longest intermediate tree short:

* slides: at most 3/2 times the old tree length (when |e'| <= |e|),
* rotations: at most 4/3 times the old tree length (when e is longest on
  the cycle).

Also houses swap detection along a scenario, the topological regime
runner, and the diamond construction's connector machinery (edge
classification and the reachability certificate).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .scenarios import KineticScenario
from .spanning import (
    PointConfig,
    SpanningTree,
    emst,
    fundamental_cycle,
    tree_from_prufer,
    tree_length,
)

_EDGE_TOL = 1e-6
_SWAP_TIME_TOL = 1e-9


def _norm(e):
    u, v = e
    return (u, v) if u < v else (v, u)


def apply_slide(tree: SpanningTree, e, w: int) -> SpanningTree:
    """Slide edge e=(u,v): the endpoint at v moves along tree edge (v,w).

    Result is tree - (u,v) + (u,w); raises if (v,w) is not a tree edge,
    w == u, or the replacement breaks the tree.
    """
    u, v = e
    if w == u:
        raise ParameterError("slide target equals the fixed endpoint")
    if not tree.has_edge((u, v)):
        raise ParameterError("edge to slide is not in the tree")
    if not tree.has_edge((v, w)):
        raise ParameterError("slide carrier (v,w) is not a tree edge")
    return tree.replace((u, v), (u, w))


def apply_rotation(tree: SpanningTree, e, w: int) -> SpanningTree:
    """Rotate edge e=(u,v): the endpoint at v moves to any vertex w != u.

    Result is tree - (u,v) + (u,w); raises on disconnection or cycle.
    """
    u, v = e
    if w == u:
        raise ParameterError("rotation target equals the fixed endpoint")
    if not tree.has_edge((u, v)):
        raise ParameterError("edge to rotate is not in the tree")
    if w == v:
        return tree
    return tree.replace((u, v), (u, w))


@dataclass(frozen=True)
class SwapEvent:
    """An EMST update: remove `removed`, insert `inserted`, at `time`."""

    time: float
    old_tree: SpanningTree
    removed: tuple[int, int]
    inserted: tuple[int, int]
    cycle: tuple[int, ...]


def make_swap_event(
    old_tree: SpanningTree,
    removed,
    inserted,
    time: float,
    cfg: PointConfig,
    weight_tol: float = _EDGE_TOL,
) -> SwapEvent:
    removed = _norm(removed)
    inserted = _norm(inserted)
    if not old_tree.has_edge(removed):
        raise ParameterError("removed edge not in the old tree")
    if old_tree.has_edge(inserted):
        raise ParameterError("inserted edge already in the old tree")
    cycle = tuple(fundamental_cycle(old_tree, inserted))
    cyc_edges = {_norm(p) for p in zip(cycle, cycle[1:])}
    if removed not in cyc_edges:
        raise ParameterError("removed edge does not lie on the fundamental cycle")
    if cfg.distance(*inserted) > cfg.distance(*removed) + weight_tol:
        raise ParameterError("swap is not weight-improving at the event time")
    return SwapEvent(time, old_tree, removed, inserted, cycle)


@dataclass(frozen=True)
class MorphStep:
    op: str  # "slide" | "rotate"
    edge: tuple[int, int]  # (fixed endpoint, moving endpoint) before the step
    target: int

    def line(self) -> str:
        return f"{self.op} {self.edge[0]} {self.edge[1]} -> {self.target}"


@dataclass
class MorphPlan:
    steps: list[MorphStep]
    trees: list[SpanningTree]  # len(steps)+1; first=old, last=old-e+e'
    lengths: list[float]  # tree lengths at the event configuration
    max_intermediate: float
    fallback: bool = False

    def serialize(self) -> str:
        lines = [s.line() for s in self.steps]
        lines.append(f"max_intermediate {self.max_intermediate:.12g}")
        return "\n".join(lines)


def _materialize(ev: SwapEvent, cfg: PointConfig, steps: list[MorphStep]) -> MorphPlan:
    """Apply a step list, validating every intermediate tree."""
    trees = [ev.old_tree]
    for step in steps:
        fn = apply_slide if step.op == "slide" else apply_rotation
        trees.append(fn(trees[-1], step.edge, step.target))
    want = (ev.old_tree.edges - {ev.removed}) | {ev.inserted}
    if trees[-1].edges != want:
        raise ParameterError("morph plan does not realize the swap")
    lengths = [tree_length(cfg, t) for t in trees]
    return MorphPlan(
        steps=list(steps),
        trees=trees,
        lengths=lengths,
        max_intermediate=max(lengths),
    )


def _cycle_dist(cfg: PointConfig, cycle) -> np.ndarray:
    pos = cfg.positions[list(cycle)]
    return np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=2)


def _locate_removed(cycle, removed):
    for i in range(len(cycle) - 1):
        if _norm((cycle[i], cycle[i + 1])) == removed:
            return i
    raise ParameterError("removed edge not on cycle")


def _slide_grid_plan(dmat, i, L):
    """Minimax interleaving of the two slide directions along the cycle.

    States are slider edges (a, b) with a <= i < b; moves decrement a or
    increment b; value-to-go is the largest chord visited. Returns the
    optimal chord sequence from (i, i+1) to (0, L).
    """
    INF = math.inf
    f = np.full((i + 1, L + 1), INF)
    f[0, L] = dmat[0, L]
    for a in range(0, i + 1):
        for b in range(L, i, -1):
            if a == 0 and b == L:
                continue
            best = INF
            if a > 0:
                best = min(best, f[a - 1, b])
            if b < L:
                best = min(best, f[a, b + 1])
            f[a, b] = max(dmat[a, b], best)
    # reconstruct
    a, b = i, i + 1
    pairs = []
    while (a, b) != (0, L):
        go_a = f[a - 1, b] if a > 0 else INF
        go_b = f[a, b + 1] if b < L else INF
        if go_a <= go_b:
            a -= 1
        else:
            b += 1
        pairs.append((a, b))
    return f[i, i + 1], pairs


def _pairs_to_slide_steps(cycle, i, pairs):
    steps = []
    a, b = i, i + 1
    for na, nb in pairs:
        if na == a - 1:
            steps.append(MorphStep("slide", (cycle[b], cycle[a]), cycle[na]))
        else:
            steps.append(MorphStep("slide", (cycle[a], cycle[b]), cycle[nb]))
        a, b = na, nb
    return steps


def _chord_step_lists(cycle, i, L):
    """Single-chord shortcut plans: pre-stretch one cycle edge into a chord,
    let the slider jump it, then restore the stretched edge."""
    plans = []
    # skip [g..h] on the low side (slider endpoint a walks i -> 0)
    for g in range(0, i - 1):
        for h in range(g + 2, i + 1):
            steps = []
            for j in range(g + 1, h):
                steps.append(("slide", (g, j), j + 1))
            a = i
            while a > h:
                steps.append(("slide", (i + 1, a), a - 1))
                a -= 1
            steps.append(("slide", (i + 1, h), g))  # jump the chord
            for j in range(h, g + 1, -1):
                steps.append(("slide", (g, j), j - 1))
            a = g
            while a > 0:
                steps.append(("slide", (i + 1, a), a - 1))
                a -= 1
            b = i + 1
            while b < L:
                steps.append(("slide", (0, b), b + 1))
                b += 1
            plans.append(steps)
    # skip [g..h] on the high side (slider endpoint b walks i+1 -> L)
    for g in range(i + 1, L - 1):
        for h in range(g + 2, L + 1):
            steps = []
            for j in range(h - 1, g, -1):
                steps.append(("slide", (h, j), j - 1))
            b = i + 1
            while b < g:
                steps.append(("slide", (i, b), b + 1))
                b += 1
            steps.append(("slide", (i, g), h))  # jump the chord
            for j in range(g, h - 1):
                steps.append(("slide", (h, j), j + 1))
            b = h
            while b < L:
                steps.append(("slide", (i, b), b + 1))
                b += 1
            a = i
            while a > 0:
                steps.append(("slide", (L, a), a - 1))
                a -= 1
            plans.append(steps)
    return plans


def _eval_index_steps(base, dmat, steps):
    """Max tree length over an index-space step list.

    Each step replaces (fixed, moving) with (fixed, target) in cycle-index
    space; lengths update incrementally.
    """
    worst = base
    delta = 0.0
    for _op, (fixed, moving), target in steps:
        delta += dmat[fixed, target] - dmat[fixed, moving]
        worst = max(worst, base + delta)
    return worst, base + delta


def plan_slide_morph(ev: SwapEvent, cfg: PointConfig) -> MorphPlan:
    """Slide-based morph from the old tree to old - e + e'.

    Evaluates every monotone interleaving of the two cycle directions
    (exact minimax over slider chords) and single-chord shortcut plans
    that stretch another cycle edge for the slider to jump; returns the
    plan with the smallest maximum intermediate tree length.

    Guarantee: max intermediate <= 1.5 * old tree length when
    |e'| <= |e|.
    """
    cycle = ev.cycle
    L = len(cycle) - 1
    i = _locate_removed(cycle, ev.removed)
    dmat = _cycle_dist(cfg, cycle)
    base = tree_length(cfg, ev.old_tree)
    removed_len = dmat[i, i + 1]

    best_value, pairs = _slide_grid_plan(dmat, i, L)
    best_steps = _pairs_to_slide_steps(cycle, i, pairs)
    best_worst = max(base, base - removed_len + best_value)

    for idx_steps in _chord_step_lists(cycle, i, L):
        worst, _final = _eval_index_steps(base, dmat, idx_steps)
        if worst < best_worst - 1e-12:
            best_worst = worst
            best_steps = [
                MorphStep(op, (cycle[f], cycle[m]), cycle[t])
                for op, (f, m), t in idx_steps
            ]
    plan = _materialize(ev, cfg, best_steps)
    limit = 1.5 * base
    if cfg.distance(*ev.inserted) <= cfg.distance(*ev.removed) + _EDGE_TOL:
        if plan.max_intermediate > limit + 1e-9:
            raise ParameterError(
                f"slide morph exceeded 3/2 bound: {plan.max_intermediate} > {limit}"
            )
    return plan


def _midpoint_edge(dmat, idxs):
    """Edge of the path `idxs` containing the path's length midpoint."""
    total = sum(dmat[a, b] for a, b in zip(idxs, idxs[1:]))
    acc = 0.0
    for a, b in zip(idxs, idxs[1:]):
        acc += dmat[a, b]
        if acc >= total / 2.0 - 1e-15:
            return a, b
    return idxs[-2], idxs[-1]


def plan_rotation_morph(ev: SwapEvent, cfg: PointConfig) -> MorphPlan:
    """Rotation-based morph from the old tree to old - e + e'.

    Requires e to be the longest edge on the cycle. Candidate plans follow
    the two-step detours through an endpoint of e' and the four three-step
    detours through the midpoint edges of the two cycle parts; the plan
    with the smallest maximum intermediate is returned.

    Guarantee: max intermediate <= (4/3) * old tree length.
    """
    cycle = ev.cycle
    L = len(cycle) - 1
    i = _locate_removed(cycle, ev.removed)
    dmat = _cycle_dist(cfg, cycle)
    rem_len = dmat[i, i + 1]
    for a in range(L):
        if dmat[a, a + 1] > rem_len + _EDGE_TOL:
            raise ParameterError("removed edge must be the longest on the cycle")
    ins_len = dmat[0, L]
    if ins_len > rem_len + _EDGE_TOL:
        raise ParameterError("inserted edge exceeds the removed edge")

    u, v, u_p, v_p = i, i + 1, 0, L  # cycle-index aliases
    candidates: list[list[tuple]] = []
    # two-step detours via an endpoint of e'
    candidates.append([("rotate", (u, v), v_p), ("rotate", (v_p, u), u_p)])
    candidates.append([("rotate", (v, u), u_p), ("rotate", (u_p, v), v_p)])
    # three-step detours via the midpoint edges of both parts
    if i >= 1 and L - i >= 2:
        left = list(range(0, i + 1))  # u' .. u
        right = list(range(i + 1, L + 1))  # v .. v'
        lg, lh = _midpoint_edge(dmat, left)
        u_l, v_l = max(lg, lh), min(lg, lh)  # u_L nearest e
        rg, rh = _midpoint_edge(dmat, right)
        u_r, v_r = min(rg, rh), max(rg, rh)  # u_R nearest e
        candidates.append(
            [("rotate", (u, v), v_r), ("rotate", (v_r, u), u_p), ("rotate", (u_p, v_r), v_p)]
        )
        candidates.append(
            [("rotate", (v, u), v_l), ("rotate", (v_l, v), v_p), ("rotate", (v_p, v_l), u_p)]
        )
        candidates.append(
            [("rotate", (u, v), u_r), ("rotate", (u_r, u), u_p), ("rotate", (u_p, u_r), v_p)]
        )
        candidates.append(
            [("rotate", (v, u), u_l), ("rotate", (u_l, v), v_p), ("rotate", (v_p, u_l), u_p)]
        )

    base = tree_length(cfg, ev.old_tree)
    best_plan = None
    for cand in candidates:
        steps = [
            MorphStep(op, (cycle[f], cycle[m]), cycle[t])
            for op, (f, m), t in cand
            if cycle[m] != cycle[t]
        ]
        try:
            plan = _materialize(ev, cfg, steps)
        except ParameterError:
            continue
        if best_plan is None or plan.max_intermediate < best_plan.max_intermediate:
            best_plan = plan
    if best_plan is None:
        raise ParameterError("no valid rotation plan found")
    limit = (4.0 / 3.0) * base
    if best_plan.max_intermediate > limit + 1e-9:
        raise ParameterError(
            f"rotation morph exceeded 4/3 bound: {best_plan.max_intermediate} > {limit}"
        )
    return best_plan


# ---------------------------------------------------------------------------
# swap detection and the topological regime
# ---------------------------------------------------------------------------


def detect_swaps(sc: KineticScenario, grid: int = 257):
    """Combinatorial EMST change times, bisected to 1e-9.

    Returns a list of (time, old_tree, new_tree); simultaneous multi-edge
    changes are reported as one entry and decomposed by the regime runner.
    """
    ts = np.linspace(0.0, sc.horizon, grid)
    events = []
    prev_t = float(ts[0])
    prev_tree = emst(sc.config(prev_t))
    for t in ts[1:]:
        t = float(t)
        cur_tree = emst(sc.config(t))
        a_t, a_tree = prev_t, prev_tree
        guard = 0
        while a_tree.edges != cur_tree.edges:
            lo, hi = a_t, t
            hi_tree = cur_tree
            while hi - lo > _SWAP_TIME_TOL:
                m = 0.5 * (lo + hi)
                m_tree = emst(sc.config(m))
                if m_tree.edges == a_tree.edges:
                    lo = m
                else:
                    hi = m
                    hi_tree = m_tree
            events.append((0.5 * (lo + hi), a_tree, hi_tree))
            a_t, a_tree = hi, hi_tree
            guard += 1
            if guard > 4 * sc.n:
                raise ParameterError("EMST combinatorics churn too fast for the grid")
        prev_t, prev_tree = t, cur_tree
    return events


def decompose_swap(old_tree: SpanningTree, new_tree: SpanningTree, t: float, cfg: PointConfig):
    """Split a multi-edge EMST change into single (e, e') swap events,
    processing inserted edges in lexicographic order."""
    inserted = sorted(new_tree.edges - old_tree.edges)
    removed_pool = set(old_tree.edges - new_tree.edges)
    current = old_tree
    events = []
    for e_new in inserted:
        cycle = fundamental_cycle(current, e_new)
        cyc_edges = [_norm(p) for p in zip(cycle, cycle[1:])]
        options = [e for e in cyc_edges if e in removed_pool]
        if not options:
            raise ParameterError("cannot pair inserted edge with a removed edge")
        options.sort(key=lambda e: (-cfg.distance(*e), e))
        e_old = options[0]
        events.append(make_swap_event(current, e_old, e_new, t, cfg))
        current = current.replace(e_old, e_new)
        removed_pool.discard(e_old)
    if current.edges != new_tree.edges:
        raise ParameterError("swap decomposition did not reach the new tree")
    return events


@dataclass(frozen=True)
class TopoRecord:
    time: float
    tree_length: float
    opt_length: float
    ratio: float

    def row(self):
        return (self.time, self.tree_length, self.opt_length, self.ratio)


TOPO_COLUMNS = ("time", "tree_length", "opt_length", "ratio")


@dataclass
class TopoRunResult:
    records: list[TopoRecord]
    max_ratio: float
    swap_count: int
    fallback_count: int
    plans: list[MorphPlan] = field(default_factory=list)


def run_topo_regime(
    sc: KineticScenario,
    mode: str | None = None,
    samples: int = 64,
    grid: int = 257,
) -> TopoRunResult:
    """Follow the EMST, expressing each swap as a slide or rotation morph;
    every intermediate tree is charged at the swap time."""
    mode = mode or sc.morph_mode
    if mode not in ("slide", "rotation"):
        raise ParameterError("mode must be 'slide' or 'rotation'")
    raw = detect_swaps(sc, grid)
    records = []
    plans = []
    fallback = 0
    swaps = 0

    def add_record(t, tree_len, opt_len):
        ratio = 1.0 if opt_len <= 0 and tree_len <= 0 else (
            math.inf if opt_len <= 0 else tree_len / opt_len
        )
        records.append(TopoRecord(t, tree_len, opt_len, ratio))

    for t_star, old_tree, new_tree in raw:
        cfg = sc.config(t_star)
        opt_len = tree_length(cfg, emst(cfg))
        for ev in decompose_swap(old_tree, new_tree, t_star, cfg):
            swaps += 1
            plan = None
            if mode == "rotation":
                try:
                    plan = plan_rotation_morph(ev, cfg)
                except ParameterError:
                    plan = plan_slide_morph(ev, cfg)
                    plan.fallback = True
                    fallback += 1
            else:
                plan = plan_slide_morph(ev, cfg)
            plans.append(plan)
            for length in plan.lengths:
                add_record(t_star, length, opt_len)
    for t in np.linspace(0.0, sc.horizon, samples):
        cfg = sc.config(float(t))
        opt = tree_length(cfg, emst(cfg))
        add_record(float(t), opt, opt)
    records.sort(key=lambda r: r.time)
    max_ratio = max((r.ratio for r in records), default=1.0)
    return TopoRunResult(records, max_ratio, swaps, fallback, plans)


# ---------------------------------------------------------------------------
# diamond connector machinery
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)
_V_DIAG = (np.array([0.0, _SQRT2]), np.array([0.0, -_SQRT2]))
_H_DIAG = (np.array([-_SQRT2, 0.0]), np.array([_SQRT2, 0.0]))
_GEOM_TOL = 1e-9


def _touches_axis_segment(p, q, axis: int, lim: float) -> bool:
    """Does segment p-q touch the axis-aligned segment |other| <= lim?

    axis=0: the segment x=0, |y| <= lim (vertical); axis=1: y=0, |x| <= lim.
    """
    a, b = (p[axis], q[axis])
    if min(a, b) > _GEOM_TOL or max(a, b) < -_GEOM_TOL:
        return False
    if abs(b - a) < 1e-15:
        other = [p[1 - axis], q[1 - axis]]
        return min(other) <= lim + _GEOM_TOL and max(other) >= -lim - _GEOM_TOL
    t = (0.0 - a) / (b - a)
    if t < -1e-12 or t > 1.0 + 1e-12:
        return False
    cross = p[1 - axis] + t * (q[1 - axis] - p[1 - axis])
    return abs(cross) <= lim + _GEOM_TOL


def classify_connector(p, q) -> str:
    """Classify an edge of the diamond construction.

    top: touches the vertical diagonal, strictly above the horizontal one;
    bottom: the mirror case; cross: touches both diagonals; none: otherwise.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    tv = _touches_axis_segment(p, q, 0, _SQRT2)
    th = _touches_axis_segment(p, q, 1, _SQRT2)
    if tv and th:
        return "cross"
    if tv and min(p[1], q[1]) > _GEOM_TOL:
        return "top"
    if tv and max(p[1], q[1]) < -_GEOM_TOL:
        return "bottom"
    return "none"


@dataclass
class DiamondCertificate:
    per_side: int
    emst_length: float
    blocking_length: float  # min over bottom states of the path minimax
    min_cross_tree: float
    ratio: float


def diamond_rotation_certificate(sc: KineticScenario) -> DiamondCertificate:
    """Reachability certificate at the diamond's critical configuration.

    The spread chains are the discrete stand-ins for the construction's
    continuum of boundary points, so states are the trees "both chains +
    one connector edge" and rotations move one connector endpoint along
    its chain side. The certificate reports the smallest possible maximum
    tree length over any rotation path from the starting top-connector
    tree to a bottom-connector tree.
    """
    meta = sc.meta
    if meta.get("generator") != "diamond":
        raise ParameterError("certificate applies to diamond scenarios")
    cfg = sc.config(meta["t_mid"])
    left = list(meta["left_chain"])
    right = list(meta["right_chain"])
    pos = cfg.positions
    chains_len = 0.0
    for chain in (left, right):
        for a, b in zip(chain, chain[1:]):
            chains_len += float(np.linalg.norm(pos[a] - pos[b]))
    m = len(left)
    conn_len = np.linalg.norm(
        pos[np.array(left)][:, None, :] - pos[np.array(right)][None, :, :], axis=2
    )
    kinds = [
        [classify_connector(pos[a], pos[b]) for b in right] for a in left
    ]
    start = (0, 0)  # (index into left, index into right) for edge e
    if kinds[0][0] != "top":
        raise ParameterError("start connector is not a top-connector")
    tree_len = lambda a, b: chains_len + conn_len[a, b]
    dist = {start: tree_len(*start)}
    heap = [(dist[start], start)]
    seen = set()
    while heap:
        d, state = heapq.heappop(heap)
        if state in seen:
            continue
        seen.add(state)
        a, b = state
        for a2 in range(m):
            if a2 != a:
                _relax(dist, heap, (a2, b), max(d, tree_len(a2, b)))
        for b2 in range(m):
            if b2 != b:
                _relax(dist, heap, (a, b2), max(d, tree_len(a, b2)))
    bottoms = [
        (a, b) for a in range(m) for b in range(m) if kinds[a][b] == "bottom"
    ]
    if not bottoms:
        raise ParameterError("no bottom-connector states")
    blocking = min(dist[s] for s in bottoms)
    crosses = [
        tree_len(a, b) for a in range(m) for b in range(m) if kinds[a][b] == "cross"
    ]
    emst_len = tree_length(cfg, emst(cfg))
    return DiamondCertificate(
        per_side=meta["per_side"],
        emst_length=emst_len,
        blocking_length=blocking,
        min_cross_tree=min(crosses) if crosses else math.inf,
        ratio=blocking / emst_len,
    )


def _relax(dist, heap, state, value):
    if value < dist.get(state, math.inf) - 1e-15:
        dist[state] = value
        heapq.heappush(heap, (value, state))


# ---------------------------------------------------------------------------
# randomized swap instances (audit support)
# ---------------------------------------------------------------------------


def random_swap_instance(
    rng: np.random.Generator, n: int, longest_removed: bool = False
):
    """Random configuration, tree, and weight-sane swap for planner audits."""
    while True:
        pos = rng.uniform(0.0, 1.0, size=(n, 2))
        cfg = PointConfig(pos)
        seq = [int(x) for x in rng.integers(0, n, size=max(n - 2, 0))]
        tree = tree_from_prufer(seq, n) if n > 2 else SpanningTree(2, [(0, 1)])
        candidates = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if not tree.has_edge((u, v))
        ]
        e_new = candidates[int(rng.integers(0, len(candidates)))]
        cycle = fundamental_cycle(tree, e_new)
        cyc_edges = [_norm(p) for p in zip(cycle, cycle[1:])]
        new_len = cfg.distance(*e_new)
        if longest_removed:
            e_old = max(cyc_edges, key=lambda e: cfg.distance(*e))
            if cfg.distance(*e_old) < new_len:
                continue
        else:
            heavier = [e for e in cyc_edges if cfg.distance(*e) >= new_len]
            if not heavier:
                continue
            e_old = heavier[int(rng.integers(0, len(heavier)))]
        return cfg, make_swap_event(tree, e_old, e_new, 0.0, cfg)

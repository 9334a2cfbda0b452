"""Deterministic marginal and partition-function estimation.

Marginal ratios are bracketed by walking the self-avoiding-walk tree
iteratively (an explicit stack, no recursion) and propagating intervals
upward.  The recursion is decreasing in each child, so the upper end of a
node's interval comes from its children's lower ends and vice versa.  Free
nodes at the truncation frontier contribute the trivial interval [0, +inf];
pinned leaves contribute exact points.  Interval width contracts by the
certified alpha per level, which turns a target accuracy into a depth.

Two truncation shapes are supported: a plain depth cutoff for bounded-degree
graphs, and a degree-scaled cutoff where descending through a node with d
children costs ceil_log(M, d+1) levels, which keeps the expanded tree
polynomial on unbounded-degree graphs.

The partition function is assembled by fixing vertices one at a time: each
conditional marginal is estimated to within eps/(4n), the likelier spin is
fixed (its probability is at least 1/3 after estimation error), and the
telescoping product of the chosen probabilities divides the weight of the
final configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import BLUE, GREEN, SpinSystem, ceil_log, require_antiferromagnetic
from .errors import (
    BudgetExceededError,
    InvalidParameterError,
    SpinDecayError,
    UniquenessError,
)
from .graphs import Boundary, Graph, max_degree
from .saw import closing_spin
from .uniqueness import choose_M, contraction_bound, is_unique_up_to

DEFAULT_BUDGET = 5_000_000

_INF = math.inf


# ---------------------------------------------------------------------------
# policies and result records


@dataclass(frozen=True)
class Depth:
    """Expand free nodes strictly above depth t; the rest get [0, +inf]."""

    t: int


@dataclass(frozen=True)
class MBased:
    """Degree-scaled truncation with base m and budget ell.

    A node's scaled depth grows by ceil_log(m, d+1) when its parent has d
    children; nodes whose grandparent's scaled depth reaches ell are trivial.
    """

    m: float
    ell: int


@dataclass(frozen=True)
class Auto:
    """Pick the policy and level from a target accuracy."""

    eps: float


@dataclass(frozen=True)
class MarginalBounds:
    r_lo: float
    r_hi: float
    p_lo: float
    p_hi: float
    expanded: int = 0
    exact: bool = False
    policy: str = ""
    level: int = 0

    @property
    def width(self) -> float:
        return self.p_hi - self.p_lo


def _to_p(r: float) -> float:
    return 1.0 if math.isinf(r) else r / (1.0 + r)


def _make_bounds(r_lo: float, r_hi: float, expanded: int, exact: bool,
                 policy: str, level: int) -> MarginalBounds:
    if r_lo > r_hi:  # only ever by accumulated rounding; keep the order sane
        r_lo, r_hi = r_hi, r_lo
    return MarginalBounds(
        r_lo=r_lo, r_hi=r_hi, p_lo=_to_p(r_lo), p_hi=_to_p(r_hi),
        expanded=expanded, exact=exact, policy=policy, level=level,
    )


def _activities(g: Graph, s: SpinSystem) -> list[float]:
    return [g.activity(v, s) for v in range(g.n)]


def _point_interval(spin: str) -> tuple[float, float]:
    return (_INF, _INF) if spin == BLUE else (0.0, 0.0)


# ---------------------------------------------------------------------------
# single-interval walk

# Frame slots (lists, not objects, for speed):
# 0 origin | 1 children | 2 idx | 3 acc_lo | 4 acc_hi | 5 log_mode
# 6 zero_lo | 7 zero_hi | 8 depth | 9 own_m | 10 parent_m | 11 child_m

_LOG_CUTOFF = 32


def _guarded_exp(t: float) -> float:
    try:
        return math.exp(t)
    except OverflowError:
        return _INF


def _walk_single(
    g: Graph,
    s: SpinSystem,
    root: int,
    lam: list[float],
    fixed: dict[int, str],
    s_set: frozenset[int],
    depth_limit: int | None,
    m_limit: int | None,
    m_base: float | None,
    budget: int | None,
) -> tuple[float, float, int, bool]:
    """Returns (r_lo, r_hi, frames expanded, any trivial leaf used)."""
    beta, gamma = s.beta, s.gamma
    adj = g.adj
    inv_gamma = 1.0 / gamma

    if depth_limit is not None and depth_limit <= 0:
        return 0.0, _INF, 0, True

    def open_frame(origin: int, parent: int | None, depth: int,
                   own_m: int, parent_m: int) -> list:
        kids = [w for w in adj[origin] if w != parent]
        log_mode = len(kids) > _LOG_CUTOFF
        child_m = own_m + ceil_log(m_base, len(kids) + 1) if m_base is not None else 0
        if log_mode:
            return [origin, kids, 0, 0.0, 0.0, True, False, False, depth,
                    own_m, parent_m, child_m]
        return [origin, kids, 0, 1.0, 1.0, False, False, False, depth,
                own_m, parent_m, child_m]

    expanded = 1
    trivial_used = False
    stack = [open_frame(root, None, 0, 0, -1)]
    on_walk: dict[int, int] = {}

    def apply(fr: list, f_lo: float, f_hi: float) -> None:
        # f_lo multiplies the low product, f_hi the high one.
        if fr[5]:
            if f_lo == 0.0:
                fr[6] = True
            elif not fr[6]:
                fr[3] += math.log(f_lo)
            if f_hi == 0.0:
                fr[7] = True
            elif not fr[7]:
                fr[4] += math.log(f_hi)
        else:
            fr[3] *= f_lo
            fr[4] *= f_hi

    while True:
        fr = stack[-1]
        kids = fr[1]
        idx = fr[2]
        if idx < len(kids):
            fr[2] = idx + 1
            w = kids[idx]
            if w in on_walk:
                # cycle-closing leaf; pinned spin from the edge-order rule
                if closing_spin(on_walk[w], fr[0]) == BLUE:
                    apply(fr, beta, beta)  # ratio +inf on both ends
                else:
                    apply(fr, inv_gamma, inv_gamma)  # ratio 0
            elif w in s_set:
                trivial_used = True
                apply(fr, beta, inv_gamma)
            elif w in fixed:
                if fixed[w] == BLUE:
                    apply(fr, beta, beta)
                else:
                    apply(fr, inv_gamma, inv_gamma)
            elif depth_limit is not None and fr[8] + 1 >= depth_limit:
                trivial_used = True
                apply(fr, beta, inv_gamma)
            elif m_limit is not None and fr[10] >= m_limit:
                trivial_used = True
                apply(fr, beta, inv_gamma)
            else:
                expanded += 1
                if budget is not None and expanded > budget:
                    raise BudgetExceededError(
                        f"expansion exceeded {budget} nodes at vertex {root}"
                    )
                on_walk[fr[0]] = w
                stack.append(open_frame(w, fr[0], fr[8] + 1, fr[11], fr[9]))
        else:
            stack.pop()
            on_walk.pop(fr[0], None)
            lam_v = lam[fr[0]]
            if fr[5]:
                lo = 0.0 if fr[6] else _guarded_exp(math.log(lam_v) + fr[3])
                hi = 0.0 if fr[7] else _guarded_exp(math.log(lam_v) + fr[4])
            else:
                lo = lam_v * fr[3]
                hi = lam_v * fr[4]
            if not stack:
                return lo, hi, expanded, trivial_used
            parent = stack[-1]
            f_lo = beta if math.isinf(hi) else (beta * hi + 1.0) / (hi + gamma)
            f_hi = beta if math.isinf(lo) else (beta * lo + 1.0) / (lo + gamma)
            apply(parent, f_lo, f_hi)


# ---------------------------------------------------------------------------
# profile walk: all depth cutoffs 0..t_max in one traversal

# Frame slots: 0 origin | 1 children | 2 idx | 3 acc_lo | 4 acc_hi | 5 span


def _walk_profile(
    g: Graph,
    s: SpinSystem,
    root: int,
    lam: list[float],
    fixed: dict[int, str],
    s_set: frozenset[int],
    t_max: int,
    budget: int | None,
) -> tuple[list[float], list[float], int]:
    """Interval endpoints (r_lo[t], r_hi[t]) for every cutoff t in 0..t_max."""
    beta, gamma = s.beta, s.gamma
    adj = g.adj
    inv_gamma = 1.0 / gamma

    if t_max == 0:
        return [0.0], [_INF], 0

    def open_frame(origin: int, parent: int | None, span: int) -> list:
        kids = [w for w in adj[origin] if w != parent]
        return [origin, kids, 0, [1.0] * span, [1.0] * span, span]

    expanded = 1
    stack = [open_frame(root, None, t_max)]
    on_walk: dict[int, int] = {}

    def apply_const(fr: list, f_lo: float, f_hi: float) -> None:
        acc_lo, acc_hi = fr[3], fr[4]
        for j in range(fr[5]):
            acc_lo[j] *= f_lo
            acc_hi[j] *= f_hi

    while True:
        fr = stack[-1]
        kids = fr[1]
        idx = fr[2]
        if idx < len(kids):
            fr[2] = idx + 1
            w = kids[idx]
            if w in on_walk:
                if closing_spin(on_walk[w], fr[0]) == BLUE:
                    apply_const(fr, beta, beta)
                else:
                    apply_const(fr, inv_gamma, inv_gamma)
            elif w in s_set:
                apply_const(fr, beta, inv_gamma)
            elif w in fixed:
                if fixed[w] == BLUE:
                    apply_const(fr, beta, beta)
                else:
                    apply_const(fr, inv_gamma, inv_gamma)
            elif fr[5] == 1:
                # the child's value is only ever needed at cutoff 0
                apply_const(fr, beta, inv_gamma)
            else:
                expanded += 1
                if budget is not None and expanded > budget:
                    raise BudgetExceededError(
                        f"profile expansion exceeded {budget} nodes at vertex {root}"
                    )
                on_walk[fr[0]] = w
                stack.append(open_frame(w, fr[0], fr[5] - 1))
        else:
            stack.pop()
            on_walk.pop(fr[0], None)
            lam_v = lam[fr[0]]
            span = fr[5]
            vlo = [0.0] * (span + 1)
            vhi = [_INF] * (span + 1)
            acc_lo, acc_hi = fr[3], fr[4]
            for j in range(span):
                vlo[j + 1] = lam_v * acc_lo[j]
                vhi[j + 1] = lam_v * acc_hi[j]
            if not stack:
                return vlo, vhi, expanded
            parent = stack[-1]
            p_lo, p_hi = parent[3], parent[4]
            for j in range(parent[5]):
                child_hi = vhi[j]
                child_lo = vlo[j]
                p_lo[j] *= beta if math.isinf(child_hi) else (beta * child_hi + 1.0) / (child_hi + gamma)
                p_hi[j] *= beta if math.isinf(child_lo) else (beta * child_lo + 1.0) / (child_lo + gamma)


# ---------------------------------------------------------------------------
# public interval evaluation


def _boundary_parts(boundary: Boundary | None) -> tuple[dict[int, str], frozenset[int]]:
    if boundary is None:
        return {}, frozenset()
    return boundary.fixed, boundary.S


def bounds(
    g: Graph,
    s: SpinSystem,
    v: int,
    boundary: Boundary | None = None,
    policy: Depth | MBased | Auto = Depth(0),
    budget: int | None = DEFAULT_BUDGET,
) -> MarginalBounds:
    """Certified ratio and probability interval for vertex v being blue.

    Every assignment extending the boundary off its differing set has its
    true marginal inside [p_lo, p_hi]; deeper policies only tighten it.
    """
    require_antiferromagnetic(s)
    if not (0 <= v < g.n):
        raise InvalidParameterError(f"vertex {v} outside 0..{g.n - 1}")
    if isinstance(policy, Auto):
        return estimate_marginal(g, s, v, boundary, eps=policy.eps, budget=budget)
    fixed, s_set = _boundary_parts(boundary)
    if v in s_set:
        return _make_bounds(0.0, _INF, 0, False, "fixed", 0)
    if v in fixed:
        r = _point_interval(fixed[v])[0]
        return _make_bounds(r, r, 0, True, "fixed", 0)
    lam = _activities(g, s)
    if isinstance(policy, Depth):
        if policy.t < 0:
            raise InvalidParameterError(f"depth cutoff must be nonnegative, got {policy.t}")
        r_lo, r_hi, expanded, trivial = _walk_single(
            g, s, v, lam, fixed, s_set, policy.t, None, None, budget
        )
        return _make_bounds(r_lo, r_hi, expanded, not trivial, "depth", policy.t)
    if isinstance(policy, MBased):
        if policy.m <= 1.0:
            raise InvalidParameterError(f"truncation base must exceed 1, got {policy.m}")
        if policy.ell < 1:
            raise InvalidParameterError(f"truncation budget must be positive, got {policy.ell}")
        r_lo, r_hi, expanded, trivial = _walk_single(
            g, s, v, lam, fixed, s_set, None, policy.ell, policy.m, budget
        )
        return _make_bounds(r_lo, r_hi, expanded, not trivial, "mbased", policy.ell)
    raise InvalidParameterError(f"unknown truncation policy {policy!r}")


def exhaustive_ratio(
    g: Graph,
    s: SpinSystem,
    v: int,
    boundary: Boundary | None = None,
    budget: int | None = DEFAULT_BUDGET,
) -> float:
    """Exact ratio from expanding the whole walk tree (no truncation).

    The walk tree is finite, so with no frontier the interval collapses to a
    point; this is the reference the truncated estimates converge to.
    """
    require_antiferromagnetic(s)
    fixed, s_set = _boundary_parts(boundary)
    if s_set:
        raise InvalidParameterError("exhaustive evaluation needs an empty differing set")
    if v in fixed:
        return _point_interval(fixed[v])[0]
    lam = _activities(g, s)
    r_lo, r_hi, expanded, trivial = _walk_single(
        g, s, v, lam, fixed, s_set, None, None, None, budget
    )
    if trivial:
        raise SpinDecayError("exhaustive walk unexpectedly hit a frontier")
    if r_lo != r_hi:
        raise SpinDecayError(
            f"exhaustive walk produced a non-degenerate interval [{r_lo}, {r_hi}]"
        )
    return r_lo


# ---------------------------------------------------------------------------
# accuracy-driven estimation


@dataclass(frozen=True)
class _Strategy:
    mode: str  # "depth" | "mbased"
    alpha: float
    m_base: float | None
    level_cap: int


def _resolve_strategy(g: Graph, s: SpinSystem, mode: str) -> _Strategy:
    delta = max(2, max_degree(g) + 1)
    lams = sorted({g.activity(v, s) for v in range(g.n)})

    def finite_ok() -> bool:
        return all(is_unique_up_to(s.with_field(l), delta) for l in lams)

    def universal_ok() -> bool:
        return s.gamma > 1.0 and all(
            is_unique_up_to(s.with_field(l), math.inf) for l in lams
        )

    if mode == "auto":
        mode = "depth" if finite_ok() else "mbased" if universal_ok() else "none"
    if mode in ("depth", "none"):
        if not finite_ok():
            bad = next(
                (l, is_unique_up_to(s.with_field(l), delta))
                for l in lams
                if not is_unique_up_to(s.with_field(l), delta)
            )
            d_bad = bad[1].violating.d if bad[1].violating else None
            suffix = "" if mode == "depth" else "; degree-scaled truncation does not apply either"
            raise UniquenessError(
                f"activity {bad[0]} is not unique up to {delta}"
                + (f" (fails at arity {d_bad})" if d_bad else "")
                + suffix,
                violating_d=d_bad,
            )
        alpha = max(contraction_bound(s.with_field(l), delta).alpha for l in lams)
        # walks are self-avoiding, so no free node sits deeper than n - 1
        return _Strategy(mode="depth", alpha=alpha, m_base=None, level_cap=g.n + 1)
    if mode == "mbased":
        if not universal_ok():
            raise UniquenessError(
                "degree-scaled truncation needs gamma > 1 and universal "
                "uniqueness at every per-vertex activity"
            )
        alpha = max(contraction_bound(s.with_field(l), math.inf).alpha for l in lams)
        m_base = max(choose_M(s.with_field(l), alpha) for l in lams)
        per_level = ceil_log(m_base, max(2, max_degree(g) + 1))
        return _Strategy(
            mode="mbased", alpha=alpha, m_base=m_base,
            level_cap=g.n * max(1, per_level) + 1,
        )
    raise UniquenessError(
        "no truncation strategy applies: the system is neither unique for the "
        "graph's degree bound nor universally unique"
    )


def _level_for(eps: float, alpha: float) -> int:
    if alpha <= 0.0:
        return 1
    return max(1, math.ceil(math.log(4.0 / eps) / math.log(1.0 / alpha)))


def estimate_marginal(
    g: Graph,
    s: SpinSystem,
    v: int,
    boundary: Boundary | None = None,
    eps: float = 1e-2,
    mode: str = "auto",
    budget: int | None = DEFAULT_BUDGET,
    _strategy: _Strategy | None = None,
) -> MarginalBounds:
    """Blue-marginal interval of width at most eps.

    The certified contraction turns eps into a starting level; the level then
    deepens by 2 until the measured width complies (an exactly evaluated tree
    stops immediately, whatever eps).  Raises UniquenessError when no decay
    regime covers the instance, and BudgetExceededError when the node budget
    runs out first.
    """
    require_antiferromagnetic(s)
    if not (eps > 0.0) or not math.isfinite(eps):
        raise InvalidParameterError(f"eps must be positive and finite, got {eps!r}")
    fixed, s_set = _boundary_parts(boundary)
    if s_set:
        raise InvalidParameterError(
            "estimate_marginal needs an empty differing set; width cannot "
            "shrink below the gap a differing set forces"
        )
    if v in fixed:
        r = _point_interval(fixed[v])[0]
        return _make_bounds(r, r, 0, True, "fixed", 0)

    strat = _strategy if _strategy is not None else _resolve_strategy(g, s, mode)
    level = min(_level_for(eps, strat.alpha), strat.level_cap)
    lam = _activities(g, s)
    while True:
        if strat.mode == "depth":
            r_lo, r_hi, expanded, trivial = _walk_single(
                g, s, v, lam, fixed, s_set, level, None, None, budget
            )
        else:
            r_lo, r_hi, expanded, trivial = _walk_single(
                g, s, v, lam, fixed, s_set, None, level, strat.m_base, budget
            )
        out = _make_bounds(r_lo, r_hi, expanded, not trivial, strat.mode, level)
        if out.exact or out.width <= eps:
            return out
        if level >= strat.level_cap:
            raise SpinDecayError(
                f"width {out.width} still above eps={eps} at the level cap; "
                "this should be unreachable for a certified strategy"
            )
        level = min(level + 2, strat.level_cap)


@dataclass(frozen=True)
class PartitionEstimate:
    log_z: float
    rel_error_bound: float
    chosen_config: tuple[str, ...]
    per_vertex_p: tuple[tuple[int, float], ...]
    eps: float
    mode: str


def approx_partition(
    g: Graph,
    s: SpinSystem,
    eps: float,
    boundary: Boundary | None = None,
    order: list[int] | None = None,
    mode: str = "auto",
    budget: int | None = DEFAULT_BUDGET,
) -> PartitionEstimate:
    """Deterministic approximation of the (boundary-conditioned) partition sum.

    Vertices are fixed one at a time to their likelier spin under the current
    conditioning; each marginal is estimated to within eps/(4n), so each used
    probability is at least 1/3 and the accumulated relative error stays
    under eps.  The reported bound 3*n*eps' is deliberately conservative.
    """
    require_antiferromagnetic(s)
    if not (eps > 0.0) or not math.isfinite(eps):
        raise InvalidParameterError(f"eps must be positive and finite, got {eps!r}")
    fixed0, s_set = _boundary_parts(boundary)
    if s_set:
        raise InvalidParameterError("approx_partition needs an empty differing set")

    free = [v for v in range(g.n) if v not in fixed0]
    if order is None:
        elim = free
    else:
        elim = [v for v in order if v not in fixed0]
        if sorted(elim) != sorted(free):
            raise InvalidParameterError(
                "order must enumerate every free vertex exactly once"
            )
    n_free = len(elim)
    if n_free == 0:
        from .oracle import log_weight  # local import; oracle never imports us

        spins = tuple(fixed0[v] for v in range(g.n))
        lw = log_weight(g, s, spins)
        if lw == -_INF:
            raise SpinDecayError("boundary configuration has zero weight")
        return PartitionEstimate(
            log_z=lw, rel_error_bound=0.0, chosen_config=spins,
            per_vertex_p=(), eps=eps, mode="exact",
        )

    eps_v = min(eps / (4.0 * n_free), 1.0 / 12.0)
    strat = _resolve_strategy(g, s, mode)
    sigma = dict(fixed0)
    chosen_p: list[tuple[int, float]] = []
    for v in elim:
        est = estimate_marginal(
            g, s, v, Boundary(fixed=dict(sigma)), eps=eps_v,
            budget=budget, _strategy=strat,
        )
        mid = 0.5 * (est.p_lo + est.p_hi)
        if mid >= 0.5:
            sigma[v] = BLUE
            p = mid
        else:
            sigma[v] = GREEN
            p = 1.0 - mid
        if p <= 0.0:
            raise SpinDecayError(f"conditional probability degenerated at vertex {v}")
        chosen_p.append((v, p))

    from .oracle import log_weight

    spins = tuple(sigma[v] for v in range(g.n))
    lw = log_weight(g, s, spins)
    if lw == -_INF:
        raise SpinDecayError(
            "chosen configuration has zero weight; marginal estimates were inconsistent"
        )
    log_z = lw - sum(math.log(p) for _, p in chosen_p)
    return PartitionEstimate(
        log_z=log_z,
        rel_error_bound=3.0 * n_free * eps_v,
        chosen_config=spins,
        per_vertex_p=tuple(chosen_p),
        eps=eps,
        mode=strat.mode,
    )


@dataclass(frozen=True)
class DecayPoint:
    t: int
    width: float
    p_lo: float
    p_hi: float


def decay_curve(
    g: Graph,
    s: SpinSystem,
    v: int,
    boundary: Boundary | None = None,
    t_max: int = 10,
    budget: int | None = DEFAULT_BUDGET,
) -> list[DecayPoint]:
    """Probability-interval width at every depth cutoff 0..t_max.

    All cutoffs come from one traversal of the depth-t_max tree, so the curve
    costs barely more than its deepest point.  Widths are nonincreasing.
    """
    require_antiferromagnetic(s)
    if t_max < 0:
        raise InvalidParameterError(f"t_max must be nonnegative, got {t_max}")
    fixed, s_set = _boundary_parts(boundary)
    if v in s_set:
        return [DecayPoint(t, 1.0, 0.0, 1.0) for t in range(t_max + 1)]
    if v in fixed:
        p = 1.0 if fixed[v] == BLUE else 0.0
        return [DecayPoint(t, 0.0, p, p) for t in range(t_max + 1)]
    lam = _activities(g, s)
    vlo, vhi, _ = _walk_profile(g, s, v, lam, fixed, s_set, t_max, budget)
    out = []
    for t in range(t_max + 1):
        p_lo = _to_p(vlo[t])
        p_hi = _to_p(vhi[t])
        out.append(DecayPoint(t=t, width=p_hi - p_lo, p_lo=p_lo, p_hi=p_hi))
    return out

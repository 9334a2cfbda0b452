"""Fixed points, uniqueness certificates, thresholds and contraction constants.

For an anti-ferromagnetic system the d-ary symmetric recursion
f_d(x) = lam * ((beta*x + 1)/(x + gamma))**d is strictly decreasing, so it has
exactly one positive fixed point x_hat_d.  The system is "unique up to Delta"
when |f_d'(x_hat_d)| < 1 for every arity 1 <= d < Delta, and universally
unique when that holds for every d.  Everything else here builds on that
predicate: closed-form threshold activities where they exist, a binary-searched
gamma threshold, the contraction constant alpha that drives truncation depths,
and the degree-scaled truncation base M for unbounded-degree graphs.

Unbounded-degree checks terminate through the absolute bound
x_hat_d <= lam / gamma**d (gamma > 1), which gives |f_d'(x_hat_d)| <= d*lam/gamma**d;
once that envelope drops below 1 and is decreasing, all larger arities are
certified at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .core import (
    SpinSystem,
    alpha_sym,
    ceil_log,
    fixed_point_derivative,
    require_antiferromagnetic,
    symmetric_f,
)
from .errors import (
    InvalidParameterError,
    NoThresholdError,
    SpinDecayError,
    UniquenessError,
)

_BISECT_RTOL = 1e-13
_BISECT_MAXIT = 200

# Threshold scans over unbounded arity stop once the objective has exceeded
# the running optimum this many arities in a row.
_SCAN_PATIENCE = 50


def _bisect_decreasing(g, lo: float, hi: float, rtol: float = _BISECT_RTOL) -> float:
    """Root of a strictly decreasing g with g(lo) >= 0 >= g(hi)."""
    for _ in range(_BISECT_MAXIT):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * (1.0 + abs(mid)):
            return mid
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True)
class FixedPointResult:
    d: int
    x_hat: float
    derivative_abs: float
    residual: float


@lru_cache(maxsize=None)
def fixed_point(s: SpinSystem, d: int) -> FixedPointResult:
    """The unique positive fixed point of the d-ary symmetric recursion.

    Bisection on g(x) = f_d(x) - x, which is strictly decreasing with
    g(0) = f_d(0) > 0; the upper bracket end grows until g goes negative.
    """
    require_antiferromagnetic(s)
    if d < 1 or d != int(d):
        raise InvalidParameterError(f"arity d must be a positive integer, got {d!r}")

    def g(x: float) -> float:
        return symmetric_f(s, d, x) - x

    hi = 1.0
    while g(hi) > 0.0:
        hi *= 4.0
        if hi > 1e200:
            raise SpinDecayError("fixed-point bracket failed to close")
    x_hat = _bisect_decreasing(g, 0.0, hi)
    return FixedPointResult(
        d=d,
        x_hat=x_hat,
        derivative_abs=fixed_point_derivative(s, d, x_hat),
        residual=abs(g(x_hat)),
    )


# ---------------------------------------------------------------------------
# uniqueness certificates


@dataclass(frozen=True)
class UniquenessResult:
    """Outcome of is_unique_up_to, truthy iff unique.

    checked holds the explicitly solved arities; for unbounded delta,
    tail_start is the arity from which d*lam/gamma**d < 1 certifies the rest
    (the envelope is decreasing there), and tail_bound is its value at
    tail_start.  violating records the first failing arity, when any.
    """

    unique: bool
    delta: float
    checked: tuple[FixedPointResult, ...]
    tail_start: int | None = None
    tail_bound: float | None = None
    violating: FixedPointResult | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.unique


def _validate_delta(delta) -> float:
    if delta == math.inf:
        return math.inf
    if isinstance(delta, bool) or delta != int(delta):
        raise InvalidParameterError(f"delta must be an integer >= 2 or inf, got {delta!r}")
    delta = int(delta)
    if delta < 2:
        raise InvalidParameterError(f"delta must be at least 2, got {delta}")
    return delta


def _envelope_start(s: SpinSystem) -> tuple[int, float]:
    """First arity where d*lam/gamma**d is decreasing and below 1 (gamma > 1).

    Returns (d_star, value at d_star); for every d >= d_star the derivative
    at the fixed point is below the envelope, hence below 1.
    """
    g = s.gamma
    d = max(1, math.floor(1.0 / (g - 1.0)) + 1)  # decreasing from here on
    for _ in range(1_000_000):
        if d * s.lam * math.exp(-d * math.log(g)) < 1.0:
            return d, d * s.lam * math.exp(-d * math.log(g))
        d += 1
    raise SpinDecayError("uniqueness tail search failed to terminate")


@lru_cache(maxsize=None)
def is_unique_up_to(s: SpinSystem, delta) -> UniquenessResult:
    """Whether |f_d'(x_hat_d)| < 1 for every 1 <= d < delta (delta may be inf).

    The comparison is strict: a derivative exactly at 1 is reported as not
    unique.  For delta = inf a gamma <= 1 system is never universally unique,
    so the answer is False without a finite witness.
    """
    require_antiferromagnetic(s)
    delta = _validate_delta(delta)

    tail_start = None
    tail_bound = None
    if delta == math.inf:
        if s.gamma <= 1.0:
            return UniquenessResult(
                unique=False,
                delta=delta,
                checked=(),
                reason="gamma <= 1 admits no universal uniqueness",
            )
        tail_start, tail_bound = _envelope_start(s)
        explicit_top = tail_start  # check 1 .. tail_start - 1
    else:
        explicit_top = delta
        if s.gamma > 1.0:
            # Large finite deltas can reuse the envelope shortcut.
            d_star, bound = _envelope_start(s)
            if d_star < delta:
                tail_start, tail_bound = d_star, bound
                explicit_top = d_star

    checked = []
    for d in range(1, explicit_top):
        fp = fixed_point(s, d)
        checked.append(fp)
        if fp.derivative_abs >= 1.0:
            return UniquenessResult(
                unique=False,
                delta=delta,
                checked=tuple(checked),
                violating=fp,
                reason=f"derivative {fp.derivative_abs:.6g} >= 1 at arity {d}",
            )
    return UniquenessResult(
        unique=True,
        delta=delta,
        checked=tuple(checked),
        tail_start=tail_start,
        tail_bound=tail_bound,
    )


@dataclass(frozen=True)
class ProfileEntry:
    d: int
    x_hat: float
    derivative_abs: float
    unique: bool


def uniqueness_profile(s: SpinSystem, d_max: int) -> list[ProfileEntry]:
    """Per-arity fixed point, derivative magnitude and uniqueness verdict."""
    if d_max < 1:
        raise InvalidParameterError(f"d_max must be positive, got {d_max}")
    out = []
    for d in range(1, d_max + 1):
        fp = fixed_point(s, d)
        out.append(
            ProfileEntry(
                d=d,
                x_hat=fp.x_hat,
                derivative_abs=fp.derivative_abs,
                unique=fp.derivative_abs < 1.0,
            )
        )
    return out


# ---------------------------------------------------------------------------
# contraction


@dataclass(frozen=True)
class ContractionEntry:
    d: int
    x_max: float
    alpha_d: float
    sqrt_derivative: float


@dataclass(frozen=True)
class ContractionBound:
    """alpha < 1 dominating the amortised one-step contraction at any arity < delta.

    entries lists the explicitly maximised arities; for delta = inf,
    arities past tail_start are covered by the envelope
    d*sqrt(lam/gamma**(d+1)), whose value at tail_start is tail_bound and
    never exceeds alpha.
    """

    alpha: float
    delta: float
    entries: tuple[ContractionEntry, ...]
    tail_start: int | None = None
    tail_bound: float | None = None


def _alpha_max_point(s: SpinSystem, d: int) -> float:
    """Location of the maximum of alpha_sym(s, d, .) on (0, inf).

    Root of the balance condition

        (gamma - beta*x^2) / (d*(1-beta*gamma)*x)
            = (gamma - beta*f^2) / ((beta*f + 1)*(f + gamma)),   f = f_d(x),

    whose left side strictly decreases and right side strictly increases, so
    the crossing is unique and bisection applies.
    """
    b, g = s.beta, s.gamma
    coef = d * (1.0 - b * g)

    def h(x: float) -> float:
        f = symmetric_f(s, d, x)
        lhs = (g - b * x * x) / (coef * x)
        rhs = (g - b * f * f) / ((b * f + 1.0) * (f + g))
        return lhs - rhs

    lo = 1e-8
    while h(lo) <= 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise SpinDecayError("maximiser bracket failed at the lower end")
    hi = max(1.0, 2.0 * lo)
    while h(hi) > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise SpinDecayError("maximiser bracket failed at the upper end")
    return _bisect_decreasing(h, lo, hi)


def _contraction_entry(s: SpinSystem, d: int) -> ContractionEntry:
    x_max = _alpha_max_point(s, d)
    a_d = alpha_sym(s, d, x_max)
    sqrt_deriv = math.sqrt(fixed_point(s, d).derivative_abs)
    if a_d > sqrt_deriv + 1e-9:
        raise SpinDecayError(
            f"contraction maximum {a_d!r} exceeds sqrt of fixed-point "
            f"derivative {sqrt_deriv!r} at arity {d}; numerical inconsistency"
        )
    return ContractionEntry(d=d, x_max=x_max, alpha_d=a_d, sqrt_derivative=sqrt_deriv)


def _log_envelope(s: SpinSystem, d: int) -> float:
    """log of d*sqrt(lam/gamma**(d+1)), the arity-d unconditional bound."""
    return math.log(d) + 0.5 * (math.log(s.lam) - (d + 1) * math.log(s.gamma))


@lru_cache(maxsize=None)
def contraction_bound(s: SpinSystem, delta) -> ContractionBound:
    """The decay rate certified for all arities below delta.

    Each arity's alpha_sym is maximised exactly (the maximum never exceeds
    sqrt(|f_d'(x_hat_d)|), which uniqueness keeps below 1), and asymmetric
    child vectors are dominated by the symmetric maximum.  For delta = inf
    the explicit range extends until the unconditional envelope
    d*sqrt(lam/gamma**(d+1)) is decreasing and below the explicit maximum,
    which certifies every remaining arity.
    """
    require_antiferromagnetic(s)
    delta = _validate_delta(delta)
    uni = is_unique_up_to(s, delta)
    if not uni:
        d_bad = uni.violating.d if uni.violating is not None else None
        raise UniquenessError(
            f"system (beta={s.beta}, gamma={s.gamma}, lam={s.lam}) is not unique "
            f"up to delta={delta}" + (f" (fails at arity {d_bad})" if d_bad else ""),
            violating_d=d_bad,
        )

    entries: list[ContractionEntry] = []
    if delta != math.inf:
        for d in range(1, int(delta)):
            entries.append(_contraction_entry(s, d))
        alpha = max(e.alpha_d for e in entries)
        tail_start = tail_bound = None
    else:
        # gamma > 1 is guaranteed here (universal uniqueness holds).
        g = s.gamma
        monotone_from = max(1, math.floor(1.0 / (math.sqrt(g) - 1.0)) + 1)
        entries.append(_contraction_entry(s, 1))
        best = entries[0].alpha_d
        d = 1
        while True:
            nxt = _log_envelope(s, d + 1)
            if d >= monotone_from and nxt <= math.log(best):
                break
            d += 1
            if d > 100_000:
                raise SpinDecayError("contraction tail extension failed to terminate")
            entries.append(_contraction_entry(s, d))
            best = max(best, entries[-1].alpha_d)
        alpha = best
        tail_start = d + 1
        tail_bound = math.exp(_log_envelope(s, d + 1))

    if not alpha < 1.0:
        raise UniquenessError(
            f"contraction constant {alpha} fails to certify decay (alpha >= 1)"
        )
    return ContractionBound(
        alpha=alpha,
        delta=delta,
        entries=tuple(entries),
        tail_start=tail_start,
        tail_bound=tail_bound,
    )


# ---------------------------------------------------------------------------
# thresholds


@dataclass(frozen=True)
class ThresholdReport:
    """Uniform result record for the threshold family of operations."""

    kind: str  # hardcore_lambda | soft_lambda_pair | gamma_c | universal_lambda | contraction | M_constant
    values: tuple[float, ...]
    delta: float
    witness_d: int | None = None
    all_lambda_unique: bool = False
    extras: dict = field(default_factory=dict)


def _hardcore_term(gamma: float, d: int) -> float:
    # gamma**(d+1) * d**d / (d-1)**(d+1); exact float pow for small d, log
    # form once the powers leave double range.
    if d <= 60:
        return gamma ** (d + 1) * float(d**d) / float((d - 1) ** (d + 1))
    return math.exp(
        (d + 1) * math.log(gamma) + d * math.log(d) - (d + 1) * math.log(d - 1)
    )


def hardcore_threshold(gamma: float, delta) -> ThresholdReport:
    """Critical activity for beta = 0: min over 1 < d < delta of
    gamma**(d+1) * d**d / (d-1)**(d+1).

    Activities strictly below the returned value are unique up to delta.
    For gamma <= 1 the minimiser is d = delta - 1, so delta = inf has no
    positive threshold there and raises.
    """
    if not (gamma > 0) or not math.isfinite(gamma):
        raise InvalidParameterError(f"gamma must be positive and finite, got {gamma!r}")
    delta = _validate_delta(delta)
    if delta != math.inf and delta < 3:
        raise InvalidParameterError(f"hardcore threshold needs delta >= 3, got {delta}")

    if delta != math.inf:
        best, best_d = math.inf, None
        for d in range(2, int(delta)):
            t = _hardcore_term(gamma, d)
            if t < best:
                best, best_d = t, d
        return ThresholdReport(
            kind="hardcore_lambda", values=(best,), delta=delta, witness_d=best_d
        )

    if gamma <= 1.0:
        raise NoThresholdError(
            "no universal hardcore threshold exists for gamma <= 1 "
            "(the candidate terms decrease to zero)"
        )
    best, best_d, worse_streak = math.inf, None, 0
    d = 2
    while worse_streak < _SCAN_PATIENCE:
        t = _hardcore_term(gamma, d)
        if t < best:
            best, best_d, worse_streak = t, d, 0
        else:
            worse_streak += 1
        d += 1
        if d > 100_000:
            raise SpinDecayError("hardcore threshold scan failed to terminate")
    return ThresholdReport(
        kind="hardcore_lambda", values=(best,), delta=math.inf, witness_d=best_d
    )


@dataclass(frozen=True)
class DerivativeUnitRoots:
    """The two positive x with d*(1-beta*gamma)*x = (beta*x+1)*(x+gamma),
    plus the activities that place the fixed point at each root.

    Exists iff sqrt(beta*gamma) <= (d-1)/(d+1).  x_low*x_high = gamma/beta;
    activities between lam_low and lam_high are exactly the non-unique ones
    at arity d.
    """

    d: int
    x_low: float
    x_high: float
    lam_low: float
    lam_high: float


def _activity_at(beta: float, gamma: float, d: int, x: float) -> float:
    # lam with f_d fixed point at x: lam = x * ((x + gamma)/(beta*x + 1))**d
    t = math.log(x) + d * (math.log(x + gamma) - math.log(beta * x + 1.0))
    if t > 700.0:
        return math.inf
    return math.exp(t)


def derivative_unit_roots(beta: float, gamma: float, d: int) -> DerivativeUnitRoots:
    if beta <= 0:
        raise InvalidParameterError("derivative_unit_roots requires beta > 0")
    if beta * gamma >= 1:
        raise InvalidParameterError("derivative_unit_roots requires beta*gamma < 1")
    if d < 2:
        raise InvalidParameterError(f"arity must be at least 2, got {d}")
    bg = beta * gamma
    a = d * (1.0 - bg) - (1.0 + bg)
    disc = a * a - 4.0 * bg
    if disc < 0.0:
        raise InvalidParameterError(
            f"arity {d} is below the admissible range: need sqrt(beta*gamma) "
            f"<= (d-1)/(d+1), i.e. d >= {(1 + math.sqrt(bg)) / (1 - math.sqrt(bg)):.4f}"
        )
    # The roots solve beta*x**2 - a*x + gamma = 0.  The larger one is safe to
    # form directly; the smaller comes from the product identity
    # x_low * x_high = gamma/beta, dodging the subtractive cancellation of
    # (a - sqrt(disc))/(2*beta).
    x_high = (a + math.sqrt(disc)) / (2.0 * beta)
    x_low = gamma / (beta * x_high)
    return DerivativeUnitRoots(
        d=d,
        x_low=x_low,
        x_high=x_high,
        lam_low=_activity_at(beta, gamma, d, x_low),
        lam_high=_activity_at(beta, gamma, d, x_high),
    )


def _admissible_start(beta: float, gamma: float) -> int:
    """Smallest arity d with sqrt(beta*gamma) <= (d-1)/(d+1)."""
    r = math.sqrt(beta * gamma)
    d = max(2, math.ceil((1.0 + r) / (1.0 - r) - 1e-12))
    while (d - 1) < r * (d + 1):
        d += 1
    return d


def soft_thresholds(beta: float, gamma: float, delta) -> ThresholdReport:
    """The two-sided activity thresholds for beta > 0 and finite delta.

    When sqrt(beta*gamma) > (delta-2)/delta every activity is unique up to
    delta and the report says so.  Otherwise uniqueness up to delta holds
    exactly for activities in (0, lam_c) or (lam_bar_c, inf) where
    lam_c = min lam_low(d) and lam_bar_c = max lam_high(d) over admissible
    arities d < delta.
    """
    if beta <= 0:
        raise InvalidParameterError("soft_thresholds requires beta > 0 (use hardcore_threshold)")
    if beta * gamma >= 1:
        raise InvalidParameterError("soft_thresholds requires beta*gamma < 1")
    delta = _validate_delta(delta)
    if delta == math.inf or delta < 3:
        raise InvalidParameterError("soft_thresholds needs a finite delta >= 3")

    if math.sqrt(beta * gamma) > (delta - 2) / delta:
        return ThresholdReport(
            kind="soft_lambda_pair", values=(), delta=delta, all_lambda_unique=True
        )
    lo_val, lo_d = math.inf, None
    hi_val, hi_d = -math.inf, None
    for d in range(_admissible_start(beta, gamma), int(delta)):
        roots = derivative_unit_roots(beta, gamma, d)
        if roots.lam_low < lo_val:
            lo_val, lo_d = roots.lam_low, d
        if roots.lam_high > hi_val:
            hi_val, hi_d = roots.lam_high, d
    return ThresholdReport(
        kind="soft_lambda_pair",
        values=(lo_val, hi_val),
        delta=delta,
        witness_d=lo_d,
        extras={"witness_d_high": hi_d},
    )


def gamma_threshold(beta: float, lam: float, delta) -> ThresholdReport:
    """The gamma above which (beta, gamma, lam) is unique up to delta.

    Uniqueness is monotone in gamma on the anti-ferromagnetic range, so a
    plain binary search against is_unique_up_to converges; the unbounded
    check already reduces itself to finitely many arities, which makes
    delta = inf no different from a finite delta here.
    """
    if beta < 0 or not math.isfinite(beta):
        raise InvalidParameterError(f"beta must be nonnegative and finite, got {beta!r}")
    if lam <= 0 or not math.isfinite(lam):
        raise InvalidParameterError(f"lam must be positive and finite, got {lam!r}")
    delta = _validate_delta(delta)

    def unique_at(g: float) -> bool:
        return bool(is_unique_up_to(SpinSystem(beta, g, lam), delta))

    if beta == 0.0:
        g_true = 1.0
        for _ in range(200):
            if unique_at(g_true):
                break
            g_true *= 2.0
        else:
            raise NoThresholdError("no gamma with uniqueness found for these parameters")
        g_false = g_true * 0.5
        while g_false > 1e-12 and unique_at(g_false):
            g_false *= 0.5
        if unique_at(g_false):
            return ThresholdReport(
                kind="gamma_c", values=(0.0,), delta=delta,
                extras={"all_gamma_unique": True},
            )
    else:
        lo, hi = beta, 1.0 / beta
        g_true = None
        for k in range(1, 60):
            cand = hi - (hi - lo) * 0.5**k
            if unique_at(cand):
                g_true = cand
                break
        if g_true is None:
            raise NoThresholdError("no gamma with uniqueness found for these parameters")
        g_false = None
        for k in range(1, 60):
            cand = lo + (hi - lo) * 0.5**k
            if cand < g_true and not unique_at(cand):
                g_false = cand
                break
        if g_false is None:
            return ThresholdReport(
                kind="gamma_c", values=(beta,), delta=delta,
                extras={"all_gamma_unique": True},
            )

    while g_true - g_false > 1e-10 * (1.0 + g_true):
        mid = 0.5 * (g_true + g_false)
        if unique_at(mid):
            g_true = mid
        else:
            g_false = mid
    return ThresholdReport(
        kind="gamma_c", values=(0.5 * (g_true + g_false),), delta=delta
    )


def universal_lambda_threshold(beta: float, gamma: float) -> ThresholdReport:
    """min over admissible d of lam_low(d), for beta > 0 and gamma > 1.

    Activities below the returned value are universally unique.  gamma > 1
    makes lam_low(d) grow without bound, so the scan stops once the running
    minimum has gone unbeaten for a stretch of arities.
    """
    if beta <= 0:
        raise InvalidParameterError("universal_lambda_threshold requires beta > 0")
    if gamma <= 1:
        raise NoThresholdError("universal activity threshold requires gamma > 1")
    if beta * gamma >= 1:
        raise InvalidParameterError("universal_lambda_threshold requires beta*gamma < 1")

    best, best_d, worse_streak = math.inf, None, 0
    d = _admissible_start(beta, gamma)
    while worse_streak < _SCAN_PATIENCE:
        val = derivative_unit_roots(beta, gamma, d).lam_low
        if val < best:
            best, best_d, worse_streak = val, d, 0
        else:
            worse_streak += 1
        d += 1
        if d > 200_000:
            raise SpinDecayError("universal threshold scan failed to terminate")
    return ThresholdReport(
        kind="universal_lambda", values=(best,), delta=math.inf, witness_d=best_d
    )


# ---------------------------------------------------------------------------
# truncation base for unbounded degree


def _verify_truncation_base(s: SpinSystem, alpha: float, m: float) -> bool:
    """Check d*sqrt(lam/gamma**(d+1)) <= alpha**ceil_log(m, d+1) for every
    arity d charged two or more levels, i.e. every d with d + 1 > m; smaller
    arities are covered by alpha itself."""
    ln_a = math.log(alpha)
    ln_m = math.log(m)
    ln_g = math.log(s.gamma)
    # smallest arity charged two or more levels: the least d with d + 1 > m
    first = max(1, math.floor(m - 1.0) + 1)

    # Arity beyond which the relaxed requirement H(d) is decreasing:
    # 1/d + |ln alpha| / ((d+1) ln m) <= (ln gamma)/2.
    d_h = first
    while 1.0 / d_h + (-ln_a) / ((d_h + 1) * ln_m) > 0.5 * ln_g:
        d_h *= 2
        if d_h > 10**9:
            return False

    top = max(math.ceil(10.0 * m), d_h + 1)
    for d in range(first, top + 1):
        if _log_envelope(s, d) > ceil_log(m, d + 1) * ln_a:
            return False
    # Relaxed tail value at top+1; the relaxation replaces the ceiling with
    # log_m(d+1) + 1 >= ceil, which only weakens the right-hand side.
    d = top + 1
    relaxed = (math.log(d + 1) / ln_m + 1.0) * ln_a
    return _log_envelope(s, d) <= relaxed


def choose_M(s: SpinSystem, alpha: float) -> float:
    """Smallest grid value M > 1 making per-level contraction
    alpha**ceil_log(M, d+1) dominate every arity d >= M.

    Together with the explicit maxima below M (already inside alpha) this
    certifies the degree-scaled truncation: each level of the walk tree costs
    at least ceil_log(M, d+1) units of decay.  The grid steps by 0.1 up to
    20, by 1 up to 200, then doubles.
    """
    require_antiferromagnetic(s)
    if s.gamma <= 1:
        raise InvalidParameterError("truncation base search requires gamma > 1")
    if not (0.0 < alpha < 1.0):
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha!r}")

    def grid():
        m = 1.1
        while m < 20.0:
            yield round(m, 1)
            m += 0.1
        m = 20.0
        while m < 200.0:
            yield m
            m += 1.0
        while m <= 65536.0:
            yield m
            m *= 2.0

    for m in grid():
        if _verify_truncation_base(s, alpha, m):
            return m
    raise NoThresholdError(
        f"no truncation base up to 65536 certified for alpha={alpha}; "
        "the contraction is too weak for degree-scaled truncation"
    )


# ---------------------------------------------------------------------------
# non-monotonicity in the arity


@dataclass(frozen=True)
class NonMonotoneWitness:
    system: SpinSystem
    non_unique_d: int
    unique_d: int


# Documented default search grid: small beta, gamma comfortably above 1,
# activity just above the universal threshold.
_WITNESS_BETAS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)
_WITNESS_GAMMAS = (1.1, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0)
_WITNESS_MULTIPLIERS = (1.01, 1.1, 1.25, 1.5, 2.0)


def find_non_monotone_witness(d_max: int = 120) -> NonMonotoneWitness:
    """A system unique at some arity strictly above a non-unique one.

    Scans the default grid for gamma > 1 with activity slightly above the
    universal threshold: such a system loses uniqueness at some moderate
    arity yet regains it for all large ones.
    """
    for beta in _WITNESS_BETAS:
        for gamma in _WITNESS_GAMMAS:
            if beta * gamma >= 1.0:
                continue
            try:
                lam_c = universal_lambda_threshold(beta, gamma).values[0]
            except (NoThresholdError, InvalidParameterError):
                continue
            for mult in _WITNESS_MULTIPLIERS:
                lam = lam_c * mult
                if not math.isfinite(lam):
                    continue
                s = SpinSystem(beta, gamma, lam)
                bad = None
                for entry in uniqueness_profile(s, d_max):
                    if bad is None:
                        if not entry.unique:
                            bad = entry.d
                    elif entry.unique:
                        return NonMonotoneWitness(
                            system=s, non_unique_d=bad, unique_d=entry.d
                        )
    raise SpinDecayError("no non-monotone witness found on the default grid")

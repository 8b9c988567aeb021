"""Newton solution and continuation drivers.

The discrete equilibrium g(x) = 0 is solved by plain Newton iteration on
the analytic tangent matrix.  Load sweeps walk the load parameter c with a
secant predictor; when a fold makes c-stepping unreliable (slow Newton or
near-singular tangent), the driver switches to prescribing the pole sag f
and treating c as an unknown in a bordered system, which passes through
limit points without drama.

For the steep basis family the profile parameter p is tuned by an outer
one-dimensional secant iteration that zeroes the energy gradient in p; the
energy is unimodal in p, so a golden-section scan backstops the secant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .assembly import (
    functional_value,
    jacobian,
    load_derivative,
    p_gradient,
    residual,
)
from .basis import P_MIN, BasisSpec, BasisTables, SolutionState, eval_shape
from .kinematics import LoadParams, curvatures, hydro_load, stretches
from .material import MaterialParams, principal_stresses
from .quadrature import QuadratureRule, auto_rule

DELTA_GRID = 101


class SolveFailure(RuntimeError):
    """Raised when no equilibrium could be reached for the request."""


@dataclass
class SolveContext:
    """Bundle of everything a solve needs; basis tables are cached."""

    mat: MaterialParams
    load: LoadParams
    spec: BasisSpec
    rule: QuadratureRule
    tables: BasisTables = field(default=None, repr=False)

    def __post_init__(self):
        if self.tables is None:
            self.tables = BasisTables.build(self.spec, self.rule)

    def with_load(self, c: float) -> "SolveContext":
        return replace(self, load=LoadParams(c, self.load.d))

    def with_spec(self, spec: BasisSpec) -> "SolveContext":
        return SolveContext(self.mat, self.load, spec, self.rule)

    def state(self, x) -> SolutionState:
        return SolutionState(np.asarray(x, dtype=float), self.spec, self.load)


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    residual_history: list
    delta_max: float | None = None
    delta_at: float | None = None
    final_p: tuple | None = None
    cond: float | None = None
    inner_iterations: list | None = None
    message: str = ""


@dataclass
class ContinuationPoint:
    c_value: float
    sag: float
    x: np.ndarray
    stability_hint: int = 0


def delta_diagnostic(state: SolutionState, mat: MaterialParams, probes=()):
    """Pointwise defect of the normal equilibrium, scaled by the load.

    delta(s) = |k1 T1 + k2 T2 - Q| / |c|.  Returns (delta at each probe,
    max over a 101-point interior grid).  The pole uses the limit values of
    lambda2 and k2.
    """
    c = state.load.c
    if c == 0.0:
        raise ValueError("delta diagnostic undefined at zero load")
    probes = np.asarray(list(probes), dtype=float)
    grid = np.linspace(0.0, 1.0, DELTA_GRID + 2)[1:-1]

    def _delta(s):
        shape = eval_shape(state, s, second=True)
        l1, l2, _ = stretches(s, shape.r, shape.dz, shape.dr, pole_limit=True)
        t1, t2 = principal_stresses(l1, l2, mat)
        k1, k2 = curvatures(s, shape)
        q = hydro_load(shape.z, state.load.c, state.load.d)
        return np.abs(k1 * t1 + k2 * t2 - q) / abs(c)

    at_probes = _delta(probes) if probes.size else probes
    return at_probes, float(np.max(_delta(grid)))


def newton_solve(x0, ctx: SolveContext, tol: float = 1e-10,
                 max_iter: int = 25, probe: float | None = None):
    """Plain Newton iteration on the assembled system.

    Stops on the max-norm of the residual.  Divergence (three consecutive
    residual increases) and non-finite iterates abort with converged=False;
    callers decide whether that is fatal.
    """
    x = np.array(x0, dtype=float)
    hist: list[float] = []
    converged = False
    message = ""
    growth = 0
    steps = 0
    while True:
        g = residual(ctx.state(x), ctx.mat, ctx.rule, ctx.tables)
        gn = float(np.max(np.abs(g))) if np.all(np.isfinite(g)) else math.inf
        hist.append(gn)
        if not math.isfinite(gn):
            message = "residual not finite"
            break
        if gn <= tol:
            converged = True
            break
        if len(hist) > 1 and gn > hist[-2]:
            growth += 1
            if growth >= 3:
                message = "residual diverging"
                break
        else:
            growth = 0
        if steps >= max_iter:
            message = "max_iter exceeded"
            break
        h = jacobian(ctx.state(x), ctx.mat, ctx.rule, ctx.tables)
        try:
            dx = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            message = "singular tangent matrix"
            break
        x = x - dx
        steps += 1
        if not np.all(np.isfinite(x)):
            message = "iterate not finite"
            break

    state = ctx.state(x)
    report = SolveReport(
        converged=converged,
        iterations=steps,
        residual_history=hist,
        final_p=ctx.spec.p if ctx.spec.family == "adaptive" else None,
        message=message,
    )
    if converged:
        h = jacobian(state, ctx.mat, ctx.rule, ctx.tables)
        report.cond = float(np.linalg.cond(h))
        if ctx.load.c != 0.0:
            probes = [probe] if probe is not None else []
            at, dmax = delta_diagnostic(state, ctx.mat, probes)
            report.delta_max = dmax
            report.delta_at = float(at[0]) if probe is not None else None
    return state, report


def initial_guess(ctx: SolveContext, tol: float = 1e-10) -> np.ndarray:
    """Starting coefficients from the two-unknown (m = 1) subproblem.

    The m = 1 solve is seeded so the pole moves with the load (positive c,
    positive sag) and its two coefficients are embedded as components 1 and
    m+1 of the full vector.  If the direct solve fails the load is ramped
    in quarters; if that fails too the load is likely beyond a limit point
    and the caller should sweep instead.
    """
    m = ctx.spec.m
    x0 = np.zeros(2 * m)
    c = ctx.load.c
    if c == 0.0:
        return x0
    sub = ctx.with_spec(BasisSpec(ctx.spec.family, 1, ctx.spec.p))
    u0 = float(sub.tables.u0[0])
    if u0 == 0.0:
        raise SolveFailure("degenerate basis: u_1(0) = 0")
    sag0 = math.copysign(min(0.5, abs(c) / (1.0 + ctx.load.d)), c)
    seed = np.array([sag0 / u0, 0.0])

    state, rep = newton_solve(seed, sub, tol=tol)
    if not (rep.converged and state.sag() * c > 0.0):
        x = np.zeros(2)
        ok = True
        for frac in (0.25, 0.5, 0.75, 1.0):
            state, rep = newton_solve(x, sub.with_load(frac * c), tol=tol)
            if not rep.converged:
                ok = False
                break
            x = state.x
        if not (ok and state.sag() * c > 0.0):
            raise SolveFailure(
                "could not start from the small-system guess; reduce the load "
                "or sweep up to it"
            )
    x0[0] = state.x[0]
    x0[m] = state.x[1]
    return x0


def solve_at_sag(ctx: SolveContext, f_target: float, x0, c0: float,
                 tol: float = 1e-10, max_iter: int = 25):
    """Equilibrium with prescribed pole sag; the load c is an unknown.

    Newton on the bordered system {g(x; c) = 0, z(0) - f = 0}.  The
    bordered matrix stays regular at limit points of the load, so this is
    the fold-crossing workhorse.  Returns (state, c, report).
    """
    m = ctx.spec.m
    e = np.concatenate([ctx.tables.u0, np.zeros(m)])
    x = np.array(x0, dtype=float)
    c = float(c0)
    hist: list[float] = []
    converged = False
    message = ""
    steps = 0
    while True:
        cctx = ctx.with_load(c)
        state = cctx.state(x)
        g = residual(state, ctx.mat, ctx.rule, ctx.tables)
        big_g = np.concatenate([g, [float(e @ x) - f_target]])
        gn = float(np.max(np.abs(big_g))) if np.all(np.isfinite(big_g)) else math.inf
        hist.append(gn)
        if not math.isfinite(gn):
            message = "residual not finite"
            break
        if gn <= tol:
            converged = True
            break
        if steps >= max_iter:
            message = "max_iter exceeded"
            break
        h = jacobian(state, ctx.mat, ctx.rule, ctx.tables)
        gc = load_derivative(state, ctx.mat, ctx.rule, ctx.tables)
        big_h = np.zeros((2 * m + 1, 2 * m + 1))
        big_h[:-1, :-1] = h
        big_h[:-1, -1] = gc
        big_h[-1, :-1] = e
        try:
            step = np.linalg.solve(big_h, big_g)
        except np.linalg.LinAlgError:
            message = "singular bordered matrix"
            break
        x = x - step[:-1]
        c = c - float(step[-1])
        steps += 1
        if not (np.all(np.isfinite(x)) and math.isfinite(c)):
            message = "iterate not finite"
            break

    cctx = ctx.with_load(c)
    state = cctx.state(x)
    report = SolveReport(
        converged=converged,
        iterations=steps,
        residual_history=hist,
        final_p=ctx.spec.p if ctx.spec.family == "adaptive" else None,
        message=message,
    )
    return state, c, report


@dataclass
class StepPolicy:
    """Continuation step control.

    The load step halves on failure and grows after `easy_streak` quick
    solves.  Slow Newton or a near-singular tangent flips the driver into
    sag parametrization, which it keeps to the end of the sweep.
    """

    initial: float = 0.05
    min_step: float = 1e-6
    max_step: float = 0.25
    grow: float = 2.0
    easy_iters: int = 4
    easy_streak: int = 3
    adaptive: bool = True
    switch_iters: int = 8
    switch_cond: float = 1e10
    max_points: int = 2000
    max_sag: float = 8.0


def _hints(points: list[ContinuationPoint]) -> None:
    for i, pt in enumerate(points):
        j = i if i + 1 < len(points) else i - 1
        if j < 0:
            pt.stability_hint = 0
            continue
        df = points[j + 1].sag - points[j].sag
        dc = points[j + 1].c_value - points[j].c_value
        if df == 0.0:
            pt.stability_hint = 0
        else:
            pt.stability_hint = int(np.sign(dc / df))


def continue_in_load(ctx: SolveContext, c_start: float, c_end: float,
                     policy: StepPolicy | None = None, x0=None):
    """Sweep the load from c_start toward c_end, returning the whole path.

    Points are (c, sag, x) with a stability hint from the local slope
    dc/df.  Past a fold the sweep keeps increasing the sag, so the load
    values along the returned path are not monotone.
    """
    policy = policy or StepPolicy()
    direction = 1.0 if c_end >= c_start else -1.0

    if x0 is None:
        x0 = initial_guess(ctx.with_load(c_start))
    state, rep = newton_solve(x0, ctx.with_load(c_start))
    if not rep.converged:
        raise SolveFailure(f"no equilibrium at the sweep start c = {c_start}")
    points = [ContinuationPoint(c_start, state.sag(), state.x.copy())]

    dc = direction * policy.initial
    easy = 0
    sag_mode = rep.iterations > policy.switch_iters or (
        rep.cond is not None and rep.cond > policy.switch_cond
    )
    df = None

    jumps = 0
    while len(points) < policy.max_points:
        last = points[-1]
        if not sag_mode:
            if direction * (last.c_value - c_end) >= 0.0:
                break
            c_next = last.c_value + dc
            if direction * (c_next - c_end) > 0.0:
                c_next = c_end
            if len(points) >= 2:
                prev = points[-2]
                t = (c_next - last.c_value) / (last.c_value - prev.c_value)
                x_pred = last.x + t * (last.x - prev.x)
                df_exp = t * (last.sag - prev.sag)
            else:
                x_pred = last.x
                df_exp = None
            state, rep = newton_solve(x_pred, ctx.with_load(c_next))
            # A converged iterate that leaves the local trend is a root on
            # another branch, typical just past a fold where the nearby
            # solution ceases to exist.  Treat it like a failed step.
            jumped = False
            if rep.converged and df_exp is not None:
                df_got = state.sag() - last.sag
                jumped = (df_got * df_exp < 0.0 and abs(df_got) > 1e-3) or (
                    abs(df_got) > 4.0 * abs(df_exp) + 0.02
                )
            if rep.converged and not jumped:
                jumps = 0
                points.append(ContinuationPoint(c_next, state.sag(), state.x.copy()))
                hard = rep.iterations > policy.switch_iters or (
                    rep.cond is not None and rep.cond > policy.switch_cond
                )
                if hard:
                    sag_mode = True
                elif policy.adaptive:
                    easy = easy + 1 if rep.iterations <= policy.easy_iters else 0
                    if easy >= policy.easy_streak and abs(dc) < policy.max_step:
                        dc = direction * min(abs(dc) * policy.grow, policy.max_step)
                        easy = 0
            else:
                if not policy.adaptive:
                    raise SolveFailure(
                        f"continuation failed at c = {c_next} with fixed steps"
                    )
                jumps += jumped
                dc *= 0.5
                if jumps >= 2 or abs(dc) < policy.min_step:
                    sag_mode = True
                    jumps = 0
            continue

        # Sag-parametrized leg: step the pole deflection, solve for c.
        if df is None:
            if len(points) >= 2:
                df = points[-1].sag - points[-2].sag
            if df is None or df == 0.0:
                df = 0.02 * math.copysign(1.0, points[-1].sag or direction)
            df = math.copysign(
                min(max(abs(df), policy.min_step), policy.max_step), df
            )
        if len(points) >= 2:
            prev = points[-2]
            denom = last.sag - prev.sag
            t = (df / denom) if denom != 0.0 else 0.0
            x_pred = last.x + t * (last.x - prev.x)
            c_pred = last.c_value + t * (last.c_value - prev.c_value)
        else:
            x_pred, c_pred = last.x, last.c_value
        state, c_new, rep = solve_at_sag(ctx, last.sag + df, x_pred, c_pred)
        # Same guard against landing on a different branch: the prescribed
        # sag pins f, so a jump shows up as c far off the extrapolation.
        jumped = rep.converged and abs(c_new - c_pred) > max(
            5.0 * abs(c_pred - last.c_value), 0.25 * (1.0 + abs(last.c_value))
        )
        if rep.converged and not jumped:
            points.append(ContinuationPoint(c_new, state.sag(), state.x.copy()))
            if policy.adaptive:
                easy = easy + 1 if rep.iterations <= policy.easy_iters else 0
                if easy >= policy.easy_streak and abs(df) < policy.max_step:
                    df *= policy.grow
                    easy = 0
            rising = c_new > points[-2].c_value
            if direction * (c_new - c_end) >= 0.0 and (direction < 0 or rising):
                break
            if abs(state.sag()) > policy.max_sag:
                break
        else:
            df *= 0.5
            easy = 0
            if abs(df) < policy.min_step:
                raise SolveFailure(
                    f"sag continuation stalled near f = {last.sag + df}"
                )

    _hints(points)
    return points


def init_p1(prev: SolutionState | None, mat: MaterialParams,
            load: LoadParams) -> float:
    """Starting steepness from the edge balance of a previous solution.

    p1 ~ sqrt(d * lambda1**2 |cos alpha| / T1) evaluated at s = 1, which
    matches the boundary-layer width the profile must resolve.  Without a
    usable previous state, fall back to sqrt(d).
    """
    if load.d <= 0.0:
        raise ValueError("steep family needs d > 0; use the polynomial family")
    fallback = math.sqrt(load.d)
    if prev is None:
        return fallback
    shape = eval_shape(prev, np.array(1.0))
    l1 = float(np.hypot(shape.dz, shape.dr))
    t1, _ = principal_stresses(l1, 1.0, mat)
    t1 = float(t1)
    if not (t1 > 1e-12 and l1 > 0.0):
        return fallback
    cos_a = abs(float(shape.dr)) / l1
    return math.sqrt(load.d * l1 * l1 * cos_a / t1)


def _golden_min(fun, a: float, b: float, rel_tol: float = 1e-4,
                max_iter: int = 60) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(max_iter):
        if (b - a) <= rel_tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = fun(x2)
    return 0.5 * (a + b)


def optimize_basis(ctx: SolveContext, x0=None, tol_p: float = 1e-6,
                   max_outer: int = 40, probe: float | None = None):
    """Tune the steep-family parameters to the energy-stationary point.

    Inner loop: Newton on the coefficients at fixed p, warm-started from
    the previous parameter value.  Outer loop: secant (Broyden for several
    parameters) on the energy gradient in p, with steps clamped to half the
    current value.  If the secant stalls on p1 the unimodal energy is
    bracketed by a golden-section scan instead.
    """
    if ctx.spec.family != "adaptive":
        raise ValueError("basis optimization applies to the steep family only")
    n = ctx.spec.n_p
    inner_counts: list[int] = []

    def inner(p_vec, x_warm):
        c = ctx.with_spec(ctx.spec.with_p(p_vec))
        xw = x_warm if x_warm is not None else initial_guess(c)
        st, rep = newton_solve(xw, c, probe=probe)
        if not rep.converged and x_warm is not None:
            st, rep = newton_solve(initial_guess(c), c, probe=probe)
        return c, st, rep

    def measures(c, st):
        psi = p_gradient(st, c.mat, c.rule, c.tables)
        val = functional_value(st, c.mat, c.rule, c.tables)
        return psi, val

    p = np.array(ctx.spec.p, dtype=float)
    cctx, state, rep = inner(p, np.asarray(x0, dtype=float) if x0 is not None else None)
    if not rep.converged:
        raise SolveFailure("inner solve failed at the starting parameters")
    inner_counts.append(rep.iterations)
    psi, val = measures(cctx, state)

    # The energy is extremely flat in p (|dI/dp| ~ 1e-7 |I| per unit p in the
    # steep regime), so the gradient threshold alone fires far from the
    # stationary point.  Convergence additionally requires the predicted
    # root step to collapse below step_tol relative to p itself.
    step_tol = 1e-3

    def done(psi_vec, value):
        return float(np.max(np.abs(psi_vec))) <= tol_p * max(1.0, abs(value))

    # The warm-started inner Newton can slide onto a different root of g at
    # an aggressive p step (degenerate near-flat shapes also solve g = 0 and
    # have psi ~ 0, which would fool the stop test).  Since the search
    # descends a unimodal energy, any iterate whose value climbs past the
    # incumbent by more than secant overshoot is such a slide: reject it.
    def slid(value):
        return value > best_val + max(1e-6 * abs(best_val), 1e-14)

    best_val, best_ctx, best_state = val, cctx, state

    if n == 1:
        p_prev, psi_prev = p.copy(), psi.copy()
        p = np.array([max(P_MIN, p[0] * 1.05)])
    else:
        # Broyden start: finite-difference the gradient along each p_i.
        b = np.empty((n, n))
        for i in range(n):
            dp = 1e-3 * max(1.0, abs(p[i]))
            pt = p.copy()
            pt[i] += dp
            ct, st, rp = inner(pt, state.x)
            if not rp.converged:
                raise SolveFailure("parameter probe solve failed")
            inner_counts.append(rp.iterations)
            psi_t, _ = measures(ct, st)
            b[:, i] = (psi_t - psi) / dp
        p_prev, psi_prev = None, None

    stalled = False
    for _ in range(max_outer):
        cctx, state, rep = inner(p, best_state.x)
        bad = not rep.converged
        if not bad:
            psi, val = measures(cctx, state)
            bad = slid(val)
        if bad:
            if p_prev is None:
                raise SolveFailure("inner solve failed during p search")
            p_bad = p.copy()
            p = 0.5 * (p + p_prev)
            if float(np.max(np.abs(p - p_bad))) <= step_tol * step_tol:
                stalled = True
                break
            continue
        inner_counts.append(rep.iterations)
        if val < best_val:
            best_val, best_ctx, best_state = val, cctx, state
        if n == 1:
            denom = psi[0] - psi_prev[0]
            if denom == 0.0 or p[0] == p_prev[0]:
                stalled = not done(psi, val)
                break
            step = -psi[0] * (p[0] - p_prev[0]) / denom
            if abs(step) <= step_tol * max(1.0, p[0]) and done(psi, val):
                break
            step = float(np.clip(step, -0.5 * p[0], 0.5 * p[0]))
            p_prev, psi_prev = p.copy(), psi.copy()
            p = np.array([max(P_MIN, p[0] + step)])
        else:
            try:
                dp = np.linalg.solve(b, -psi)
            except np.linalg.LinAlgError:
                stalled = True
                break
            if float(np.max(np.abs(dp))) <= step_tol * max(1.0, float(np.max(np.abs(p)))) \
                    and done(psi, val):
                break
            dp = np.clip(dp, -0.5 * np.abs(p) - 1e-3, 0.5 * np.abs(p) + 1e-3)
            ct, st, rp = inner(p + dp, state.x)
            if not rp.converged:
                dp *= 0.5
                ct, st, rp = inner(p + dp, state.x)
                if not rp.converged:
                    stalled = True
                    break
            inner_counts.append(rp.iterations)
            psi_new, val2 = measures(ct, st)
            if slid(val2):
                stalled = True
                break
            y = psi_new - psi
            b += np.outer(y - b @ dp, dp) / float(dp @ dp)
            p = p + dp
            psi = psi_new
            cctx, state = ct, st
            if val2 < best_val:
                best_val, best_ctx, best_state = val2, cctx, state
    else:
        stalled = True

    if stalled and n == 1:
        # Energy along p1 is unimodal, so a bracket scan around the best
        # accepted point always lands.
        def en(p1):
            try:
                c, st, rp = inner(np.array([p1]), best_state.x)
            except SolveFailure:
                return math.inf
            if not rp.converged:
                return math.inf
            inner_counts.append(rp.iterations)
            return functional_value(st, c.mat, c.rule, c.tables)

        p_mid = best_ctx.spec.p[0]
        p = np.array([_golden_min(en, max(P_MIN, p_mid / 3.0), 3.0 * p_mid)])
        cctx, state, rep = inner(p, best_state.x)
        if not rep.converged:
            raise SolveFailure("p search could not recover")
        inner_counts.append(rep.iterations)
        psi, val = measures(cctx, state)
        if slid(val):
            cctx, state = best_ctx, best_state
    elif stalled:
        raise SolveFailure("parameter search stalled")

    _, rep = newton_solve(state.x, cctx, probe=probe)
    rep.final_p = cctx.spec.p
    rep.inner_iterations = inner_counts
    return cctx.state(state.x), rep


def _ladder_solve(ctx: SolveContext, probe: float | None):
    """Walk the basis size up from m = 1, embedding each converged state.

    High m shrinks the Newton basin faster than the m = 1 embed can cover,
    so the coarse solutions serve as predictors for the fine ones.
    """
    x = None
    state, rep = None, None
    for mm in range(1, ctx.spec.m + 1):
        c = ctx.with_spec(BasisSpec(ctx.spec.family, mm, ctx.spec.p))
        if x is None:
            x0 = initial_guess(c)
        else:
            x0 = np.zeros(2 * mm)
            x0[:mm - 1] = x[:mm - 1]
            x0[mm:2 * mm - 1] = x[mm - 1:]
        state, rep = newton_solve(x0, c, probe=probe if mm == ctx.spec.m else None)
        if not rep.converged:
            raise SolveFailure(
                f"no convergence at c = {c.load.c} while stepping m (failed at"
                f" m = {mm}): {rep.message}"
            )
        x = state.x
    return state, rep


def solve_membrane(mat: MaterialParams, load: LoadParams, family: str, m: int,
                   n_p: int = 1, p=None, quad: int | None = None,
                   probe: float | None = None):
    """One-call driver: pick rule, build guess, solve, tune p if steep.

    Returns (state, report).  For the steep family without fixed p the
    starting steepness comes from a polynomial predictor solve at the same
    load; optimization then zeroes the energy gradient in p.
    """
    if family == "polynomial" or p is not None:
        if family == "polynomial":
            spec = BasisSpec("polynomial", m)
            ctx = SolveContext(mat, load, spec, auto_rule(family, n=quad))
        else:
            spec = BasisSpec("adaptive", m, tuple(p))
            ctx = SolveContext(mat, load, spec, auto_rule(family, spec.p[0], quad))
        state, rep = newton_solve(initial_guess(ctx), ctx, probe=probe)
        if not rep.converged:
            state, rep = _ladder_solve(ctx, probe)
        return state, rep

    try:
        prev, _ = solve_membrane(mat, load, "polynomial", m, quad=quad)
    except SolveFailure:
        prev = None
    p1 = init_p1(prev, mat, load)
    spec = BasisSpec("adaptive", m, (p1,) + (0.0,) * (n_p - 1))
    ctx = SolveContext(mat, load, spec, auto_rule(family, p1, quad))
    return optimize_basis(ctx, probe=probe)

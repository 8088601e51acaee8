"""Limited-memory BFGS with a Wolfe line search, plus the multi-trial
driver that turns random restarts into a certified minimum.

The accepted-iterate loss sequence is strictly nonincreasing (the line
search only accepts sufficient decrease). Trials are independent given
their (seed, trial index) substream, so the driver's min-reduction is
order independent and may fan out across threads.
"""

from __future__ import annotations

import math
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import OptimizationError, SingularParameterError, UsageError
from .objective import LossKernel
from .rank_param import RankParams, build_state, trial_rng
from .subspace import Subspace
from .tensor_core import PureState

# Consecutive small relative-decrease iterations required to declare a plateau.
PLATEAU_WINDOW = 5
# Armijo and curvature constants of the line search.
ARMIJO_C1 = 1e-4
CURVATURE_C2 = 0.9
# In-trial reinitializations allowed after singular starting parameters.
MAX_REINITS = 3


@dataclass(frozen=True)
class OptimConfig:
    """Knobs of one certification run (defaults suit desk-scale problems)."""

    tol_grad: float = 1e-10       # l-infinity gradient norm
    tol_loss_rel: float = 1e-14   # relative loss decrease per iteration
    max_iters: int = 10000
    memory: int = 10              # curvature pairs kept
    trials: int = 3
    seed: int = 0
    init_scale: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if self.tol_grad <= 0 or self.tol_loss_rel <= 0 or self.init_scale <= 0:
            raise UsageError("tolerances and init_scale must be positive")
        if self.max_iters < 1 or self.memory < 1 or self.trials < 1 or self.workers < 1:
            raise UsageError("max_iters, memory, trials and workers must be >= 1")


@dataclass(frozen=True)
class LbfgsResult:
    x: np.ndarray
    value: float
    grad_inf: float
    iterations: int
    converged: bool
    reason: str
    values: tuple[float, ...]  # accepted-iterate loss sequence, x0 included


def _wolfe_line_search(evaluate, x, f0, g0, direction, t0):
    """Weak-Wolfe search along `direction` by bisection/doubling.

    `evaluate` returns (value, grad) or (inf, None) for points it cannot
    evaluate. Returns (t, x_t, f_t, g_t) or None if no acceptable point
    with sufficient decrease was found.
    """
    slope0 = float(np.dot(g0, direction))
    lo, hi = 0.0, math.inf
    t = t0
    best = None  # lowest-value point satisfying sufficient decrease
    for _ in range(60):
        xt = x + t * direction
        ft, gt = evaluate(xt)
        if not math.isfinite(ft) or ft > f0 + ARMIJO_C1 * t * slope0:
            hi = t
            t = 0.5 * (lo + hi)
            continue
        if best is None or ft < best[2]:
            best = (t, xt, ft, gt)
        if float(np.dot(gt, direction)) < CURVATURE_C2 * slope0:
            lo = t
            t = 2.0 * lo if math.isinf(hi) else 0.5 * (lo + hi)
            continue
        return t, xt, ft, gt
    if best is not None and best[2] < f0:
        return best
    return None


def _two_loop(grad, pairs):
    """Implicit inverse-Hessian product of the classic two-loop recursion."""
    q = grad.copy()
    alphas = []
    for s, yv, rho in reversed(pairs):
        a = rho * float(np.dot(s, q))
        q -= a * yv
        alphas.append(a)
    if pairs:
        s, yv, rho = pairs[-1]
        q *= float(np.dot(s, yv) / np.dot(yv, yv))
    for (s, yv, rho), a in zip(pairs, reversed(alphas)):
        b = rho * float(np.dot(yv, q))
        q += (a - b) * s
    return -q


def lbfgs_minimize(
    value_and_grad,
    x0: np.ndarray,
    *,
    tol_grad: float = 1e-10,
    tol_loss_rel: float = 1e-14,
    max_iters: int = 10000,
    memory: int = 10,
) -> LbfgsResult:
    """Minimize a smooth function given its exact value/gradient oracle.

    Termination reasons: `gradient-tolerance` (l-inf below tol_grad),
    `loss-plateau` (relative decrease below tol_loss_rel for
    PLATEAU_WINDOW consecutive accepted steps), `loss-floor` (no
    representable decrease exists along the model direction, i.e. the
    relative-decrease criterion holds vacuously at the float64 floor), or
    `iteration-cap`. A SingularParameterError from the initial evaluation
    propagates to the caller; trial points that raise it during the line
    search are treated as +inf and backtracked over.
    """
    x = np.array(x0, dtype=np.float64)
    f, g = value_and_grad(x)

    def evaluate(xt):
        try:
            return value_and_grad(xt)
        except SingularParameterError:
            return math.inf, None

    pairs: deque = deque(maxlen=memory)
    values = [float(f)]
    plateau = 0
    reason, converged = "iteration-cap", False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        g_inf = float(np.max(np.abs(g))) if g.size else 0.0
        if g_inf < tol_grad:
            reason, converged = "gradient-tolerance", True
            iterations -= 1
            break
        d = _two_loop(g, list(pairs))
        slope = float(np.dot(d, g))
        if not np.all(np.isfinite(d)) or slope >= 0.0:
            # fall back to steepest descent when the model direction degrades
            d = -g
            slope = -float(np.dot(g, g))
        t0 = 1.0 if pairs else min(1.0, 1.0 / max(1e-12, float(np.linalg.norm(g))))
        hit = _wolfe_line_search(evaluate, x, f, g, d, t0)
        if hit is None:
            reason, converged = "loss-floor", True
            iterations -= 1
            break
        _, xt, ft, gt = hit
        s = xt - x
        yv = gt - g
        sy = float(np.dot(s, yv))
        # skip curvature pairs that would break positive definiteness
        if sy > 1e-10 * float(np.linalg.norm(s) * np.linalg.norm(yv)):
            pairs.append((s, yv, 1.0 / sy))
        rel = (f - ft) / max(abs(f), abs(ft), 1e-300)
        plateau = plateau + 1 if rel < tol_loss_rel else 0
        x, f, g = xt, ft, gt
        values.append(float(f))
        if plateau >= PLATEAU_WINDOW:
            reason, converged = "loss-plateau", True
            break
    g_inf = float(np.max(np.abs(g))) if g.size else 0.0
    return LbfgsResult(x, float(f), g_inf, iterations, converged, reason, tuple(values))


@dataclass(frozen=True)
class TrialDiagnostics:
    value: float
    iterations: int
    converged: bool
    reason: str
    reinits: int
    failed: bool


@dataclass(frozen=True)
class OptimReport:
    """Best trial of a certification run plus per-trial diagnostics."""

    best_value: float
    best_params: RankParams
    best_state: PureState
    best_trial: int
    per_trial: tuple[TrialDiagnostics, ...]
    wall_time: float


def _minimize_kernel(kernel, rng, cfg: OptimConfig):
    """One trial against a prepared kernel: draw, minimize, reinit on
    singular starts (at most MAX_REINITS times)."""
    for reinit in range(MAX_REINITS + 1):
        x0 = rng.standard_normal(kernel.n_params) * cfg.init_scale
        try:
            res = lbfgs_minimize(
                kernel.value_and_grad,
                x0,
                tol_grad=cfg.tol_grad,
                tol_loss_rel=cfg.tol_loss_rel,
                max_iters=cfg.max_iters,
                memory=cfg.memory,
            )
        except SingularParameterError:
            continue
        diag = TrialDiagnostics(res.value, res.iterations, res.converged, res.reason, reinit, False)
        return res.x, diag
    diag = TrialDiagnostics(math.inf, 0, False, "singular-parameters", MAX_REINITS, True)
    return None, diag


def minimize_trial(
    sub: Subspace,
    dims,
    rank_budget: int,
    seed: int,
    cfg: OptimConfig,
    trial_index: int = 0,
) -> tuple[float, RankParams | None, TrialDiagnostics]:
    """Run one quasi-Newton trial from the (seed, trial_index) substream."""
    if rank_budget < 1:
        raise UsageError(f"rank budget must be >= 1, got {rank_budget}")
    kernel = LossKernel(dims, rank_budget, sub)
    rng = trial_rng(seed, trial_index)
    x, diag = _minimize_kernel(kernel, rng, cfg)
    params = None if x is None else RankParams(tuple(dims), rank_budget, x)
    return diag.value, params, diag


def run_certification(sub: Subspace, r: int, cfg: OptimConfig) -> OptimReport:
    """Geometric measure of r-bounded rank of a subspace: minimum of the
    complement-overlap loss over rank budget r - 1, across cfg.trials
    independent restarts."""
    if r < 2:
        raise UsageError(f"entanglement level r must be >= 2, got {r}")
    if sub.dim >= sub.dim_total:
        raise UsageError("the full space is trivially reachable; pass a proper subspace")
    start = time.perf_counter()
    kernel = LossKernel(sub.dims, r - 1, sub)

    def one_trial(index: int):
        rng = trial_rng(cfg.seed, index)
        return _minimize_kernel(kernel, rng, cfg)

    if cfg.workers > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(one_trial, range(cfg.trials)))
    else:
        outcomes = [one_trial(i) for i in range(cfg.trials)]

    diagnostics = tuple(d for _, d in outcomes)
    best_idx = -1
    for i, (x, d) in enumerate(outcomes):
        if x is None:
            continue
        if best_idx < 0 or d.value < diagnostics[best_idx].value:
            best_idx = i
    if best_idx < 0:
        raise OptimizationError("all optimization trials failed")
    best_x = outcomes[best_idx][0]
    best_params = RankParams(sub.dims, r - 1, best_x)
    return OptimReport(
        best_value=diagnostics[best_idx].value,
        best_params=best_params,
        best_state=build_state(best_params),
        best_trial=best_idx,
        per_trial=diagnostics,
        wall_time=time.perf_counter() - start,
    )

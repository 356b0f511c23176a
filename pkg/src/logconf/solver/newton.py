"""Newton-Raphson iteration and Weissenberg continuation."""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

from .linear import LinearConfig, LinearSolverError, solve_linear

log = logging.getLogger(__name__)


class NewtonError(RuntimeError):
    """Newton failure; ``state`` holds the last iterate."""

    def __init__(self, message: str, state: np.ndarray, history: "NewtonHistory"):
        super().__init__(message)
        self.state = state
        self.history = history


class ContinuationStall(RuntimeError):
    pass


class Problem(Protocol):
    def residual(self, z: np.ndarray) -> np.ndarray: ...
    def jacobian(self, z: np.ndarray): ...
    def free(self) -> np.ndarray: ...


@dataclass(frozen=True)
class NewtonConfig:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-10
    max_iter: int = 30
    line_search: str = "none"  # or "backtracking"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.line_search not in ("none", "backtracking"):
            raise ValueError(f"unknown line search {self.line_search!r}")


@dataclass
class NewtonHistory:
    residuals: list[float] = field(default_factory=list)
    linear_iters: list[int] = field(default_factory=list)
    steps: list[np.ndarray] = field(default_factory=list)
    seconds: float = 0.0
    keep_steps: bool = False

    @property
    def iterations(self) -> int:
        return len(self.residuals) - 1

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "residual", "gmres_iters"])
            for k, r in enumerate(self.residuals):
                w.writerow([k, f"{r:.6e}", self.linear_iters[k - 1] if k > 0 else 0])


def newton_solve(problem: Problem, state0: np.ndarray, newton_cfg: NewtonConfig = NewtonConfig(),
                 linear_cfg: LinearConfig = LinearConfig(), keep_steps: bool = False):
    """Solve ``R(z) = 0`` on the free dofs; Dirichlet entries of ``state0`` stay fixed.

    Returns ``(state, history)``. Converged when the residual 2-norm drops
    below ``abs_tol`` or below ``rel_tol`` times the initial norm.
    """
    t0 = time.perf_counter()
    z = np.array(state0, dtype=float, copy=True)
    free = problem.free()
    hist = NewtonHistory(keep_steps=keep_steps)
    r = problem.residual(z)
    rn = float(np.linalg.norm(r))
    hist.residuals.append(rn)
    r0 = rn
    while True:
        if not np.isfinite(rn):
            raise NewtonError("non-finite residual", z, hist)
        log.debug("newton %d: |R| = %.3e", hist.iterations, rn)
        if rn <= newton_cfg.abs_tol or rn <= newton_cfg.rel_tol * r0:
            break
        if hist.iterations >= newton_cfg.max_iter:
            raise NewtonError(f"no convergence in {newton_cfg.max_iter} iterations (|R| = {rn:.3e})", z, hist)
        J = problem.jacobian(z)
        try:
            dz, its = solve_linear(J, -r, linear_cfg)
        except LinearSolverError as exc:
            raise NewtonError(f"linear solver failed: {exc}", z, hist) from exc
        if keep_steps:
            hist.steps.append(dz)
        step = 1.0
        while True:
            trial = z.copy()
            trial[free] += step * dz
            try:
                r_new = problem.residual(trial)
                rn_new = float(np.linalg.norm(r_new))
            except (ArithmeticError, RuntimeError):
                rn_new = np.inf
            if newton_cfg.line_search == "none" or rn_new < (1 - 1e-4 * step) * rn or step < 1e-3:
                break
            step *= 0.5
        z, r, rn = trial, r_new, rn_new
        hist.residuals.append(rn)
        hist.linear_iters.append(its)
    hist.seconds = time.perf_counter() - t0
    return z, hist


def wi_continuation(solve_at: Callable[[float, np.ndarray], np.ndarray], wi_schedule: Sequence[float],
                    state0: np.ndarray, max_bisections: int = 3,
                    on_converged: Callable[[float, np.ndarray, object], None] | None = None) -> dict:
    """Warm-started sweep over ``wi_schedule``.

    ``solve_at(wi, start)`` returns ``(state, info)`` or raises. A failed step
    is retried from the last converged point with halved increments, up to
    ``max_bisections`` halvings, before ``ContinuationStall`` is raised.
    """
    sched = [float(w) for w in wi_schedule]
    if any(b <= a for a, b in zip(sched, sched[1:])) or (sched and sched[0] <= 0):
        raise ValueError("Weissenberg schedule must be positive and strictly increasing")
    results: dict[float, np.ndarray] = {}
    current, wi_prev = np.array(state0, dtype=float), 0.0
    for target in sched:
        depth = 0
        wi = target
        while True:
            try:
                state, info = solve_at(wi, current)
            except (NewtonError, FloatingPointError, ArithmeticError) as exc:
                depth += 1
                if depth > max_bisections:
                    raise ContinuationStall(
                        f"continuation stalled between Wi = {wi_prev:g} and Wi = {target:g}: {exc}") from exc
                wi = wi_prev + 0.5 * (wi - wi_prev)
                log.info("step failed, retrying at Wi = %g", wi)
                continue
            current, wi_prev = state, wi
            if wi == target:
                break
            wi = target  # intermediate point reached; aim at the target again
        results[target] = current
        if on_converged is not None:
            on_converged(target, current, info)
    return results

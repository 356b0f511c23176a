"""Weissenberg sweeps on the cylinder mesh and their file output."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..fem.postprocess import export_vtk, spd_violations
from ..fem.shape import triangle_rule
from ..mesh import Mesh
from ..solver import NewtonHistory
from .config import BenchConfig
from .problem import FlowProblem, load_mesh
from .quantities import drag_coefficient, wake_profile

log = logging.getLogger(__name__)

WAKE_HEADER = ("# s: arc length from the upstream stagnation point (-R, 0) over the cylinder, "
               "continued as pi*R + (x - R) along the centerline y = 0")


@dataclass
class DragResult:
    wi: float
    K: float
    mesh: str
    newton_iters: int
    seconds: float


@dataclass
class SweepResult:
    mesh: Mesh
    drag: list[DragResult] = field(default_factory=list)
    states: dict[float, np.ndarray] = field(default_factory=dict)
    histories: dict[float, NewtonHistory] = field(default_factory=dict)
    spd_violations: dict[float, int] = field(default_factory=dict)

    def k_of(self, wi: float) -> float:
        for r in self.drag:
            if abs(r.wi - wi) < 1e-9:
                return r.K
        raise KeyError(wi)


def _tag(wi: float) -> str:
    return f"wi{wi:.3f}"


def write_drag_csv(path, rows: list[DragResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["wi", "K", "newton_iters", "seconds"])
        for r in rows:
            w.writerow([f"{r.wi:g}", f"{r.K:.6f}", r.newton_iters, f"{r.seconds:.2f}"])


def read_drag_csv(path) -> dict[float, float]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or rows[0][:2] != ["wi", "K"]:
        raise ValueError(f"{path}: not a drag table")
    return {float(r[0]): float(r[1]) for r in rows[1:]}


def write_wake_csv(path, profile: dict[str, np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(WAKE_HEADER + "\n")
        w = csv.writer(fh)
        w.writerow(["s", "x", "T11"])
        for s, x, t in zip(profile["s"], profile["x"], profile["T11"]):
            w.writerow([f"{s:.8g}", f"{x:.8g}", f"{t:.10g}"])


def run_cylinder(cfg: BenchConfig, mesh: Mesh | None = None, out_dir=None, vtk: bool = True,
                 wake_samples: int = 200) -> SweepResult:
    """Continuation over ``cfg.wi_schedule``; files go to ``out_dir`` when given.

    Per Weissenberg number the output holds one Newton history CSV, one wake
    CSV and optionally a VTK snapshot; ``drag.csv`` is rewritten after every
    converged point so a stalled sweep still leaves its finished rows.
    """
    mesh = mesh if mesh is not None else load_mesh(cfg.mesh, cfg.R)
    problem = FlowProblem(mesh, cfg)
    result = SweepResult(mesh)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    qpts = triangle_rule(5).points

    def on_converged(wi, state, info):
        params = cfg.params(wi)
        k = drag_coefficient(mesh, state, params, cfg.ubar)
        result.drag.append(DragResult(wi, k, mesh.name, info.history.iterations, info.seconds))
        result.states[wi] = state
        result.histories[wi] = info.history
        result.spd_violations[wi] = spd_violations(mesh, state, qpts)
        log.info("Wi = %g: K = %.4f", wi, k)
        if out is None:
            return
        write_drag_csv(out / "drag.csv", result.drag)
        info.history.write_csv(out / f"newton_{_tag(wi)}.csv")
        write_wake_csv(out / f"wake_{_tag(wi)}.csv", wake_profile(mesh, state, params, wake_samples))
        if vtk:
            export_vtk(mesh, state, out / f"state_{_tag(wi)}.vtk", params, title=f"{mesh.name} Wi={wi:g}")

    problem.continuation(on_converged=on_converged)
    return result

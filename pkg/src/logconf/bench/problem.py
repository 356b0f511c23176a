"""Discrete confined-cylinder and channel problems."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..constitutive import FluidParams
from ..fem.assembly import Assembler
from ..fem.dofmap import DofMap, apply_dirichlet
from ..fem.kernel import AssemblyOptions
from ..mesh import BoundaryTag, Mesh, import_gmsh, mesh_for_class
from ..mesh.generate import MESH_CLASSES
from ..solver import NewtonHistory, newton_solve, wi_continuation
from .config import BenchConfig
from .inflow import inflow_psi, inflow_velocity

log = logging.getLogger(__name__)


def load_mesh(spec: str, R: float = 1.0) -> Mesh:
    """Mesh class name (``M1``..) or path to an MSH 2.2 file."""
    if spec.upper() in MESH_CLASSES:
        return mesh_for_class(spec.upper(), R)
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(f"mesh file not found: {spec}")
    return import_gmsh(path, cylinder_radius=R)


def benchmark_bcs(cfg: BenchConfig, lam: float, outflow_u: bool = False) -> dict:
    """Dirichlet data: analytic inflow, no-slip walls and cylinder, symmetry, outflow ``v = 0``."""
    def psi(y):
        return inflow_psi(y, lam, cfg.ubar, cfg.R)

    inflow = {
        "u": lambda x, y: inflow_velocity(y, cfg.ubar, cfg.R),
        "v": 0.0,
        "psi11": lambda x, y: psi(y).xx,
        "psi12": lambda x, y: psi(y).xy,
        "psi22": lambda x, y: psi(y).yy,
    }
    bcs = {
        BoundaryTag.INFLOW: inflow,
        BoundaryTag.WALL: {"u": 0.0, "v": 0.0},
        BoundaryTag.CYLINDER: {"u": 0.0, "v": 0.0},
        BoundaryTag.SYMMETRY: {"v": 0.0, "psi12": 0.0},
        BoundaryTag.OUTFLOW: {"v": 0.0},
    }
    if outflow_u:
        bcs[BoundaryTag.OUTFLOW] = {"u": inflow["u"], "v": 0.0}
    return bcs


@dataclass
class SolveInfo:
    wi: float
    history: NewtonHistory
    seconds: float


class FlowProblem:
    """A mesh with benchmark boundary data, solvable at any Weissenberg number.

    ``pin_pressure`` fixes ``p = 0`` at one outflow node, needed when every
    velocity component is prescribed on the boundary.
    """

    def __init__(self, mesh: Mesh, cfg: BenchConfig, outflow_u: bool = False, pin_pressure: bool = False):
        self.mesh = mesh
        self.cfg = cfg
        self.outflow_u = outflow_u
        self.dofmap = DofMap(mesh.n_nodes)
        self.pinned = None
        if pin_pressure:
            corner = mesh.nodes_with(BoundaryTag.OUTFLOW)
            self.pinned = int(corner[np.argmin(mesh.nodes[corner, 1])])
        self._base = None
        self.options = AssemblyOptions(creeping=cfg.creeping)

    def apply_bcs(self, state: np.ndarray, wi: float) -> np.ndarray:
        z = apply_dirichlet(self.mesh, self.dofmap, state, benchmark_bcs(self.cfg, self.cfg.lam(wi), self.outflow_u))
        if self.pinned is not None:
            idx = self.dofmap.index(self.pinned, "p")
            z[idx] = 0.0
            self.dofmap.dirichlet[idx] = True
        return z

    def assembler(self, wi: float) -> Assembler:
        params = self.cfg.params(wi)
        if self._base is None:
            self._base = Assembler(self.mesh, self.dofmap, params, self.options)
            return self._base
        return self._base.with_params(params)

    def initial_state(self, wi: float) -> np.ndarray:
        return self.apply_bcs(np.zeros(self.dofmap.n_dofs), wi)

    def solve(self, wi: float, start: np.ndarray | None = None, keep_steps: bool = False):
        t0 = time.perf_counter()
        z0 = self.apply_bcs(self.initial_state(wi) if start is None else start, wi)
        z, hist = newton_solve(self.assembler(wi), z0, self.cfg.newton, self.cfg.linear, keep_steps=keep_steps)
        info = SolveInfo(wi, hist, time.perf_counter() - t0)
        log.info("Wi = %g: %d Newton iterations, |R| = %.2e, %.1f s",
                 wi, hist.iterations, hist.residuals[-1], info.seconds)
        return z, info

    def solve_newtonian(self):
        """Stokes flow with Psi clamped to zero, the ``lambda -> 0`` reference.

        The polymer then carries no stress, so the drag of this state scales
        with the solvent viscosity alone.
        """
        wi = self.cfg.wi_schedule[0]
        z0 = self.initial_state(wi)
        psi = self.dofmap.index(np.arange(self.mesh.n_nodes)[:, None], np.array([3, 4, 5]))
        z0[psi] = 0.0
        mask = self.dofmap.dirichlet.copy()
        self.dofmap.dirichlet[psi] = True
        try:
            return newton_solve(self.assembler(wi), z0, self.cfg.newton, self.cfg.linear)
        finally:
            self.dofmap.dirichlet = mask

    def params(self, wi: float) -> FluidParams:
        return self.cfg.params(wi)

    def continuation(self, schedule=None, state0=None, on_converged=None, max_bisections: int = 3):
        schedule = list(self.cfg.wi_schedule if schedule is None else schedule)
        start = self.initial_state(schedule[0]) if state0 is None else state0
        return wi_continuation(lambda wi, s: self.solve(wi, s), schedule, start,
                               max_bisections=max_bisections, on_converged=on_converged)

"""Creeping Oldroyd-B channel flow checked against the analytic Poiseuille solution."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..fem.assembly import Assembler
from ..fem.postprocess import spd_violations
from ..fem.shape import triangle_rule
from ..mesh import gen_channel_mesh
from ..solver import NewtonConfig, NewtonError
from .config import BenchConfig
from .inflow import inflow_psi, inflow_velocity
from .problem import FlowProblem


@dataclass(frozen=True)
class ChannelConfig:
    """Channel ``[0, length] x [0, height]`` with the symmetry line at ``y = 0``.

    ``height`` doubles as the cylinder radius of the benchmark scaling, so the
    inflow profile is the benchmark one with ``R = height / 2``.
    """

    wi: tuple[float, ...] = (0.1, 0.3, 0.6)
    length: float = 30.0
    height: float = 2.0
    nx: int = 60
    ny: tuple[int, int] = (8, 16)
    beta: float = 0.59
    ubar: float = 1.0
    newton: NewtonConfig = field(default_factory=lambda: NewtonConfig(abs_tol=1e-8))

    @property
    def R(self) -> float:
        return 0.5 * self.height


@dataclass
class ChannelCase:
    wi: float
    ny: int
    velocity_error: float
    psi_l2_error: float
    newton_iterations: int
    final_residual: float
    spd_violations: int
    seconds: float


@dataclass
class ChannelReport:
    cases: list[ChannelCase]

    def case(self, wi: float, ny: int) -> ChannelCase:
        for c in self.cases:
            if math.isclose(c.wi, wi) and c.ny == ny:
                return c
        raise KeyError((wi, ny))

    def psi_order(self, wi: float, coarse: int, fine: int) -> float:
        """Observed L2 order of Psi between two meshes, ``fine = 2 * coarse`` assumed."""
        e0 = self.case(wi, coarse).psi_l2_error
        e1 = self.case(wi, fine).psi_l2_error
        return math.log(e0 / e1, fine / coarse)

    def lines(self) -> list[str]:
        out = [f"{'Wi':>5} {'ny':>4} {'|u-u*|max':>11} {'|Psi-Psi*|L2':>13} {'newton':>6} {'spd':>4} {'s':>6}"]
        for c in self.cases:
            out.append(f"{c.wi:5.2f} {c.ny:4d} {c.velocity_error:11.3e} {c.psi_l2_error:13.4e} "
                       f"{c.newton_iterations:6d} {c.spd_violations:4d} {c.seconds:6.1f}")
        return out


def psi_l2_error(assembler: Assembler, state: np.ndarray, lam: float, ubar: float, R: float) -> float:
    s = assembler.qp_state(state)
    y = assembler.q.x[..., 1].ravel()
    exact = inflow_psi(y, lam, ubar, R)
    d2 = (s[:, 3] - exact.xx) ** 2 + 2.0 * (s[:, 4] - exact.xy) ** 2 + (s[:, 5] - exact.yy) ** 2
    return float(np.sqrt(d2 @ assembler.q.wdet.ravel()))


def solve_channel(cfg: ChannelConfig, wi: float, ny: int) -> ChannelCase:
    """One Newton solve from the rest state.

    Every velocity component is prescribed on the boundary (the outflow
    included, since the exact solution carries a y-dependent normal stress
    there), so the pressure is pinned at one outflow node.
    """
    t0 = time.perf_counter()
    mesh = gen_channel_mesh(cfg.length, cfg.height, cfg.nx, ny)
    bench = BenchConfig(R=cfg.R, ubar=cfg.ubar, beta=cfg.beta, newton=cfg.newton)
    problem = FlowProblem(mesh, bench, outflow_u=True, pin_pressure=True)
    state, info = problem.solve(wi)
    x, y = mesh.nodes.T
    z = state.reshape(-1, 6)
    u_err = max(np.abs(z[:, 0] - inflow_velocity(y, cfg.ubar, cfg.R)).max(), np.abs(z[:, 1]).max())
    lam = bench.lam(wi)
    asm = problem.assembler(wi)
    return ChannelCase(
        wi=wi, ny=ny,
        velocity_error=float(u_err),
        psi_l2_error=psi_l2_error(asm, state, lam, cfg.ubar, cfg.R),
        newton_iterations=info.history.iterations,
        final_residual=info.history.residuals[-1],
        spd_violations=spd_violations(mesh, state, triangle_rule(5).points),
        seconds=time.perf_counter() - t0,
    )


def run_channel_verification(config: ChannelConfig | None = None) -> ChannelReport:
    """Solve every (Wi, ny) pair of ``config``; Newton failures propagate."""
    cfg = config or ChannelConfig()
    cases = []
    for wi in cfg.wi:
        for ny in cfg.ny:
            cases.append(solve_channel(cfg, wi, ny))
    return ChannelReport(cases)


__all__ = ["ChannelCase", "ChannelConfig", "ChannelReport", "NewtonError", "psi_l2_error",
           "run_channel_verification", "solve_channel"]

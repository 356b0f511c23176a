"""Drag coefficient and polymeric-stress wake profiles."""
from __future__ import annotations

import numpy as np

from ..constitutive import FluidParams
from ..fem.dofmap import N_DOF_PER_NODE
from ..fem.postprocess import PointLocator, edge_quadrature, evaluate_field
from ..matfun import expm_sym
from ..mesh import BoundaryTag, Mesh
from ..tensor2 import SymTensor2


class MissingCylinderError(ValueError):
    pass


def drag_coefficient(mesh: Mesh, state: np.ndarray, params: FluidParams, ubar: float) -> float:
    """``K = 2/(mu ubar) * int e_x . [-p I + 2 mu_s eps(u) + mu_p/lam (e^Psi - I)] n``
    over the half cylinder, with ``n`` the unit normal out of the cylinder."""
    if BoundaryTag.CYLINDER not in mesh.tags_present():
        raise MissingCylinderError("mesh has no cylinder boundary")
    eq = edge_quadrature(mesh, BoundaryTag.CYLINDER, npts=4)
    z = np.asarray(state).reshape(-1, N_DOF_PER_NODE)[mesh.elements[eq.elements]]  # (B, 6, 6)
    vals = np.einsum("bqa,bac->bqc", eq.N, z)
    grads = np.einsum("bqai,bac->bqci", eq.G, z)
    p = vals[..., 2]
    sig = expm_sym(SymTensor2(vals[..., 3], vals[..., 4], vals[..., 5]))
    ux, uy, vx = grads[..., 0, 0], grads[..., 0, 1], grads[..., 1, 0]
    cp = params.mu_p / params.lam
    txx = -p + 2.0 * params.mu_s * ux + cp * (sig.xx - 1.0)
    txy = params.mu_s * (uy + vx) + cp * sig.xy
    radius = np.linalg.norm(eq.x, axis=-1)
    nx, ny = eq.x[..., 0] / radius, eq.x[..., 1] / radius
    force = np.sum((txx * nx + txy * ny) * eq.weights)
    return float(2.0 * force / (params.mu * ubar))


def polymer_t11(params: FluidParams, psi: SymTensor2) -> np.ndarray:
    return params.mu_p / params.lam * (expm_sym(psi).xx - 1.0)


def wake_profile(mesh: Mesh, state: np.ndarray, params: FluidParams, samples: int = 200,
                 x_end: float | None = None) -> dict[str, np.ndarray]:
    """T11 along the cylinder surface and then along the downstream centerline.

    The arc parameter ``s`` starts at the upstream stagnation point
    ``(-R, 0)``; it reaches ``pi R`` at the rear stagnation point and then
    continues as ``pi R + (x - R)`` on ``y = 0``.
    """
    R = mesh.cylinder_radius
    if R is None:
        raise MissingCylinderError("wake profile needs a cylinder mesh")
    x_end = 15.0 * R if x_end is None else x_end
    loc = PointLocator(mesh)
    n_arc = samples // 2
    theta = np.linspace(np.pi, 0.0, n_arc)
    arc_pts = np.column_stack([R * np.cos(theta), R * np.sin(theta)])
    line_x = np.linspace(R, x_end, samples - n_arc + 1)[1:]
    pts = np.vstack([arc_pts, np.column_stack([line_x, np.zeros_like(line_x)])])
    s = np.concatenate([R * (np.pi - theta), np.pi * R + (line_x - R)])
    t11 = np.empty(len(pts))
    for i, pt in enumerate(pts):
        f = evaluate_field(mesh, state, pt, loc)
        t11[i] = params.mu_p / params.lam * (f.sigma.xx - 1.0)
    return {"s": s, "x": pts[:, 0], "y": pts[:, 1], "T11": t11}

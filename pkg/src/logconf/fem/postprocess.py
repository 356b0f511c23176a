"""Point evaluation, boundary quadrature and VTK output of P2 fields."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from ..matfun import expm_sym
from ..mesh import BoundaryTag, Mesh
from ..tensor2 import SymTensor2
from .dofmap import FIELDS, N_DOF_PER_NODE
from .geometry import element_geometry
from .shape import EDGES, NODE_COORDS, line_rule, shape_p2

SUBTRIANGLES = ((0, 3, 5), (3, 1, 4), (5, 4, 2), (3, 4, 5))


class PointOutsideDomainError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSample:
    u: float
    v: float
    p: float
    psi: SymTensor2
    sigma: SymTensor2


class PointLocator:
    """Walk search over vertex triangles, refined by inverting the P2 map."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        verts = mesh.elements[:, :3]
        self.tree = cKDTree(mesh.nodes[verts].mean(axis=1))
        # neighbour across the edge opposite vertex k
        self.neighbors = np.full((mesh.n_elements, 3), -1, dtype=np.int64)
        owner: dict[tuple[int, int], tuple[int, int]] = {}
        for e, tri in enumerate(verts):
            for k in range(3):
                key = tuple(sorted((tri[(k + 1) % 3], tri[(k + 2) % 3])))
                if key in owner:
                    f, j = owner.pop(key)
                    self.neighbors[e, k] = f
                    self.neighbors[f, j] = e
                else:
                    owner[key] = (e, k)

    def _bary(self, e: int, pt: np.ndarray) -> np.ndarray:
        a, b, c = self.mesh.nodes[self.mesh.elements[e, :3]]
        m = np.column_stack([b - a, c - a])
        xi = np.linalg.solve(m, pt - a)
        return np.array([1.0 - xi.sum(), xi[0], xi[1]])

    def _invert(self, e: int, pt: np.ndarray, guess: np.ndarray) -> np.ndarray:
        coords = self.mesh.nodes[self.mesh.elements[e]]
        xi = guess.copy()
        for _ in range(30):
            N, dN, _ = shape_p2(xi)
            r = N @ coords - pt
            if np.linalg.norm(r) < 1e-14 * (1.0 + np.linalg.norm(pt)):
                break
            xi = xi - np.linalg.solve(coords.T @ dN, r)
        return xi

    def locate(self, point, tol: float = 1e-10) -> tuple[int, np.ndarray]:
        """Element id and reference coordinates of ``point``."""
        pt = np.asarray(point, dtype=float)
        _, e = self.tree.query(pt)
        e = int(e)
        visited = set()
        while e not in visited:
            visited.add(e)
            lam = self._bary(e, pt)
            k = int(np.argmin(lam))
            if lam[k] >= -tol:
                break
            nb = self.neighbors[e, k]
            if nb < 0:
                break
            e = int(nb)
        lam = self._bary(e, pt)
        xi = lam[1:]
        if self.mesh.curved.any():
            xi = self._invert(e, pt, xi)
        if xi.min() < -1e-8 or xi.sum() > 1.0 + 1e-8:
            # the walk can stall at concave boundaries; fall back to nearby elements
            for cand in self.tree.query(pt, k=min(16, self.mesh.n_elements))[1]:
                lam = self._bary(int(cand), pt)
                if lam.min() >= -1e-8:
                    e = int(cand)
                    xi = self._invert(e, pt, lam[1:])
                    if xi.min() >= -1e-8 and xi.sum() <= 1.0 + 1e-8:
                        return e, xi
            raise PointOutsideDomainError(f"point {tuple(pt)} is outside the domain")
        return e, xi


def evaluate_field(mesh: Mesh, state: np.ndarray, point, locator: PointLocator | None = None) -> FieldSample:
    """P2 interpolation of (u, v, p, Psi) at ``point`` and ``sigma = exp(Psi)``."""
    locator = locator or PointLocator(mesh)
    e, xi = locator.locate(point)
    N = shape_p2(xi)[0]
    vals = N @ np.asarray(state).reshape(-1, N_DOF_PER_NODE)[mesh.elements[e]]
    psi = SymTensor2(vals[3], vals[4], vals[5])
    return FieldSample(float(vals[0]), float(vals[1]), float(vals[2]), psi, expm_sym(psi))


@dataclass
class EdgeQuadrature:
    """Quadrature on a set of boundary edges, evaluated inside the owning elements."""

    elements: np.ndarray  # (B,)
    N: np.ndarray         # (B, Q, 6)
    G: np.ndarray         # (B, Q, 6, 2)
    x: np.ndarray         # (B, Q, 2)
    weights: np.ndarray   # (B, Q) quadrature weight times |dx/dt|
    tangent: np.ndarray   # (B, Q, 2) unit tangent


def edge_quadrature(mesh: Mesh, tag: BoundaryTag, npts: int = 4) -> EdgeQuadrature:
    rule = line_rule(npts)
    idx = np.nonzero(mesh.boundary_tags == tag)[0]
    if idx.size == 0:
        raise ValueError(f"mesh has no {tag.label} edges")
    owner = mesh.element_of_boundary_edge()[idx]
    Ns, Gs, xs, ws, ts = [], [], [], [], []
    for (e, k), be in zip(owner, idx):
        a_loc, b_loc, _ = EDGES[k]
        el = mesh.elements[e]
        if el[a_loc] != mesh.boundary_edges[be, 0]:
            a_loc, b_loc = b_loc, a_loc
        ra, rb = NODE_COORDS[a_loc], NODE_COORDS[b_loc]
        ref = ra[None] + rule.points[:, None] * (rb - ra)[None]
        coords = mesh.nodes[el][None]
        N, G, _, _, x = element_geometry(coords, ref)
        _, dN, _ = shape_p2(ref)
        dxdt = np.einsum("ai,qaj,j->qi", coords[0], dN, rb - ra)
        speed = np.linalg.norm(dxdt, axis=1)
        Ns.append(N)
        Gs.append(G[0])
        xs.append(x[0])
        ws.append(rule.weights * speed)
        ts.append(dxdt / speed[:, None])
    return EdgeQuadrature(owner[:, 0], np.array(Ns), np.array(Gs), np.array(xs), np.array(ws), np.array(ts))


def spd_violations(mesh: Mesh, state: np.ndarray, quad_points: np.ndarray) -> int:
    """Number of quadrature points where ``exp(Psi^h)`` fails to be SPD."""
    N = shape_p2(quad_points)[0]
    z = np.asarray(state).reshape(-1, N_DOF_PER_NODE)[mesh.elements]
    vals = np.einsum("qa,eac->eqc", N, z)
    sig = expm_sym(SymTensor2(vals[..., 3], vals[..., 4], vals[..., 5]))
    ok = np.isfinite(sig.xx) & np.isfinite(sig.xy) & np.isfinite(sig.yy) & (sig.xx > 0) & (sig.det() > 0)
    return int((~ok).sum())


def export_vtk(mesh: Mesh, state: np.ndarray, path, params=None, title: str = "logconf") -> Path:
    """Legacy ASCII VTK with each P2 triangle split into four linear ones."""
    path = Path(path)
    z = np.asarray(state).reshape(-1, N_DOF_PER_NODE)
    psi = SymTensor2(z[:, 3], z[:, 4], z[:, 5])
    sig = expm_sym(psi)
    cells = mesh.elements[:, SUBTRIANGLES].reshape(-1, 3)
    lines = ["# vtk DataFile Version 2.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID",
             f"POINTS {mesh.n_nodes} double"]
    lines += [f"{x:.12g} {y:.12g} 0" for x, y in mesh.nodes]
    lines.append(f"CELLS {len(cells)} {4 * len(cells)}")
    lines += [f"3 {a} {b} {c}" for a, b, c in cells]
    lines.append(f"CELL_TYPES {len(cells)}")
    lines += ["5"] * len(cells)
    lines.append(f"POINT_DATA {mesh.n_nodes}")
    lines.append("VECTORS velocity double")
    lines += [f"{u:.12g} {v:.12g} 0" for u, v in z[:, :2]]

    def scalar(name, data):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(f"{d:.12g}" for d in data)

    scalar("p", z[:, 2])
    for k, name in enumerate(FIELDS[3:]):
        scalar(name, z[:, 3 + k])
    scalar("sigma11", sig.xx)
    scalar("sigma12", sig.xy)
    scalar("sigma22", sig.yy)
    if params is not None:
        scalar("T11", params.mu_p / params.lam * (sig.xx - 1.0))
    path.write_text("\n".join(lines) + "\n")
    return path

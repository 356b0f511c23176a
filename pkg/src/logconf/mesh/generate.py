"""Structured P2 meshes for the channel and the confined-cylinder geometry."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..fem.shape import EDGES
from .core import BoundaryTag, InvertedElementError, Mesh, MeshError, validate


def _p1_to_p2(points: np.ndarray, tris: np.ndarray,
              classify: Callable[[np.ndarray], BoundaryTag | None],
              arc_radius: float | None = None, name: str = "mesh") -> Mesh:
    """Enrich a linear triangulation with edge midnodes and tag its boundary.

    Boundary edges classified as CYLINDER get their midnode on the circle of
    radius ``arc_radius`` centered at the origin.
    """
    tris = np.asarray(tris, dtype=np.int64)
    # counter-clockwise orientation
    p = points[tris]
    area2 = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
             - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    flip = area2 < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]

    local = [(a, b) for a, b, _ in EDGES]
    pairs = np.concatenate([np.sort(tris[:, [a, b]], axis=1) for a, b in local])
    uniq, inverse, counts = np.unique(pairs, axis=0, return_inverse=True, return_counts=True)
    n_vert = len(points)
    mids = 0.5 * (points[uniq[:, 0]] + points[uniq[:, 1]])

    boundary = np.nonzero(counts == 1)[0]
    tags = []
    curved = []
    for idx in boundary:
        tag = classify(mids[idx])
        if tag is None:
            raise MeshError(f"cannot classify boundary edge at {mids[idx]}")
        tags.append(tag)
        is_arc = tag == BoundaryTag.CYLINDER and arc_radius is not None
        if is_arc:
            a, b = points[uniq[idx, 0]], points[uniq[idx, 1]]
            ang = math.atan2(a[1], a[0]), math.atan2(b[1], b[0])
            mid_ang = 0.5 * (ang[0] + ang[1])
            mids[idx] = arc_radius * np.array([math.cos(mid_ang), math.sin(mid_ang)])
        curved.append(is_arc)

    nodes = np.vstack([points, mids])
    edge_ids = inverse.reshape(len(local), len(tris)).T + n_vert
    elements = np.hstack([tris, edge_ids])
    bedges = np.column_stack([uniq[boundary, 0], uniq[boundary, 1], boundary + n_vert])
    mesh = Mesh(nodes, elements, bedges, np.array(tags, dtype=np.int64),
                np.array(curved, dtype=bool), cylinder_radius=arc_radius, name=name)
    return mesh


def _quad_split(idx: np.ndarray, pts: np.ndarray, alternate: bool = False) -> np.ndarray:
    """Split a structured (ni+1, nj+1) grid of point ids into triangles."""
    ni, nj = idx.shape[0] - 1, idx.shape[1] - 1
    tris = []
    for i in range(ni):
        for j in range(nj):
            a, b, c, d = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
            if alternate:
                diag_ac = (i + j) % 2 == 0
            else:
                diag_ac = np.linalg.norm(pts[a] - pts[c]) <= np.linalg.norm(pts[b] - pts[d])
            if diag_ac:
                tris += [(a, b, c), (a, c, d)]
            else:
                tris += [(a, b, d), (b, c, d)]
    return np.array(tris, dtype=np.int64)


def gen_channel_mesh(length: float, height: float, nx: int, ny: int) -> Mesh:
    """Structured mesh of ``[0, L] x [0, H]`` with alternating diagonals.

    Tags: x=0 inflow, x=L outflow, y=H wall, y=0 symmetry.
    """
    if length <= 0 or height <= 0:
        raise ValueError("channel dimensions must be positive")
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be at least 1")
    xs = np.linspace(0.0, length, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange(len(pts)).reshape(nx + 1, ny + 1)
    tris = _quad_split(idx, pts, alternate=True)
    tol = 1e-9 * max(length, height)

    def classify(m):
        if abs(m[0]) < tol:
            return BoundaryTag.INFLOW
        if abs(m[0] - length) < tol:
            return BoundaryTag.OUTFLOW
        if abs(m[1] - height) < tol:
            return BoundaryTag.WALL
        if abs(m[1]) < tol:
            return BoundaryTag.SYMMETRY
        return None

    mesh = _p1_to_p2(pts, tris, classify, name=f"channel-{nx}x{ny}")
    validate(mesh)
    return mesh


@dataclass(frozen=True)
class GradingParams:
    """Layout of the block-structured cylinder mesh (lengths in units of R).

    The half-annulus between the cylinder and the box ``[-box, box] x [0, 2]``
    carries ``n_cyl`` arc segments and ``n_cyl * radial_fraction`` graded
    layers. Upstream and downstream channel blocks are graded geometrically
    away from the box.
    """

    box: float = 2.0
    radial_fraction: float = 0.25
    radial_ratio: float = 1.12
    stream_ratio: float = 1.05
    wake_ratio: float = 1.04
    channel_half_length: float = 15.0
    reference_n_cyl: int = 48

    def ratio(self, base: float, n_cyl: int) -> float:
        # doubling n_cyl takes the square root of each growth ratio
        return base ** (self.reference_n_cyl / n_cyl)


def _graded(n: int, ratio: float) -> np.ndarray:
    """n+1 points on [0, 1], cell sizes growing by ``ratio``."""
    if abs(ratio - 1.0) < 1e-12:
        return np.linspace(0.0, 1.0, n + 1)
    w = ratio ** np.arange(n)
    return np.concatenate([[0.0], np.cumsum(w) / w.sum()])


def _graded_count(length: float, h0: float, ratio: float) -> int:
    if abs(ratio - 1.0) < 1e-12:
        return max(1, round(length / h0))
    return max(1, round(math.log(1.0 + length * (ratio - 1.0) / h0) / math.log(ratio)))


def gen_cylinder_mesh(R: float = 1.0, n_cyl: int = 48,
                      grading: GradingParams | None = None) -> Mesh:
    """Confined half-cylinder mesh on ``[-15R, 15R] x [0, 2R]`` minus the half disc.

    ``n_cyl`` P2 edges of equal angle cover the half-cylinder; doubling it
    halves every spacing.
    """
    g = grading or GradingParams()
    if n_cyl < 8 or n_cyl % 2:
        raise ValueError("n_cyl must be an even integer >= 8")
    if R <= 0:
        raise ValueError("R must be positive")
    a = g.box
    if not 1.0 < a < g.channel_half_length:
        raise ValueError("box half-width must lie between R and the channel half-length")

    n_side = max(1, round(n_cyl * 2.0 / (4.0 + 2.0 * a)))
    n_top = n_cyl - 2 * n_side
    if n_top < 2:
        raise ValueError("n_cyl too small for the box layout")
    n_rad = max(2, round(n_cyl * g.radial_fraction))

    # arc from the upstream stagnation point (angle pi) to the rear one (angle 0)
    theta = np.linspace(math.pi, 0.0, n_cyl + 1)
    arc = np.column_stack([np.cos(theta), np.sin(theta)])
    left = np.column_stack([np.full(n_side + 1, -a), np.linspace(0.0, 2.0, n_side + 1)])
    top = np.column_stack([np.linspace(-a, a, n_top + 1), np.full(n_top + 1, 2.0)])
    right = np.column_stack([np.full(n_side + 1, a), np.linspace(2.0, 0.0, n_side + 1)])
    box = np.vstack([left, top[1:], right[1:]])

    t = _graded(n_rad, g.ratio(g.radial_ratio, n_cyl))
    ogrid = arc[:, None, :] + t[None, :, None] * (box - arc)[:, None, :]  # (n_cyl+1, n_rad+1, 2)

    pts = [ogrid.reshape(-1, 2)]
    o_idx = np.arange((n_cyl + 1) * (n_rad + 1)).reshape(n_cyl + 1, n_rad + 1)
    tris = [_quad_split(o_idx, pts[0])]
    offset = o_idx.size

    h_side = 2.0 / n_side
    ys = np.linspace(0.0, 2.0, n_side + 1)
    span = g.channel_half_length - a

    def channel_block(x0_sign: int, ratio: float, share_col: np.ndarray):
        nonlocal offset
        n = _graded_count(span, h_side, ratio)
        s = _graded(n, ratio) * span
        xs = x0_sign * (a + s)  # column 0 is the box side
        X, Y = np.meshgrid(xs[1:], ys, indexing="ij")
        new = np.column_stack([X.ravel(), Y.ravel()])
        ids = np.vstack([share_col[None, :], offset + np.arange(new.shape[0]).reshape(n, n_side + 1)])
        offset += new.shape[0]
        return new, ids

    # box-side columns of the O-grid outer ring, ordered by increasing y
    outer = o_idx[:, -1]
    left_col = outer[: n_side + 1]
    right_col = outer[n_side + n_top:][::-1]

    up_pts, up_ids = channel_block(-1, g.ratio(g.stream_ratio, n_cyl), left_col)
    pts.append(up_pts)
    all_pts = np.vstack(pts)
    tris.append(_quad_split(up_ids, all_pts))
    dn_pts, dn_ids = channel_block(+1, g.ratio(g.wake_ratio, n_cyl), right_col)
    pts.append(dn_pts)
    all_pts = np.vstack(pts)
    tris.append(_quad_split(dn_ids, all_pts))
    tri = np.vstack(tris)

    L = g.channel_half_length
    tol = 1e-9

    def classify(m):
        if abs(m[0] + L) < tol:
            return BoundaryTag.INFLOW
        if abs(m[0] - L) < tol:
            return BoundaryTag.OUTFLOW
        if abs(m[1] - 2.0) < tol:
            return BoundaryTag.WALL
        if abs(m[1]) < tol and abs(m[0]) >= 1.0 - tol:
            return BoundaryTag.SYMMETRY
        if np.hypot(*m) < 1.0 + 1e-6:
            return BoundaryTag.CYLINDER
        return None

    mesh = _p1_to_p2(all_pts, tri, classify, arc_radius=1.0, name=f"cylinder-{n_cyl}")
    mesh.nodes *= R
    mesh.cylinder_radius = R
    try:
        validate(mesh, set(BoundaryTag))
    except InvertedElementError as exc:
        raise InvertedElementError(f"grading produces inverted elements: {exc}") from exc
    return mesh


MESH_CLASSES = {"M1": 48, "M2": 96, "M3": 192}


def mesh_for_class(name: str, R: float = 1.0, grading: GradingParams | None = None) -> Mesh:
    try:
        n_cyl = MESH_CLASSES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown mesh class {name!r}; expected one of {sorted(MESH_CLASSES)}") from None
    mesh = gen_cylinder_mesh(R, n_cyl, grading)
    mesh.name = name.upper()
    return mesh

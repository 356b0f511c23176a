"""P2 triangle mesh container, boundary tags and validity checks."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..fem.shape import EDGES, shape_p2, triangle_rule


class BoundaryTag(enum.IntEnum):
    INFLOW = 0
    OUTFLOW = 1
    WALL = 2
    CYLINDER = 3
    SYMMETRY = 4

    @property
    def label(self) -> str:
        return self.name.lower()


class MeshError(ValueError):
    """Base class for invalid or unreadable meshes."""


class InvertedElementError(MeshError):
    pass


@dataclass
class Mesh:
    """Six-node triangles with tagged three-node boundary edges.

    ``boundary_edges`` rows are ``(a, b, mid)``; ``curved`` flags the edges
    whose midnode lies on the cylinder arc rather than the chord midpoint.
    """

    nodes: np.ndarray
    elements: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    curved: np.ndarray
    cylinder_radius: float | None = None
    name: str = "mesh"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=float)
        self.elements = np.ascontiguousarray(self.elements, dtype=np.int64)
        self.boundary_edges = np.ascontiguousarray(self.boundary_edges, dtype=np.int64).reshape(-1, 3)
        self.boundary_tags = np.asarray(self.boundary_tags, dtype=np.int64)
        self.curved = np.asarray(self.curved, dtype=bool)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def tags_present(self) -> set[BoundaryTag]:
        return {BoundaryTag(t) for t in np.unique(self.boundary_tags)}

    def edges_with(self, tag: BoundaryTag) -> np.ndarray:
        return self.boundary_edges[self.boundary_tags == tag]

    def nodes_with(self, tag: BoundaryTag) -> np.ndarray:
        return np.unique(self.edges_with(tag))

    def vertex_coords(self) -> np.ndarray:
        return self.nodes[self.elements[:, :3]]

    def areas(self) -> np.ndarray:
        """Exact element areas (curved elements included), by quadrature."""
        rule = triangle_rule(5)
        det = jacobian_determinants(self, rule.points)
        return det @ rule.weights

    def element_lengths(self) -> np.ndarray:
        return element_length(self.vertex_coords())

    def element_of_boundary_edge(self) -> np.ndarray:
        """Element index and local edge number of each boundary edge."""
        if "edge_owner" not in self._cache:
            lookup = {}
            for e, el in enumerate(self.elements):
                for k, (a, b, _) in enumerate(EDGES):
                    lookup.setdefault(frozenset((el[a], el[b])), []).append((e, k))
            owner = np.empty((len(self.boundary_edges), 2), dtype=np.int64)
            for i, (a, b, _) in enumerate(self.boundary_edges):
                hits = lookup.get(frozenset((a, b)), [])
                if len(hits) != 1:
                    raise MeshError(f"boundary edge {i} belongs to {len(hits)} elements")
                owner[i] = hits[0]
            self._cache["edge_owner"] = owner
        return self._cache["edge_owner"]


def element_length(coords) -> np.ndarray | float:
    """``h = sqrt(2 * area)`` of the vertex triangle(s); ``coords`` is (..., 3, 2)."""
    c = np.asarray(coords, dtype=float)
    d1 = c[..., 1, :] - c[..., 0, :]
    d2 = c[..., 2, :] - c[..., 0, :]
    area = 0.5 * np.abs(d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0])
    h = np.sqrt(2.0 * area)
    return float(h) if np.ndim(h) == 0 else h


def jacobian_determinants(mesh: Mesh, ref_points) -> np.ndarray:
    """det(dx/dxi) of the isoparametric map, shape (n_elements, n_points)."""
    _, grad, _ = shape_p2(np.atleast_2d(ref_points))
    x = mesh.nodes[mesh.elements]  # (E, 6, 2)
    jac = np.einsum("eai,qaj->eqij", x, grad)
    return jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]


def validate(mesh: Mesh, required_tags: set[BoundaryTag] | None = None) -> None:
    """Raise :class:`MeshError` unless the mesh is usable for assembly."""
    n = mesh.n_nodes
    if mesh.elements.size == 0:
        raise MeshError("mesh has no elements")
    if mesh.elements.min() < 0 or mesh.elements.max() >= n:
        raise MeshError("element connectivity references missing nodes")
    if mesh.boundary_edges.size and (mesh.boundary_edges.min() < 0 or mesh.boundary_edges.max() >= n):
        raise MeshError("boundary connectivity references missing nodes")
    pts = np.vstack([triangle_rule(6).points, triangle_rule(5).points,
                     [[0, 0], [1, 0], [0, 1], [0.5, 0], [0.5, 0.5], [0, 0.5]]])
    det = jacobian_determinants(mesh, pts)
    bad = np.nonzero((det <= 0).any(axis=1))[0]
    if bad.size:
        raise InvertedElementError(f"{bad.size} inverted element(s), first id {bad[0]}")
    # watertight: element edges used once are exactly the tagged boundary edges
    e = mesh.elements
    pairs = np.concatenate([np.sort(e[:, [a, b]], axis=1) for a, b, _ in EDGES])
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    if (counts > 2).any():
        raise MeshError("non-manifold edge shared by more than two elements")
    free = {tuple(p) for p in uniq[counts == 1]}
    tagged = {tuple(sorted(p)) for p in mesh.boundary_edges[:, :2]}
    if free != tagged:
        missing = len(free - tagged)
        extra = len(tagged - free)
        raise MeshError(f"boundary not watertight: {missing} untagged edge(s), {extra} interior edge(s) tagged")
    mesh.element_of_boundary_edge()
    if required_tags:
        absent = required_tags - mesh.tags_present()
        if absent:
            names = ", ".join(sorted(t.label for t in absent))
            raise MeshError(f"mesh lacks boundary tag(s): {names}")

"""Equal-order degree-of-freedom layout and Dirichlet data."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np

from ..mesh import BoundaryTag, Mesh
from ..tensor2 import SymTensor2

FIELDS = ("u", "v", "p", "psi11", "psi12", "psi22")
SLOT = {name: i for i, name in enumerate(FIELDS)}
N_DOF_PER_NODE = len(FIELDS)

# later entries win at shared corner nodes
PRECEDENCE = (BoundaryTag.OUTFLOW, BoundaryTag.SYMMETRY, BoundaryTag.CYLINDER,
              BoundaryTag.WALL, BoundaryTag.INFLOW)

BCValue = Union[float, Callable[[np.ndarray, np.ndarray], np.ndarray]]
BCSpec = Mapping[BoundaryTag, Mapping[str, BCValue]]


class DirichletConflictError(ValueError):
    pass


@dataclass
class DofMap:
    """Global index ``6 * node + slot`` with slots (u, v, p, psi11, psi12, psi22)."""

    n_nodes: int
    dirichlet: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.dirichlet is None:
            self.dirichlet = np.zeros(self.n_dofs, dtype=bool)

    @property
    def n_dofs(self) -> int:
        return N_DOF_PER_NODE * self.n_nodes

    def index(self, node, slot) -> np.ndarray:
        if isinstance(slot, str):
            slot = SLOT[slot]
        return N_DOF_PER_NODE * np.asarray(node) + slot

    def free(self) -> np.ndarray:
        return np.nonzero(~self.dirichlet)[0]

    def free_index(self) -> np.ndarray:
        """Position of each dof among the free dofs, -1 for Dirichlet dofs."""
        out = np.full(self.n_dofs, -1, dtype=np.int64)
        out[~self.dirichlet] = np.arange(int((~self.dirichlet).sum()))
        return out

    def element_dofs(self, elements: np.ndarray) -> np.ndarray:
        """(E, 36) node-major element dof indices."""
        return (N_DOF_PER_NODE * elements[:, :, None] + np.arange(N_DOF_PER_NODE)).reshape(len(elements), -1)


@dataclass
class FieldState:
    """Global unknown vector with per-field views."""

    values: np.ndarray

    @classmethod
    def zeros(cls, n_nodes: int) -> "FieldState":
        return cls(np.zeros(N_DOF_PER_NODE * n_nodes))

    def field(self, name: str) -> np.ndarray:
        return self.values[SLOT[name]::N_DOF_PER_NODE]

    def set_field(self, name: str, data) -> None:
        self.values[SLOT[name]::N_DOF_PER_NODE] = data

    def psi(self) -> SymTensor2:
        return SymTensor2(self.field("psi11"), self.field("psi12"), self.field("psi22"))

    def copy(self) -> "FieldState":
        return FieldState(self.values.copy())


def apply_dirichlet(mesh: Mesh, dofmap: DofMap, state: np.ndarray, bc_spec: BCSpec) -> np.ndarray:
    """Set prescribed values and the Dirichlet mask; returns the updated state.

    ``bc_spec`` maps tags to ``{field name: value or f(x, y)}``. Tags are
    applied in increasing precedence so that inflow data wins at corners.
    """
    state = np.array(state, dtype=float, copy=True)
    mask = np.zeros(dofmap.n_dofs, dtype=bool)
    unknown = set(bc_spec) - set(PRECEDENCE)
    if unknown:
        raise DirichletConflictError(f"no precedence defined for {unknown}")
    for tag in PRECEDENCE:
        comps = bc_spec.get(tag)
        if not comps:
            continue
        nodes = mesh.nodes_with(tag)
        if nodes.size == 0:
            continue
        x, y = mesh.nodes[nodes, 0], mesh.nodes[nodes, 1]
        for name, value in comps.items():
            if name not in SLOT:
                raise KeyError(f"unknown field {name!r}")
            data = value(x, y) if callable(value) else np.full(nodes.size, float(value))
            idx = dofmap.index(nodes, name)
            state[idx] = data
            mask[idx] = True
    dofmap.dirichlet = mask
    return state

"""Residual and Jacobian assembly of the steady stabilized weak form."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..constitutive import FluidParams
from ..matfun import DEFAULT_TOLERANCES, KernelTolerances
from ..mesh import Mesh
from ..solver.sparse import SparsePattern
from .dofmap import N_DOF_PER_NODE, DofMap
from .geometry import element_geometry, quad_data
from .kernel import N_SLOTS, AssemblyOptions, Frozen, flux, flux_jacobian, grad_slot
from .shape import shape_p2, triangle_rule
from .stabilization import tau_cons, tau_gls

CHUNK = 512


class AssemblyError(RuntimeError):
    pass


class Assembler:
    """Global residual ``R(z)`` and Newton matrix ``dR/dz`` on the free dofs.

    The stabilization velocity and the element parameters ``tau`` are taken
    from the state being linearized and are not differentiated (unless
    ``options.full_stab_jacobian`` asks for the test-operator part).
    """

    def __init__(self, mesh: Mesh, dofmap: DofMap, params: FluidParams,
                 options: AssemblyOptions | None = None, quad_degree: int = 5,
                 tol: KernelTolerances = DEFAULT_TOLERANCES):
        self.mesh = mesh
        self.dofmap = dofmap
        self.params = params
        self.options = options or AssemblyOptions(creeping=params.rho == 0.0)
        if params.rho == 0.0 and not self.options.creeping:
            raise ValueError("rho = 0 requires creeping flow")
        self.tol = tol
        self.q = quad_data(mesh, triangle_rule(quad_degree))
        self.edofs = dofmap.element_dofs(mesh.elements)
        self.h = mesh.element_lengths()
        self.N_center = shape_p2(np.array([1 / 3, 1 / 3]))[0]
        self._patterns: dict[bytes, SparsePattern] = {}  # shared by with_params copies

    def with_params(self, params: FluidParams) -> "Assembler":
        other = object.__new__(Assembler)
        other.__dict__.update(self.__dict__)
        other.params = params
        return other

    def free(self) -> np.ndarray:
        return self.dofmap.free()

    # -- quadrature-point state -------------------------------------------
    def _local(self, z: np.ndarray) -> np.ndarray:
        return z[self.edofs].reshape(-1, 6, N_DOF_PER_NODE)  # (E, a, field)

    def qp_state(self, z: np.ndarray, elems=slice(None)) -> np.ndarray:
        ze = self._local(z)[elems]
        N, G, lap = self.q.N, self.q.G[elems], self.q.lap[elems]
        E, Q = G.shape[0], G.shape[1]
        s = np.empty((E, Q, N_SLOTS))
        s[:, :, :6] = np.einsum("qa,eac->eqc", N, ze)
        grads = np.einsum("eqai,eac->eqci", G, ze)
        s[:, :, 6:18] = grads.reshape(E, Q, 12)
        s[:, :, 18:20] = np.einsum("eqa,eac->eqc", lap, ze[:, :, :2])
        return s.reshape(E * Q, N_SLOTS)

    def frozen(self, z: np.ndarray, s: np.ndarray, elems=slice(None)) -> Frozen:
        ze = self._local(z)[elems]
        uc = np.einsum("a,ea->e", self.N_center, ze[:, :, 0])
        vc = np.einsum("a,ea->e", self.N_center, ze[:, :, 1])
        speed = np.hypot(uc, vc)
        h = self.h[elems]
        p = self.params
        tg = tau_gls(h, speed, p.rho, p.mu, self.options.creeping) if self.options.include_gls else np.zeros_like(h)
        tc = tau_cons(h, speed, p.lam) if self.options.include_supg else np.zeros_like(h)
        Q = self.q.N.shape[0]
        return Frozen(s[:, 0].copy(), s[:, 1].copy(), np.repeat(tg, Q), np.repeat(tc, Q))

    # -- residual ---------------------------------------------------------
    def element_residuals(self, z: np.ndarray) -> np.ndarray:
        s = self.qp_state(z)
        fr = self.frozen(z, s)
        F = flux(s, self.params, self.options, fr, self.tol)
        self._check_finite(F)
        E, Q = self.q.wdet.shape
        F = F.reshape(E, Q, N_SLOTS) * self.q.wdet[:, :, None]
        Fv = F[:, :, :6]
        Fg = F[:, :, 6:18].reshape(E, Q, 6, 2)
        R = np.einsum("qa,eqc->eac", self.q.N, Fv)
        R += np.einsum("eqai,eqci->eac", self.q.G, Fg)
        R[:, :, :2] += np.einsum("eqa,eqc->eac", self.q.lap, F[:, :, 18:20])
        return R.reshape(E, -1)

    def full_residual(self, z: np.ndarray) -> np.ndarray:
        Re = self.element_residuals(z)
        return np.bincount(self.edofs.ravel(), weights=Re.ravel(), minlength=self.dofmap.n_dofs)

    def residual(self, z: np.ndarray) -> np.ndarray:
        """Residual restricted to the free dofs."""
        return self.full_residual(z)[~self.dofmap.dirichlet]

    # -- Jacobian ---------------------------------------------------------
    def _basis_matrix(self, elems) -> np.ndarray:
        N, G, lap = self.q.N, self.q.G[elems], self.q.lap[elems]
        E, Q = G.shape[0], G.shape[1]
        B = np.zeros((E, Q, N_SLOTS, 6, N_DOF_PER_NODE))
        for c in range(N_DOF_PER_NODE):
            B[:, :, c, :, c] = N[None]
            B[:, :, grad_slot(c, 0), :, c] = G[..., 0]
            B[:, :, grad_slot(c, 1), :, c] = G[..., 1]
        B[:, :, 18, :, 0] = lap
        B[:, :, 19, :, 1] = lap
        return B.reshape(E, Q, N_SLOTS, 36)

    def element_matrices(self, z: np.ndarray) -> np.ndarray:
        E = self.mesh.n_elements
        out = np.empty((E, 36, 36))
        for start in range(0, E, CHUNK):
            elems = slice(start, min(start + CHUNK, E))
            s = self.qp_state(z, elems)
            fr = self.frozen(z, s, elems)
            D = flux_jacobian(s, self.params, self.options, fr, self.tol)
            self._check_finite(D.reshape(len(s), -1), offset=start)
            B = self._basis_matrix(elems)
            ne, Q = B.shape[0], B.shape[1]
            D = D.reshape(ne, Q, N_SLOTS, N_SLOTS)
            DB = D @ B  # (ne, Q, 20, 36)
            Bw = B * self.q.wdet[elems][:, :, None, None]
            out[elems] = np.matmul(Bw.reshape(ne, Q * N_SLOTS, 36).transpose(0, 2, 1),
                                   DB.reshape(ne, Q * N_SLOTS, 36))
        return out

    def pattern(self) -> SparsePattern:
        key = np.packbits(self.dofmap.dirichlet).tobytes()
        if key not in self._patterns:
            self._patterns.clear()
            self._patterns[key] = SparsePattern(self.edofs, self.dofmap.free_index())
        return self._patterns[key]

    def jacobian(self, z: np.ndarray) -> sp.csr_matrix:
        return self.pattern().assemble(self.element_matrices(z))

    def _check_finite(self, F: np.ndarray, offset: int = 0) -> None:
        if not np.isfinite(F).all():
            Q = self.q.N.shape[0]
            bad = np.nonzero(~np.isfinite(F).all(axis=1))[0][0]
            raise AssemblyError(f"non-finite entries in element {offset + bad // Q}")


def assemble_residual(mesh, dofmap, state, params, options=None) -> np.ndarray:
    return Assembler(mesh, dofmap, params, options).residual(np.asarray(state))


def assemble_jacobian(mesh, dofmap, state, params, options=None) -> sp.csr_matrix:
    return Assembler(mesh, dofmap, params, options).jacobian(np.asarray(state))

import numpy as np
import pytest

from logconf.bench.config import BenchConfig
from logconf.bench.inflow import inflow_psi, inflow_velocity
from logconf.bench.problem import FlowProblem
from logconf.constitutive import FluidParams
from logconf.fem.assembly import Assembler, AssemblyError, assemble_jacobian, assemble_residual
from logconf.fem.dofmap import DirichletConflictError, DofMap, FieldState, apply_dirichlet
from logconf.fem.kernel import AssemblyOptions
from logconf.fem.shape import shape_p2, triangle_rule
from logconf.mesh import BoundaryTag, gen_channel_mesh, mesh_for_class

OB = FluidParams(rho=0.0, mu_s=0.59, mu_p=0.41, lam=0.6)
L, H = 6.0, 2.0


@pytest.fixture(scope="module")
def channel():
    return gen_channel_mesh(L, H, 12, 4)


def channel_bcs():
    bc = {
        BoundaryTag.INFLOW: {"u": lambda x, y: inflow_velocity(y), "v": 0.0},
        BoundaryTag.WALL: {"u": 0.0, "v": 0.0},
        BoundaryTag.SYMMETRY: {"v": 0.0, "psi12": 0.0},
        BoundaryTag.OUTFLOW: {"v": 0.0},
    }
    return bc


def poiseuille(mesh, lam=None, mu_s=OB.mu_s):
    """Nodal interpolant: parabolic u, linear p, and Psi = 0 or the shear log-conformation."""
    z = FieldState.zeros(mesh.n_nodes)
    x, y = mesh.nodes.T
    z.set_field("u", inflow_velocity(y))
    mu = mu_s if lam is None else OB.mu
    z.set_field("p", -0.75 * mu * (x - L))
    if lam is not None:
        psi = inflow_psi(y, lam)
        z.set_field("psi11", psi.xx)
        z.set_field("psi12", psi.xy)
        z.set_field("psi22", psi.yy)
    return z.values


class TestDirichlet:
    def test_partial_components(self, channel):
        dm = DofMap(channel.n_nodes)
        z = apply_dirichlet(channel, dm, np.full(dm.n_dofs, 7.0), channel_bcs())
        mask = dm.dirichlet.reshape(-1, 6)
        sym = channel.nodes_with(BoundaryTag.SYMMETRY)
        interior_sym = sym[(channel.nodes[sym, 0] > 0) & (channel.nodes[sym, 0] < L)]
        assert mask[interior_sym].tolist() == [[False, True, False, False, True, False]] * len(interior_sym)
        out = channel.nodes_with(BoundaryTag.OUTFLOW)
        inner_out = out[(channel.nodes[out, 1] > 0) & (channel.nodes[out, 1] < H)]
        assert mask[inner_out].tolist() == [[False, True, False, False, False, False]] * len(inner_out)
        assert np.all(z.reshape(-1, 6)[interior_sym, 1] == 0)

    def test_inflow_wins_at_corner(self, channel):
        dm = DofMap(channel.n_nodes)
        bc = channel_bcs()
        bc[BoundaryTag.INFLOW]["u"] = 5.0
        z = apply_dirichlet(channel, dm, np.zeros(dm.n_dofs), bc)
        corner = np.nonzero((channel.nodes[:, 0] == 0) & (channel.nodes[:, 1] == H))[0][0]
        assert z[6 * corner] == 5.0

    def test_unknown_field(self, channel):
        with pytest.raises(KeyError):
            apply_dirichlet(channel, DofMap(channel.n_nodes), np.zeros(6 * channel.n_nodes),
                            {BoundaryTag.WALL: {"w": 0.0}})

    def test_unknown_tag(self, channel):
        with pytest.raises(DirichletConflictError):
            apply_dirichlet(channel, DofMap(channel.n_nodes), np.zeros(6 * channel.n_nodes), {"lid": {"u": 0.0}})

    def test_dof_indexing(self):
        dm = DofMap(4)
        assert dm.index(2, "psi12") == 16
        assert sorted(dm.index(np.arange(4)[:, None], np.arange(6)).ravel()) == list(range(24))


class TestResidual:
    def test_zero_state(self, channel):
        dm = DofMap(channel.n_nodes)
        zero_bc = {t: {k: 0.0 for k in v} for t, v in channel_bcs().items()}
        z = apply_dirichlet(channel, dm, np.zeros(dm.n_dofs), zero_bc)
        assert np.all(assemble_residual(channel, dm, z, OB) == 0)

    def test_stokes_poiseuille_is_discrete_solution(self, channel):
        """With Psi = 0 the polymer stress vanishes and the Newtonian profile is P2-exact."""
        dm = DofMap(channel.n_nodes)
        z = apply_dirichlet(channel, dm, poiseuille(channel), channel_bcs())
        r = Assembler(channel, dm, OB).full_residual(z).reshape(-1, 6)
        free = ~dm.dirichlet.reshape(-1, 6)
        scale = np.abs(Assembler(channel, dm, OB).element_residuals(z)).max()
        for c in range(3):
            assert np.abs(r[free[:, c], c]).max() <= 1e-9 * max(scale, 1.0)

    def test_oldroyd_b_poiseuille_interpolation_scale(self):
        """Momentum residual of the exact interpolant shrinks like the Psi interpolation error."""
        norms = []
        for ny in (4, 8):
            m = gen_channel_mesh(L, H, 3 * ny, ny)
            dm = DofMap(m.n_nodes)
            bc = channel_bcs()
            bc[BoundaryTag.OUTFLOW] = {"u": lambda x, y: inflow_velocity(y), "v": 0.0}
            z = apply_dirichlet(m, dm, poiseuille(m, lam=OB.lam), bc)
            r = Assembler(m, dm, OB).full_residual(z).reshape(-1, 6)
            free = ~dm.dirichlet.reshape(-1, 6)
            norms.append(np.abs(r[free[:, 0], 0]).max())
        assert norms[1] < norms[0] / 4
        assert norms[1] < 1e-4

    def test_pressure_shift_invariance(self, channel):
        dm = DofMap(channel.n_nodes)
        opts = AssemblyOptions(include_gls=False, include_supg=False)
        z = apply_dirichlet(channel, dm, poiseuille(channel, lam=OB.lam), channel_bcs())
        asm = Assembler(channel, dm, OB, opts)
        shift = np.zeros_like(z)
        shift[2::6] = 3.0
        diff = (asm.full_residual(z + shift) - asm.full_residual(z)).reshape(-1, 6)
        # a constant pressure only enters through its boundary traction
        interior = np.setdiff1d(np.arange(channel.n_nodes), np.unique(channel.boundary_edges))
        assert np.abs(diff[interior]).max() <= 1e-12
        assert np.abs(diff[:, 2:]).max() == 0

    def test_non_finite_reports_element(self, channel):
        dm = DofMap(channel.n_nodes)
        z = np.zeros(dm.n_dofs)
        z[6 * channel.elements[5, 0] + 3] = np.nan
        with pytest.raises(AssemblyError, match="element"):
            Assembler(channel, dm, OB).residual(z)

    def test_deterministic(self, channel, rng):
        dm = DofMap(channel.n_nodes)
        z = rng.normal(size=dm.n_dofs) * 0.3
        asm = Assembler(channel, dm, OB)
        a, b = asm.residual(z), asm.residual(z.copy())
        assert np.array_equal(a, b)
        assert np.array_equal(asm.jacobian(z).data, asm.jacobian(z).data)


class TestJacobian:
    @pytest.mark.parametrize("full", [False, True])
    def test_matches_directional_difference(self, channel, rng, full):
        dm = DofMap(channel.n_nodes)
        z = apply_dirichlet(channel, dm, poiseuille(channel, lam=OB.lam), channel_bcs())
        z[~dm.dirichlet] += 0.05 * rng.normal(size=(~dm.dirichlet).sum())
        asm = Assembler(channel, dm, OB, AssemblyOptions(full_stab_jacobian=full))
        J = asm.jacobian(z)
        d = np.zeros_like(z)
        d[~dm.dirichlet] = rng.normal(size=J.shape[0])
        h = 1e-6
        # stabilization data frozen at z, exactly as in the Newton matrix
        fd = (frozen_residual(asm, z, z + h * d) - frozen_residual(asm, z, z - h * d)) / (2 * h)
        jd = J @ d[~dm.dirichlet]
        assert np.linalg.norm(jd - fd) <= 1e-6 * np.linalg.norm(jd)

    def test_stokes_block_structure(self, channel):
        dm = DofMap(channel.n_nodes)
        z = apply_dirichlet(channel, dm, np.zeros(6 * channel.n_nodes), channel_bcs())
        opts = AssemblyOptions(include_gls=False, include_supg=False)
        J = assemble_jacobian(channel, dm, z, OB, opts).toarray()
        slots = np.arange(dm.n_dofs)[~dm.dirichlet] % 6
        vel, pres = np.isin(slots, (0, 1)), slots == 2
        Juu = J[np.ix_(vel, vel)]
        np.testing.assert_allclose(Juu, Juu.T, atol=1e-10)
        np.testing.assert_allclose(J[np.ix_(vel, pres)], -J[np.ix_(pres, vel)].T, atol=1e-10)

    def test_constitutive_block_at_rest(self, channel):
        dm = DofMap(channel.n_nodes)
        z = np.zeros(dm.n_dofs)
        opts = AssemblyOptions(include_gls=False, include_supg=False)
        J = assemble_jacobian(channel, dm, z, OB, opts).toarray()
        idx = np.arange(3, dm.n_dofs, 6)
        block = J[np.ix_(idx, idx)]
        # P2 mass matrix
        rule = triangle_rule(5)
        N = shape_p2(rule.points)[0]
        mass = np.zeros((channel.n_nodes, channel.n_nodes))
        from logconf.fem.geometry import quad_data
        q = quad_data(channel, rule)
        for e, el in enumerate(channel.elements):
            mass[np.ix_(el, el)] += np.einsum("q,qa,qb->ab", q.wdet[e], N, N)
        np.testing.assert_allclose(block, OB.mu_p / (2 * OB.lam) / OB.lam * mass, atol=1e-13)


def frozen_residual(asm, z_frozen, z):
    """Residual at ``z`` with tau and u_s taken from ``z_frozen``."""
    import logconf.fem.assembly as A
    s_frozen = asm.qp_state(z_frozen)
    fr = asm.frozen(z_frozen, s_frozen)
    if asm.options.full_stab_jacobian:
        s = asm.qp_state(z)
        fr = A.Frozen(s[:, 0], s[:, 1], fr.tau_g, fr.tau_c)
    orig = asm.frozen
    asm.frozen = lambda *_a, **_k: fr
    try:
        return asm.residual(z)
    finally:
        asm.frozen = orig


def test_cylinder_jacobian_shape():
    m = mesh_for_class("M1")
    prob = FlowProblem(m, BenchConfig())
    z = prob.initial_state(0.1)
    asm = prob.assembler(0.1)
    J = asm.jacobian(z)
    assert J.shape == (prob.dofmap.free().size,) * 2
    assert J.has_sorted_indices

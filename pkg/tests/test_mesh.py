import math

import numpy as np
import pytest

from logconf.fem.postprocess import edge_quadrature
from logconf.mesh import (
    BoundaryTag,
    InvertedElementError,
    MeshError,
    element_length,
    export_gmsh,
    gen_channel_mesh,
    gen_cylinder_mesh,
    import_gmsh,
    mesh_for_class,
    validate,
)
from logconf.mesh.gmsh import PhysicalTagError, UnsupportedElementOrderError, UnsupportedVersionError


@pytest.fixture(scope="module")
def m1():
    return mesh_for_class("M1")


class TestChannel:
    def test_smallest(self):
        m = gen_channel_mesh(1, 1, 1, 1)
        assert m.n_elements == 2 and m.n_nodes == 9

    def test_counts_and_area(self):
        m = gen_channel_mesh(30, 2, 60, 8)
        assert m.n_elements == 960
        assert m.areas().sum() == pytest.approx(60.0, rel=1e-12)

    def test_tags(self):
        m = gen_channel_mesh(3, 2, 6, 4)
        assert m.tags_present() == {BoundaryTag.INFLOW, BoundaryTag.OUTFLOW, BoundaryTag.WALL, BoundaryTag.SYMMETRY}
        assert np.allclose(m.nodes[m.nodes_with(BoundaryTag.INFLOW), 0], 0)
        assert np.allclose(m.nodes[m.nodes_with(BoundaryTag.WALL), 1], 2)

    @pytest.mark.parametrize("args", [(0, 1, 1, 1), (1, -1, 1, 1), (1, 1, 0, 1)])
    def test_rejects_bad_input(self, args):
        with pytest.raises(ValueError):
            gen_channel_mesh(*args)


class TestCylinder:
    def test_m1_size(self, m1):
        assert abs(m1.n_elements - 2532) <= 0.2 * 2532

    def test_m2_size(self):
        m = mesh_for_class("M2")
        assert abs(m.n_elements - 10104) <= 0.2 * 10104

    def test_all_tags_and_validity(self, m1):
        assert m1.tags_present() == set(BoundaryTag)
        validate(m1, set(BoundaryTag))

    def test_cylinder_nodes_on_circle(self, m1):
        nodes = m1.nodes[m1.nodes_with(BoundaryTag.CYLINDER)]
        assert np.abs(np.hypot(*nodes.T) - 1.0).max() <= 1e-12
        assert len(m1.edges_with(BoundaryTag.CYLINDER)) == 48

    def test_equal_spacing_on_cylinder(self, m1):
        e = m1.edges_with(BoundaryTag.CYLINDER)
        ang = np.arctan2(m1.nodes[e[:, 1], 1], m1.nodes[e[:, 1], 0]) - np.arctan2(m1.nodes[e[:, 0], 1], m1.nodes[e[:, 0], 0])
        np.testing.assert_allclose(np.abs(ang), math.pi / 48, rtol=1e-12)

    def test_domain_extent(self, m1):
        lo, hi = m1.nodes.min(axis=0), m1.nodes.max(axis=0)
        np.testing.assert_allclose([lo[0], hi[0], lo[1], hi[1]], [-15, 15, 0, 2], atol=1e-12)
        area = m1.areas().sum()
        assert area == pytest.approx(60 - math.pi / 2, rel=2e-3)  # vertex triangles cut the arc

    def test_radius_scaling(self):
        m = gen_cylinder_mesh(2.5, 16)
        assert m.cylinder_radius == 2.5
        nodes = m.nodes[m.nodes_with(BoundaryTag.CYLINDER)]
        assert np.abs(np.hypot(*nodes.T) - 2.5).max() <= 1e-12 * 2.5

    @pytest.mark.parametrize("n", [7, 9, 6])
    def test_rejects_bad_counts(self, n):
        with pytest.raises(ValueError):
            gen_cylinder_mesh(1.0, n)

    def test_arc_length_converges(self):
        errs = []
        for n in (16, 32, 64):
            eq = edge_quadrature(gen_cylinder_mesh(1.0, n), BoundaryTag.CYLINDER)
            errs.append(abs(eq.weights.sum() - math.pi))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 3


class TestElementLength:
    def test_examples(self):
        assert element_length([[0, 0], [1, 0], [0, 1]]) == pytest.approx(1.0)
        eq = [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]
        assert element_length(eq) == pytest.approx(math.sqrt(math.sqrt(3) / 2))
        assert element_length(np.array(eq) * 3.0) == pytest.approx(3 * element_length(eq))

    def test_vectorised(self, m1):
        assert m1.element_lengths().shape == (m1.n_elements,)


class TestGmsh:
    def test_roundtrip(self, m1, tmp_path):
        path = tmp_path / "m1.msh"
        export_gmsh(m1, path)
        back = import_gmsh(path, cylinder_radius=1.0)
        np.testing.assert_array_equal(back.elements, m1.elements)
        np.testing.assert_allclose(back.nodes, m1.nodes, rtol=0, atol=0)
        assert back.tags_present() == m1.tags_present()
        assert back.curved.sum() == 48

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            import_gmsh(tmp_path / "nosuch.msh")

    def _write(self, tmp_path, text):
        p = tmp_path / "bad.msh"
        p.write_text(text)
        return p

    def test_linear_triangle_rejected(self, tmp_path):
        text = """$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
1
1 2 2 1 1 1 2 3
$EndElements
"""
        with pytest.raises(UnsupportedElementOrderError, match="unsupported element order"):
            import_gmsh(self._write(tmp_path, text))

    def test_version_rejected(self, tmp_path):
        with pytest.raises(UnsupportedVersionError):
            import_gmsh(self._write(tmp_path, "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n"))

    def test_missing_physical_group(self, tmp_path):
        m = gen_channel_mesh(2, 2, 2, 2)
        p = tmp_path / "c.msh"
        export_gmsh(m, p)
        text = p.read_text().replace('"inflow"', '"entry"')
        with pytest.raises(PhysicalTagError, match="inflow|entry"):
            import_gmsh(self._write(tmp_path, text))
        keep = [ln for ln in p.read_text().splitlines()]
        # drop every inflow edge and its name
        phys = next(ln.split()[1] for ln in keep if ln.endswith('"inflow"'))
        kept = []
        for ln in keep:
            parts = ln.split()
            if ln.endswith('"inflow"'):
                continue
            if len(parts) > 4 and parts[1] == "8" and parts[3] == phys:
                continue
            kept.append(ln)
        with pytest.raises(PhysicalTagError, match='missing "inflow"'):
            import_gmsh(self._write(tmp_path, "\n".join(kept)))

    def test_inverted_element(self, tmp_path):
        m = gen_channel_mesh(2, 2, 2, 2)
        m.elements[0] = m.elements[0][[0, 2, 1, 5, 4, 3]]
        p = tmp_path / "inv.msh"
        export_gmsh(m, p)
        with pytest.raises(InvertedElementError):
            import_gmsh(p)

    def test_case_insensitive_names(self, tmp_path):
        m = gen_channel_mesh(2, 2, 2, 2)
        p = tmp_path / "c.msh"
        export_gmsh(m, p)
        p.write_text(p.read_text().replace('"wall"', '"Wall"'))
        assert BoundaryTag.WALL in import_gmsh(p).tags_present()


def test_validate_rejects_bad_connectivity():
    m = gen_channel_mesh(1, 1, 1, 1)
    m.elements[0, 0] = 99
    with pytest.raises(MeshError):
        validate(m)

"""MSH 2.2 ASCII import/export for six-node triangle meshes."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import BoundaryTag, Mesh, MeshError, validate

TRI6 = 9
LINE3 = 8
TRI3 = 2
LINE2 = 1


class UnsupportedVersionError(MeshError):
    pass


class UnsupportedElementOrderError(MeshError):
    pass


class PhysicalTagError(MeshError):
    pass


def export_gmsh(mesh: Mesh, path) -> None:
    """Write the mesh with one physical group per boundary tag plus ``fluid``."""
    path = Path(path)
    tags = sorted(mesh.tags_present())
    phys = {tag: i + 1 for i, tag in enumerate(tags)}
    fluid_id = len(tags) + 1
    lines = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat", "$PhysicalNames", str(len(tags) + 1)]
    lines += [f'1 {phys[t]} "{t.label}"' for t in tags]
    lines += [f'2 {fluid_id} "fluid"', "$EndPhysicalNames", "$Nodes", str(mesh.n_nodes)]
    lines += [f"{i + 1} {x:.17g} {y:.17g} 0" for i, (x, y) in enumerate(mesh.nodes)]
    lines += ["$EndNodes", "$Elements", str(len(mesh.boundary_edges) + mesh.n_elements)]
    k = 1
    for edge, tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        ids = " ".join(str(v + 1) for v in edge)
        lines.append(f"{k} {LINE3} 2 {phys[BoundaryTag(tag)]} {phys[BoundaryTag(tag)]} {ids}")
        k += 1
    for el in mesh.elements:
        ids = " ".join(str(v + 1) for v in el)
        lines.append(f"{k} {TRI6} 2 {fluid_id} {fluid_id} {ids}")
        k += 1
    lines.append("$EndElements")
    path.write_text("\n".join(lines) + "\n")


def _sections(text: str) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("$End"):
            current = None
        elif line.startswith("$"):
            current = line[1:]
            out[current] = []
        elif current is not None:
            out[current].append(line)
    return out


def import_gmsh(path, cylinder_radius: float | None = None) -> Mesh:
    """Read an MSH 2.2 ASCII file of 6-node triangles and 3-node boundary lines.

    Boundary physical groups are matched by name (case-insensitive) to
    :class:`BoundaryTag`: inflow, outflow, wall, cylinder, symmetry.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"mesh file not found: {path}")
    sec = _sections(path.read_text())
    fmt = sec.get("MeshFormat")
    if not fmt:
        raise UnsupportedVersionError("missing $MeshFormat section")
    version, filetype = fmt[0].split()[:2]
    if not version.startswith("2.2") or filetype != "0":
        raise UnsupportedVersionError(f"unsupported MSH version {version} (file-type {filetype}); need 2.2 ASCII")

    names: dict[int, str] = {}
    for line in sec.get("PhysicalNames", [])[1:]:
        dim, num, name = line.split(maxsplit=2)
        if int(dim) == 1:
            names[int(num)] = name.strip('"').lower()

    node_lines = sec.get("Nodes", [])[1:]
    ids = np.array([int(l.split()[0]) for l in node_lines])
    coords = np.array([[float(v) for v in l.split()[1:3]] for l in node_lines])
    index = {nid: i for i, nid in enumerate(ids)}

    elements, edges, edge_phys = [], [], []
    for line in sec.get("Elements", [])[1:]:
        parts = [int(v) for v in line.split()]
        etype, ntags = parts[1], parts[2]
        phys = parts[3] if ntags else 0
        conn = [index[v] for v in parts[3 + ntags:]]
        if etype == TRI6:
            elements.append(conn)
        elif etype == LINE3:
            edges.append(conn)
            edge_phys.append(phys)
        elif etype in (TRI3, LINE2):
            raise UnsupportedElementOrderError(
                f"unsupported element order: element type {etype} is linear, need 6-node triangles and 3-node lines")
    if not elements:
        raise MeshError("no 6-node triangles found")

    by_label = {t.label: t for t in BoundaryTag}
    tags = []
    for phys in edge_phys:
        name = names.get(phys)
        if name is None:
            raise PhysicalTagError(f"boundary physical group {phys} has no name")
        if name not in by_label:
            raise PhysicalTagError(f"unknown boundary physical group {name!r}")
        tags.append(by_label[name])
    present = set(tags)
    for required in (BoundaryTag.INFLOW, BoundaryTag.OUTFLOW, BoundaryTag.WALL, BoundaryTag.SYMMETRY):
        if required not in present:
            raise PhysicalTagError(f'missing "{required.label}" physical group')

    edges_arr = np.array(edges, dtype=np.int64).reshape(-1, 3)
    chord_mid = 0.5 * (coords[edges_arr[:, 0]] + coords[edges_arr[:, 1]])
    length = np.linalg.norm(coords[edges_arr[:, 0]] - coords[edges_arr[:, 1]], axis=1)
    curved = np.linalg.norm(coords[edges_arr[:, 2]] - chord_mid, axis=1) > 1e-10 * np.maximum(length, 1e-300)
    tag_arr = np.array([int(t) for t in tags], dtype=np.int64)
    if cylinder_radius is None and BoundaryTag.CYLINDER in present:
        cyl_nodes = np.unique(edges_arr[tag_arr == BoundaryTag.CYLINDER])
        cylinder_radius = float(np.linalg.norm(coords[cyl_nodes], axis=1).mean())
    mesh = Mesh(coords, np.array(elements, dtype=np.int64), edges_arr, tag_arr, curved,
                cylinder_radius=cylinder_radius, name=path.stem)
    validate(mesh)
    return mesh

from .core import BoundaryTag, InvertedElementError, Mesh, MeshError, element_length, validate
from .generate import GradingParams, gen_channel_mesh, gen_cylinder_mesh, mesh_for_class
from .gmsh import (
    PhysicalTagError,
    UnsupportedElementOrderError,
    UnsupportedVersionError,
    export_gmsh,
    import_gmsh,
)

__all__ = [
    "BoundaryTag", "GradingParams", "InvertedElementError", "Mesh", "MeshError",
    "PhysicalTagError", "UnsupportedElementOrderError", "UnsupportedVersionError",
    "element_length", "export_gmsh", "gen_channel_mesh", "gen_cylinder_mesh",
    "import_gmsh", "mesh_for_class", "validate",
]

"""Stabilized equal-order P2 discretization.

Names are resolved lazily: :mod:`logconf.mesh` imports :mod:`.shape` while it
is itself being initialized, so eager imports of the mesh-dependent modules
here would be circular.
"""
from importlib import import_module

_EXPORTS = {
    "Assembler": "assembly", "AssemblyError": "assembly",
    "assemble_residual": "assembly", "assemble_jacobian": "assembly",
    "DofMap": "dofmap", "FieldState": "dofmap", "FIELDS": "dofmap", "apply_dirichlet": "dofmap",
    "DirichletConflictError": "dofmap",
    "AssemblyOptions": "kernel",
    "PointLocator": "postprocess", "PointOutsideDomainError": "postprocess",
    "evaluate_field": "postprocess", "edge_quadrature": "postprocess",
    "export_vtk": "postprocess", "spd_violations": "postprocess",
    "shape_p2": "shape", "triangle_rule": "shape", "line_rule": "shape",
    "tau_gls": "stabilization", "tau_cons": "stabilization",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name):
    try:
        module = _EXPORTS[name]
    except KeyError:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}") from None
    return getattr(import_module(f".{module}", __name__), name)

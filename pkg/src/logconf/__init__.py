"""Steady log-conformation finite elements for Oldroyd-B and Giesekus flow.

Subpackages: :mod:`logconf.mesh` (P2 triangle meshes, MSH import),
:mod:`logconf.fem` (stabilized equal-order assembly and postprocessing),
:mod:`logconf.solver` (Newton, GMRES/ILUT, sparse LU) and
:mod:`logconf.bench` (confined-cylinder benchmark and CLI). The pointwise
tensor kernels live in :mod:`logconf.tensor2`, :mod:`logconf.matfun` and
:mod:`logconf.constitutive`.
"""

__version__ = "0.1.0"

from .linear import (DirectLU, GmresResult, IlutPreconditioner, LinearConfig, LinearSolverError,
                     SingularMatrixError, ZeroPivotError, direct_lu, gmres_solve, ilut_factor, solve_linear)
from .newton import ContinuationStall, NewtonConfig, NewtonError, NewtonHistory, newton_solve, wi_continuation
from .sparse import SparsePattern

__all__ = [
    "ContinuationStall", "DirectLU", "GmresResult", "IlutPreconditioner", "LinearConfig", "LinearSolverError",
    "NewtonConfig", "NewtonError", "NewtonHistory", "SingularMatrixError", "SparsePattern", "ZeroPivotError",
    "direct_lu", "gmres_solve", "ilut_factor", "newton_solve", "solve_linear", "wi_continuation",
]

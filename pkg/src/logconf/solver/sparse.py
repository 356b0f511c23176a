"""CSR matrices with a symbolic pattern fixed across Newton iterations."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp


class SparsePattern:
    """Scatter map from element matrices to the CSR data of the free-dof block.

    Built once per (mesh, Dirichlet mask); each assembly is then a single
    ordered ``bincount``, which keeps the result bit-identical between runs.
    """

    def __init__(self, element_dofs: np.ndarray, free_index: np.ndarray):
        n_free = int(free_index.max()) + 1 if free_index.size else 0
        fe = free_index[element_dofs]  # (E, k)
        k = fe.shape[1]
        rows = np.repeat(fe[:, :, None], k, axis=2).ravel()
        cols = np.repeat(fe[:, None, :], k, axis=1).ravel()
        keep = (rows >= 0) & (cols >= 0)
        key = rows[keep].astype(np.int64) * n_free + cols[keep]
        uniq, inverse = np.unique(key, return_inverse=True)
        self.n = n_free
        self.keep = np.nonzero(keep)[0]
        self.slot = inverse.astype(np.int64)
        self.indices = (uniq % n_free).astype(np.int32)
        counts = np.bincount((uniq // n_free).astype(np.int64), minlength=n_free)
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)
        self.nnz = uniq.size

    def assemble(self, element_matrices: np.ndarray) -> sp.csr_matrix:
        data = np.bincount(self.slot, weights=element_matrices.ravel()[self.keep], minlength=self.nnz)
        return sp.csr_matrix((data, self.indices.copy(), self.indptr.copy()), shape=(self.n, self.n))

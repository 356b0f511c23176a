"""Sparse linear solvers: restarted GMRES, ILUT preconditioning and direct LU."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import reverse_cuthill_mckee


class LinearSolverError(RuntimeError):
    pass


class SingularMatrixError(LinearSolverError):
    pass


class ZeroPivotError(LinearSolverError):
    def __init__(self, row: int):
        super().__init__(f"structural zero pivot in row {row}")
        self.row = row


@dataclass(frozen=True)
class LinearConfig:
    backend: str = "direct"  # "gmres" or "direct"
    restart: int = 200
    ilut_fill: int = 200
    ilut_threshold: float = 1e-4
    max_iter: int = 2000
    tol: float = 1e-9

    def __post_init__(self):
        if self.backend not in ("gmres", "direct"):
            raise ValueError(f"unknown linear backend {self.backend!r}")
        if self.restart < 1:
            raise ValueError("restart must be >= 1")
        if self.ilut_fill < 0:
            raise ValueError("ilut_fill must be >= 0")
        if self.max_iter < 1 or self.tol <= 0:
            raise ValueError("max_iter >= 1 and tol > 0 required")


@dataclass
class GmresResult:
    x: np.ndarray
    iterations: int
    residual: float


def gmres_solve(A, b: np.ndarray, precond: Callable[[np.ndarray], np.ndarray] | None = None,
                cfg: LinearConfig = LinearConfig(backend="gmres"), x0: np.ndarray | None = None) -> GmresResult:
    """Restarted GMRES with right preconditioning.

    The stopping test uses the true relative residual ``|b - A x| / |b|``,
    which right preconditioning leaves unscaled.
    """
    b = np.asarray(b, dtype=float)
    n = b.size
    if A.shape != (n, n):
        raise ValueError(f"shape mismatch: A is {A.shape}, b has {n} entries")
    M = precond if precond is not None else (lambda r: r)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return GmresResult(np.zeros(n), 0, 0.0)
    m = min(cfg.restart, n)
    total = 0
    r = b - A @ x
    beta = np.linalg.norm(r)
    while True:
        if beta / bnorm <= cfg.tol:
            return GmresResult(x, total, beta / bnorm)
        if total >= cfg.max_iter:
            raise LinearSolverError(
                f"GMRES stagnated after {total} iterations (relative residual {beta / bnorm:.3e})")
        V = np.zeros((m + 1, n))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        V[0] = r / beta
        Z = np.zeros((m, n))
        k = 0
        for k in range(m):
            Z[k] = M(V[k])
            w = A @ Z[k]
            for i in range(k + 1):  # modified Gram-Schmidt
                H[i, k] = w @ V[i]
                w -= H[i, k] * V[i]
            H[k + 1, k] = np.linalg.norm(w)
            if H[k + 1, k] > 0.0:
                V[k + 1] = w / H[k + 1, k]
            for i in range(k):
                t = cs[i] * H[i, k] + sn[i] * H[i + 1, k]
                H[i + 1, k] = -sn[i] * H[i, k] + cs[i] * H[i + 1, k]
                H[i, k] = t
            d = math.hypot(H[k, k], H[k + 1, k])
            if not d > 0.0 or not math.isfinite(d):
                raise LinearSolverError("GMRES breakdown: zero or non-finite Hessenberg column")
            cs[k], sn[k] = H[k, k] / d, H[k + 1, k] / d
            H[k, k] = d
            H[k + 1, k] = 0.0
            g[k + 1] = -sn[k] * g[k]
            g[k] = cs[k] * g[k]
            total += 1
            if abs(g[k + 1]) / bnorm <= cfg.tol or total >= cfg.max_iter or not np.any(V[k + 1]):
                break
        kk = k + 1
        y = np.linalg.solve(np.triu(H[:kk, :kk]), g[:kk]) if kk > 0 else np.zeros(0)
        x = x + y @ Z[:kk]
        r = b - A @ x
        beta = np.linalg.norm(r)


# -- ILUT --------------------------------------------------------------------

@numba.njit(cache=True)
def _heap_push(heap, size, v):
    heap[size] = v
    i = size
    while i > 0:
        parent = (i - 1) // 2
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent
    return size + 1


@numba.njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        child = left
        if left + 1 < size and heap[left + 1] < heap[left]:
            child = left + 1
        if heap[i] <= heap[child]:
            break
        heap[i], heap[child] = heap[child], heap[i]
        i = child
    return top, size


@numba.njit(cache=True)
def _keep_largest(idx, vals, count, p):
    """Indices into ``idx[:count]`` of the ``p`` entries of largest magnitude, sorted by column."""
    if count <= p:
        order = np.argsort(idx[:count])
        return order
    mag = -np.abs(vals[:count])
    sel = np.argsort(mag, kind="mergesort")[:p]
    cols = idx[:count][sel]
    return sel[np.argsort(cols)]


@numba.njit(cache=True)
def _ilut_kernel(n, indptr, indices, data, fill, tau):
    # output grows dynamically
    cap = max(16, 2 * indptr[n] + 2 * n)
    l_ptr = np.zeros(n + 1, np.int64)
    u_ptr = np.zeros(n + 1, np.int64)
    l_idx = np.empty(cap, np.int64)
    l_val = np.empty(cap)
    u_idx = np.empty(cap, np.int64)
    u_val = np.empty(cap)
    diag = np.zeros(n)
    w = np.zeros(n)
    nz = np.zeros(n, np.bool_)
    lower = np.empty(n, np.int64)
    upper = np.empty(n, np.int64)
    heap = np.empty(n, np.int64)
    tmp_i = np.empty(n, np.int64)
    tmp_v = np.empty(n)
    nl_tot = 0
    nu_tot = 0
    bad_row = -1
    for i in range(n):
        nlow = 0
        nup = 0
        hsize = 0
        rnorm = 0.0
        cnt = indptr[i + 1] - indptr[i]
        for jj in range(indptr[i], indptr[i + 1]):
            j = indices[jj]
            rnorm += abs(data[jj])
            w[j] = data[jj]
            nz[j] = True
            if j < i:
                hsize = _heap_push(heap, hsize, j)
                lower[nlow] = j
                nlow += 1
            elif j > i:
                upper[nup] = j
                nup += 1
        if not nz[i]:
            nz[i] = True
            w[i] = 0.0
        tol_i = tau * rnorm / max(cnt, 1)
        nkept = 0
        while hsize > 0:
            k, hsize = _heap_pop(heap, hsize)
            wk = w[k] / diag[k]
            if abs(wk) < tol_i:
                w[k] = 0.0
                continue
            w[k] = wk
            tmp_i[nkept] = k
            nkept += 1
            for jj in range(u_ptr[k], u_ptr[k + 1]):
                j = u_idx[jj]
                w[j] -= wk * u_val[jj]
                if not nz[j]:
                    nz[j] = True
                    if j < i:
                        hsize = _heap_push(heap, hsize, j)
                        lower[nlow] = j
                        nlow += 1
                    elif j > i:
                        upper[nup] = j
                        nup += 1
        # L part: kept multipliers, then the ``fill`` largest
        for t in range(nkept):
            tmp_v[t] = w[tmp_i[t]]
        sel = _keep_largest(tmp_i, tmp_v, nkept, fill)
        if nl_tot + sel.size > l_idx.size:
            newcap = 2 * l_idx.size + sel.size
            l_idx2 = np.empty(newcap, np.int64); l_idx2[:nl_tot] = l_idx[:nl_tot]; l_idx = l_idx2
            l_val2 = np.empty(newcap); l_val2[:nl_tot] = l_val[:nl_tot]; l_val = l_val2
        for t in range(sel.size):
            l_idx[nl_tot] = tmp_i[sel[t]]
            l_val[nl_tot] = tmp_v[sel[t]]
            nl_tot += 1
        l_ptr[i + 1] = nl_tot
        # U part
        m = 0
        for t in range(nup):
            j = upper[t]
            if abs(w[j]) >= tol_i:
                tmp_i[m] = j
                tmp_v[m] = w[j]
                m += 1
        sel = _keep_largest(tmp_i, tmp_v, m, fill)
        if nu_tot + sel.size > u_idx.size:
            newcap = 2 * u_idx.size + sel.size
            u_idx2 = np.empty(newcap, np.int64); u_idx2[:nu_tot] = u_idx[:nu_tot]; u_idx = u_idx2
            u_val2 = np.empty(newcap); u_val2[:nu_tot] = u_val[:nu_tot]; u_val = u_val2
        for t in range(sel.size):
            u_idx[nu_tot] = tmp_i[sel[t]]
            u_val[nu_tot] = tmp_v[sel[t]]
            nu_tot += 1
        u_ptr[i + 1] = nu_tot
        d = w[i]
        if d == 0.0:
            # shifted pivot retry, relative to the row scale
            d = tol_i if tol_i > 0.0 else (rnorm / max(cnt, 1))
            if d == 0.0 or not np.isfinite(d):
                bad_row = i
        diag[i] = d
        # reset work arrays
        for t in range(nlow):
            w[lower[t]] = 0.0
            nz[lower[t]] = False
        for t in range(nup):
            w[upper[t]] = 0.0
            nz[upper[t]] = False
        w[i] = 0.0
        nz[i] = False
        if bad_row >= 0:
            break
    return (l_ptr, l_idx[:nl_tot], l_val[:nl_tot], u_ptr, u_idx[:nu_tot], u_val[:nu_tot], diag, bad_row)


@numba.njit(cache=True)
def _ilu_apply(l_ptr, l_idx, l_val, u_ptr, u_idx, u_val, diag, r):
    n = r.size
    y = r.copy()
    for i in range(n):
        s = y[i]
        for jj in range(l_ptr[i], l_ptr[i + 1]):
            s -= l_val[jj] * y[l_idx[jj]]
        y[i] = s
    for i in range(n - 1, -1, -1):
        s = y[i]
        for jj in range(u_ptr[i], u_ptr[i + 1]):
            s -= u_val[jj] * y[u_idx[jj]]
        y[i] = s / diag[i]
    return y


class IlutPreconditioner:
    """Dual-threshold incomplete LU: entries below ``threshold`` times the
    mean absolute row entry are dropped and at most ``fill`` entries are kept
    per row in each of L and U (plus the diagonal).

    With ``reorder`` (default) the factorization is computed on the reverse
    Cuthill-McKee permutation of ``A``; application permutes back, so the
    object still approximates ``A^-1`` in the original numbering. Without it
    the fill cap truncates the wide rows of unstructured meshes and the
    factor degrades to a poor preconditioner.
    """

    def __init__(self, A, fill: int = 200, threshold: float = 1e-4, reorder: bool = True):
        A = sp.csr_matrix(A)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"ILUT needs a square matrix, got {A.shape}")
        self.perm = reverse_cuthill_mckee(A, symmetric_mode=False) if reorder and n else None
        if self.perm is not None:
            A = A[self.perm][:, self.perm].tocsr()
        A.sort_indices()
        tau = float(threshold)
        if math.isinf(tau):
            tau = 1e300
        out = _ilut_kernel(n, A.indptr.astype(np.int64), A.indices.astype(np.int64),
                           A.data.astype(float), int(fill), tau)
        *factors, bad = out
        if bad >= 0:
            raise ZeroPivotError(int(bad))
        self._factors = tuple(factors)
        self.shape = A.shape
        self.nnz = factors[1].size + factors[4].size + n

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.perm is None:
            return _ilu_apply(*self._factors, r)
        out = np.empty_like(r)
        out[self.perm] = _ilu_apply(*self._factors, r[self.perm])
        return out


def ilut_factor(A, fill: int = 200, threshold: float = 1e-4, reorder: bool = True) -> IlutPreconditioner:
    return IlutPreconditioner(A, fill, threshold, reorder)


# -- direct ------------------------------------------------------------------

class DirectLU:
    """SuperLU factorization of a CSR/CSC matrix."""

    def __init__(self, A):
        A = sp.csc_matrix(A)
        try:
            self._lu = spla.splu(A)
        except RuntimeError as exc:  # SuperLU reports exact singularity this way
            raise SingularMatrixError(f"matrix is singular: {exc}") from None
        diag_u = self._lu.U.diagonal()
        scale = np.abs(diag_u).max() if diag_u.size else 0.0
        if scale == 0.0 or not np.isfinite(diag_u).all() or np.abs(diag_u).min() <= 1e-14 * scale:
            raise SingularMatrixError("matrix is numerically singular")

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._lu.solve(np.asarray(b, dtype=float))


def direct_lu(A, b: np.ndarray) -> np.ndarray:
    return DirectLU(A).solve(b)


def solve_linear(A, b: np.ndarray, cfg: LinearConfig) -> tuple[np.ndarray, int]:
    """Solve ``A x = b`` with the configured backend; returns (x, iterations)."""
    if cfg.backend == "direct":
        return direct_lu(A, b), 0
    M = ilut_factor(A, cfg.ilut_fill, cfg.ilut_threshold)
    res = gmres_solve(A, b, M, cfg)
    return res.x, res.iterations

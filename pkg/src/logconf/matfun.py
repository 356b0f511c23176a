"""Matrix-exponential kernels and the scalar coupling functions of the
two-dimensional log-conformation law.

The scalar functions depend on a symmetric tensor only through
``s = gamma(Psi)**2 + Psi12**2``; ``2 * sqrt(s)`` is the eigenvalue gap.
Every kernel works on scalar or array-valued tensor components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .tensor2 import (
    SymTensor2,
    Tensor2,
    as_general,
    cross_gamma,
    gamma,
    iterated_commutator_bruteforce,
    matmul,
    rotator,
    sym_product,
)

BERNOULLI_CACHE_MAX = 50


@dataclass(frozen=True)
class KernelTolerances:
    """Branch switches for the scalar kernels.

    Below ``small_x_threshold`` (in the half eigenvalue gap ``x``) the closed
    forms are replaced by their even Taylor series with ``series_terms`` terms.
    """

    small_x_threshold: float = 0.5
    series_terms: int = 25
    pade_norm_cap: float = 1.0

    def __post_init__(self):
        if self.small_x_threshold <= 0:
            raise ValueError("small_x_threshold must be positive")
        if self.series_terms < 5:
            raise ValueError("series_terms must be at least 5")


DEFAULT_TOLERANCES = KernelTolerances()


@lru_cache(maxsize=1)
def _bernoulli_table() -> tuple[Fraction, ...]:
    # sum_{n=0}^{i} B_n / (n! (i-n+1)!) = [i == 0]
    b: list[Fraction] = []
    for i in range(BERNOULLI_CACHE_MAX + 1):
        acc = sum(
            (b[n] / (math.factorial(n) * math.factorial(i - n + 1)) for n in range(i)),
            Fraction(0),
        )
        target = Fraction(1 if i == 0 else 0)
        b.append((target - acc) * math.factorial(i))
    return tuple(b)


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number ``B_n`` (convention ``B_1 = -1/2``)."""
    if not 0 <= n <= BERNOULLI_CACHE_MAX:
        raise ValueError(f"Bernoulli index must lie in [0, {BERNOULLI_CACHE_MAX}]")
    return _bernoulli_table()[n]


def bernoulli_even(m: int) -> float:
    """``B_{2m}`` as a float."""
    return float(bernoulli(2 * m))


# ---------------------------------------------------------------------------
# matrix exponential

def expm_sym(psi: SymTensor2) -> SymTensor2:
    """Exponential of a symmetric 2x2 tensor via its spectral decomposition.

    With ``t = tr/2`` and deviator ``D`` of eigenvalues ``+-x``,
    ``exp(Psi) = e^t (cosh(x) I + sinh(x)/x D)``.
    """
    t = 0.5 * (psi.xx + psi.yy)
    g = gamma(psi)
    x = np.sqrt(g * g + psi.xy**2)
    et = np.exp(t)
    c = et * np.cosh(x)
    sc = et * _sinhc(x)
    return SymTensor2(c + sc * g, sc * psi.xy, c - sc * g)


def logm_sym(sigma: SymTensor2) -> SymTensor2:
    """Principal logarithm of an SPD 2x2 tensor, inverse of :func:`expm_sym`.

    Eigenvalues ``t +- x``; the deviator coefficient ``atanh(x/t)/x`` is
    evaluated by its series when ``x/t`` is small.
    """
    t = 0.5 * (sigma.xx + sigma.yy)
    g = gamma(sigma)
    x = np.sqrt(g * g + sigma.xy**2)
    det = t * t - x * x
    if np.any(t <= 0) or np.any(det <= 0):
        raise ValueError("logarithm requires a symmetric positive definite tensor")
    r = x / t
    safe = np.where(r > 1e-4, r, 0.5)
    coef = np.where(r > 1e-4, np.arctanh(safe) / safe, 1.0 + r * r / 3.0 + r**4 / 5.0) / t
    half_logdet = 0.5 * np.log(det)
    return SymTensor2(half_logdet + coef * g, coef * sigma.xy, half_logdet - coef * g)


def _sinhc(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    out = np.where(x > 1e-8, np.sinh(safe) / safe, 1.0 + x * x / 6.0)
    return out if out.ndim else float(out)


def _pade66_coefficients() -> list[float]:
    p = q = 6
    return [
        math.factorial(p + q - k) * math.factorial(p)
        / (math.factorial(p + q) * math.factorial(k) * math.factorial(p - k))
        for k in range(p + 1)
    ]


_PADE66 = _pade66_coefficients()


def _expm_pade_array(a: np.ndarray, cap: float = 1.0) -> np.ndarray:
    """R_{6,6} Pade with scaling and squaring for a stack of 2x2 matrices."""
    a = np.asarray(a, dtype=float)
    norm = np.abs(a).sum(axis=-1).max(axis=-1) / cap  # infinity norm per matrix
    # smallest j >= 0 with ||X|| < cap * 2^j
    j = np.where(norm > 0, np.floor(np.log2(np.maximum(norm, 1e-300))) + 1, 0)
    j = np.maximum(j, 0).astype(int)
    x = a / (2.0 ** j)[..., None, None]
    eye = np.broadcast_to(np.eye(2), x.shape)
    num = np.zeros_like(x)
    den = np.zeros_like(x)
    power = eye.copy()
    for k, c in enumerate(_PADE66):
        num = num + c * power
        den = den + (-1) ** k * c * power
        power = power @ x
    r = np.linalg.solve(den, num)
    # in-place squarings, j per matrix
    for step in range(int(j.max()) if j.size else 0):
        mask = (j > step)[..., None, None]
        r = np.where(mask, r @ r, r)
    return r


def expm_pade(x, tol: KernelTolerances = DEFAULT_TOLERANCES) -> Tensor2:
    """Matrix exponential of a general 2x2 tensor (Pade R_{6,6}, scaling/squaring)."""
    x = as_general(x)
    arr = np.moveaxis(np.asarray(x.as_array(), dtype=float), (0, 1), (-2, -1))
    r = _expm_pade_array(arr, tol.pade_norm_cap)
    return Tensor2(r[..., 0, 0], r[..., 0, 1], r[..., 1, 0], r[..., 1, 1])


def _scalarize(t):
    if isinstance(t, Tensor2):
        return Tensor2(*(float(v) if np.ndim(v) == 0 else v for v in (t.xx, t.xy, t.yx, t.yy)))
    return t


# ---------------------------------------------------------------------------
# scalar couplings f and g as functions of s = gamma^2 + Psi12^2

def _f_series_coeffs(n_terms: int) -> np.ndarray:
    # f(s) = sum_{n>=1} B_{2n} 4^n / (2n)! s^(n-1)
    return np.array(
        [float(bernoulli(2 * n) * 4**n / math.factorial(2 * n)) for n in range(1, n_terms + 1)]
    )


def _g_series_coeffs(n_terms: int) -> np.ndarray:
    # g(s) = sum_{n>=1} s^(n-1) / (2n+1)!
    return np.array([1.0 / math.factorial(2 * n + 1) for n in range(1, n_terms + 1)])


@lru_cache(maxsize=8)
def _series(kind: str, n_terms: int) -> np.ndarray:
    n_terms = min(n_terms, BERNOULLI_CACHE_MAX // 2)
    return _f_series_coeffs(n_terms) if kind == "f" else _g_series_coeffs(n_terms)


def _poly_and_deriv(coeffs: np.ndarray, s):
    val = np.zeros_like(s)
    der = np.zeros_like(s)
    for c in coeffs[::-1]:
        der = der * s + val
        val = val * s + c
    return val, der


def _split(s, tol: KernelTolerances):
    s = np.asarray(s, dtype=float)
    small = s < tol.small_x_threshold**2
    x = np.sqrt(np.where(small, 1.0, s))
    return s, small, x


def f_of_s(s, tol: KernelTolerances = DEFAULT_TOLERANCES):
    """``f = (x coth x - 1) / x^2`` with ``x = sqrt(s)``, and ``df/ds``."""
    s, small, x = _split(s, tol)
    coth = 1.0 / np.tanh(x)
    csch2 = coth * coth - 1.0
    f_big = (x * coth - 1.0) / (x * x)
    dfdx = (coth - x * csch2) / (x * x) - 2.0 * (x * coth - 1.0) / x**3
    df_big = dfdx / (2.0 * x)
    f_small, df_small = _poly_and_deriv(_series("f", tol.series_terms), s)
    f = np.where(small, f_small, f_big)
    df = np.where(small, df_small, df_big)
    if f.ndim == 0:
        return float(f), float(df)
    return f, df


def g_of_s(s, tol: KernelTolerances = DEFAULT_TOLERANCES):
    """``g = (sinh x - x) / x^3`` with ``x = sqrt(s)``, and ``dg/ds``."""
    s, small, x = _split(s, tol)
    sh = np.sinh(x)
    ch = np.cosh(x)
    g_big = (sh - x) / x**3
    dgdx = (ch - 1.0) / x**3 - 3.0 * (sh - x) / x**4
    dg_big = dgdx / (2.0 * x)
    g_small, dg_small = _poly_and_deriv(_series("g", tol.series_terms), s)
    g = np.where(small, g_small, g_big)
    dg = np.where(small, dg_small, dg_big)
    if g.ndim == 0:
        return float(g), float(dg)
    return g, dg


def _s(psi: SymTensor2):
    return gamma(psi) ** 2 + psi.xy**2


def _ds(psi: SymTensor2, dpsi: SymTensor2):
    return 2.0 * (gamma(psi) * gamma(dpsi) + psi.xy * dpsi.xy)


def f_coupling(psi: SymTensor2, tol: KernelTolerances = DEFAULT_TOLERANCES):
    return f_of_s(_s(psi), tol)[0]


def g_deriv(psi: SymTensor2, tol: KernelTolerances = DEFAULT_TOLERANCES):
    return g_of_s(_s(psi), tol)[0]


# ---------------------------------------------------------------------------
# strain coupling

def strain_coupling_closed(psi: SymTensor2, eps: SymTensor2,
                           tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    """Closed form of ``2 * sum_n B_2n/(2n)! {Psi, eps}_2n``."""
    f = f_coupling(psi, tol)
    return eps * 2.0 + rotator(psi) * (2.0 * cross_gamma(psi, eps) * f)


def strain_coupling_dpsi(psi: SymTensor2, eps: SymTensor2, dpsi: SymTensor2,
                         tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    """Directional derivative of :func:`strain_coupling_closed` in ``psi``."""
    f, df = f_of_s(_s(psi), tol)
    k = cross_gamma(psi, eps)
    dk = cross_gamma(dpsi, eps)
    return (rotator(dpsi) * (2.0 * k * f)
            + rotator(psi) * (2.0 * (dk * f + k * df * _ds(psi, dpsi))))


def series_rhs_oracle(psi: SymTensor2, eps: SymTensor2, n_terms: int) -> SymTensor2:
    """Truncated Bernoulli series ``sum_{n<=N} B_2n/(2n)! {Psi, eps}_2n``."""
    if float(psi.frobenius()) >= math.pi:
        raise ValueError("series oracle requires ||Psi||_F < pi")
    acc = as_general(eps)
    term = as_general(eps)
    for n in range(1, n_terms + 1):
        term = iterated_commutator_bruteforce(psi, term, 2)
        acc = acc + term * (bernoulli_even(n) / math.factorial(2 * n))
    return acc.sym()


# ---------------------------------------------------------------------------
# derivatives of the exponential

def exp_derivative_sandwich(psi: SymTensor2, dpsi: SymTensor2,
                            tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    """``exp(-Psi/2) (d exp(Psi)) exp(-Psi/2)`` in direction ``dpsi``."""
    g = g_deriv(psi, tol)
    return dpsi + rotator(psi) * (cross_gamma(psi, dpsi) * g)


def sandwich_dpsi(psi: SymTensor2, d: SymTensor2, delta: SymTensor2,
                  tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    """Derivative of ``exp_derivative_sandwich(psi, d)`` w.r.t. ``psi`` along ``delta``."""
    g, dg = g_of_s(_s(psi), tol)
    c = cross_gamma(psi, d)
    dc = cross_gamma(delta, d)
    return rotator(delta) * (c * g) + rotator(psi) * (dc * g + c * dg * _ds(psi, delta))


def dexpm_sym(psi: SymTensor2, dpsi: SymTensor2,
              tol: KernelTolerances = DEFAULT_TOLERANCES,
              half: SymTensor2 | None = None) -> SymTensor2:
    """Directional derivative of ``exp(Psi)``."""
    if half is None:
        half = expm_sym(psi * 0.5)
    return sym_product(half, exp_derivative_sandwich(psi, dpsi, tol), half)


def d2expm_sym(psi: SymTensor2, d: SymTensor2, delta: SymTensor2,
               tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    """Derivative of ``dexpm_sym(psi, d)`` w.r.t. ``psi`` along ``delta``."""
    half = expm_sym(psi * 0.5)
    dhalf = dexpm_sym(psi * 0.5, delta * 0.5, tol)
    s = exp_derivative_sandwich(psi, d, tol)
    ds = sandwich_dpsi(psi, d, delta, tol)
    a = matmul(matmul(dhalf, s), half)
    return (a + a.T).sym() + sym_product(half, ds, half)


def div_expm(psi: SymTensor2, dpsi_dx: SymTensor2, dpsi_dy: SymTensor2,
             tol: KernelTolerances = DEFAULT_TOLERANCES):
    """Divergence of ``exp(Psi)`` from the field value and its gradient.

    Returns the two components ``(d_x s11 + d_y s12, d_x s12 + d_y s22)``.
    """
    half = expm_sym(psi * 0.5)
    sx = dexpm_sym(psi, dpsi_dx, tol, half)
    sy = dexpm_sym(psi, dpsi_dy, tol, half)
    return sx.xx + sy.xy, sx.xy + sy.yy


# ---------------------------------------------------------------------------
# quadrature and series oracles for the appendix identities

def wilcox_integral_oracle(x, y, npts: int = 32) -> Tensor2:
    """Gauss-Legendre value of ``int_0^1 exp((1-a) X) Y exp(a X) da``."""
    if npts < 8:
        raise ValueError("npts must be at least 8")
    x = as_general(x)
    y = as_general(y)
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    alpha = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    xa = np.asarray(x.as_array(), dtype=float)
    ya = np.asarray(y.as_array(), dtype=float)
    left = _expm_pade_array((1.0 - alpha)[:, None, None] * xa)
    right = _expm_pade_array(alpha[:, None, None] * xa)
    total = np.einsum("k,kij,jl,klm->im", w, left, ya, right)
    return Tensor2.from_array(total)


def hadamard_conjugation(x, y) -> Tensor2:
    """``exp(X) Y exp(-X)`` evaluated directly."""
    x = as_general(x)
    return _scalarize(matmul(matmul(expm_pade(x), y), expm_pade(-x)))


def hadamard_series(x, y, n_terms: int = 25) -> Tensor2:
    """Truncated series ``sum_n 1/n! {X, Y}_n``."""
    acc = as_general(y)
    term = as_general(y)
    for n in range(1, n_terms + 1):
        term = iterated_commutator_bruteforce(x, term, 1)
        acc = acc + term * (1.0 / math.factorial(n))
    return acc


def wilcox_series(x, y, n_terms: int = 25) -> Tensor2:
    """``sum_n 1/(n+1)! {X, Y}_n exp(X)``."""
    acc = as_general(y) * 0.0
    term = as_general(y)
    for n in range(n_terms + 1):
        if n:
            term = iterated_commutator_bruteforce(x, term, 1)
        acc = acc + term * (1.0 / math.factorial(n + 1))
    return matmul(acc, expm_pade(x))


def wilcox_sandwich_series(x, y, n_terms: int = 25) -> Tensor2:
    """``exp(X/2) (sum_n 1/((2n+1)! 4^n) {X, Y}_2n) exp(X/2)``."""
    acc = as_general(y) * 0.0
    term = as_general(y)
    for n in range(n_terms + 1):
        if n:
            term = iterated_commutator_bruteforce(x, term, 2)
        acc = acc + term * (1.0 / (math.factorial(2 * n + 1) * 4.0**n))
    half = expm_pade(as_general(x) * 0.5)
    return matmul(matmul(half, acc), half)

"""Small-tensor algebra for 2x2 tensors.

All value types accept either Python floats or numpy arrays as components, so
the same kernels run pointwise and vectorized over quadrature points.

Gradient convention: ``(grad u)[i, j] = d u_i / d x_j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Vec2:
    x: float | np.ndarray
    y: float | np.ndarray

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, c) -> "Vec2":
        return Vec2(c * self.x, c * self.y)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2"):
        return self.x * other.x + self.y * other.y

    def norm(self):
        return np.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class Tensor2:
    xx: float | np.ndarray
    xy: float | np.ndarray
    yx: float | np.ndarray
    yy: float | np.ndarray

    @staticmethod
    def from_array(a) -> "Tensor2":
        a = np.asarray(a, dtype=float)
        return Tensor2(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    @staticmethod
    def identity() -> "Tensor2":
        return Tensor2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def zero() -> "Tensor2":
        return Tensor2(0.0, 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([[self.xx, self.xy], [self.yx, self.yy]])

    def __add__(self, other) -> "Tensor2":
        o = as_general(other)
        return Tensor2(self.xx + o.xx, self.xy + o.xy, self.yx + o.yx, self.yy + o.yy)

    def __sub__(self, other) -> "Tensor2":
        o = as_general(other)
        return Tensor2(self.xx - o.xx, self.xy - o.xy, self.yx - o.yx, self.yy - o.yy)

    def __mul__(self, c) -> "Tensor2":
        return Tensor2(c * self.xx, c * self.xy, c * self.yx, c * self.yy)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor2":
        return self * -1.0

    def __matmul__(self, other) -> "Tensor2":
        return matmul(self, other)

    @property
    def T(self) -> "Tensor2":
        return Tensor2(self.xx, self.yx, self.xy, self.yy)

    def trace(self):
        return self.xx + self.yy

    def frobenius(self):
        return np.sqrt(self.xx**2 + self.xy**2 + self.yx**2 + self.yy**2)

    def sym(self) -> "SymTensor2":
        return SymTensor2(self.xx, 0.5 * (self.xy + self.yx), self.yy)

    def apply(self, v: Vec2) -> Vec2:
        return Vec2(self.xx * v.x + self.xy * v.y, self.yx * v.x + self.yy * v.y)


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric 2x2 tensor stored as (xx, xy, yy)."""

    xx: float | np.ndarray
    xy: float | np.ndarray
    yy: float | np.ndarray

    @staticmethod
    def identity() -> "SymTensor2":
        return SymTensor2(1.0, 0.0, 1.0)

    @staticmethod
    def zero() -> "SymTensor2":
        return SymTensor2(0.0, 0.0, 0.0)

    @staticmethod
    def from_array(a) -> "SymTensor2":
        a = np.asarray(a, dtype=float)
        return SymTensor2(a[0, 0], 0.5 * (a[0, 1] + a[1, 0]), a[1, 1])

    @property
    def yx(self):
        return self.xy

    def full(self) -> Tensor2:
        return Tensor2(self.xx, self.xy, self.xy, self.yy)

    def as_array(self) -> np.ndarray:
        return np.array([[self.xx, self.xy], [self.xy, self.yy]])

    def __add__(self, other):
        if isinstance(other, SymTensor2):
            return SymTensor2(self.xx + other.xx, self.xy + other.xy, self.yy + other.yy)
        return self.full() + other

    def __sub__(self, other):
        if isinstance(other, SymTensor2):
            return SymTensor2(self.xx - other.xx, self.xy - other.xy, self.yy - other.yy)
        return self.full() - other

    def __mul__(self, c) -> "SymTensor2":
        return SymTensor2(c * self.xx, c * self.xy, c * self.yy)

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor2":
        return SymTensor2(-self.xx, -self.xy, -self.yy)

    def __matmul__(self, other) -> Tensor2:
        return matmul(self, other)

    def trace(self):
        return self.xx + self.yy

    def det(self):
        return self.xx * self.yy - self.xy**2

    def frobenius(self):
        return np.sqrt(self.xx**2 + 2.0 * self.xy**2 + self.yy**2)

    def ddot(self, other: "SymTensor2"):
        """Double contraction ``A : B``."""
        return self.xx * other.xx + 2.0 * self.xy * other.xy + self.yy * other.yy


def as_general(t) -> Tensor2:
    if isinstance(t, SymTensor2):
        return t.full()
    return t


def matmul(a, b) -> Tensor2:
    a, b = as_general(a), as_general(b)
    return Tensor2(
        a.xx * b.xx + a.xy * b.yx,
        a.xx * b.xy + a.xy * b.yy,
        a.yx * b.xx + a.yy * b.yx,
        a.yx * b.xy + a.yy * b.yy,
    )


def sym_product(a: SymTensor2, b: SymTensor2, c: SymTensor2) -> SymTensor2:
    """``a @ b @ c`` for symmetric ``a == c``; the result is symmetric."""
    return matmul(matmul(a, b), c).sym()


def gamma(c) -> float | np.ndarray:
    """Half the difference of the diagonal entries, ``(C11 - C22) / 2``."""
    return 0.5 * (c.xx - c.yy)


def rotator(a: SymTensor2) -> SymTensor2:
    """The matrix ``[[-A12, gamma(A)], [gamma(A), A12]]``.

    It spans the direction of every even iterated commutator with ``a``.
    """
    g = gamma(a)
    return SymTensor2(-a.xy, g, a.xy)


def cross_gamma(a: SymTensor2, b: SymTensor2):
    """Scalar ``gamma(A) * B12 - A12 * gamma(B)``."""
    return gamma(a) * b.xy - a.xy * gamma(b)


def strain_and_vorticity(gradu: Tensor2) -> tuple[SymTensor2, Tensor2]:
    """Split a velocity gradient into strain rate and vorticity tensor."""
    eps = SymTensor2(gradu.xx, 0.5 * (gradu.xy + gradu.yx), gradu.yy)
    w = 0.5 * (gradu.xy - gradu.yx)
    zero = 0.0 * w
    return eps, Tensor2(zero, w, -w, zero)


def commutator(x, y) -> Tensor2:
    return matmul(x, y) - matmul(y, x)


def iterated_commutator_bruteforce(a, b, n: int) -> Tensor2:
    """Nested commutator ``[A, [A, ... [A, B]]]`` with ``n`` brackets."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = as_general(b)
    for _ in range(n):
        out = commutator(a, out)
    return out


def iterated_commutator_closed(a: SymTensor2, b: SymTensor2, n: int) -> SymTensor2:
    """Closed form of the even iterated commutator of two symmetric tensors.

    ``{A, B}_{2m} = 4^m * R(A) * (gamma(A) B12 - A12 gamma(B)) * (gamma(A)^2 + A12^2)^(m-1)``
    with ``R(A) = [[-A12, gamma(A)], [gamma(A), A12]]`` and ``n = 2m``.
    """
    if n < 2 or n % 2:
        raise ValueError(f"closed form needs an even n >= 2, got {n}")
    m = n // 2
    s = gamma(a) ** 2 + a.xy**2
    scale = 4.0**m * cross_gamma(a, b) * s ** (m - 1)
    return rotator(a) * scale


def commute_sym(psi: SymTensor2, w) -> SymTensor2:
    """``[Psi, Omega]`` for the vorticity ``Omega = [[0, w], [-w, 0]]``."""
    return SymTensor2(-2.0 * psi.xy * w, w * (psi.xx - psi.yy), 2.0 * psi.xy * w)

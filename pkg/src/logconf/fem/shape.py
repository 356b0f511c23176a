"""Reference P2 triangle: Lagrange basis and quadrature rules.

Local node order: vertices 0, 1, 2, then the midnodes of edges (0,1), (1,2), (2,0).
Reference coordinates ``(xi, eta)`` with barycentrics ``(1 - xi - eta, xi, eta)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EDGES = ((0, 1, 3), (1, 2, 4), (2, 0, 5))

NODE_COORDS = np.array(
    [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]
)


def shape_p2(ref_point):
    """Values (6,), gradients (6, 2) and Hessians (6, 2, 2) at reference points.

    ``ref_point`` may be a single ``(xi, eta)`` pair or an ``(n, 2)`` array, in
    which case the outputs gain a leading axis.
    """
    pts = np.atleast_2d(np.asarray(ref_point, dtype=float))
    xi, eta = pts[:, 0], pts[:, 1]
    l0 = 1.0 - xi - eta
    n = pts.shape[0]
    val = np.stack([
        l0 * (2 * l0 - 1), xi * (2 * xi - 1), eta * (2 * eta - 1),
        4 * l0 * xi, 4 * xi * eta, 4 * eta * l0,
    ], axis=1)
    dxi = np.stack([
        1 - 4 * l0, 4 * xi - 1, np.zeros(n),
        4 * (l0 - xi), 4 * eta, -4 * eta,
    ], axis=1)
    deta = np.stack([
        1 - 4 * l0, np.zeros(n), 4 * eta - 1,
        -4 * xi, 4 * xi, 4 * (l0 - eta),
    ], axis=1)
    grad = np.stack([dxi, deta], axis=2)
    hess = np.array([
        [[4, 4], [4, 4]],
        [[4, 0], [0, 0]],
        [[0, 0], [0, 4]],
        [[-8, -4], [-4, 0]],
        [[0, 4], [4, 0]],
        [[0, -4], [-4, -8]],
    ], dtype=float)
    hess = np.broadcast_to(hess, (n, 6, 2, 2)).copy()
    if np.ndim(ref_point) == 1:
        return val[0], grad[0], hess[0]
    return val, grad, hess


@dataclass(frozen=True)
class QuadratureRule:
    """Points in reference coordinates; weights sum to the reference measure."""

    points: np.ndarray
    weights: np.ndarray


def _orbit3(a, w):
    b = 1.0 - 2.0 * a
    return [(a, a), (b, a), (a, b)], [w] * 3


def _orbit6(a, b, w):
    c = 1.0 - a - b
    pts = [(a, b), (b, a), (a, c), (c, a), (b, c), (c, b)]
    return pts, [w] * 6


def triangle_rule(degree: int = 5) -> QuadratureRule:
    """Symmetric triangle rules (Dunavant) exact to ``degree`` 5 or 6."""
    pts: list[tuple[float, float]] = []
    wts: list[float] = []
    if degree <= 5:
        pts.append((1 / 3, 1 / 3))
        wts.append(0.225)
        for a, w in ((0.059715871789770, 0.132394152788506),
                     (0.797426985353087, 0.125939180544827)):
            p, ww = _orbit3((1 - a) / 2, w)
            pts += p
            wts += ww
    elif degree == 6:
        for a, w in ((0.249286745170910, 0.116786275726379),
                     (0.063089014491502, 0.050844906370207)):
            p, ww = _orbit3(a, w)
            pts += p
            wts += ww
        p, ww = _orbit6(0.053145049844817, 0.310352451033784, 0.082851075618374)
        pts += p
        wts += ww
    else:
        raise ValueError(f"no triangle rule of degree {degree}")
    return QuadratureRule(np.array(pts), 0.5 * np.array(wts))


def line_rule(npts: int = 4) -> QuadratureRule:
    """Gauss-Legendre on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return QuadratureRule(0.5 * (x + 1.0), 0.5 * w)


def edge_shape_p2(t):
    """Quadratic 1D Lagrange basis on an edge ``[a, b, mid]`` at ``t`` in [0, 1]."""
    t = np.asarray(t, dtype=float)
    val = np.stack([(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)], axis=-1)
    der = np.stack([4 * t - 3, 4 * t - 1, 4 - 8 * t], axis=-1)
    return val, der

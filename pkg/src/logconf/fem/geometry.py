"""Isoparametric element geometry at quadrature points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .shape import QuadratureRule, shape_p2, triangle_rule


@dataclass
class QuadData:
    """Basis data in physical coordinates.

    ``N`` (Q, 6), ``G`` (E, Q, 6, 2) gradients, ``lap`` (E, Q, 6) Laplacians,
    ``wdet`` (E, Q) quadrature weight times Jacobian determinant, ``x`` (E, Q, 2).
    """

    N: np.ndarray
    G: np.ndarray
    lap: np.ndarray
    wdet: np.ndarray
    x: np.ndarray


def element_geometry(coords: np.ndarray, ref_points: np.ndarray):
    """Physical values, gradients, Laplacians and det J of the P2 basis.

    ``coords`` is (E, 6, 2). Second derivatives include the curvature of the
    isoparametric map, so curved elements are handled exactly.
    """
    N, dN, H = shape_p2(np.atleast_2d(ref_points))
    jac = np.einsum("eai,qaj->eqij", coords, dN)
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
    inv = np.empty_like(jac)
    inv[..., 0, 0] = jac[..., 1, 1] / det
    inv[..., 1, 1] = jac[..., 0, 0] / det
    inv[..., 0, 1] = -jac[..., 0, 1] / det
    inv[..., 1, 0] = -jac[..., 1, 0] / det
    G = np.einsum("qaj,eqji->eqai", dN, inv)
    # reference Hessian of the map, per physical coordinate k: (E, Q, 2, 2, 2)
    d2x = np.einsum("eak,qajl->eqkjl", coords, H)
    Hc = H[None] - np.einsum("eqak,eqkjl->eqajl", G, d2x)
    lap = np.einsum("eqji,eqajl,eqli->eqa", inv, Hc, inv)
    x = np.einsum("qa,eai->eqi", N, coords)
    return N, G, lap, det, x


def quad_data(mesh, rule: QuadratureRule | None = None) -> QuadData:
    rule = rule or triangle_rule(5)
    coords = mesh.nodes[mesh.elements]
    N, G, lap, det, x = element_geometry(coords, rule.points)
    return QuadData(N, G, lap, det * rule.weights[None, :], x)

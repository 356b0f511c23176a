"""Fully developed Oldroyd-B channel data used at the inflow."""
from __future__ import annotations

import numpy as np

from ..matfun import logm_sym
from ..tensor2 import SymTensor2


def inflow_velocity(y, ubar: float = 1.0, R: float = 1.0):
    """Parabolic profile ``3/8 ubar (4 - y^2/R^2)`` on the half channel ``0 <= y <= 2R``."""
    y = np.asarray(y, dtype=float)
    return 0.375 * ubar * (4.0 - np.square(y / R))


def inflow_shear_rate(y, ubar: float = 1.0, R: float = 1.0):
    """``du/dy`` of the inflow profile."""
    return -0.75 * ubar * np.asarray(y, dtype=float) / R**2


def weissenberg_shear(y, lam: float, ubar: float = 1.0, R: float = 1.0):
    """Local ``w = lambda du/dy``."""
    return lam * inflow_shear_rate(y, ubar, R)


def shear_conformation(w) -> SymTensor2:
    """Oldroyd-B conformation ``[[1 + 2w^2, w], [w, 1]]`` of steady simple shear."""
    w = np.asarray(w, dtype=float)
    return SymTensor2(1.0 + 2.0 * w * w, w, np.ones_like(w))


def shear_psi(w) -> SymTensor2:
    """Matrix logarithm of :func:`shear_conformation` (spectral closed form)."""
    return logm_sym(shear_conformation(w))


def shear_psi_opq(w) -> SymTensor2:
    """Second route via the auxiliary quantities ``o, p, q``.

    ``o = sqrt(w^2 (1 + w^2))``, ``p = ln(1 + w^2)`` and
    ``q = ln(1 + 2 (w^2 - o)) = 2 ln(sqrt(1 + w^2) - |w|) = -2 asinh|w|``,
    so that ``Psi = p/2 I - q/(2 o) [[w^2, w], [w, -w^2]]``.
    """
    w = np.asarray(w, dtype=float)
    a = np.abs(w)
    o = a * np.sqrt(1.0 + w * w)
    p = np.log1p(w * w)
    q = -2.0 * np.arcsinh(a)
    safe = np.where(o > 0, o, 1.0)
    q_over_o = np.where(o > 0, q / safe, -2.0)
    return SymTensor2(0.5 * (p - q_over_o * w * w), -0.5 * q_over_o * w, 0.5 * (p + q_over_o * w * w))


def inflow_psi(y, lam: float, ubar: float = 1.0, R: float = 1.0) -> SymTensor2:
    return shear_psi(weissenberg_shear(y, lam, ubar, R))


def inflow_psi_opq(y, lam: float, ubar: float = 1.0, R: float = 1.0) -> SymTensor2:
    return shear_psi_opq(weissenberg_shear(y, lam, ubar, R))

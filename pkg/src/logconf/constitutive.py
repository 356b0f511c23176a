"""Pointwise kernels of the steady log-conformation constitutive law.

The residual is kept in Psi units,

    (u . grad) Psi + [Psi, Omega] + P(e^Psi) e^-Psi / lambda - C(Psi, eps),

with ``C`` the closed-form strain coupling. The weak-form weighting lives in
:mod:`logconf.fem`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matfun import (
    DEFAULT_TOLERANCES,
    KernelTolerances,
    dexpm_sym,
    expm_sym,
    strain_coupling_closed,
    strain_coupling_dpsi,
)
from .tensor2 import (
    SymTensor2,
    Tensor2,
    Vec2,
    commute_sym,
    matmul,
    strain_and_vorticity,
)


@dataclass(frozen=True)
class OldroydB:
    name: str = field(default="oldroyd-b", init=False)


@dataclass(frozen=True)
class Giesekus:
    alpha: float = 0.0
    name: str = field(default="giesekus", init=False)

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"Giesekus mobility must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class FluidParams:
    """Material data in SI units. ``rho = 0`` selects creeping flow."""

    rho: float
    mu_s: float
    mu_p: float
    lam: float
    model: OldroydB | Giesekus = OldroydB()

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        if self.mu_s <= 0 or self.mu_p <= 0:
            raise ValueError("viscosities must be positive")
        if self.lam <= 0:
            raise ValueError("relaxation time must be positive")

    @property
    def mu(self) -> float:
        return self.mu_s + self.mu_p

    def with_lambda(self, lam: float) -> "FluidParams":
        return FluidParams(self.rho, self.mu_s, self.mu_p, lam, self.model)


@dataclass(frozen=True)
class PointState:
    u: Vec2
    gradu: Tensor2
    psi: SymTensor2
    gradpsi: tuple[SymTensor2, SymTensor2]

    def advect(self) -> SymTensor2:
        dx, dy = self.gradpsi
        return dx * self.u.x + dy * self.u.y


def relaxation_source(params: FluidParams, psi: SymTensor2) -> SymTensor2:
    """``P(e^Psi) e^-Psi`` for the configured model."""
    inv = expm_sym(-psi)
    if isinstance(params.model, Giesekus) and params.model.alpha != 0.0:
        a = params.model.alpha
        fwd = expm_sym(psi)
        return SymTensor2(1.0 - 2.0 * a, 0.0, 1.0 - 2.0 * a) - inv * (1.0 - a) + fwd * a
    return SymTensor2(1.0, 0.0, 1.0) - inv


def relaxation_source_derivative(params: FluidParams, psi: SymTensor2,
                                 dpsi: SymTensor2,
                                 tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    d_inv = dexpm_sym(-psi, -dpsi, tol)
    if isinstance(params.model, Giesekus) and params.model.alpha != 0.0:
        a = params.model.alpha
        return -d_inv * (1.0 - a) + dexpm_sym(psi, dpsi, tol) * a
    return -d_inv


def psi_residual_steady(state: PointState, params: FluidParams,
                        tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    eps, omega = strain_and_vorticity(state.gradu)
    return (state.advect()
            + commute_sym(state.psi, omega.xy)
            + relaxation_source(params, state.psi) * (1.0 / params.lam)
            - strain_coupling_closed(state.psi, eps, tol))


def psi_residual_jacobian(state: PointState, params: FluidParams,
                          dpsi: SymTensor2,
                          dgradpsi: tuple[SymTensor2, SymTensor2],
                          du: Vec2, dgradu: Tensor2,
                          tol: KernelTolerances = DEFAULT_TOLERANCES) -> SymTensor2:
    """Directional derivative of :func:`psi_residual_steady`."""
    psi = state.psi
    eps, omega = strain_and_vorticity(state.gradu)
    deps, domega = strain_and_vorticity(dgradu)
    gx, gy = state.gradpsi
    dgx, dgy = dgradpsi
    advect = gx * du.x + gy * du.y + dgx * state.u.x + dgy * state.u.y
    rotate = commute_sym(dpsi, omega.xy) + commute_sym(psi, domega.xy)
    source = relaxation_source_derivative(params, psi, dpsi, tol) * (1.0 / params.lam)
    coupling = strain_coupling_closed(psi, deps, tol) + strain_coupling_dpsi(psi, eps, dpsi, tol)
    return advect + rotate + source - coupling


def polymer_relaxation(params: FluidParams, sigma: SymTensor2) -> SymTensor2:
    """``P(sigma)`` of the conformation tensor."""
    d = sigma - SymTensor2.identity()
    if isinstance(params.model, Giesekus) and params.model.alpha != 0.0:
        return d + matmul(d, d).sym() * params.model.alpha
    return d


def _require_spd(sigma: SymTensor2):
    tr = np.asarray(sigma.trace())
    det = np.asarray(sigma.det())
    if np.any(tr <= 0) or np.any(det <= 0):
        raise ValueError("conformation tensor must be symmetric positive-definite")


def conformation_residual_steady(u: Vec2, gradu: Tensor2, sigma: SymTensor2,
                                 gradsigma: tuple[SymTensor2, SymTensor2],
                                 params: FluidParams) -> SymTensor2:
    """Steady residual of the conformation-tensor equation (verification only)."""
    _require_spd(sigma)
    dx, dy = gradsigma
    stretch = matmul(gradu, sigma) + matmul(sigma, gradu.T)
    return (dx * u.x + dy * u.y) - stretch.sym() + polymer_relaxation(params, sigma) * (1.0 / params.lam)


def theorem_transfer_check(psi: SymTensor2, gradpsi_along_u: SymTensor2,
                           gradu: Tensor2, params: FluidParams,
                           tol: KernelTolerances = DEFAULT_TOLERANCES) -> float:
    """Residual of the conformation equation induced by a log-conformation solution.

    The material derivative of Psi is fixed by requiring the transient
    log-conformation equation to hold; it is pushed through the exponential
    derivative to a material derivative of ``sigma = e^Psi``, which is then
    inserted into the conformation equation. Returns the Frobenius norm of
    that residual.
    """
    eps, omega = strain_and_vorticity(gradu)
    rest = (commute_sym(psi, omega.xy)
            + relaxation_source(params, psi) * (1.0 / params.lam)
            - strain_coupling_closed(psi, eps, tol))
    dt_psi = -(gradpsi_along_u + rest)
    material_psi = dt_psi + gradpsi_along_u
    material_sigma = dexpm_sym(psi, material_psi, tol)
    sigma = expm_sym(psi)
    stretch = (matmul(gradu, sigma) + matmul(sigma, gradu.T)).sym()
    res = material_sigma - stretch + polymer_relaxation(params, sigma) * (1.0 / params.lam)
    return res.frobenius()

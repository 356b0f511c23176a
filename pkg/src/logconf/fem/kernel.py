"""Quadrature-point flux of the steady weak form and its linearization.

The weak residual is written as ``int sum_t test_t * F_t(state)`` where the
20 *slots* hold, per field, the value and both derivatives, plus the
Laplacians of the two velocity components:

    0..5    values of u, v, p, Psi11, Psi12, Psi22
    6..17   d/dx, d/dy of each field (6 + 2*field + dim)
    18, 19  Laplacian of u and v

A test function of field ``c`` only touches the slots of ``c``, and the same
layout is used for the trial state, so element matrices are ``B^T D B``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constitutive import FluidParams, PointState, psi_residual_jacobian, psi_residual_steady
from ..matfun import DEFAULT_TOLERANCES, KernelTolerances, d2expm_sym, dexpm_sym, expm_sym
from ..tensor2 import SymTensor2, Tensor2, Vec2

N_FIELDS = 6
N_SLOTS = 20
U, V, P, S11, S12, S22 = range(6)
LAP_U, LAP_V = 18, 19


def grad_slot(field: int, dim: int) -> int:
    return 6 + 2 * field + dim


@dataclass(frozen=True)
class AssemblyOptions:
    """Switches of the discrete formulation.

    ``full_stab_jacobian`` adds the velocity derivative of the stabilization
    test operators, which the default Newton matrix leaves out.
    """

    creeping: bool = True
    include_gls: bool = True
    include_supg: bool = True
    full_stab_jacobian: bool = False


@dataclass
class Frozen:
    """Stabilization data held fixed during linearization (per quadrature point)."""

    us_x: np.ndarray
    us_y: np.ndarray
    tau_g: np.ndarray
    tau_c: np.ndarray


def _unpack(s: np.ndarray):
    u = Vec2(s[:, U], s[:, V])
    gradu = Tensor2(s[:, grad_slot(U, 0)], s[:, grad_slot(U, 1)],
                    s[:, grad_slot(V, 0)], s[:, grad_slot(V, 1)])
    psi = SymTensor2(s[:, S11], s[:, S12], s[:, S22])
    gx = SymTensor2(s[:, grad_slot(S11, 0)], s[:, grad_slot(S12, 0)], s[:, grad_slot(S22, 0)])
    gy = SymTensor2(s[:, grad_slot(S11, 1)], s[:, grad_slot(S12, 1)], s[:, grad_slot(S22, 1)])
    gradp = Vec2(s[:, grad_slot(P, 0)], s[:, grad_slot(P, 1)])
    lap = Vec2(s[:, LAP_U], s[:, LAP_V])
    return u, gradu, psi, (gx, gy), gradp, lap


def _advection(u: Vec2, gradu: Tensor2) -> Vec2:
    return gradu.apply(u)


def _scatter(F, params: FluidParams, opts: AssemblyOptions, fr: Frozen,
             adv: Vec2 | None, stress: SymTensor2, p, div_u, rm: Vec2 | None,
             rc: SymTensor2, us: Vec2, dus: Vec2 | None = None,
             rm0: Vec2 | None = None, rc0: SymTensor2 | None = None):
    """Fill the test slots. ``dus``/``rm0``/``rc0`` add the test-operator
    velocity derivative (used only for the full stabilization Jacobian)."""
    rho = params.rho
    if adv is not None:
        F[:, U] += rho * adv.x
        F[:, V] += rho * adv.y
    F[:, grad_slot(U, 0)] += stress.xx - p
    F[:, grad_slot(U, 1)] += stress.xy
    F[:, grad_slot(V, 0)] += stress.xy
    F[:, grad_slot(V, 1)] += stress.yy - p
    F[:, P] += div_u

    if rm is not None:
        tg = fr.tau_g
        cp = params.mu_p / params.lam
        F[:, grad_slot(P, 0)] += tg * rm.x
        F[:, grad_slot(P, 1)] += tg * rm.y
        F[:, LAP_U] += tg * params.mu_s * rm.x
        F[:, LAP_V] += tg * params.mu_s * rm.y
        F[:, grad_slot(S11, 0)] -= tg * cp * rm.x
        F[:, grad_slot(S12, 1)] -= tg * cp * rm.x
        F[:, grad_slot(S12, 0)] -= tg * cp * rm.y
        F[:, grad_slot(S22, 1)] -= tg * cp * rm.y
        if not opts.creeping:
            for dim, w in ((0, us.x), (1, us.y)):
                F[:, grad_slot(U, dim)] += tg * rho * w * rm.x
                F[:, grad_slot(V, dim)] += tg * rho * w * rm.y
            if dus is not None and rm0 is not None:
                for dim, w in ((0, dus.x), (1, dus.y)):
                    F[:, grad_slot(U, dim)] += tg * rho * w * rm0.x
                    F[:, grad_slot(V, dim)] += tg * rho * w * rm0.y

    c = params.mu_p / (2.0 * params.lam)
    comps = ((S11, rc.xx, 1.0), (S12, rc.xy, 2.0), (S22, rc.yy, 1.0))
    for field, r, wt in comps:
        F[:, field] += c * wt * r
    if opts.include_supg:
        tc = fr.tau_c
        for field, r, wt in comps:
            F[:, grad_slot(field, 0)] += c * wt * tc * us.x * r
            F[:, grad_slot(field, 1)] += c * wt * tc * us.y * r
        if dus is not None and rc0 is not None:
            for field, r, wt in ((S11, rc0.xx, 1.0), (S12, rc0.xy, 2.0), (S22, rc0.yy, 1.0)):
                F[:, grad_slot(field, 0)] += c * wt * tc * dus.x * r
                F[:, grad_slot(field, 1)] += c * wt * tc * dus.y * r


def _div_sigma(psi, gradpsi, tol):
    half = expm_sym(psi * 0.5)
    sx = dexpm_sym(psi, gradpsi[0], tol, half)
    sy = dexpm_sym(psi, gradpsi[1], tol, half)
    return Vec2(sx.xx + sy.xy, sx.xy + sy.yy)


def _momentum_residual(params, opts, u, gradu, gradp, lap, psi, gradpsi, tol) -> Vec2:
    div = _div_sigma(psi, gradpsi, tol)
    cp = params.mu_p / params.lam
    rm = Vec2(gradp.x - params.mu_s * lap.x - cp * div.x,
              gradp.y - params.mu_s * lap.y - cp * div.y)
    if not opts.creeping:
        rm = rm + _advection(u, gradu) * params.rho
    return rm


def flux(s: np.ndarray, params: FluidParams, opts: AssemblyOptions, fr: Frozen,
         tol: KernelTolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Test-slot flux F(s), shape (n, 20)."""
    u, gradu, psi, gradpsi, gradp, lap = _unpack(s)
    F = np.zeros_like(s)
    sigma = expm_sym(psi)
    cp = params.mu_p / params.lam
    stress = SymTensor2(cp * (sigma.xx - 1.0) + 2.0 * params.mu_s * gradu.xx,
                        cp * sigma.xy + params.mu_s * (gradu.xy + gradu.yx),
                        cp * (sigma.yy - 1.0) + 2.0 * params.mu_s * gradu.yy)
    adv = None if opts.creeping else _advection(u, gradu)
    rm = _momentum_residual(params, opts, u, gradu, gradp, lap, psi, gradpsi, tol) if opts.include_gls else None
    rc = psi_residual_steady(PointState(u, gradu, psi, gradpsi), params, tol)
    _scatter(F, params, opts, fr, adv, stress, s[:, P], gradu.xx + gradu.yy, rm, rc, Vec2(fr.us_x, fr.us_y))
    return F


def flux_linear(s: np.ndarray, ds: np.ndarray, params: FluidParams, opts: AssemblyOptions,
                fr: Frozen, tol: KernelTolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Directional derivative dF(s)[ds] with the stabilization data frozen."""
    u, gradu, psi, gradpsi, gradp, lap = _unpack(s)
    du, dgradu, dpsi, dgradpsi, dgradp, dlap = _unpack(ds)
    F = np.zeros_like(s)
    cp = params.mu_p / params.lam
    half = expm_sym(psi * 0.5)
    dsigma = dexpm_sym(psi, dpsi, tol, half)
    stress = SymTensor2(cp * dsigma.xx + 2.0 * params.mu_s * dgradu.xx,
                        cp * dsigma.xy + params.mu_s * (dgradu.xy + dgradu.yx),
                        cp * dsigma.yy + 2.0 * params.mu_s * dgradu.yy)
    adv = None
    if not opts.creeping:
        adv = gradu.apply(du) + dgradu.apply(u)
    rm = None
    rm0 = None
    if opts.include_gls:
        ddiv = []
        for g, dg in zip(gradpsi, dgradpsi):
            ddiv.append(d2expm_sym(psi, g, dpsi, tol) + dexpm_sym(psi, dg, tol, half))
        dx, dy = ddiv
        rm = Vec2(dgradp.x - params.mu_s * dlap.x - cp * (dx.xx + dy.xy),
                  dgradp.y - params.mu_s * dlap.y - cp * (dx.xy + dy.yy))
        if not opts.creeping:
            rm = rm + adv * params.rho
        if opts.full_stab_jacobian:
            rm0 = _momentum_residual(params, opts, u, gradu, gradp, lap, psi, gradpsi, tol)
    state = PointState(u, gradu, psi, gradpsi)
    rc = psi_residual_jacobian(state, params, dpsi, dgradpsi, du, dgradu, tol)
    rc0 = psi_residual_steady(state, params, tol) if opts.full_stab_jacobian else None
    dus = du if opts.full_stab_jacobian else None
    _scatter(F, params, opts, fr, adv, stress, ds[:, P], dgradu.xx + dgradu.yy, rm, rc,
             Vec2(fr.us_x, fr.us_y), dus, rm0, rc0)
    return F


def flux_jacobian(s: np.ndarray, params: FluidParams, opts: AssemblyOptions, fr: Frozen,
                  tol: KernelTolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Pointwise matrix ``D[n, t, m] = dF_t / ds_m``, shape (n, 20, 20)."""
    n = s.shape[0]
    D = np.empty((n, N_SLOTS, N_SLOTS))
    ds = np.zeros_like(s)
    for m in range(N_SLOTS):
        ds[:] = 0.0
        ds[:, m] = 1.0
        D[:, :, m] = flux_linear(s, ds, params, opts, fr, tol)
    return D

"""Element stabilization parameters of the steady formulation."""
from __future__ import annotations

import numpy as np

TAU_MOM_CONSTANT = 314.0


def tau_mom(h, speed, rho: float, mu: float, creeping: bool):
    """Momentum GLS parameter ``min(rho h^2 / (314 mu), h / (2 |u|))``.

    In creeping flow the advective limit is switched off.
    """
    diffusive = rho * np.square(h) / (TAU_MOM_CONSTANT * mu)
    if creeping or rho == 0.0:
        return diffusive
    speed = np.asarray(speed, dtype=float)
    advective = np.where(speed > 0, np.asarray(h) / (2.0 * np.where(speed > 0, speed, 1.0)), np.inf)
    return np.minimum(diffusive, advective)


def tau_gls(h, speed, rho: float, mu: float, creeping: bool):
    """``tau_mom / rho``, the weight that actually multiplies the GLS term.

    Finite as ``rho -> 0``, where it tends to ``h^2 / (314 mu)``.
    """
    diffusive = np.square(h) / (TAU_MOM_CONSTANT * mu)
    if creeping or rho == 0.0:
        return diffusive
    speed = np.asarray(speed, dtype=float)
    advective = np.where(speed > 0, np.asarray(h) / (2.0 * rho * np.where(speed > 0, speed, 1.0)), np.inf)
    return np.minimum(diffusive, advective)


def tau_cons(h, speed, lam: float):
    """Constitutive SUPG parameter ``(2 |u| / h + 1 / lambda)^-1``."""
    return 1.0 / (2.0 * np.asarray(speed) / np.asarray(h) + 1.0 / lam)

"""Randomized oracle suites for the pointwise kernels.

Each suite draws its own samples from a seeded generator, compares a kernel
against an independent construction and reports the worst error seen.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..constitutive import FluidParams, Giesekus, OldroydB, theorem_transfer_check
from ..matfun import (
    dexpm_sym,
    expm_sym,
    hadamard_conjugation,
    hadamard_series,
    series_rhs_oracle,
    strain_coupling_closed,
    wilcox_integral_oracle,
)
from ..tensor2 import SymTensor2, Tensor2, iterated_commutator_bruteforce, iterated_commutator_closed, matmul
from .inflow import shear_conformation, shear_psi, shear_psi_opq

SEED = 20240611


@dataclass
class SuiteResult:
    name: str
    worst: float
    tol: float
    samples: int
    seconds: float
    kind: str = "rel"

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.worst) and self.worst <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<28} {self.kind} {self.worst:9.2e} <= {self.tol:7.0e}  "
                f"({self.samples} samples, {self.seconds:.2f} s)")


def _arr(t) -> np.ndarray:
    return np.asarray(t.as_array(), dtype=float)


def _rel(a, b) -> float:
    a, b = _arr(a), _arr(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def _sym(rng, scale=1.0) -> SymTensor2:
    a = rng.uniform(-scale, scale, 3)
    return SymTensor2(*a)


def _sym_norm(rng, norm) -> SymTensor2:
    a = rng.normal(size=3)
    t = SymTensor2(*a)
    return t * (norm / float(t.frobenius()))


def _timed(name: str, tol: float, samples: int, body: Callable[[np.random.Generator], float],
           seed: int, kind: str = "rel") -> SuiteResult:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = body(rng)
    return SuiteResult(name, worst, tol, samples, time.perf_counter() - t0, kind)


def closed_form_vs_series(samples: int = 1000, seed: int = SEED) -> SuiteResult:
    """Closed-form strain coupling against twice the 25-term Bernoulli series."""
    def body(rng):
        worst = 0.0
        for _ in range(samples):
            psi = _sym_norm(rng, rng.uniform(0.0, 2.5))
            eps = _sym(rng, 2.0)
            worst = max(worst, _rel(strain_coupling_closed(psi, eps), series_rhs_oracle(psi, eps, 25) * 2.0))
        return worst
    return _timed("closed form vs series", 1e-10, samples, body, seed)


def analytic_continuation(samples: int = 200, seed: int = SEED + 1) -> SuiteResult:
    """Beyond the series radius, the exponential derivative along the coupling term
    still reproduces the symmetrized strain-conformation product."""
    def body(rng):
        worst = 0.0
        for _ in range(samples):
            psi = _sym_norm(rng, rng.uniform(math.pi + 1e-6, 6.0))
            eps = _sym(rng, 2.0)
            a = strain_coupling_closed(psi, eps) * 0.5
            sigma = expm_sym(psi)
            ref = (matmul(eps, sigma) + matmul(sigma, eps)) * 0.5
            worst = max(worst, _rel(wilcox_integral_oracle(psi, a, 32), ref))
        return worst
    return _timed("analytic continuation", 1e-8, samples, body, seed)


def hadamard_lemma(samples: int = 300, seed: int = SEED + 2) -> SuiteResult:
    def body(rng):
        worst = 0.0
        for _ in range(samples):
            x = Tensor2(*rng.normal(size=4))
            x = x * (rng.uniform(0.0, 2.0) / float(x.frobenius()))
            y = Tensor2(*rng.normal(size=4))
            worst = max(worst, _rel(hadamard_series(x, y, 25), hadamard_conjugation(x, y)))
        return worst
    return _timed("Hadamard series", 1e-10, samples, body, seed)


def commutator_recursion(samples: int = 200, seed: int = SEED + 3) -> SuiteResult:
    """Closed 2D iterated commutator against repeated brute-force brackets."""
    def body(rng):
        worst = 0.0
        for _ in range(samples):
            a, b = _sym(rng, 1.5), _sym(rng)
            for n in (2, 4, 6, 8):
                ref = iterated_commutator_bruteforce(a, b, n)
                if float(np.linalg.norm(_arr(ref))) < 1e-280:
                    continue
                worst = max(worst, _rel(iterated_commutator_closed(a, b, n), ref))
        return worst
    return _timed("iterated commutator", 1e-12, samples, body, seed)


def exp_derivative_fd(samples: int = 500, seed: int = SEED + 4) -> SuiteResult:
    """Closed exponential derivative against central differences of ``expm_sym``."""
    h = 1e-6

    def body(rng):
        worst = 0.0
        for _ in range(samples):
            psi, d = _sym(rng, 2.0), _sym(rng)
            fd = (_arr(expm_sym(psi + d * h)) - _arr(expm_sym(psi - d * h))) / (2 * h)
            worst = max(worst, float(np.abs(_arr(dexpm_sym(psi, d)) - fd).max()))
        return worst
    return _timed("exp derivative vs FD", 1e-6, samples, body, seed, kind="abs")


def theorem_transfer(samples: int = 700, seed: int = SEED + 5) -> SuiteResult:
    """Log-conformation solutions satisfy the conformation equation, on both
    sides of the series radius and for both models."""
    def body(rng):
        worst = 0.0
        for k in range(samples):
            norm = rng.uniform(0.0, math.pi) if k % 2 == 0 else rng.uniform(math.pi, 6.0)
            psi = _sym_norm(rng, norm)
            gradu = Tensor2(*rng.uniform(-2.0, 2.0, 4))
            model = OldroydB() if k % 3 else Giesekus(float(rng.uniform(0.0, 0.5)))
            params = FluidParams(0.0, 0.59, 0.41, float(rng.uniform(0.1, 2.0)), model)
            worst = max(worst, theorem_transfer_check(psi, _sym(rng), gradu, params))
        return worst
    return _timed("theorem transfer", 1e-7, samples, body, seed, kind="abs")


def inflow_paths(samples: int = 400, seed: int = SEED + 6) -> SuiteResult:
    """Matrix-log and closed-formula inflow Psi agree and exponentiate back to sigma."""
    def body(rng):
        w = np.concatenate([[0.0, 1e-9, -1e-5, 1.0], rng.uniform(-5.0, 5.0, samples - 4)])
        a = shear_psi(w)
        b = shear_psi_opq(w)
        sig = shear_conformation(w)
        back = expm_sym(a)
        d1 = max(float(np.abs(getattr(a, c) - getattr(b, c)).max()) for c in ("xx", "xy", "yy"))
        d2 = max(float((np.abs(getattr(back, c) - getattr(sig, c)) / np.abs(sig.xx)).max()) for c in ("xx", "xy", "yy"))
        return max(d1, d2)
    return _timed("inflow Psi paths", 1e-10, samples, body, seed, kind="abs")


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "series": closed_form_vs_series,
    "continuation": analytic_continuation,
    "hadamard": hadamard_lemma,
    "commutator": commutator_recursion,
    "expderiv": exp_derivative_fd,
    "transfer": theorem_transfer,
    "inflow": inflow_paths,
}


def run_selftests(names=None) -> list[SuiteResult]:
    chosen = list(SUITES) if not names else list(names)
    unknown = [n for n in chosen if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n]() for n in chosen]

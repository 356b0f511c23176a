"""Shared sampling and comparison helpers for the test suite."""
import numpy as np

from logconf.tensor2 import SymTensor2, Tensor2


def random_sym(rng, scale=1.0, size=None):
    a = rng.uniform(-scale, scale, size=(3,) if size is None else (3, size))
    return SymTensor2(a[0], a[1], a[2])


def sym_with_norm(rng, norm):
    """Symmetric tensor of the given Frobenius norm, random direction."""
    a = rng.normal(size=3)
    t = SymTensor2(a[0], a[1], a[2])
    return t * (norm / float(t.frobenius()))


def random_tensor(rng, scale=1.0):
    a = rng.uniform(-scale, scale, size=4)
    return Tensor2(*a)


def arr(t):
    return np.asarray(t.as_array(), dtype=float)


def rel_err(a, b):
    a, b = arr(a) if hasattr(a, "as_array") else np.asarray(a), arr(b) if hasattr(b, "as_array") else np.asarray(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))

"""Pure numpy versions of the compiled grid kernels.

Same signatures and results as the compiled module; used when the extension
is unavailable or when ``QUADSTAB_PURE_PYTHON=1`` is set.
"""
import numpy as np


def _max_re_sqrt(s):
    return np.abs(np.sqrt(s.astype(complex)).real).max(axis=-1)


def two_mode_max_re(deltas, Omega, kappas):
    D = np.asarray(deltas, dtype=float)[:, None]
    K2 = np.asarray(kappas, dtype=float)[None, :] ** 2
    b = D * D + Omega * Omega
    sd = np.sqrt(((D * D - Omega * Omega) ** 2 + 16 * D * Omega * K2).astype(complex))
    s = np.stack([(-b + sd) / 2, (-b - sd) / 2], axis=-1)
    return _max_re_sqrt(s)


def three_mode_max_re(Delta1, Delta2, Omega, k1, k2):
    K1 = np.asarray(k1, dtype=float)[:, None] ** 2
    K2 = np.asarray(k2, dtype=float)[None, :] ** 2
    D1s, D2s, Os = Delta1**2, Delta2**2, Omega**2
    a2 = np.full(np.broadcast(K1, K2).shape, D1s + D2s + Os)
    a1 = D1s * D2s + (D1s + D2s) * Os - 4 * Omega * (Delta1 * K1 + Delta2 * K2)
    a0 = D1s * D2s * Os - 4 * Delta1 * Delta2 * Omega * (Delta2 * K1 + Delta1 * K2)
    comp = np.zeros(a2.shape + (3, 3))
    comp[..., 0, 0] = -a2
    comp[..., 0, 1] = -a1
    comp[..., 0, 2] = -a0
    comp[..., 1, 0] = 1.0
    comp[..., 2, 1] = 1.0
    return _max_re_sqrt(np.linalg.eigvals(comp))

"""Shared generators and comparison helpers for the test suite."""
import numpy as np
from scipy.optimize import linear_sum_assignment

from quadstab.core import QuadraticModel, block_diag_modes, random_symmetric, random_symplectic
from quadstab.normal_forms import JordanTypeSpec, build_normal_form
from quadstab.optomech2 import TwoModeParams, critical_couplings
from quadstab.optomech3 import ThreeModeParams


def cluster_means(ev, rtol=1e-6):
    """Replace each tight cluster of eigenvalues by its mean.

    Computed eigenvalues of a Jordan block of size ``D`` scatter by about
    ``eps^(1/D)``, but their mean is accurate to ``eps``.
    """
    ev = np.asarray(ev, dtype=complex)
    scale = max(1.0, np.abs(ev).max())
    out = ev.copy()
    used = np.zeros(len(ev), dtype=bool)
    for i in range(len(ev)):
        if used[i]:
            continue
        grp = [j for j in range(len(ev)) if not used[j] and abs(ev[j] - ev[i]) <= rtol * scale]
        used[grp] = True
        out[grp] = ev[grp].mean()
    return out


def multiset_mismatch(a, b):
    """Largest distance after optimal pairing, relative to ``max(1, max |b|)``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    assert a.shape == b.shape
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max() / max(1.0, np.abs(b).max()))


def draw_two_mode(label, rng):
    """Random parameters strictly inside (or exactly on) the region of a case."""
    O = rng.uniform(0.5, 2.0)
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi))
    if label == "d":
        return TwoModeParams(0.0, O, rng.uniform(0.05, 2.0) * O * ph)
    D = rng.uniform(0.2, 3.0) * O * (1 if label in "abc" else -1)
    K_R, K_B = critical_couplings(D, O)
    K = K_R if label in "abc" else K_B
    f = {"a": rng.uniform(0.05, 0.95), "b": 1.0, "c": rng.uniform(1.05, 3.0),
         "e": rng.uniform(0.05, 0.95), "f": 1.0, "g": rng.uniform(1.05, 3.0)}[label]
    return TwoModeParams(D, O, f * K * ph)


def random_three_mode(rng):
    D1, D2 = rng.uniform(-3, 3, 2)
    k1, k2 = rng.uniform(0, 1.5, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
    return ThreeModeParams(D1, D2, 1.0, k1, k2)


def random_equal_detuning(rng):
    """``Delta_1 = +-Delta_2`` draws away from the degenerate ``s = -1``,
    ``|kappa_1| = |kappa_2|`` set."""
    while True:
        D = rng.uniform(-3, 3)
        s = rng.choice([1, -1])
        k1, k2 = rng.uniform(0, 1.2, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
        if s < 0 and abs(abs(k1) - abs(k2)) < 1e-3:
            continue
        if abs(D) < 1e-3:
            continue
        return ThreeModeParams(D, s * D, 1.0, k1, k2)


_NORMAL_FORMS = [("I", 1, 1.0), ("II", 1, 1 + 1j), ("III", 1, 1.0), ("III", 3, 1.0),
                 ("IV", 2, 1.0), ("V", 1, 0.0), ("V", 3, 0.0), ("VI", 2, 0.0)]


def random_model(rng):
    """Random model of up to three modes from a mixture covering every
    eigenvalue class: stable (with indefinite ``V``), generic, normal forms
    dressed by a random symplectic map, and small perturbations of stable
    models."""
    n = int(rng.integers(1, 4))
    kind = int(rng.integers(0, 4))
    S = random_symplectic(n, rng, scale=0.4)
    if kind == 0:
        w = rng.uniform(0.2, 2.0, n) * rng.choice([-1, 1], n)
        V = S.T @ np.diag(np.r_[w, w]) @ S
    elif kind == 1:
        V = random_symmetric(n, rng)
    elif kind == 2:
        t, D, lam = _NORMAL_FORMS[rng.integers(len(_NORMAL_FORMS))]
        nf = build_normal_form(JordanTypeSpec(t, D, lam))
        blocks = [nf] + [QuadraticModel(1, np.eye(2) * rng.uniform(0.3, 2.0))
                         for _ in range(max(0, n - nf.n_modes))]
        m = block_diag_modes(blocks)
        S = random_symplectic(m.n_modes, rng, scale=0.3)
        V = S.T @ m.V @ S
        n = m.n_modes
    else:
        w = rng.uniform(0.2, 2.0, n) * rng.choice([-1, 1], n)
        V = S.T @ np.diag(np.r_[w, w]) @ S + 10 ** rng.uniform(-6, -1) * random_symmetric(n, rng)
    return QuadraticModel(n, (V + V.T) / 2)

"""Quadratic models, the symplectic form and symplectic matrix algebra.

Quadratures are always ordered ``xi = (x_1, ..., x_N, p_1, ..., p_N)`` with
hbar = 1, and a model is the real symmetric matrix ``V`` of ``H = xi^T V xi / 2``.
Frequencies carry whatever unit the caller chooses (typically the mechanical
frequency); nothing in the library depends on it.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import InvalidArgument, InvalidModel

TOL_SYMP = 1e-8


def _sym_tol(M):
    return 1e-10 * max(1.0, np.linalg.norm(M))


def symplectic_form(n_modes):
    """Return ``J = [[0, I], [-I, 0]]`` of size ``2 n_modes``."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidArgument(f"n_modes must be a positive integer, got {n_modes!r}")
    n = int(n_modes)
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


build_symplectic_form = symplectic_form


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadraticModel:
    """Coefficient matrix ``V`` of ``H = xi^T V xi / 2``.

    ``V`` is stored as a read-only float array; it is validated for shape and
    symmetry on construction and then exactly symmetrized.
    """

    n_modes: int
    V: np.ndarray = field(repr=False)

    def __post_init__(self):
        V = np.array(self.V, dtype=float)
        n = self.n_modes
        if int(n) != n or n < 1:
            raise InvalidModel(f"n_modes must be a positive integer, got {n!r}")
        if V.shape != (2 * n, 2 * n):
            raise InvalidModel(f"V has shape {V.shape}, expected {(2 * n, 2 * n)}")
        if not np.all(np.isfinite(V)):
            raise InvalidModel("V contains non-finite entries")
        asym = np.linalg.norm(V - V.T)
        if asym > _sym_tol(V):
            raise InvalidModel(f"V is not symmetric (||V - V^T||_F = {asym:.3e})")
        object.__setattr__(self, "n_modes", int(n))
        object.__setattr__(self, "V", _frozen((V + V.T) / 2))

    @classmethod
    def from_matrix(cls, V):
        V = np.asarray(V, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
            raise InvalidModel(f"V must be square with even dimension, got shape {V.shape}")
        return cls(V.shape[0] // 2, V)

    def energy(self, xi):
        xi = np.asarray(xi, dtype=float)
        return 0.5 * xi @ self.V @ xi


@dataclass(frozen=True)
class EomMatrix:
    """Equation-of-motion matrix ``A = J V`` for ``d xi/dt = A xi``."""

    A: np.ndarray = field(repr=False)
    source: QuadraticModel = field(repr=False)

    @property
    def n_modes(self):
        return self.source.n_modes

    @classmethod
    def from_array(cls, A):
        """Wrap a raw Hamiltonian matrix, recovering its model as ``V = -J A``."""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise InvalidArgument(f"A must be square with even dimension, got shape {A.shape}")
        J = symplectic_form(A.shape[0] // 2)
        model = QuadraticModel.from_matrix(-J @ A)
        return cls(_frozen(A), model)

    def hamiltonian_residual(self):
        J = symplectic_form(self.n_modes)
        return np.linalg.norm(J @ self.A + self.A.T @ J)

    def eigenvalues(self):
        return np.linalg.eigvals(self.A)


def eom_matrix(model):
    """Build ``A = J V`` and check ``J A + A^T J = 0``."""
    if not isinstance(model, QuadraticModel):
        model = QuadraticModel.from_matrix(model)
    J = symplectic_form(model.n_modes)
    eom = EomMatrix(_frozen(J @ model.V), model)
    res = eom.hamiltonian_residual()
    if res > 1e-10 * max(1.0, np.linalg.norm(eom.A)):
        raise InvalidModel(f"J A + A^T J residual {res:.3e} too large")
    return eom


def check_symplectic(S, tol=TOL_SYMP):
    """Return ``(passed, ||S^T J S - J||_F)``."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidArgument(f"S must be square, got shape {S.shape}")
    if S.shape[0] % 2:
        raise InvalidArgument(f"S must have even dimension, got {S.shape[0]}")
    J = symplectic_form(S.shape[0] // 2)
    if not np.all(np.isfinite(S)):
        return False, float("inf")
    res = float(np.linalg.norm(S.T @ J @ S - J))
    return res <= tol, res


def symplectic_inverse(S):
    """``S^{-1} = -J S^T J`` for symplectic ``S``."""
    J = symplectic_form(S.shape[0] // 2)
    return -J @ S.T @ J


def congruence(V, S):
    """``W = S^{-T} V S^{-1}``: the coefficients of ``H`` in the variables ``S xi``."""
    Si = np.linalg.inv(S)
    W = Si.T @ V @ Si
    return (W + W.T) / 2


def congruence_transform(model, S, tol=TOL_SYMP):
    """Rewrite ``model`` in the canonical variables ``Xi = S xi``."""
    S = np.asarray(S, dtype=float)
    if S.shape != model.V.shape:
        raise InvalidArgument(f"S has shape {S.shape}, model needs {model.V.shape}")
    ok, res = check_symplectic(S, tol=max(tol, tol * np.linalg.norm(S) ** 2))
    if not ok:
        raise InvalidArgument(f"S is not symplectic (residual {res:.3e})")
    return QuadraticModel(model.n_modes, congruence(model.V, S))


def random_symmetric(n_modes, rng, scale=1.0):
    M = rng.normal(scale=scale, size=(2 * n_modes, 2 * n_modes))
    return (M + M.T) / 2


def random_symplectic(n_modes, rng, scale=0.5):
    """``exp(J Q)`` for a random symmetric ``Q``; symplectic by construction."""
    Q = random_symmetric(n_modes, rng, scale)
    return expm(symplectic_form(n_modes) @ Q)


def block_diag_modes(blocks):
    """Direct sum of models given as (n_k, V_k) in the x-then-p ordering."""
    n = sum(b.n_modes for b in blocks)
    V = np.zeros((2 * n, 2 * n))
    off = 0
    for b in blocks:
        k = b.n_modes
        idx = np.r_[off:off + k, n + off:n + off + k]
        V[np.ix_(idx, idx)] = b.V
        off += k
    return QuadraticModel(n, V)

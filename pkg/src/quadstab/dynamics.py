"""Gaussian moment propagation under linear Heisenberg dynamics.

A Gaussian state is described by its quadrature means and its symmetrized
covariance ``sigma_jk = <{d xi_j, d xi_k}>/2``. Under ``d xi/dt = A xi`` the
means evolve as ``exp(A t) m`` and the covariance as
``exp(A t) sigma exp(A t)^T``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .core import EomMatrix, QuadraticModel, eom_matrix, symplectic_form
from .errors import DivergedError, InvalidArgument, NumericFailure

UNCERTAINTY_TOL = 1e-10
_OVERFLOW = 1e150


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance of a Gaussian state of ``N`` modes."""

    mean: np.ndarray = field(repr=False)
    covariance: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.mean, dtype=float).ravel()
        s = np.array(self.covariance, dtype=float)
        if m.size % 2 or s.shape != (m.size, m.size):
            raise InvalidArgument(f"mean of length {m.size} and covariance of shape {s.shape} do not match")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(s))):
            raise InvalidArgument("state contains non-finite entries")
        if np.linalg.norm(s - s.T) > 1e-10 * max(1.0, np.linalg.norm(s)):
            raise InvalidArgument("covariance is not symmetric")
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "covariance", (s + s.T) / 2)

    @property
    def n_modes(self):
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, n_modes):
        return cls(np.zeros(2 * n_modes), np.eye(2 * n_modes) / 2)

    def uncertainty_margin(self):
        """Smallest eigenvalue of ``sigma + i J / 2``; physical states give ``>= 0``."""
        J = symplectic_form(self.n_modes)
        return float(np.linalg.eigvalsh(self.covariance + 0.5j * J).min())

    def is_physical(self, tol=UNCERTAINTY_TOL):
        return self.uncertainty_margin() >= -tol * max(1.0, np.linalg.norm(self.covariance))

    def occupations(self):
        """Mean excitation numbers ``n_j`` of every mode."""
        n = self.n_modes
        s, m = self.covariance, self.mean
        var = np.diag(s)
        return (var[:n] + var[n:] - 1) / 2 + (m[:n] ** 2 + m[n:] ** 2) / 2


def _as_eom(A):
    if isinstance(A, EomMatrix):
        return A
    if isinstance(A, QuadraticModel):
        return eom_matrix(A)
    return EomMatrix.from_array(A)


class Propagator:
    """Evaluates ``exp(A t)`` for many times.

    When ``A`` has a well-conditioned eigenbasis the exponential is taken
    from the eigendecomposition, which stays accurate for the large norms of
    long unstable runs. Otherwise each time uses scaling and squaring.
    """

    def __init__(self, A, cond_limit=1e8):
        self.eom = _as_eom(A)
        self.A = np.asarray(self.eom.A)
        self._eig = None
        w, P = np.linalg.eig(self.A)
        if np.isfinite(P).all() and np.linalg.cond(P) < cond_limit:
            self._eig = (w, P, np.linalg.inv(P))

    def __call__(self, t):
        if self._eig is None:
            E = expm(self.A * t)
        else:
            w, P, Pi = self._eig
            with np.errstate(over="ignore", invalid="ignore"):
                E = ((P * np.exp(w * t)) @ Pi).real
        if not np.all(np.isfinite(E)) or np.abs(E).max() > _OVERFLOW:
            raise NumericFailure(f"exp(A t) overflowed at t = {t}")
        return E


def propagate(state, A, t):
    """Evolve ``state`` for a time ``t`` under ``d xi/dt = A xi``.

    Raises
    ------
    DivergedError
        If ``exp(A t)`` overflows; ``last_finite_time`` is 0 since only the
        end point is evaluated here (use :func:`occupation_series` for a
        trajectory).
    """
    if not np.isfinite(t):
        raise InvalidArgument(f"t must be finite, got {t}")
    prop = A if isinstance(A, Propagator) else Propagator(A)
    if prop.A.shape[0] != state.mean.size:
        raise InvalidArgument(f"A has size {prop.A.shape[0]}, state has {state.mean.size} quadratures")
    try:
        E = prop(t)
    except NumericFailure as exc:
        raise DivergedError(str(exc), last_finite_time=0.0) from exc
    return _apply(E, state)


def _apply(E, state):
    s = E @ state.covariance @ E.T
    with np.errstate(over="ignore", invalid="ignore"):
        return GaussianState(E @ state.mean, (s + s.T) / 2)


@dataclass(frozen=True)
class OccupationSeries:
    t: np.ndarray
    n: np.ndarray
    min_uncertainty: float = 0.0

    def rows(self):
        for t, row in zip(self.t, self.n):
            yield (float(t), *map(float, row))


def occupation_series(model, t_grid, initial=None):
    """Mean excitation numbers ``n_j(t)`` on a grid of times.

    Parameters
    ----------
    model : QuadraticModel, EomMatrix or array
        The Hamiltonian (or its equation-of-motion matrix).
    t_grid : array_like
        Sorted, nonnegative times.
    initial : GaussianState, optional
        Starting state; the vacuum of all modes by default.

    Returns
    -------
    OccupationSeries
        Times, an ``(len(t), N)`` array of occupations, and the smallest
        uncertainty margin met along the way.
    """
    prop = Propagator(model)
    n_modes = prop.A.shape[0] // 2
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0 or np.any(t < 0) or np.any(np.diff(t) < 0) or not np.all(np.isfinite(t)):
        raise InvalidArgument("t_grid must be a nonempty sorted array of nonnegative times")
    state = GaussianState.vacuum(n_modes) if initial is None else initial
    if state.n_modes != n_modes:
        raise InvalidArgument(f"initial state has {state.n_modes} modes, model has {n_modes}")
    out = np.empty((t.size, n_modes))
    margin = np.inf
    last = 0.0
    for k, tk in enumerate(t):
        try:
            E = prop(tk)
        except NumericFailure as exc:
            raise DivergedError(f"trajectory diverged after t = {last}", last_finite_time=last) from exc
        st = _apply(E, state)
        out[k] = st.occupations()
        scale = max(1.0, np.linalg.norm(st.covariance))
        margin = min(margin, st.uncertainty_margin() / scale)
        last = float(tk)
    return OccupationSeries(t, out, float(margin))


def envelope_rate(t, n, t_min=None):
    """Least-squares slope of ``log max_j n_j(t)`` for ``t >= t_min``."""
    t = np.asarray(t, dtype=float)
    n = np.asarray(n, dtype=float)
    peak = n.max(axis=1) if n.ndim == 2 else n
    sel = peak > 0
    if t_min is not None:
        sel &= t >= t_min
    if sel.sum() < 2:
        raise InvalidArgument("need at least two positive samples to fit a rate")
    return float(np.polyfit(t[sel], np.log(peak[sel]), 1)[0])

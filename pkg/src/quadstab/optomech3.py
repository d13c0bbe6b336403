"""Three-mode optomechanical model: two cavity modes sharing one mechanical mode.

Quadratures are ordered ``(x_1, x_2, x_b, p_1, p_2, p_b)`` and the linearized
Hamiltonian is

    H = sum_j Delta_j/2 (p_j^2 + x_j^2) + Omega/2 (p_b^2 + x_b^2)
        + 2 sum_j (kappa_jr x_j + kappa_ji p_j) x_b.

The squared eigenvalues ``s = lambda^2`` of ``A = J V`` solve the cubic
``s^3 + a2 s^2 + a1 s + a0 = 0`` with

    a2 = Delta_1^2 + Delta_2^2 + Omega^2
    a1 = Delta_1^2 Delta_2^2 + (Delta_1^2 + Delta_2^2) Omega^2
         - 4 Omega (Delta_1 |kappa_1|^2 + Delta_2 |kappa_2|^2)
    a0 = Delta_1^2 Delta_2^2 Omega^2
         - 4 Delta_1 Delta_2 Omega (Delta_2 |kappa_1|^2 + Delta_1 |kappa_2|^2)

and the system is stable exactly when all three roots are negative and
simple (or semisimple).
"""
from dataclasses import dataclass, field
import cmath
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import QuadraticModel, check_symplectic, congruence, eom_matrix
from .errors import InternalError, InvalidArgument
from .optomech2 import CASE_RTOL, TwoModeParams, build_two_mode, classify_two_mode
from .spectral import ModeKind, is_dynamically_stable

C, H = ModeKind.CIRCULAR, ModeKind.HYPERBOLIC


@dataclass(frozen=True)
class ThreeModeParams:
    Delta1: float
    Delta2: float
    Omega: float
    kappa1: complex = 0j
    kappa2: complex = 0j

    def __post_init__(self):
        if not self.Omega > 0:
            raise InvalidArgument(f"Omega must be positive, got {self.Omega}")
        for name in ("Delta1", "Delta2", "Omega"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidArgument(f"{name} must be finite")
            object.__setattr__(self, name, v)
        for name in ("kappa1", "kappa2"):
            k = complex(getattr(self, name))
            if not (math.isfinite(k.real) and math.isfinite(k.imag)):
                raise InvalidArgument(f"{name} must be finite")
            object.__setattr__(self, name, k)


def _params(p):
    return p if isinstance(p, ThreeModeParams) else ThreeModeParams(*p)


def build_three_mode(params, mechanical_phase=0.0):
    """Coefficient matrix of the three-mode Hamiltonian.

    The cavities couple to the mechanical quadrature
    ``cos(phase) x_b + sin(phase) p_b``; the default ``phase = 0`` couples to
    ``x_b``. A nonzero phase is a rotation of the mechanical mode and leaves
    the spectrum unchanged.
    """
    p = _params(params)
    V = np.zeros((6, 6))
    V[0, 0] = V[3, 3] = p.Delta1
    V[1, 1] = V[4, 4] = p.Delta2
    V[2, 2] = V[5, 5] = p.Omega
    c, s = math.cos(mechanical_phase), math.sin(mechanical_phase)
    for j, k in ((0, p.kappa1), (1, p.kappa2)):
        for b, w in ((2, c), (5, s)):
            V[j, b] = V[b, j] = 2 * k.real * w
            V[3 + j, b] = V[b, 3 + j] = 2 * k.imag * w
    return QuadraticModel(3, V)


def cubic_coefficients(params):
    """``(a2, a1, a0)`` of the cubic in ``s = lambda^2``."""
    p = _params(params)
    D1, D2, O = p.Delta1, p.Delta2, p.Omega
    K1, K2 = abs(p.kappa1) ** 2, abs(p.kappa2) ** 2
    a2 = D1 * D1 + D2 * D2 + O * O
    a1 = D1 * D1 * D2 * D2 + (D1 * D1 + D2 * D2) * O * O - 4 * O * (D1 * K1 + D2 * K2)
    a0 = D1 * D1 * D2 * D2 * O * O - 4 * D1 * D2 * O * (D2 * K1 + D1 * K2)
    return a2, a1, a0


# ---------------------------------------------------------------------------
# closed-form classification


@dataclass(frozen=True)
class CubicClassification:
    eta1: float
    eta2: float
    mu: float
    nu: float
    c: tuple
    case_id: int
    mode_kinds: tuple
    stable: bool
    roots: tuple = ()
    spectral_stable: bool = None
    spectral_kinds: tuple = ()
    consistent: bool = True

    def to_dict(self):
        return {
            "case_id": self.case_id,
            "stable": self.stable,
            "mode_kinds": [k.value for k in self.mode_kinds],
            "eta1": self.eta1,
            "eta2": self.eta2,
            "mu": self.mu,
            "nu": self.nu,
            "c": list(self.c),
            "s_roots": [[r.real, r.imag] for r in self.roots],
            "spectral_stable": self.spectral_stable,
            "spectral_mode_kinds": [k.value for k in self.spectral_kinds],
            "consistent": self.consistent,
        }


def invariants(params):
    """``(eta1, eta2, mu, nu)`` of the closed-form root expressions."""
    p = _params(params)
    D1, D2, O = p.Delta1, p.Delta2, p.Omega
    K1, K2 = abs(p.kappa1) ** 2, abs(p.kappa2) ** 2
    e1 = (2 * D1 * D1 - D2 * D2 - O * O) / O**2
    e2 = (2 * D2 * D2 - D1 * D1 - O * O) / O**2
    mu = 2 ** (2 / 3) / 3 * (e1 * e1 + e2 * e2 + e1 * e2 + 36 * (D1 * K1 + D2 * K2) / O**3)
    nu = e1 * e2 * (e1 + e2) + 36 * (e2 * D1 * K1 + e1 * D2 * K2) / O**3
    return e1, e2, mu, nu


def closed_form_roots(params):
    """The three roots ``s_k`` of the cubic from the explicit radical formulas.

    The cube root is the principal complex branch of
    ``w = nu + sqrt(nu^2 - mu^3)``. Either sign of the square root gives the
    same three roots, so the sign making ``|w|`` larger is used to avoid
    cancellation.
    """
    p = _params(params)
    e1, e2, mu, nu = invariants(p)
    O2 = p.Omega**2
    root = cmath.sqrt(complex(nu * nu - mu**3))
    w = nu + root
    if abs(nu - root) > abs(w):
        w = nu - root
    E = 3 + e1 + e2
    if w == 0:
        # mu = nu = 0: triple root
        return (complex(-O2 * E / 3),) * 3
    cr = w ** (1 / 3)
    k = 2 ** (1 / 3) * cr
    r3 = 1j * math.sqrt(3)
    s1 = -O2 / 3 * (E - (mu + cr * cr) / k)
    s2 = -O2 / 3 * (E + ((1 + r3) * mu + (1 - r3) * cr * cr) / (2 * k))
    s3 = -O2 / 3 * (E + ((1 - r3) * mu + (1 + r3) * cr * cr) / (2 * k))
    return s1, s2, s3


def trig_c(mu, nu, e1, e2):
    """``c_j = 2^(2/3) sqrt(mu) cos(phi_j / 3) - eta1 - eta2 - 3`` for ``nu^2 < mu^3``."""
    if mu <= 0:
        raise InternalError(f"nu^2 < mu^3 requires mu > 0, got mu = {mu}")
    arg = nu / math.sqrt(mu**3)
    if abs(arg) > 1:
        if abs(arg) - 1 > 1e-12:
            raise InternalError(f"arccos argument {arg} outside [-1, 1]")
        arg = math.copysign(1.0, arg)
    phi0 = math.acos(arg)
    return tuple(2 ** (2 / 3) * math.sqrt(mu) * math.cos((phi0 - 2 * math.pi * j) / 3) - e1 - e2 - 3 for j in range(3))


def _kinds_from_spectrum(verdict):
    return tuple(C if k is ModeKind.CIRCULAR else H for k in verdict.mode_kinds)


def appendix_c_classify(params, disc_rtol=1e-10):
    """Closed-form classification into the eight rows of the three-mode table.

    Rows 1 to 4 (``nu^2 < mu^3``, three real roots) count the nonnegative
    ``c_j``; rows 5 and 6 are the double-root boundary ``nu^2 = mu^3``; rows 7
    and 8 (``nu^2 > mu^3``) have a complex pair of roots and one real root
    whose sign decides between them. Only row 1 is stable.

    The result also carries the spectral verdict of the same model and a
    ``consistent`` flag comparing the counts of hyperbolic modes.
    """
    p = _params(params)
    e1, e2, mu, nu = invariants(p)
    E = 3 + e1 + e2
    disc = nu * nu - mu**3
    scale = max(1.0, nu * nu, abs(mu) ** 3)
    roots = closed_form_roots(p)
    if abs(disc) <= disc_rtol * scale:
        c = tuple(3 * r.real / p.Omega**2 for r in roots)
        case_id = 5 if 4 * nu < E**3 else 6
        kinds = (C, H, H) if case_id == 5 else (H, H, H)
    elif disc < 0:
        c = trig_c(mu, nu, e1, e2)
        n_h = sum(1 for cj in c if cj >= 0)
        case_id = 1 + n_h
        kinds = tuple([C] * (3 - n_h) + [H] * n_h)
    else:
        # one real root s1 and a complex pair; real cube root keeps s1 real
        w = nu + math.copysign(math.sqrt(disc), nu)
        cr = np.cbrt(w)
        s1 = -p.Omega**2 / 3 * (E - (mu + cr * cr) / (2 ** (1 / 3) * cr))
        c = (3 * s1 / p.Omega**2, math.nan, math.nan)
        case_id = 7 if s1 < 0 else 8
        kinds = (C, H, H) if case_id == 7 else (H, H, H)
    stable = case_id == 1
    verdict = is_dynamically_stable(eom_matrix(build_three_mode(p)))
    spec_kinds = _kinds_from_spectrum(verdict)
    consistent = sorted(spec_kinds) == sorted(kinds) and verdict.stable == stable
    return CubicClassification(e1, e2, mu, nu, tuple(c), case_id, kinds, stable,
                                   tuple(roots), verdict.stable, spec_kinds, consistent)


def match_roots(s_roots, eigenvalues):
    """Max relative mismatch between ``{+-sqrt(s_k)}`` and a set of eigenvalues."""
    lam = []
    for s in s_roots:
        r = cmath.sqrt(s)
        lam += [r, -r]
    lam = np.array(lam)
    ev = np.asarray(eigenvalues)
    cost = np.abs(lam[:, None] - ev[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max() / max(1.0, np.max(np.abs(ev))))


# ---------------------------------------------------------------------------
# equal-detuning reduction


@dataclass(frozen=True)
class ReducedTwoMode:
    s: int
    epsilon: int
    kappa_s: float
    S_c: np.ndarray = field(repr=False)
    S_complex: np.ndarray = field(repr=False)
    spectator_frequency: float
    decoupling_residual: float = 0.0
    block_residual: float = 0.0


@dataclass(frozen=True)
class ReductionResult:
    reduced: ReducedTwoMode
    case: object
    reduced_condition: bool
    stable: bool
    cubic: CubicClassification = None

    def to_dict(self):
        d = {"stable": self.stable}
        if self.reduced is not None:
            r = self.reduced
            d.update(s=r.s, epsilon=r.epsilon, kappa_s=r.kappa_s,
                     spectator_frequency=r.spectator_frequency, case=self.case.label, reduced_condition=self.reduced_condition)
        if self.cubic is not None:
            d["cubic_classification"] = self.cubic.to_dict()
        return d


def _ladder_to_quadrature(n):
    """``U`` with ``(a, a^dag) = U (x, p)`` for ``a = (x + i p)/sqrt(2)``."""
    I = np.eye(n)
    return np.block([[I, 1j * I], [I, -1j * I]]) / math.sqrt(2)


def cavity_transform_matrix(kappa1, kappa2, s):
    """Complex 4x4 transform acting on ``(a_1, a_2, a_1^dag, a_2^dag)``."""
    k1, k2 = complex(kappa1), complex(kappa2)
    c = np.conj
    if s > 0:
        kp = math.sqrt(abs(k1) ** 2 + abs(k2) ** 2)
        M = np.array([[c(k1), c(k2), 0, 0],
                      [k2, -k1, 0, 0],
                      [0, 0, k1, k2],
                      [0, 0, c(k2), -c(k1)]]) / kp
    else:
        km = math.sqrt(abs(abs(k1) ** 2 - abs(k2) ** 2))
        if abs(k1) > abs(k2):
            M = np.array([[c(k1), 0, 0, k2],
                          [0, c(k1), k2, 0],
                          [0, c(k2), k1, 0],
                          [c(k2), 0, 0, k1]]) / km
        else:
            M = np.array([[0, c(k2), k1, 0],
                          [c(k2), 0, 0, k1],
                          [c(k1), 0, 0, k2],
                          [0, c(k1), k2, 0]]) / km
    return M.astype(complex)


def cavity_transform(kappa1, kappa2, s):
    """Real 6x6 symplectic version of the cavity transform, identity on the
    mechanical mode."""
    M = cavity_transform_matrix(kappa1, kappa2, s)
    U = _ladder_to_quadrature(2)
    R = np.linalg.solve(U, M @ U)
    if np.max(np.abs(R.imag)) > 1e-9 * max(1.0, np.max(np.abs(R))):
        raise InternalError("cavity transform is not real in quadratures")
    R = R.real
    S = np.eye(6)
    cav = [0, 1, 3, 4]
    S[np.ix_(cav, cav)] = R
    return S, M


def reduce_equal_detuning(params):
    """Decouple one cavity combination when ``Delta_1 = +-Delta_2``.

    With ``Delta_1 = s Delta_2 = Delta`` the transform maps the model to a
    two-mode block with detuning ``epsilon Delta`` and real coupling
    ``kappa_s = sqrt(| |kappa_1|^2 + s |kappa_2|^2 |)``, plus a free spectator
    mode at frequency ``s epsilon Delta``. The block is classified with the
    two-mode case table. For ``s = -1`` with ``|kappa_1| = |kappa_2|`` the
    transform does not exist and the closed-form three-mode classification
    is returned instead.
    """
    p = _params(params)
    D1, D2, O = p.Delta1, p.Delta2, p.Omega
    band = CASE_RTOL * O
    if abs(abs(D1) - abs(D2)) > band:
        raise InvalidArgument(f"needs |Delta1| = |Delta2|, got {D1} and {D2}")
    if abs(p.kappa1) == 0 and abs(p.kappa2) == 0:
        raise InvalidArgument("at least one coupling must be nonzero")
    s = 1 if (abs(D1) <= band or (D1 > 0) == (D2 > 0)) else -1
    K1, K2 = abs(p.kappa1) ** 2, abs(p.kappa2) ** 2
    if s < 0 and abs(abs(p.kappa1) - abs(p.kappa2)) <= band:
        ac = appendix_c_classify(p)
        return ReductionResult(None, None, None, ac.stable, ac)
    Delta = D1
    eps = 1 if K1 + s * K2 > 0 else -1
    kappa_s = math.sqrt(abs(K1 + s * K2))
    S, M = cavity_transform(p.kappa1, p.kappa2, s)
    ok, res = check_symplectic(S)
    if not ok:
        raise InternalError(f"cavity transform is not symplectic (residual {res:.3e})")
    V = build_three_mode(p).V
    W = congruence(V, S)
    spectator = s * eps * Delta
    # mode order after the transform: (A_1, A_2, b)
    keep = [0, 2, 3, 5]
    rest = [1, 4]
    decouple = float(np.linalg.norm(W[np.ix_(rest, keep)]))
    sub = TwoModeParams(eps * Delta, O, kappa_s)
    target_block = build_two_mode(sub).V
    block = float(np.linalg.norm(W[np.ix_(keep, keep)] - target_block)
                  + np.linalg.norm(W[np.ix_(rest, rest)] - spectator * np.eye(2)))
    scale = max(1.0, np.linalg.norm(V))
    if decouple > 1e-9 * scale or block > 1e-9 * scale:
        raise InternalError(f"reduction failed: coupling {decouple:.3e}, block mismatch {block:.3e}")
    case = classify_two_mode(sub)
    cond = reduced_stability_condition(Delta, O, eps, kappa_s)
    red = ReducedTwoMode(s, eps, kappa_s, S, M, spectator, decouple, block)
    return ReductionResult(red, case, cond, case.stable)


def reduced_stability_condition(Delta, Omega, epsilon, kappa_s):
    """``(Delta^2 + Omega^2)^2 > 4 Omega Delta (Omega Delta - 4 epsilon kappa_s^2) > 0``."""
    mid = 4 * Omega * Delta * (Omega * Delta - 4 * epsilon * kappa_s**2)
    return bool((Delta**2 + Omega**2) ** 2 > mid > 0)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class ThreeModeSweep:
    """Grid of three-mode classifications.

    ``stable`` is the spectral verdict. ``table_stable`` is the verdict of the
    table row in ``case_id``; the two differ only on the measure-zero set of
    semisimple double roots, which the table counts as unstable.
    """

    k1: np.ndarray
    k2: np.ndarray
    case_id: np.ndarray
    stable: np.ndarray
    max_re: np.ndarray
    table_stable: np.ndarray = None

    def rows(self):
        """Rows ``(kappa1_abs, kappa2_abs, case_id, stable, max_re_lambda)``,
        row-major with ``kappa1`` the outer index."""
        for i, a in enumerate(self.k1):
            for j, b in enumerate(self.k2):
                yield a, b, int(self.case_id[i, j]), bool(self.stable[i, j]), float(self.max_re[i, j])


def _classify_row(args):
    D1, D2, O, a, k2 = args
    out = []
    for b in k2:
        out.append(appendix_c_classify(ThreeModeParams(D1, D2, O, a, b)))
    return out


def three_mode_sweep(Delta1, Delta2, Omega, k1, k2, jobs=1):
    """Classify every point of a ``|kappa_1| x |kappa_2|`` grid.

    Couplings are taken real (only magnitudes matter). ``max_re`` is the
    largest real part of the spectrum from the compiled kernel.
    ``jobs > 1`` spreads rows over worker processes; the result order is
    the grid order either way.
    """
    from .kernels import three_mode_max_re

    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    if k1.size < 2 or k2.size < 2:
        raise InvalidArgument("sweep grid must be at least 2 x 2")
    ThreeModeParams(Delta1, Delta2, Omega)
    tasks = [(Delta1, Delta2, Omega, float(a), k2) for a in k1]
    if jobs and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_classify_row, tasks))
    else:
        rows = [_classify_row(t) for t in tasks]
    case_id = np.array([[r.case_id for r in row] for row in rows], dtype=int)
    stable = np.array([[r.spectral_stable for r in row] for row in rows], dtype=bool)
    table_stable = np.array([[r.stable for r in row] for row in rows], dtype=bool)
    max_re = three_mode_max_re(Delta1, Delta2, Omega, k1, k2)
    return ThreeModeSweep(k1, k2, case_id, stable, max_re, table_stable)


def interface_sign_changes(stable_column):
    """Number of stable/unstable switches along one line of grid points."""
    col = np.asarray(stable_column, dtype=bool)
    return int(np.count_nonzero(col[1:] != col[:-1]))

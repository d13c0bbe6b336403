"""Two-mode optomechanical model: one cavity mode coupled to one mechanical mode.

The linearized Hamiltonian in quadratures ``xi = (x_1, x_2, p_1, p_2)`` is

    H = Delta/2 (p_1^2 + x_1^2) + Omega/2 (p_2^2 + x_2^2)
        + 2 (kappa_r x_1 + kappa_i p_1) x_2,

with cavity detuning ``Delta`` (red detuned for ``Delta > 0``), mechanical
frequency ``Omega > 0`` and complex coupling ``kappa``. The stability
boundary is set by the critical couplings

    K_R = sqrt(Omega |Delta| / 4),
    K_B = sqrt((Delta^2 - Omega^2)^2 / (16 Omega |Delta|)),

which split the plane into seven cases labelled ``a`` to ``g``.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy.optimize import least_squares

from .core import QuadraticModel, check_symplectic, congruence, eom_matrix, symplectic_form
from .errors import DegenerateDetuning, InvalidArgument, NumericFailure
from .spectral import ModeKind, is_dynamically_stable

log = logging.getLogger(__name__)

CASE_RTOL = 1e-9

C, H, L = ModeKind.CIRCULAR, ModeKind.HYPERBOLIC, ModeKind.LINEAL

CASE_TABLE = {
    "a": ((C, C), True),
    "b": ((C, L), False),
    "c": ((C, H), False),
    "d": ((C, L), False),
    "e": ((C, C), True),
    "f": ((L, L), False),
    "g": ((H, H), False),
}


@dataclass(frozen=True)
class TwoModeParams:
    Delta: float
    Omega: float
    kappa: complex = 0j

    def __post_init__(self):
        if not (math.isfinite(self.Delta) and math.isfinite(self.Omega)):
            raise InvalidArgument("Delta and Omega must be finite")
        if not self.Omega > 0:
            raise InvalidArgument(f"Omega must be positive, got {self.Omega}")
        k = complex(self.kappa)
        if not (math.isfinite(k.real) and math.isfinite(k.imag)):
            raise InvalidArgument("kappa must be finite")
        object.__setattr__(self, "Delta", float(self.Delta))
        object.__setattr__(self, "Omega", float(self.Omega))
        object.__setattr__(self, "kappa", k)


@dataclass(frozen=True)
class PumpParams:
    Delta_prime: float
    Omega: float
    kappa0: float
    kappa_in: complex

    def __post_init__(self):
        if not self.Omega > 0:
            raise InvalidArgument(f"Omega must be positive, got {self.Omega}")
        vals = [self.Delta_prime, self.kappa0, complex(self.kappa_in).real, complex(self.kappa_in).imag]
        if not all(math.isfinite(v) for v in vals):
            raise InvalidArgument("pump parameters must be finite")
        object.__setattr__(self, "kappa_in", complex(self.kappa_in))


@dataclass(frozen=True)
class TwoModeCase:
    label: str
    K_R: float
    K_B: float
    mode_kinds: tuple
    stable: bool

    def to_dict(self):
        return {
            "case": self.label,
            "K_R": self.K_R,
            "K_B": self.K_B,
            "mode_kinds": [k.value for k in self.mode_kinds],
            "stable": self.stable,
        }


def _params(p):
    if isinstance(p, TwoModeParams):
        return p
    return TwoModeParams(*p)


def build_two_mode(params):
    """Coefficient matrix ``V`` of the linearized two-mode Hamiltonian."""
    p = _params(params)
    V = np.diag([p.Delta, p.Omega, p.Delta, p.Omega])
    V[0, 1] = V[1, 0] = 2 * p.kappa.real
    V[2, 1] = V[1, 2] = 2 * p.kappa.imag
    return QuadraticModel(2, V)


def critical_couplings(Delta, Omega):
    """Return ``(K_R, K_B)``; ``K_B`` is infinite at ``Delta = 0``."""
    if not Omega > 0:
        raise InvalidArgument(f"Omega must be positive, got {Omega}")
    K_R = math.sqrt(Omega * abs(Delta) / 4)
    K_B = math.sqrt((Delta**2 - Omega**2) ** 2 / (16 * Omega * abs(Delta))) if Delta != 0 else math.inf
    return K_R, K_B


def case_label(Delta, Omega, kappa_abs, band=None):
    """Case label for real inputs, with equalities resolved inside ``band``."""
    if band is None:
        band = CASE_RTOL * Omega
    K_R, K_B = critical_couplings(Delta, Omega)
    if abs(Delta) <= band:
        return "d"
    if Delta > 0:
        if abs(kappa_abs - K_R) <= band:
            return "b"
        return "a" if kappa_abs < K_R else "c"
    if abs(kappa_abs - K_B) <= band:
        return "f"
    return "e" if kappa_abs < K_B else "g"


def classify_two_mode(params):
    """Assign the case label, modal kinds and stability of the two-mode model."""
    p = _params(params)
    K_R, K_B = critical_couplings(p.Delta, p.Omega)
    label = case_label(p.Delta, p.Omega, abs(p.kappa))
    kinds, stable = CASE_TABLE[label]
    return TwoModeCase(label, K_R, K_B, kinds, stable)


def boundary_distance(params):
    """Distance (in frequency units) from the nearest case boundary."""
    p = _params(params)
    K_R, K_B = critical_couplings(p.Delta, p.Omega)
    k = abs(p.kappa)
    d = abs(p.Delta)
    if p.Delta > 0:
        d = min(d, abs(k - K_R))
    elif p.Delta < 0:
        d = min(d, abs(k - K_B))
    return d


def stability_condition_eq17(params):
    """Evaluate ``(Delta^2 + Omega^2)^2 > 4 Omega Delta (Omega Delta - 4 |kappa|^2) > 0``."""
    p = _params(params)
    D, O, k2 = p.Delta, p.Omega, abs(p.kappa) ** 2
    mid = 4 * O * D * (O * D - 4 * k2)
    return bool((D * D + O * O) ** 2 > mid > 0)


@dataclass(frozen=True)
class TwoModeSweep:
    deltas: np.ndarray
    kappas: np.ndarray
    labels: np.ndarray
    stable: np.ndarray
    max_re: np.ndarray

    def rows(self):
        """Rows ``(delta, kappa_abs, case_label, stable, lambda_re_max)``,
        row-major with ``delta`` the outer index."""
        for i, d in enumerate(self.deltas):
            for j, k in enumerate(self.kappas):
                yield d, k, str(self.labels[i, j]), bool(self.stable[i, j]), float(self.max_re[i, j])


def _label_row(args):
    D, O, kappas = args
    return [case_label(D, O, k) for k in kappas]


def two_mode_sweep(deltas, Omega, kappas, jobs=1):
    """Case labels and largest real parts over a ``(Delta, |kappa|)`` grid."""
    from .kernels import two_mode_max_re

    deltas = np.asarray(deltas, dtype=float)
    kappas = np.asarray(kappas, dtype=float)
    if deltas.size < 1 or kappas.size < 1:
        raise InvalidArgument("sweep grid must be nonempty")
    TwoModeParams(0.0, Omega, 0.0)
    tasks = [(float(d), float(Omega), kappas) for d in deltas]
    if jobs and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_label_row, tasks))
    else:
        rows = [_label_row(t) for t in tasks]
    labels = np.array(rows, dtype="<U1")
    stable = np.vectorize(lambda lab: CASE_TABLE[lab][1])(labels).astype(bool)
    return TwoModeSweep(deltas, kappas, labels, stable, two_mode_max_re(deltas, Omega, kappas))


# ---------------------------------------------------------------------------
# rotating-frame pieces


def interaction_picture_split(params):
    """Split the coupling into beam-splitter and two-mode-squeezing parts.

    Returns ``(bs_model, sq_model, sq_kind)``. Each model is the free part plus
    one of the two couplings, frozen at ``t = 0``:

    * beam splitter ``kappa a^dag b + h.c.``
      = ``kappa_r (x_1 x_2 + p_1 p_2) + kappa_i (p_1 x_2 - x_1 p_2)``
    * squeezing ``kappa a^dag b^dag + h.c.``
      = ``kappa_r (x_1 x_2 - p_1 p_2) + kappa_i (p_1 x_2 + x_1 p_2)``

    Their sum is the full coupling. ``sq_kind`` compares ``2 |kappa|`` with
    ``|Delta + Omega|``.
    """
    p = _params(params)
    kr, ki = p.kappa.real, p.kappa.imag
    free = np.diag([p.Delta, p.Omega, p.Delta, p.Omega])
    bs = free.copy()
    bs[0, 1] = bs[1, 0] = kr
    bs[2, 3] = bs[3, 2] = kr
    bs[2, 1] = bs[1, 2] = ki
    bs[0, 3] = bs[3, 0] = -ki
    sq = free.copy()
    sq[0, 1] = sq[1, 0] = kr
    sq[2, 3] = sq[3, 2] = -kr
    sq[2, 1] = sq[1, 2] = ki
    sq[0, 3] = sq[3, 0] = ki
    gap = 2 * abs(p.kappa) - abs(p.Delta + p.Omega)
    if abs(gap) <= CASE_RTOL * p.Omega:
        kind = ModeKind.LINEAL
    elif gap < 0:
        kind = ModeKind.CIRCULAR
    else:
        kind = ModeKind.HYPERBOLIC
    return QuadraticModel(2, bs), QuadraticModel(2, sq), kind


def effective_far_off_resonance(params, floor=1e-9):
    """Second-order effective frequencies ``(Delta_eff, Omega_eff)``.

    Raises ``DegenerateDetuning`` when ``|Delta^2 - Omega^2|`` is below
    ``floor * max(Delta^2, Omega^2)``.
    """
    p = _params(params)
    D, O, k2 = p.Delta, p.Omega, abs(p.kappa) ** 2
    gap = D * D - O * O
    if abs(gap) <= floor * max(D * D, O * O):
        raise DegenerateDetuning(f"|Delta| = {abs(D)} is resonant with Omega = {O}")
    return D + 2 * O * k2 / gap, O - 2 * D * k2 / gap


# ---------------------------------------------------------------------------
# steady states of the driven system


@dataclass(frozen=True)
class SteadyState:
    Delta: float
    alpha_s: complex
    beta_s: complex
    kappa: complex
    case: TwoModeCase = None
    verdict: object = field(default=None, repr=False)
    degenerate: bool = False

    @property
    def stable(self):
        return bool(self.verdict is not None and self.verdict.stable)

    def to_dict(self):
        d = {
            "Delta": self.Delta,
            "alpha_s": [self.alpha_s.real, self.alpha_s.imag],
            "beta_s": [self.beta_s.real, self.beta_s.imag],
            "kappa": [self.kappa.real, self.kappa.imag],
            "degenerate": self.degenerate,
            "stable": self.stable,
        }
        if self.case is not None:
            d["case"] = self.case.label
        if self.verdict is not None:
            d["mode_kinds"] = [k.value for k in self.verdict.mode_kinds]
        return d


def steady_state_detunings(pump):
    """Real roots of ``Omega D^3 - Omega D' D^2 + 2 kappa0^2 |kappa_in|^2 = 0``."""
    O, Dp = pump.Omega, pump.Delta_prime
    c0 = 2 * pump.kappa0**2 * abs(pump.kappa_in) ** 2
    if c0 == 0:
        return [Dp]
    # companion matrix of D^3 - D' D^2 + c0 / Omega
    comp = np.array([[Dp, 0.0, -c0 / O], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    roots = np.linalg.eigvals(comp)
    scale = max(1.0, abs(Dp), abs(c0 / O) ** (1 / 3))
    real = sorted((float(r.real) for r in roots if abs(r.imag) <= 1e-10 * scale), reverse=True)
    # polish each real root with a few Newton steps on the cubic
    out = []
    for r in real:
        for _ in range(3):
            f = O * r**3 - O * Dp * r * r + c0
            df = 3 * O * r * r - 2 * O * Dp * r
            if df == 0:
                break
            r -= f / df
        out.append(r)
    return out


def steady_states(pump, zero_tol=1e-12):
    """All steady-state branches of the driven two-mode system.

    For each real detuning root the cavity amplitude is
    ``alpha_s = kappa_in / Delta``, the mechanical displacement
    ``beta_s = kappa0 |alpha_s|^2 / Omega`` and the linearized coupling
    ``kappa = -kappa0 alpha_s``. Roots at ``Delta = 0`` are reported with
    ``degenerate=True`` and no verdict.
    """
    if not isinstance(pump, PumpParams):
        pump = PumpParams(*pump)
    out = []
    for D in steady_state_detunings(pump):
        if abs(D) <= zero_tol * max(1.0, abs(pump.Delta_prime), pump.Omega):
            out.append(SteadyState(D, complex("nan"), complex("nan"), complex("nan"), degenerate=True))
            continue
        alpha = pump.kappa_in / D
        beta = complex(pump.kappa0 * abs(alpha) ** 2 / pump.Omega)
        kappa = -pump.kappa0 * alpha
        p = TwoModeParams(D, pump.Omega, kappa)
        verdict = is_dynamically_stable(eom_matrix(build_two_mode(p)))
        out.append(SteadyState(D, alpha, beta, kappa, classify_two_mode(p), verdict))
    return out


def steady_state_map(delta_primes, drives, Omega=1.0):
    """Count stable branches over a grid of bare detuning and drive strength.

    ``drives`` are values of ``|kappa0 kappa_in| / Omega^2``. Returns a dict of
    integer arrays of shape ``(len(drives), len(delta_primes))``: ``n_stable``
    and the number of stable branches in case ``a`` and in case ``e``.
    """
    shape = (len(drives), len(delta_primes))
    n_stable = np.zeros(shape, dtype=int)
    n_a = np.zeros(shape, dtype=int)
    n_e = np.zeros(shape, dtype=int)
    for i, g in enumerate(drives):
        for j, dp in enumerate(delta_primes):
            pump = PumpParams(dp * Omega, Omega, 1.0, g * Omega**2)
            for b in steady_states(pump):
                if b.stable:
                    n_stable[i, j] += 1
                    if b.case.label == "a":
                        n_a[i, j] += 1
                    elif b.case.label == "e":
                        n_e[i, j] += 1
    return {"n_stable": n_stable, "n_a": n_a, "n_e": n_e}


# ---------------------------------------------------------------------------
# closed forms per case


def _quad(WG, coef):
    """Add ``coef (P_1 X_2 - X_1 P_2)`` to a 4x4 coefficient matrix."""
    W = np.array(WG, dtype=float)
    W[2, 1] += coef
    W[1, 2] += coef
    W[0, 3] -= coef
    W[3, 0] -= coef
    return W


def _rotation_split(W):
    """Split a 4x4 target into its diagonal and rotation parts."""
    WG = np.diag(np.diag(W))
    return WG, W - WG


def closed_form_eigenvalues(params, label=None):
    """Closed-form eigenvalues of ``A`` for the given case, with multiplicity."""
    p = _params(params)
    D, O, k = p.Delta, p.Omega, abs(p.kappa)
    label = label or classify_two_mode(p).label
    r = math.sqrt(max(16 * D * O * k * k + (D * D - O * O) ** 2, 0.0))
    aux = {}
    if label in ("a", "e"):
        l1 = math.sqrt((D * D + O * O + r) / 2)
        l2 = math.sqrt(max((D * D + O * O - r) / 2, 0.0))
        aux.update(lambda1=l1, lambda2=l2)
        ev = [1j * l1, -1j * l1, 1j * l2, -1j * l2]
    elif label == "b":
        l1 = math.sqrt(D * D + O * O)
        aux.update(lambda1=l1, lambda2=0.0)
        ev = [1j * l1, -1j * l1, 0j, 0j]
    elif label == "c":
        l1 = math.sqrt((D * D + O * O + r) / 2)
        l2 = math.sqrt(max((-D * D - O * O + r) / 2, 0.0))
        aux.update(lambda1=l1, lambda2=l2)
        ev = [1j * l1, -1j * l1, l2, -l2]
    elif label == "d":
        aux.update(lambda1=O, lambda2=0.0)
        ev = [1j * O, -1j * O, 0j, 0j]
    elif label == "f":
        lam = math.sqrt((D * D + O * O) / 2)
        aux.update(lam=lam)
        ev = [1j * lam, 1j * lam, -1j * lam, -1j * lam]
    else:
        q = math.sqrt(max(4 * D * D * O * O - 16 * D * O * k * k, 0.0))
        lr = math.sqrt(max(-D * D - O * O + q, 0.0)) / 2
        li = math.sqrt(D * D + O * O + q) / 2
        aux.update(lambda_r=lr, lambda_i=li)
        ev = [lr + 1j * li, lr - 1j * li, -lr + 1j * li, -lr - 1j * li]
    return np.array(ev, dtype=complex), aux


def modal_target(params, label=None):
    """``(W_G, W_I)`` of the stated modal form for the case, in ``(X_1, X_2, P_1, P_2)``."""
    p = _params(params)
    label = label or classify_two_mode(p).label
    _, aux = closed_form_eigenvalues(p, label)
    sg = math.copysign(1.0, p.Omega**2 - p.Delta**2)
    if label == "a":
        l1, l2 = aux["lambda1"], aux["lambda2"]
        return np.diag([l1, l2, l1, l2]), np.zeros((4, 4))
    if label == "b":
        return np.diag([aux["lambda1"], 0.0, aux["lambda1"], 1.0]), np.zeros((4, 4))
    if label == "c":
        l1, l2 = aux["lambda1"], aux["lambda2"]
        return np.diag([l1, -l2, l1, l2]), np.zeros((4, 4))
    if label == "d":
        return np.diag([p.Omega, 0.0, p.Omega, -1.0]), np.zeros((4, 4))
    if label == "e":
        l1, l2 = aux["lambda1"], aux["lambda2"]
        return np.diag([sg * l1, -sg * l2, sg * l1, -sg * l2]), np.zeros((4, 4))
    if label == "f":
        WG = np.diag([0.0, 0.0, sg, sg])
        return _rotation_split(_quad(WG, -sg * aux["lam"]))
    lr, li = aux["lambda_r"], aux["lambda_i"]
    WG = np.diag([-lr, -lr, lr, lr])
    return _rotation_split(_quad(WG, li))


def printed_matrix(params, label=None, corrected=False):
    """The case-wise closed-form ``S`` and its auxiliary quantities.

    With ``corrected=True`` the rows that fail validation for complex
    ``kappa`` in cases ``a`` and ``e`` are replaced by versions that pass;
    the default reproduces the formulas as stated.
    """
    p = _params(params)
    label = label or classify_two_mode(p).label
    D, O = p.Delta, p.Omega
    kr, ki, ka = p.kappa.real, p.kappa.imag, abs(p.kappa)
    _, aux = closed_form_eigenvalues(p, label)
    sg = math.copysign(1.0, O * O - D * D)
    sqrt = math.sqrt
    with np.errstate(all="ignore"):
        if label == "a":
            l1, l2 = aux["lambda1"], aux["lambda2"]
            d12 = sqrt(l1**2 - l2**2)
            d1, d2 = sqrt(abs(l1**2 - D * D)), sqrt(abs(l2**2 - D * D))
            aux.update(delta12=d12, delta1=d1, delta2=d2)
            S = np.array([
                [ki * d2 / ka * sqrt(D / l1), 0, -kr * d2 / ka * sqrt(D / l1), -d1 * sqrt(O / l1)],
                [-ki * (d1 if corrected else d2) / ka * sqrt(D / l2), 0, kr * d1 / ka * sqrt(D / l2), -d2 * sqrt(O / l2)],
                [kr * d2 / ka * sqrt(l1 / D), d1 * sqrt(l1 / O), ki * d2 / ka * sqrt(l1 / D), 0],
                [-kr * d1 / ka * sqrt(l2 / D), d2 * sqrt(l2 / O), -ki * d1 / ka * sqrt(l2 / D), 0],
            ]) / d12
        elif label == "b":
            l1 = aux["lambda1"]
            q, q3 = sqrt(l1), sqrt(l1**3)
            S = np.array([
                [2 * D * kr / q, D * O / q, 2 * D * ki / q, 0],
                [-2 * O * kr / l1, D * D / l1, -2 * O * ki / l1, 0],
                [-2 * D * D * ki / q3, 0, 2 * D * D * kr / q3, D * O * O / q3],
                [2 * D * O * ki / l1, 0, -2 * D * O * kr / l1, D * D * O / l1],
            ]) / (D * sqrt(O))
        elif label == "c":
            l1, l2 = aux["lambda1"], aux["lambda2"]
            s12, s2 = sqrt(l1**2 + l2**2), sqrt(l2**2 + D * D)
            d1 = sqrt(abs(l1**2 - D * D))
            aux.update(s12=s12, s2=s2, delta1=d1)
            S = np.array([
                [kr * s2 / ka * sqrt(l1 / D), d1 * sqrt(l1 / O), ki * s2 / ka * sqrt(l1 / D), 0],
                [-kr * d1 / ka * sqrt(l2 / D), s2 * sqrt(l2 / O), -ki * d1 / ka * sqrt(l2 / D), 0],
                [-ki * s2 / ka * sqrt(D / l1), 0, kr * s2 / ka * sqrt(D / l1), d1 * sqrt(O / l1)],
                [ki * d1 / ka * sqrt(D / l2), 0, -kr * d1 / ka * sqrt(D / l2), s2 * sqrt(O / l2)],
            ]) / s12
        elif label == "d":
            rO = sqrt(O)
            S = np.array([
                [2 * kr / O, 1, 2 * ki / O, 0],
                [0, 0, rO / (2 * kr) if kr != 0 else math.inf, -1 / rO],
                [0, 0, 0, 1],
                [-2 * kr / rO, 0, -2 * ki / rO, 0],
            ])
        elif label == "e":
            l1, l2 = aux["lambda1"], aux["lambda2"]
            d12 = sqrt(l1**2 - l2**2)
            d1, d2 = sqrt(abs(l1**2 - D * D)), sqrt(abs(l2**2 - D * D))
            q1, q2 = sqrt(l1), sqrt(l2)
            aux.update(delta12=d12, delta1=d1, delta2=d2)
            if corrected:
                row2 = [-2 * ki * D / (d2 * q2), 0, 2 * kr * D / (d2 * q2), sg * d2 / q2]
            else:
                row2 = [-2 * ki * D / (d2 * q2), 0, kr * D / (d2 * q2), sg * d1 / q2]
            S = np.array([
                [2 * ki * D / (d1 * q1), 0, -2 * kr * D / (d1 * q1), -sg * d1 / q1],
                row2,
                [2 * sg * kr * q1 / d1, d1 * q1 / O, 2 * sg * ki * q1 / d1, 0],
                [2 * sg * kr * q2 / d2, d2 * q2 / O, 2 * sg * ki * q2 / d2, 0],
            ]) * sqrt(O) / d12
        elif label == "f":
            lam = aux["lam"]
            g = abs(D * D - lam * lam)
            r, r3 = sqrt(g), sqrt(g**3)
            S = np.array([
                [-kr * (D * D + lam * lam) / (lam * r3), sg * (3 * lam * lam - D * D) / (2 * lam * O * r), -ki * (D * D + lam * lam) / (lam * r3), 0],
                [sg * ki * D * (D * D - 3 * lam * lam) / (lam * lam * r3), 0, sg * kr * D * (3 * lam * lam - D * D) / (lam * lam * r3), -(D * D + lam * lam) / (2 * lam * lam * r)],
                [-2 * ki * D / (lam * r), 0, 2 * kr * D / (lam * r), sg * r / lam],
                [2 * sg * kr / r, r / O, 2 * sg * ki / r, 0],
            ]) * sqrt(O / 2)
        else:
            lr, li = aux["lambda_r"], aux["lambda_i"]
            Lam = sqrt(-D * O)
            s = sqrt(lr**2 + li**2)
            Gam = sqrt(O / (4 * s * s) * ((s * s - D * D) / lr + sqrt((s * s - D * D) ** 2 / lr**2 + (s * s + D * D) ** 2 / li**2)))
            aux.update(Lambda=Lam, Sigma=s, Gamma=Gam)
            S = np.array([
                [kr * (D * D + s * s) / (4 * ka * D * s * li), (ka * Lam * s + s * s * li) / (2 * Lam * s * s * li), ki * (D * D + s * s) / (4 * ka * D * s * li), 0],
                [-ki * (ka * Lam + s * li) / (2 * ka * s * s * li), 0, kr * (ka * Lam + s * li) / (2 * ka * s * s * li), -Lam * (D * D + s * s) / (4 * D * s * s * li)],
                [ki * (4 * ka * Lam * li - s * (D * D - O * O)) / (8 * ka * s * s * lr * li), 0, kr * (s * (D * D - O * O) - 4 * ka * Lam * li) / (8 * ka * s * s * lr * li), Lam * (li * (D * D - s * s) - 2 * ka * Lam * s) / (4 * D * s * s * lr * li)],
                [kr * (2 * ka * Lam * s - li * (D * D - s * s)) / (4 * ka * D * s * lr * li), (s * s * (D * D - O * O) - 4 * ka * Lam * s * li) / (8 * Lam * s * s * lr * li), ki * (2 * ka * Lam * s - li * (D * D - s * s)) / (4 * ka * D * s * lr * li), 0],
            ]) * Lam / Gam
    return np.asarray(S, dtype=float), aux


def modal_residual(V, S, W_target):
    """``||S^-T V S^-1 - W_target||_F``; infinite if ``S`` is singular or not finite."""
    if not np.all(np.isfinite(S)):
        return math.inf
    try:
        W = congruence(V, S)
    except np.linalg.LinAlgError:
        return math.inf
    if not np.all(np.isfinite(W)):
        return math.inf
    return float(np.linalg.norm(W - W_target))


def symplectic_similarity(V, W_target, rng=None, n_starts=40, tol=1e-11):
    """Numerically find a symplectic ``S`` with ``S^-T V S^-1 = W_target``.

    Such an ``S`` satisfies the linear equation ``S A = A_t S`` with
    ``A = J V`` and ``A_t = J W_target``. Its solutions form a subspace;
    within it a least-squares search from random starts imposes
    ``S^T J S = J``.
    """
    V = np.asarray(V, dtype=float)
    W_target = np.asarray(W_target, dtype=float)
    n = V.shape[0]
    J = symplectic_form(n // 2)
    A, At = J @ V, J @ W_target
    I = np.eye(n)
    # vec(S A - At S) = (A^T kron I - I kron At) vec(S), column-major vec
    L = np.kron(A.T, I) - np.kron(I, At)
    _, sv, vh = np.linalg.svd(L)
    scale = max(1.0, sv[0])
    basis = vh[sv <= 1e-9 * scale] if np.any(sv <= 1e-9 * scale) else vh[:0]
    k = basis.shape[0]
    if k == 0:
        raise NumericFailure("target modal form is not similar to J V")
    mats = [b.reshape(n, n, order="F") for b in basis]
    iu = np.triu_indices(n, 1)

    def S_of(c):
        return np.tensordot(c, mats, axes=1)

    def resid(c):
        S = S_of(c)
        return (S.T @ J @ S - J)[iu]

    rng = np.random.default_rng(rng)
    best = None
    for _ in range(n_starts):
        c0 = rng.normal(size=k)
        sol = least_squares(resid, c0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        r = float(np.linalg.norm(sol.fun))
        if best is None or r < best[0]:
            best = (r, sol.x)
        if r < tol:
            break
    S = S_of(best[1])
    ok, res = check_symplectic(S, tol=1e-8)
    if not ok:
        raise NumericFailure(f"no symplectic solution found (best residual {res:.3e})")
    return S


@dataclass(frozen=True)
class ClosedFormResult:
    label: str
    eigenvalues: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    W_G: np.ndarray = field(repr=False)
    W_I: np.ndarray = field(repr=False)
    source: str = "printed"
    printed_symplectic_residual: float = 0.0
    printed_modal_residual: float = 0.0
    symplectic_residual: float = 0.0
    modal_residual: float = 0.0
    discrepancy: str = ""
    auxiliaries: dict = field(default_factory=dict)
    S_printed: np.ndarray = field(default=None, repr=False)

    @property
    def mode_kinds(self):
        return CASE_TABLE[self.label][0]


def validate_transform(V, S, W_target, symp_tol=1e-8, modal_rtol=1e-7):
    """Return ``(passed, symplectic_residual, modal_residual)``."""
    S = np.asarray(S, dtype=float)
    if not np.all(np.isfinite(S)):
        return False, math.inf, math.inf
    _, symp = check_symplectic(S)
    modal = modal_residual(V, S, W_target)
    ok = symp <= symp_tol and modal <= modal_rtol * np.linalg.norm(V)
    return bool(ok), symp, modal


def appendix_b_closed_forms(params, corrected=False, rng=0):
    """Closed-form eigenvalues, ``S`` and modal form for the two-mode case.

    The case-wise formula for ``S`` is validated against ``S^T J S = J`` and
    against the stated modal form. If it fails, the discrepancy and its
    residuals are logged and a numerically constructed symplectic ``S`` is
    returned instead (``source == "numeric"``).
    """
    p = _params(params)
    label = classify_two_mode(p).label
    V = build_two_mode(p).V
    ev, aux = closed_form_eigenvalues(p, label)
    WG, WI = modal_target(p, label)
    W = WG + WI
    S_p, aux = printed_matrix(p, label, corrected=corrected)
    ok, symp_p, modal_p = validate_transform(V, S_p, W)
    if ok:
        return ClosedFormResult(label, ev, S_p, WG, WI, "printed", symp_p, modal_p, symp_p, modal_p, "", aux, S_p)
    msg = (f"case ({label}) closed-form S fails validation at Delta={p.Delta}, Omega={p.Omega}, "
           f"kappa={p.kappa}: symplectic residual {symp_p:.3e}, modal residual {modal_p:.3e}")
    log.warning(msg + "; using a numerically constructed transform")
    S = symplectic_similarity(V, W, rng=rng)
    _, symp, modal = validate_transform(V, S, W)
    return ClosedFormResult(label, ev, S, WG, WI, "numeric", symp_p, modal_p, symp, modal, msg, aux, S_p)

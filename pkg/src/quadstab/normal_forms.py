"""Jordan-type normal forms (types I to VI) and their geometric splits.

Each normal form is a block Hamiltonian ``H = xi^T V xi / 2`` whose
equation-of-motion matrix has a single Jordan structure. A symplectic
matrix ``S``, realized from simple quadratic unitaries, rewrites it as
``H = H_G + H_I`` where the geometric part ``H_G`` is a sum of single-mode
forms ``alpha'_k P_k^2 + beta'_k X_k^2`` and the interaction part ``H_I``
commutes with it.

Operator convention: for ``U = exp(-i H_Q)`` with ``H_Q = xi^T Q xi / 2``,
``U xi U^dagger = exp(-J Q) xi``. The canonical variables of the split are
``Xi = S xi`` with ``S`` the product of these matrices, so a composite
``U_b U_a`` acts as ``S_b S_a``.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np
from scipy.linalg import expm

from .core import QuadraticModel, check_symplectic, congruence, symplectic_form
from .errors import InternalError, InvalidSpec
from .spectral import ModeKind


class JordanType(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"


_PARITY = {
    JordanType.III: 1,
    JordanType.IV: 0,
    JordanType.V: 1,
    JordanType.VI: 0,
}


@dataclass(frozen=True)
class JordanTypeSpec:
    """Parameters of one normal-form block.

    ``lam`` is the positive eigenvalue magnitude for types I, III and IV and
    a complex number with positive parts for type II; types V and VI ignore
    it. ``sigma`` is the chain sign (for type III it is the value of the
    product ``i sigma``); only types III, IV and VI use it.
    """

    type_id: JordanType
    D: int
    lam: complex = 1.0
    sigma: int = 1

    def __post_init__(self):
        try:
            t = JordanType(self.type_id)
        except ValueError:
            raise InvalidSpec(f"unknown Jordan type {self.type_id!r}") from None
        object.__setattr__(self, "type_id", t)
        if int(self.D) != self.D or self.D < 1:
            raise InvalidSpec(f"chain length D must be a positive integer, got {self.D!r}")
        object.__setattr__(self, "D", int(self.D))
        want = _PARITY.get(t)
        if want is not None and self.D % 2 != want:
            parity = "odd" if want else "even"
            raise InvalidSpec(f"type {t.value} needs {parity} D, got D={self.D}")
        if self.sigma not in (1, -1):
            raise InvalidSpec(f"sigma must be +1 or -1, got {self.sigma!r}")
        lam = complex(self.lam)
        if t is JordanType.II:
            if not (lam.real > 0 and lam.imag > 0):
                raise InvalidSpec(f"type II needs lam with positive real and imaginary parts, got {lam}")
        elif t in (JordanType.I, JordanType.III, JordanType.IV):
            if lam.imag != 0 or not lam.real > 0:
                raise InvalidSpec(f"type {t.value} needs real lam > 0, got {self.lam!r}")
            lam = lam.real
        else:
            lam = 0.0
        object.__setattr__(self, "lam", lam)

    @property
    def n_modes(self):
        if self.type_id is JordanType.II:
            return 2 * self.D
        if self.type_id is JordanType.VI:
            return self.D // 2
        return self.D


class _Quadratic:
    """Accumulate quadratic monomials into a symmetric coefficient matrix.

    Modes are 1-based as in the usual notation. ``c * a * b`` with distinct
    quadratures adds ``c`` to both off-diagonal entries; ``c * a^2`` adds
    ``2c`` on the diagonal, so that ``H = xi^T M xi / 2``.
    """

    def __init__(self, n):
        self.n = n
        self.M = np.zeros((2 * n, 2 * n))

    def x(self, j):
        return j - 1

    def p(self, j):
        return self.n + j - 1

    def add(self, c, a, b):
        if a == b:
            self.M[a, a] += 2 * c
        else:
            self.M[a, b] += c
            self.M[b, a] += c
        return self


def unitary_generator_to_symplectic(Q, t=1.0):
    """Return ``exp(t J Q)``, the linear map generated by ``H_Q = xi^T Q xi / 2``.

    This is the Heisenberg action ``U^dagger xi U`` of ``U = exp(-i t H_Q)``;
    the Schroedinger-side conjugation ``U xi U^dagger`` is the ``t -> -t``
    image.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] % 2:
        raise InvalidSpec(f"Q must be square with even dimension, got shape {Q.shape}")
    if np.linalg.norm(Q - Q.T) > 1e-12 * max(1.0, np.linalg.norm(Q)):
        raise InvalidSpec("Q must be symmetric")
    return expm(t * symplectic_form(Q.shape[0] // 2) @ Q)


def _conjugation(Q):
    """``S`` with ``U xi U^dagger = S xi`` for ``U = exp(-i xi^T Q xi / 2)``."""
    return unitary_generator_to_symplectic(Q, -1.0)


def _quarter_turn(n, angle):
    """Generator of ``exp(-i angle (p_1^2 + x_1^2))``."""
    q = _Quadratic(n)
    q.add(angle, q.x(1), q.x(1)).add(angle, q.p(1), q.p(1))
    return q.M


def _type_I(D, lam):
    h = _Quadratic(D)
    for j in range(1, D + 1):
        h.add(lam, h.x(j), h.p(j))
    for j in range(1, D):
        h.add(1, h.x(j), h.p(j + 1))
    g = _Quadratic(D)
    for j in range(1, D + 1):
        g.add(lam / 2, g.p(j), g.p(j)).add(-lam / 2, g.x(j), g.x(j))
    i = _Quadratic(D)
    for j in range(1, D):
        i.add(0.5, i.x(j), i.p(j + 1)).add(-0.5, i.p(j), i.x(j + 1))
        i.add(-0.5, i.x(j), i.x(j + 1)).add(0.5, i.p(j), i.p(j + 1))
    S = _conjugation(np.eye(2 * D) * math.pi / 4)
    return h.M, g.M, i.M, S


def _type_II(D, lam):
    lr, li = lam.real, lam.imag
    n = 2 * D
    h = _Quadratic(n)
    for j in range(1, n + 1):
        h.add(lr, h.x(j), h.p(j))
    for j in range(1, D + 1):
        h.add(li, h.x(2 * j), h.p(2 * j - 1)).add(-li, h.p(2 * j), h.x(2 * j - 1))
    for j in range(1, n - 1):
        h.add(1, h.x(j), h.p(j + 2))
    g = _Quadratic(n)
    for j in range(1, n + 1):
        g.add(lr / 2, g.p(j), g.p(j)).add(-lr / 2, g.x(j), g.x(j))
    i = _Quadratic(n)
    for j in range(1, n - 1):
        i.add(0.5, i.x(j), i.p(j + 2)).add(-0.5, i.p(j), i.x(j + 2))
        i.add(-0.5, i.x(j), i.x(j + 2)).add(0.5, i.p(j), i.p(j + 2))
    for j in range(1, D + 1):
        i.add(li, i.x(2 * j), i.p(2 * j - 1)).add(-li, i.p(2 * j), i.x(2 * j - 1))
    S = _conjugation(np.eye(2 * n) * math.pi / 4)
    return h.M, g.M, i.M, S


def _swap_chain_unitary(D):
    """Generator of ``U_1 = exp(i (x_1 x_2 - p_{D-1} p_D))``."""
    q = _Quadratic(D)
    q.add(-1, q.x(1), q.x(2)).add(1, q.p(D - 1), q.p(D))
    return q.M


def _composite(D, Q1):
    # U_2 U_1 with U_2 = U_1 R U_1^dagger equals U_1 R, which acts as S_R S_1
    return _conjugation(_quarter_turn(D, math.pi / 4)) @ _conjugation(Q1)


def _type_III(D, lam, isg):
    h = _Quadratic(D)
    for j in range(1, D + 1):
        c = isg * lam / 2 * (-1) ** (j + 1)
        h.add(c, h.x(j), h.x(D + 1 - j)).add(c, h.p(j), h.p(D + 1 - j))
    for j in range(1, D):
        h.add(1, h.x(j), h.p(j + 1))
    if D == 1:
        return h.M, h.M.copy(), np.zeros_like(h.M), np.eye(2)
    g = _Quadratic(D)
    g.add(1, g.p(1), g.p(1)).add(1, g.p(D), g.p(D))
    i = _Quadratic(D)
    for j in range(2, D):
        c = isg * lam / 2 * (-1) ** (j + 1)
        i.add(c, i.x(j), i.x(D + 1 - j)).add(c, i.p(j), i.p(D + 1 - j))
    i.add(1, i.p(1), i.p(2))
    i.add(isg * lam, i.p(1), i.x(D)).add(-isg * lam, i.x(1), i.p(D))
    for j in range(2, D):
        i.add(1, i.x(j), i.p(j + 1))
    return h.M, g.M, i.M, _composite(D, _swap_chain_unitary(D))


def _type_IV(D, lam, sg):
    h = _Quadratic(D)
    for j in range(1, D):
        c = sg / 2 * (-1) ** (j + 1)
        h.add(c, h.x(j), h.x(D - j)).add(c, h.p(j + 1), h.p(D + 1 - j))
    for j in range(1, D + 1):
        h.add(sg * lam / 2, h.x(j), h.x(D + 1 - j)).add(sg * lam / 2, h.p(j), h.p(D + 1 - j))
    g = _Quadratic(D)
    g.add(sg / 2, g.p(1), g.p(1)).add(sg / 2, g.p(D), g.p(D))
    i = _Quadratic(D)
    i.add(sg * lam, i.p(1), i.x(D)).add(-sg * lam, i.x(1), i.p(D))
    if D == 2:
        return h.M, g.M, i.M, _conjugation(_quarter_turn(D, math.pi / 4))
    i.add(sg, i.p(1), i.x(D - 1)).add(sg, i.p(2), i.p(D))
    for j in range(2, D - 1):
        c = sg / 2 * (-1) ** (j + 1)
        i.add(c, i.x(j), i.x(D - j)).add(c, i.p(j + 1), i.p(D + 1 - j))
    for j in range(2, D):
        i.add(sg * lam / 2, i.x(j), i.x(D + 1 - j)).add(sg * lam / 2, i.p(j), i.p(D + 1 - j))
    q = _Quadratic(D)
    q.add(0.5, q.x(1), q.p(D - 1)).add(-0.5, q.x(2), q.p(D))
    return h.M, g.M, i.M, _composite(D, q.M)


def _type_V(D):
    h = _Quadratic(D)
    for j in range(1, D):
        h.add(1, h.x(j), h.p(j + 1))
    if D == 1:
        return h.M, np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2)
    g = _Quadratic(D)
    g.add(1, g.p(1), g.p(1)).add(1, g.p(D), g.p(D))
    i = _Quadratic(D)
    i.add(1, i.p(1), i.p(2))
    for j in range(2, D):
        i.add(1, i.x(j), i.p(j + 1))
    return h.M, g.M, i.M, _composite(D, _swap_chain_unitary(D))


def _type_VI(D, sg):
    n = D // 2
    h = _Quadratic(n)
    for j in range(1, n):
        h.add(sg, h.x(j), h.p(j + 1))
    h.add(sg / 2 * (-1) ** (n + 1), h.x(n), h.x(n))
    g = _Quadratic(n)
    i = _Quadratic(n)
    if D == 2:
        g.add(sg / 2, g.p(1), g.p(1))
        return h.M, g.M, i.M, _conjugation(_quarter_turn(n, math.pi / 4))
    g.add(sg, g.p(1), g.p(1))
    i.add(sg, i.p(1), i.p(2))
    for j in range(2, n):
        i.add(sg, i.x(j), i.p(j + 1))
    i.add(sg / 2 * (-1) ** (n + 1), i.x(n), i.x(n))
    q = _Quadratic(n)
    q.add(-1, q.x(1), q.x(2))
    return h.M, g.M, i.M, _composite(n, q.M)


def _assemble(spec):
    t, D = spec.type_id, spec.D
    if t is JordanType.I:
        return _type_I(D, spec.lam)
    if t is JordanType.II:
        return _type_II(D, spec.lam)
    if t is JordanType.III:
        return _type_III(D, spec.lam, spec.sigma)
    if t is JordanType.IV:
        return _type_IV(D, spec.lam, spec.sigma)
    if t is JordanType.V:
        return _type_V(D)
    return _type_VI(D, spec.sigma)


def build_normal_form(spec):
    """Coefficient matrix of the normal-form Hamiltonian of one Jordan block."""
    V, _, _, _ = _assemble(spec)
    return QuadraticModel.from_matrix(V)


def modal_kind(beta_prime, alpha_prime, tol=1e-12):
    """Geometric kind of ``alpha' P^2 + beta' X^2``."""
    zb, za = abs(beta_prime) <= tol, abs(alpha_prime) <= tol
    if zb and za:
        return ModeKind.ZERO
    if zb or za:
        return ModeKind.LINEAL
    return ModeKind.HYPERBOLIC if alpha_prime * beta_prime < 0 else ModeKind.CIRCULAR


def mode_kinds_of(W_G, tol=1e-12):
    n = W_G.shape[0] // 2
    return tuple(modal_kind(W_G[k, k], W_G[n + k, n + k], tol) for k in range(n))


def commutator_residual(W_G, W_I):
    """``||W_G J W_I - W_I J W_G||_F``; zero exactly when ``[H_G, H_I] = 0``."""
    J = symplectic_form(W_G.shape[0] // 2)
    return float(np.linalg.norm(W_G @ J @ W_I - W_I @ J @ W_G))


def commutation_tolerance(W_G, W_I):
    return 1e-9 * (1.0 + np.linalg.norm(W_G) * np.linalg.norm(W_I))


def is_modal_diagonal(W, tol=1e-12):
    """True when ``W`` couples no quadratures except each mode to itself, with
    no ``X_k P_k`` cross term."""
    off = W - np.diag(np.diag(W))
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


@dataclass(frozen=True)
class GeometricSplit:
    """``H = H_G + H_I`` in the variables ``Xi = S xi``.

    ``residuals`` records the four verified invariants: symplecticity of
    ``S``, the congruence ``W_G + W_I = S^-T V S^-1``, the commutator of
    ``H_G`` and ``H_I``, and the change of characteristic polynomial.
    """

    V: np.ndarray = field(repr=False)
    W_G: np.ndarray = field(repr=False)
    W_I: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    mode_kinds: tuple = ()
    residuals: dict = field(default_factory=dict)


def _charpoly_residual(A, B):
    pa = np.real(np.poly(A))
    pb = np.real(np.poly(B))
    return float(np.max(np.abs(pa - pb)) / max(1.0, np.max(np.abs(pa))))


def verify_split(V, W_G, W_I, S):
    """Compute the invariant residuals of a candidate split."""
    n = V.shape[0] // 2
    J = symplectic_form(n)
    _, symp = check_symplectic(S)
    W = congruence(V, S)
    return {
        "symplectic": symp,
        "congruence": float(np.linalg.norm(W - W_G - W_I)),
        "commutator": commutator_residual(W_G, W_I),
        "spectrum": _charpoly_residual(J @ V, J @ (W_G + W_I)),
    }


def geometric_split(spec):
    """Build ``S``, ``W_G`` and ``W_I`` for a normal form and verify them.

    Raises
    ------
    InternalError
        If any invariant fails, which would point at a transcription error
        in the type-wise formulas.
    """
    V, WG, WI, S = _assemble(spec)
    res = verify_split(V, WG, WI, S)
    scale = max(1.0, np.linalg.norm(V))
    problems = []
    if res["symplectic"] > 1e-8 * max(1.0, np.linalg.norm(S) ** 2):
        problems.append("S is not symplectic")
    if res["congruence"] > 1e-9 * scale * max(1.0, np.linalg.norm(S) ** 2):
        problems.append("W_G + W_I differs from the transformed V")
    if res["commutator"] > commutation_tolerance(WG, WI):
        problems.append("H_G and H_I do not commute")
    if res["spectrum"] > 1e-8:
        problems.append("spectrum not preserved")
    if not is_modal_diagonal(WG):
        problems.append("W_G is not modal")
    if problems:
        raise InternalError(f"type {spec.type_id.value} D={spec.D}: {', '.join(problems)} ({res})")
    return GeometricSplit(V, WG, WI, S, mode_kinds_of(WG), res)


def interaction_picture_residual(split, t):
    """``||M^T W_G M - W_G||`` with ``M = exp(t J W_I)``: the drift of ``H_G``
    under the interaction-picture unitary, zero when ``[H_G, H_I] = 0``."""
    J = symplectic_form(split.W_G.shape[0] // 2)
    M = expm(t * J @ split.W_I)
    return float(np.linalg.norm(M.T @ split.W_G @ M - split.W_G))

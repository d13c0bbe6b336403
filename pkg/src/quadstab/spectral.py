"""Eigenvalue classification of A = J V and the stability criterion.

A quadratic system is dynamically stable exactly when A is diagonalizable
with a purely imaginary, nonzero spectrum. Everything else (real pairs,
complex quadruplets, zero eigenvalues, defective imaginary pairs) shows up
as at least one hyperbolic, lineal or null modal Hamiltonian after the
geometric reduction, and the orbits are unbounded.

The boundedness oracle at the bottom checks the same property without any
eigen-analysis, directly from the propagator norm.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np
from scipy.linalg import expm

from .core import EomMatrix, QuadraticModel, eom_matrix
from .errors import InvalidArgument, NumericFailure

CLASS_RTOL = 1e-8
RANK_RTOL = 1e-10
# widest eigenvalue spread that may still be a numerically split Jordan block
MERGE_RTOL = 1e-2


class EigenKind(str, Enum):
    REAL_PAIR = "RealPair"
    IMAGINARY_PAIR = "ImaginaryPair"
    COMPLEX_QUADRUPLET = "ComplexQuadruplet"
    ZERO = "Zero"


class ModeKind(str, Enum):
    CIRCULAR = "Circular"
    HYPERBOLIC = "Hyperbolic"
    LINEAL = "Lineal"
    ZERO = "ZeroMode"


UNSTABLE_KINDS = frozenset({ModeKind.HYPERBOLIC, ModeKind.LINEAL, ModeKind.ZERO})


@dataclass(frozen=True)
class EigenClass:
    """One symmetric group of eigenvalues of A.

    ``value`` is the representative with nonnegative real and imaginary
    parts; the group contains its images under negation and conjugation.
    Multiplicities count every eigenvalue in the group. ``chain_lengths`` are
    the Jordan block sizes of the representative eigenvalue.
    """

    kind: EigenKind
    value: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    chain_lengths: tuple = ()

    @property
    def diagonalizable(self):
        return self.geometric_multiplicity == self.algebraic_multiplicity


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    classes: tuple
    mode_kinds: tuple
    reason: str = ""

    @property
    def kind_counts(self):
        counts = {}
        for k in self.mode_kinds:
            counts[k] = counts.get(k, 0) + 1
        return counts

    def to_dict(self):
        return {
            "stable": self.stable,
            "mode_kinds": [k.value for k in self.mode_kinds],
            "classes": [
                {
                    "kind": c.kind.value,
                    "value": [c.value.real, c.value.imag],
                    "algebraic_multiplicity": c.algebraic_multiplicity,
                    "geometric_multiplicity": c.geometric_multiplicity,
                    "chain_lengths": list(c.chain_lengths),
                }
                for c in self.classes
            ],
            "reason": self.reason,
        }


def _as_array(A):
    if isinstance(A, EomMatrix):
        return np.asarray(A.A)
    if isinstance(A, QuadraticModel):
        return np.asarray(eom_matrix(A).A)
    return np.asarray(A, dtype=float)


def _nullity(M, rtol=RANK_RTOL):
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return len(s)
    return int(np.sum(s <= rtol * s[0]))


def _power_nullity(A, c, m):
    n = A.shape[0]
    B = A - c * np.eye(n)
    P = np.linalg.matrix_power(B, m)
    return _nullity(P)


@dataclass
class _Cluster:
    members: list
    centre: complex = 0j
    geometric: int = 1
    chains: tuple = ()
    blocked: set = field(default_factory=set)


def _centre(ev, members):
    if len(members) == 1:
        return complex(ev[members[0]])
    return complex(np.mean(ev[members]))


def _jordan_chains(A, c, m):
    """Jordan block sizes at ``c`` from nullities of successive powers."""
    null = [0]
    for k in range(1, m + 1):
        nk = min(max(_power_nullity(A, c, k), null[-1]), m)
        null.append(nk)
        if nk == m:
            break
    while len(null) < m + 1:
        null.append(null[-1])
    at_least = [null[k] - null[k - 1] for k in range(1, m + 1)]
    sizes = []
    for k in range(m, 0, -1):
        exact = at_least[k - 1] - (at_least[k] if k < m else 0)
        sizes.extend([k] * max(exact, 0))
    if sum(sizes) != m or not sizes:
        # inconsistent rank profile: fall back to one block per lost dimension
        g = max(null[1], 1)
        sizes = [m - g + 1] + [1] * (g - 1)
    return tuple(sorted(sizes, reverse=True))


def _cluster_eigenvalues(A, ev, scale):
    eps = CLASS_RTOL * scale
    n = len(ev)
    # tight single-link clusters
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(ev[i] - ev[j]) <= eps:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = [_Cluster(sorted(g)) for g in groups.values()]
    for c in clusters:
        c.centre = _centre(ev, c.members)

    # loose merges, accepted only when the rank profile confirms a single
    # generalized eigenspace of the merged size
    while True:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                ca, cb = clusters[a], clusters[b]
                if id(cb) in ca.blocked:
                    continue
                d = abs(ca.centre - cb.centre)
                if d <= MERGE_RTOL * scale and (best is None or d < best[0]):
                    best = (d, a, b)
        if best is None:
            break
        _, a, b = best
        ca, cb = clusters[a], clusters[b]
        members = sorted(ca.members + cb.members)
        centre = _centre(ev, members)
        m = len(members)
        if _power_nullity(A, centre, m) >= m:
            merged = _Cluster(members, centre)
            merged.blocked = ca.blocked | cb.blocked
            clusters = [c for k, c in enumerate(clusters) if k not in (a, b)] + [merged]
        else:
            ca.blocked.add(id(cb))
            cb.blocked.add(id(ca))

    for c in clusters:
        m = len(c.members)
        if m == 1:
            c.geometric, c.chains = 1, (1,)
            continue
        c.geometric = min(max(_nullity(A - c.centre * np.eye(A.shape[0])), 1), m)
        c.chains = (1,) * m if c.geometric == m else _jordan_chains(A, c.centre, m)
    return clusters


def _kind_of(c, eps):
    if abs(c) <= eps:
        return EigenKind.ZERO
    if abs(c.imag) <= eps:
        return EigenKind.REAL_PAIR
    if abs(c.real) <= eps:
        return EigenKind.IMAGINARY_PAIR
    return EigenKind.COMPLEX_QUADRUPLET


def classify_spectrum(A):
    """Group the eigenvalues of ``A`` into real pairs, imaginary pairs,
    complex quadruplets and zeros, with multiplicities and Jordan structure.
    """
    A = _as_array(A)
    if not np.all(np.isfinite(A)):
        raise NumericFailure(f"non-finite entries in A:\n{A}")
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver failed ({exc}) for A:\n{A}") from exc
    scale = max(1.0, np.linalg.norm(A, 2))
    eps = CLASS_RTOL * scale
    clusters = _cluster_eigenvalues(A, ev, scale)

    pair_tol = max(eps, 1e-6 * scale)
    groups = []
    for c in sorted(clusters, key=lambda c: (-abs(c.centre), -c.centre.real, -c.centre.imag)):
        kind = _kind_of(c.centre, eps)
        if kind is EigenKind.ZERO:
            rep = 0j
        elif kind is EigenKind.REAL_PAIR:
            rep = complex(abs(c.centre.real), 0.0)
        elif kind is EigenKind.IMAGINARY_PAIR:
            rep = complex(0.0, abs(c.centre.imag))
        else:
            rep = complex(abs(c.centre.real), abs(c.centre.imag))
        for g in groups:
            if g["kind"] is kind and abs(g["rep"] - rep) <= pair_tol:
                g["clusters"].append(c)
                break
        else:
            groups.append({"kind": kind, "rep": rep, "clusters": [c]})

    classes = []
    for g in groups:
        cl = g["clusters"]
        lead = max(cl, key=lambda c: (c.centre.real >= -eps and c.centre.imag >= -eps, len(c.members)))
        classes.append(EigenClass(
            kind=g["kind"],
            value=g["rep"],
            algebraic_multiplicity=sum(len(c.members) for c in cl),
            geometric_multiplicity=sum(c.geometric for c in cl),
            chain_lengths=lead.chains,
        ))
    return tuple(classes)


def _modes_for(cls):
    n_modes = cls.algebraic_multiplicity // 2
    kinds = []
    if cls.kind is EigenKind.IMAGINARY_PAIR:
        for d in cls.chain_lengths:
            if d == 1:
                kinds.append(ModeKind.CIRCULAR)
            else:
                kinds += [ModeKind.LINEAL] * 2 + [ModeKind.ZERO] * (d - 2)
    elif cls.kind is EigenKind.REAL_PAIR:
        kinds = [ModeKind.HYPERBOLIC] * n_modes
    elif cls.kind is EigenKind.COMPLEX_QUADRUPLET:
        kinds = [ModeKind.HYPERBOLIC] * n_modes
    else:
        odd = sorted((d for d in cls.chain_lengths if d % 2), reverse=True)
        for d in cls.chain_lengths:
            if d % 2 == 0:
                kinds += [ModeKind.LINEAL] + [ModeKind.ZERO] * (d // 2 - 1)
        for d in odd[::2]:
            kinds += [ModeKind.ZERO] if d == 1 else [ModeKind.LINEAL] * 2 + [ModeKind.ZERO] * (d - 2)
    if len(kinds) < n_modes:
        filler = ModeKind.CIRCULAR if (cls.kind is EigenKind.IMAGINARY_PAIR and cls.diagonalizable) else ModeKind.ZERO
        kinds += [filler] * (n_modes - len(kinds))
    return kinds[:n_modes]


def is_dynamically_stable(A):
    """Decide stability: diagonalizable with only purely imaginary eigenvalues."""
    classes = classify_spectrum(A)
    kinds = []
    for c in classes:
        kinds += _modes_for(c)
    bad = [c for c in classes if c.kind is not EigenKind.IMAGINARY_PAIR or not c.diagonalizable]
    stable = not bad
    if stable:
        reason = "diagonalizable with purely imaginary spectrum"
    else:
        parts = []
        for c in bad:
            if c.kind is EigenKind.IMAGINARY_PAIR:
                parts.append(f"defective imaginary pair at {c.value.imag:.6g}i (chains {list(c.chain_lengths)})")
            elif c.kind is EigenKind.ZERO:
                parts.append(f"zero eigenvalue (chains {list(c.chain_lengths)})")
            elif c.kind is EigenKind.REAL_PAIR:
                parts.append(f"real pair +-{c.value.real:.6g}")
            else:
                parts.append(f"complex quadruplet +-{c.value.real:.6g}+-{c.value.imag:.6g}i")
        reason = "; ".join(parts)
    return StabilityVerdict(stable, classes, tuple(kinds), reason)


def max_real_part(A):
    return float(np.max(np.linalg.eigvals(_as_array(A)).real))


def min_axis_distance(A):
    """Smallest |Re lambda| over the spectrum of ``A``."""
    return float(np.min(np.abs(np.linalg.eigvals(_as_array(A)).real)))


# ---------------------------------------------------------------------------
# propagator-norm oracle


class Boundedness(str, Enum):
    BOUNDED = "Bounded"
    DIVERGING = "Diverging"


@dataclass(frozen=True)
class OracleResult:
    status: Boundedness
    rate: float
    norm_ratio: float
    overflow: bool = False

    @property
    def bounded(self):
        return self.status is Boundedness.BOUNDED


def boundedness_oracle(A, t_max, n_samples=48, ratio_limit=1e3):
    """Classify ``exp(A t)`` as bounded or diverging from its norm alone.

    The spectral norm is sampled on a log-spaced grid up to ``t_max``. The
    growth rate is the least-squares slope of ``log ||exp(A t)||`` over the
    last decade of samples. Diverging means that the fitted line grows by
    more than ``ratio_limit`` across that decade, or that some sampled norm
    exceeds ``ratio_limit`` (which catches the polynomial growth of
    defective spectra). Growth rates much below ``log(ratio_limit) / t_max``
    are invisible, so ``t_max`` sets the resolution of the oracle.
    """
    A = _as_array(A)
    if not (t_max > 0 and math.isfinite(t_max)):
        raise InvalidArgument("t_max must be positive and finite")
    if n_samples < 10:
        raise InvalidArgument("n_samples must be at least 10")
    ts = np.geomspace(t_max * 1e-4, t_max, n_samples)
    logs = []
    for t in ts:
        with np.errstate(all="ignore"):
            E = expm(A * t)
        nrm = np.linalg.norm(E, 2) if np.all(np.isfinite(E)) else math.inf
        if not math.isfinite(nrm) or nrm > 1e300:
            return OracleResult(Boundedness.DIVERGING, math.inf, math.inf, overflow=True)
        logs.append(math.log(nrm))
    logs = np.array(logs)
    late = ts >= 0.1 * t_max
    rate = float(np.polyfit(ts[late], logs[late], 1)[0])
    ratio = math.exp(logs.max())
    growth = rate * (ts[-1] - ts[late][0])
    diverging = growth > math.log(ratio_limit) or ratio > ratio_limit
    return OracleResult(Boundedness.DIVERGING if diverging else Boundedness.BOUNDED, rate, ratio)


# ---------------------------------------------------------------------------
# single mode


@dataclass(frozen=True)
class SingleModeForm:
    alpha_prime: float
    beta_prime: float
    theta: float
    S: np.ndarray = field(repr=False)
    kind: ModeKind


def single_mode_geometric_form(model, tol=1e-12):
    """Rotate a one-mode model ``V = [[beta, gamma], [gamma, alpha]]`` to
    ``diag(beta', alpha')``.

    The rotation ``S = [[sin t, cos t], [-cos t, sin t]]`` uses the branch of
    ``tan 2t = 2 gamma / (alpha - beta)`` that puts the smaller coefficient on
    ``X``. The mode is hyperbolic when ``alpha beta < gamma^2`` and lineal at
    equality.
    """
    if not isinstance(model, QuadraticModel):
        model = QuadraticModel.from_matrix(model)
    if model.n_modes != 1:
        raise InvalidArgument(f"single-mode form needs n_modes = 1, got {model.n_modes}")
    (b, g), (_, a) = model.V
    r = math.sqrt((a - b) ** 2 + 4 * g * g)
    ap = 0.5 * ((a + b) + r)
    bp = 0.5 * ((a + b) - r)
    if a == b and g == 0:
        theta = 0.0
    else:
        theta = 0.5 * math.atan2(2 * g, a - b) + math.pi / 2
        if theta > math.pi / 2:
            theta -= math.pi
    S = np.array([[math.sin(theta), math.cos(theta)], [-math.cos(theta), math.sin(theta)]])
    size = max(1.0, abs(a) + abs(b) + abs(g)) ** 2
    det = a * b - g * g
    if abs(a) + abs(b) + abs(g) <= tol:
        kind = ModeKind.ZERO
    elif abs(det) <= tol * size:
        kind = ModeKind.LINEAL
    elif det < 0:
        kind = ModeKind.HYPERBOLIC
    else:
        kind = ModeKind.CIRCULAR
    return SingleModeForm(ap, bp, theta, S, kind)

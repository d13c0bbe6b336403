import numpy as np
import pytest

from helpers import multiset_mismatch

from quadstab.core import check_symplectic, eom_matrix, symplectic_form
from quadstab.errors import InvalidSpec
from quadstab.normal_forms import (
    JordanType,
    JordanTypeSpec,
    build_normal_form,
    geometric_split,
    interaction_picture_residual,
    is_modal_diagonal,
    modal_kind,
    unitary_generator_to_symplectic,
)
from quadstab.spectral import EigenKind, ModeKind, classify_spectrum, is_dynamically_stable

C, H, L, Z = ModeKind.CIRCULAR, ModeKind.HYPERBOLIC, ModeKind.LINEAL, ModeKind.ZERO

SPECS = (
    [("I", D, 0.7) for D in (1, 2, 3)]
    + [("II", D, 0.7 + 0.4j) for D in (1, 2)]
    + [("III", D, 0.7) for D in (1, 3, 5)]
    + [("IV", D, 0.7) for D in (2, 4)]
    + [("V", D, 0.0) for D in (1, 3, 5)]
    + [("VI", D, 0.0) for D in (2, 4)]
)


@pytest.mark.parametrize("sigma", [1, -1])
@pytest.mark.parametrize("type_id,D,lam", SPECS)
def test_split_invariants(type_id, D, lam, sigma):
    spec = JordanTypeSpec(type_id, D, lam, sigma)
    split = geometric_split(spec)
    n = spec.n_modes
    assert split.V.shape == (2 * n, 2 * n)
    assert check_symplectic(split.S, tol=1e-8 * max(1.0, np.linalg.norm(split.S) ** 2))[0]
    assert is_modal_diagonal(split.W_G)
    assert split.residuals["spectrum"] < 1e-8
    for t in (0.3, 1.0, 2.5):
        assert interaction_picture_residual(split, t) < 1e-8 * max(1.0, np.linalg.norm(split.W_G))


# frozen expectations for the geometric kinds of W_G
EXPECTED_KINDS = {
    ("I", 1): (H,), ("I", 3): (H, H, H),
    ("II", 1): (H, H), ("II", 2): (H, H, H, H),
    ("III", 1): (C,), ("III", 3): (L, Z, L), ("III", 5): (L, Z, Z, Z, L),
    ("IV", 2): (L, L), ("IV", 4): (L, Z, Z, L),
    ("V", 1): (Z,), ("V", 3): (L, Z, L), ("V", 5): (L, Z, Z, Z, L),
    ("VI", 2): (L,), ("VI", 4): (L, Z),
}


@pytest.mark.parametrize("key,kinds", sorted(EXPECTED_KINDS.items()))
def test_geometric_kinds(key, kinds):
    t, D = key
    lam = 0.7 + 0.4j if t == "II" else 0.7
    split = geometric_split(JordanTypeSpec(t, D, lam))
    assert split.mode_kinds == kinds


@pytest.mark.parametrize("type_id,D,lam", SPECS)
def test_spectrum_of_normal_form(type_id, D, lam):
    spec = JordanTypeSpec(type_id, D, lam)
    A = eom_matrix(build_normal_form(spec)).A
    ev = np.linalg.eigvals(A)
    lam = complex(spec.lam)
    if type_id == "I":
        target = np.r_[np.full(D, lam), np.full(D, -lam)]
    elif type_id == "II":
        target = np.concatenate([np.full(D, s * v) for v in (lam, lam.conjugate()) for s in (1, -1)])
    elif type_id in ("III", "IV"):
        target = np.r_[np.full(D, 1j * lam), np.full(D, -1j * lam)]
    else:
        target = np.zeros(ev.size)
    # a Jordan chain of length D scatters eigenvalues by about eps^(1/D)
    tol = 10 * np.finfo(float).eps ** (1.0 / max(D, 1)) * max(1.0, abs(lam))
    assert multiset_mismatch(ev, target) <= max(tol, 1e-8)


@pytest.mark.parametrize("type_id,D,lam", SPECS)
def test_chain_structure(type_id, D, lam):
    spec = JordanTypeSpec(type_id, D, lam)
    classes = classify_spectrum(eom_matrix(build_normal_form(spec)))
    kind = {
        "I": EigenKind.REAL_PAIR, "II": EigenKind.COMPLEX_QUADRUPLET,
        "III": EigenKind.IMAGINARY_PAIR, "IV": EigenKind.IMAGINARY_PAIR,
        "V": EigenKind.ZERO, "VI": EigenKind.ZERO,
    }[type_id]
    assert [c.kind for c in classes] == [kind]
    chains = {"V": (D, D)}.get(type_id, (D,))
    assert classes[0].chain_lengths == chains


def test_only_simple_elliptic_block_is_stable():
    stable = []
    for t, D, lam in SPECS:
        for sg in (1, -1):
            spec = JordanTypeSpec(t, D, lam, sg)
            if is_dynamically_stable(eom_matrix(build_normal_form(spec))).stable:
                stable.append((t, D))
    assert set(stable) == {("III", 1)}


@pytest.mark.parametrize("kwargs", [
    dict(type_id="VII", D=1),
    dict(type_id="I", D=0),
    dict(type_id="III", D=2),
    dict(type_id="IV", D=3),
    dict(type_id="V", D=2),
    dict(type_id="VI", D=1),
    dict(type_id="I", D=1, lam=-1.0),
    dict(type_id="I", D=1, lam=1j),
    dict(type_id="II", D=1, lam=1.0),
    dict(type_id="III", D=1, sigma=0),
])
def test_spec_validation(kwargs):
    with pytest.raises(InvalidSpec):
        JordanTypeSpec(**kwargs)


def test_mode_counts():
    assert JordanTypeSpec("II", 2, 1 + 1j).n_modes == 4
    assert JordanTypeSpec("VI", 4).n_modes == 2
    assert JordanTypeSpec("V", 3).n_modes == 3
    assert JordanTypeSpec(JordanType.I, 2, 1.0).type_id is JordanType.I


def test_modal_kind():
    assert modal_kind(1.0, 2.0) is C
    assert modal_kind(-1.0, 2.0) is H
    assert modal_kind(0.0, 2.0) is L
    assert modal_kind(0.0, 0.0) is Z


def test_unitary_generator_is_symplectic(rng):
    M = rng.normal(size=(4, 4))
    Q = (M + M.T) / 2
    S = unitary_generator_to_symplectic(Q, t=0.7)
    assert check_symplectic(S)[0]
    # the generator of a harmonic oscillator rotates phase space
    R = unitary_generator_to_symplectic(np.eye(2), t=np.pi / 2)
    np.testing.assert_allclose(R, symplectic_form(1), atol=1e-14)

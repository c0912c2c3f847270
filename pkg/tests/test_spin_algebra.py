import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from platonic_dd.rotations import IDENTITY, rotation_from_axis_angle
from platonic_dd.spin_algebra import (
    angular_momentum_ops,
    clebsch_gordan,
    format_operator,
    is_hermitian,
    multipole_basis,
    multipole_decompose,
    multipole_operator,
    multipole_reconstruct,
    parse_operator,
    read_operator,
    spin_dim,
    twice,
    wigner_d,
    write_operator,
)

SPINS = [Fraction(n, 2) for n in range(1, 8)]
spin = st.sampled_from(SPINS)
axis = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1)
angle = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)

# Reference values from an independent symbolic implementation.
CG_TABLE = [
    (("1/2", "1/2", "1/2", "-1/2", 0, 0), 0.7071067811865476),
    ((1, 1, 1, -1, 0, 0), 0.5773502691896257),
    ((1, 0, 1, 0, 2, 0), 0.816496580927726),
    ((1, 1, 1, 0, 2, 1), 0.7071067811865476),
    (("3/2", "1/2", 1, -1, "5/2", "-1/2"), 0.5477225575051661),
    ((2, 1, 1, -1, 1, 0), 0.5477225575051661),
    ((2, -2, 2, 2, 3, 0), -0.31622776601683794),
    (("3/2", "3/2", "3/2", "-1/2", 2, 1), 0.7071067811865476),
    ((3, 2, 2, -1, 4, 1), 0.5916079783099616),
    (("5/2", "1/2", "3/2", "-3/2", 2, -1), 0.5669467095138409),
    ((2, 0, 2, 0, 3, 0), 0.0),
    (("7/2", "5/2", "7/2", "-5/2", 5, 0), 0.49215456638754984),
]


def test_twice():
    assert twice("3/2") == 3 and twice(2) == 4 and twice(0.5) == 1
    with pytest.raises(ValueError):
        twice(0.3)
    with pytest.raises(ValueError):
        spin_dim(-1)


def test_spin_half_jz():
    _, _, jz = angular_momentum_ops(0.5)
    assert np.allclose(jz, np.diag([0.5, -0.5]))


def test_spin_one_trace():
    _, _, jz = angular_momentum_ops(1)
    assert math.isclose(np.trace(jz @ jz).real, 2.0)


@pytest.mark.parametrize("j", SPINS)
def test_trace_normalisation_and_algebra(j):
    J = angular_momentum_ops(j)
    jj = float(j)
    for a in range(3):
        for b in range(3):
            expect = jj * (jj + 1) * (2 * jj + 1) / 3 if a == b else 0.0
            assert abs(np.trace(J[a] @ J[b]) - expect) < 1e-12
    jx, jy, jz = J
    assert np.allclose(jx @ jy - jy @ jx, 1j * jz)
    assert np.allclose(jx @ jx + jy @ jy + jz @ jz, jj * (jj + 1) * np.eye(spin_dim(j)))


def test_ops_are_read_only():
    with pytest.raises(ValueError):
        angular_momentum_ops(1)[0][0, 0] = 5


def test_wigner_identity():
    for j in SPINS:
        assert np.allclose(wigner_d(j, IDENTITY), np.eye(spin_dim(j)))


def test_wigner_spin_half_z():
    th = 0.83
    D = wigner_d(0.5, rotation_from_axis_angle((0, 0, 1), th))
    assert np.allclose(D, np.diag([np.exp(-1j * th / 2), np.exp(1j * th / 2)]))


def test_wigner_spin_half_x_pi():
    D = wigner_d(0.5, rotation_from_axis_angle((1, 0, 0), math.pi))
    target = -1j * np.array([[0, 1], [1, 0]])
    # half-integer spins are defined up to sign
    assert np.allclose(D, target) or np.allclose(D, -target)


@settings(max_examples=40, deadline=None)
@given(spin, axis, angle)
def test_wigner_matches_matrix_exponential(j, n, th):
    r = rotation_from_axis_angle(n, th)
    ax, ang = r.axis_angle()
    jx, jy, jz = angular_momentum_ops(j)
    ref = expm(-1j * ang * (ax[0] * jx + ax[1] * jy + ax[2] * jz))
    D = wigner_d(j, r)
    assert np.allclose(D, ref, atol=1e-10)
    assert np.allclose(D @ D.conj().T, np.eye(spin_dim(j)), atol=1e-12)


@pytest.mark.parametrize("args,value", CG_TABLE)
def test_clebsch_gordan_reference(args, value):
    assert abs(clebsch_gordan(*args) - value) < 1e-14


def test_clebsch_gordan_named_cases():
    assert clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1, 1) == 1.0
    assert math.isclose(clebsch_gordan(1, 1, 1, -1, 0, 0), 1 / math.sqrt(3))
    for L in range(0, 5):
        for M in range(-L, L + 1):
            assert math.isclose(
                clebsch_gordan(L, M, L, -M, 0, 0), (-1) ** (L - M) / math.sqrt(2 * L + 1), abs_tol=1e-15
            )


def test_clebsch_gordan_selection_rules():
    assert clebsch_gordan(1, 1, 1, 1, 1, 1) == 0.0
    assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0
    with pytest.raises(ValueError):
        clebsch_gordan(1, 0.3, 1, 0, 1, 0)


@pytest.mark.parametrize("j1,j2", [(1, 1), ("3/2", 1), (2, "1/2"), ("5/2", 2)])
def test_clebsch_gordan_unitarity(j1, j2):
    f1, f2 = Fraction(j1), Fraction(j2)
    rows = []
    for m1 in np.arange(-f1, f1 + 1):
        for m2 in np.arange(-f2, f2 + 1):
            row = []
            J = abs(f1 - f2)
            while J <= f1 + f2:
                for M in np.arange(-J, J + 1):
                    row.append(clebsch_gordan(f1, m1, f2, m2, J, M))
                J += 1
            rows.append(row)
    C = np.array(rows)
    assert np.allclose(C @ C.T, np.eye(len(C)), atol=1e-13)


def test_t00_and_t10():
    for j in SPINS:
        d = spin_dim(j)
        assert np.allclose(multipole_operator(j, 0, 0), np.eye(d) / math.sqrt(d))
        jz = angular_momentum_ops(j)[2]
        T10 = multipole_operator(j, 1, 0)
        c = np.trace(T10.conj().T @ jz).real
        assert c > 0 and np.allclose(T10 * c, jz)


@pytest.mark.parametrize("j", SPINS)
def test_multipole_orthonormality(j):
    ops = [T for L in range(spin_dim(j)) for T in multipole_basis(j, L)]
    G = np.array([[np.vdot(A, B) for B in ops] for A in ops])
    assert np.allclose(G, np.eye(len(ops)), atol=1e-12)


@pytest.mark.parametrize("j", SPINS)
def test_multipole_adjoint_relation(j):
    for L in range(spin_dim(j)):
        for M in range(-L, L + 1):
            lhs = multipole_operator(j, L, M).conj().T
            assert np.allclose(lhs, (-1) ** M * multipole_operator(j, L, -M), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(spin, st.integers(0, 7), axis, angle)
def test_multipoles_transform_like_rank_L_states(j, L, n, th):
    L = L % spin_dim(j)
    r = rotation_from_axis_angle(n, th)
    U = wigner_d(j, r)
    DL = wigner_d(L, r)
    basis = multipole_basis(j, L)
    for col, T in enumerate(basis):
        lhs = U @ T @ U.conj().T
        rhs = sum(DL[row, col] * Tp for row, Tp in enumerate(basis))
        assert np.allclose(lhs, rhs, atol=1e-11)


def test_multipole_range_checks():
    with pytest.raises(ValueError):
        multipole_operator(1, 3, 0)
    with pytest.raises(ValueError):
        multipole_operator(1, 1, 2)


def test_decompose_identity_and_jz():
    parts = multipole_decompose(np.eye(3), 1)
    assert parts[0].norm > 0 and all(p.norm < 1e-14 for p in parts[1:])
    jz = angular_momentum_ops(0.5)[2]
    parts = multipole_decompose(jz, 0.5)
    assert math.isclose(parts[1].component(0).real, math.sqrt(0.5))
    assert abs(parts[1].component(1)) < 1e-15 and parts[0].norm < 1e-15


@settings(max_examples=30, deadline=None)
@given(spin, st.integers(0, 2**32 - 1))
def test_decompose_round_trip_and_hermitian_symmetry(j, seed):
    rng = np.random.default_rng(seed)
    d = spin_dim(j)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = A + A.conj().T
    parts = multipole_decompose(H, j)
    assert np.allclose(multipole_reconstruct(parts, j), H, atol=1e-12)
    for p in parts:
        for M in range(-p.L, p.L + 1):
            assert abs(np.conj(p.component(M)) - (-1) ** M * p.component(-M)) < 1e-12
    assert math.isclose(sum(p.norm**2 for p in parts), np.linalg.norm(H) ** 2, rel_tol=1e-12)


def test_decompose_shape_error():
    with pytest.raises(ValueError):
        multipole_decompose(np.eye(3), 0.5)


def test_operator_io(tmp_path):
    A = np.array([[1.5, 2 - 1j], [2 + 1j, -0.25]])
    assert np.array_equal(parse_operator(format_operator(A)), A)
    p = tmp_path / "a.txt"
    write_operator(A, p)
    assert np.array_equal(read_operator(p), A)
    assert is_hermitian(A) and not is_hermitian(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("text", ["", "dim x", "dim 2\n1,0 0,0", "dim 2\n1,0 0,0\n0,0", "dim 1\nfoo"])
def test_operator_parse_errors(text):
    with pytest.raises(ValueError):
        parse_operator(text)

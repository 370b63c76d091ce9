import numpy as np
import pytest

from qspec.dla import (DimCap, ZeroMatrix, center_basis, derived_algebra,
                       dla_report, eta, lie_closure)
from qspec.linalg import commutator, complex_gaussians, haar_unitary, rng_stream
from qspec.qsim import pauli_matrix


def inner(a, b):
    return float(np.real(np.sum(a.conj() * b)))


def random_hermitian(dim, seed):
    z = complex_gaussians(rng_stream(seed), (dim, dim))
    return (z + z.conj().T) / 2


def test_closure_dimensions():
    assert len(lie_closure([pauli_matrix("Z")])) == 1
    assert len(lie_closure([pauli_matrix("X"), pauli_matrix("Y")])) == 3
    assert len(lie_closure([pauli_matrix("ZI"), pauli_matrix("IZ")])) == 2
    assert len(lie_closure([np.eye(2), pauli_matrix("X"),
                            pauli_matrix("Y"), pauli_matrix("Z")])) == 4


def test_closure_basis_is_orthonormal_antihermitian():
    basis = lie_closure([pauli_matrix("X"), pauli_matrix("Y")])
    els = basis.elements
    for i, a in enumerate(els):
        assert np.max(np.abs(a + a.conj().T)) <= 1e-12
        for j, b in enumerate(els):
            assert inner(a, b) == pytest.approx(1.0 if i == j else 0.0, abs=1e-12)


def test_closure_invariant_under_recombination():
    x, y = pauli_matrix("X"), pauli_matrix("Y")
    d1 = len(lie_closure([x, y]))
    d2 = len(lie_closure([x + y, x - y]))
    d3 = len(lie_closure([0.3 * x, 5.0 * y, x + 0.1 * y]))
    assert d1 == d2 == d3 == 3


def test_closure_random_generators_fill_u4():
    gens = [random_hermitian(4, seed=10), random_hermitian(4, seed=11)]
    assert len(lie_closure(gens)) == 16


def test_closure_dim_cap():
    with pytest.raises(DimCap):
        lie_closure([pauli_matrix("X"), pauli_matrix("Y")], max_dim=2)


def test_center_and_derived_u2():
    u2 = lie_closure([np.eye(2), pauli_matrix("X"),
                      pauli_matrix("Y"), pauli_matrix("Z")])
    center = center_basis(u2)
    derived = derived_algebra(u2)
    assert len(center) == 1
    assert len(derived) == 3
    assert len(center) + len(derived) == len(u2)
    # the center element is a phase of the identity
    c = center[0]
    off = c - (np.trace(c) / 2.0) * np.eye(2)
    assert np.max(np.abs(off)) <= 1e-10


def test_center_elements_commute_with_algebra():
    basis = lie_closure([pauli_matrix("ZI"), pauli_matrix("IZ"),
                         np.eye(4)])
    for c in center_basis(basis):
        for el in basis.elements:
            assert np.max(np.abs(commutator(c, el))) <= 1e-8


def test_su2_has_trivial_center():
    su2 = lie_closure([pauli_matrix("X"), pauli_matrix("Y")])
    assert len(center_basis(su2)) == 0
    assert len(derived_algebra(su2)) == 3


def test_abelian_algebra_is_its_center():
    basis = lie_closure([pauli_matrix("ZI"), pauli_matrix("IZ")])
    assert len(center_basis(basis)) == 2
    assert len(derived_algebra(basis)) == 0


def test_derived_lies_inside_algebra():
    basis = lie_closure([random_hermitian(4, seed=21), random_hermitian(4, seed=22)])
    for el in derived_algebra(basis):
        proj = sum(inner(b, el) * b for b in basis.elements)
        assert np.max(np.abs(proj - el)) <= 1e-10


def test_eta_identity_and_traceless_exact():
    for n in (2, 4, 8):
        assert eta(np.eye(n)) == np.sqrt(n)
        assert eta(-3.7 * np.eye(n)) == np.sqrt(n)
    for label in ("X", "Y", "Z", "XX", "ZIZ"):
        assert eta(pauli_matrix(label)) == 0.0


def test_eta_weighted_identity_example():
    for w in (0.0, 0.25, 0.5, 1.0):
        g = w * pauli_matrix("IY") + pauli_matrix("II")
        assert eta(g) == pytest.approx(2.0 / np.sqrt(1.0 + w * w), abs=1e-13)


def test_eta_invariances_and_bounds():
    gen = rng_stream(31)
    for i in range(50):
        n = [2, 4, 8][i % 3]
        g = random_hermitian(n, seed=4000 + i)
        e = eta(g)
        assert 0.0 <= e <= np.sqrt(n)
        # a random Hermitian is essentially never a multiple of identity
        assert e < np.sqrt(n) - 1e-6
        c = float(gen.uniform(0.1, 10.0)) * (-1.0 if i % 2 else 1.0)
        assert eta(c * g) == pytest.approx(e, abs=1e-12)
        u = haar_unitary(n, seed=5000 + i)
        assert eta(u @ g @ u.conj().T) == pytest.approx(e, abs=1e-10)


def test_eta_zero_matrix():
    with pytest.raises(ZeroMatrix):
        eta(np.zeros((3, 3)))


def test_dla_report_weighted_generator():
    g = 0.5 * pauli_matrix("IY") + pauli_matrix("II")
    rep = dla_report([g])
    assert rep.dim == 1
    assert rep.center_dim == 1
    assert rep.derived_dim == 0
    assert rep.eta_per_generator[0] == pytest.approx(2.0 / np.sqrt(1.25), abs=1e-13)

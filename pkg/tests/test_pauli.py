import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qskstitch.oracle import pauli_matrix
from qskstitch.pauli import (
    PauliOp,
    PhaseError,
    commutes,
    format_pauli,
    group_sign,
    multiply,
    parse_pauli,
    product,
    symplectic_product,
    weight,
)

from conftest import paulis


@st.composite
def pauli_pairs(draw, hermitian=True):
    n = draw(st.integers(1, 5))
    return draw(paulis(n, hermitian)), draw(paulis(n, hermitian))


@given(paulis(hermitian=False))
def test_format_parse_roundtrip(p):
    if not p.is_hermitian:
        with pytest.raises(PhaseError):
            _ = p.sign
        return
    assert parse_pauli(format_pauli(p), p.n) == p
    assert parse_pauli(format_pauli(p, dense=True), p.n) == p


@given(pauli_pairs(hermitian=False))
@settings(max_examples=200)
def test_multiply_matches_matrices(pq):
    p, q = pq
    assert np.allclose(pauli_matrix(multiply(p, q)), pauli_matrix(p) @ pauli_matrix(q))


@given(pauli_pairs())
def test_symplectic_product_is_commutation(pq):
    p, q = pq
    mp, mq = pauli_matrix(p), pauli_matrix(q)
    assert commutes(p, q) == np.allclose(mp @ mq, mq @ mp)
    assert symplectic_product(p, q) == symplectic_product(q, p)


@given(paulis())
def test_hermitian_square_is_identity(p):
    sq = multiply(p, p)
    assert sq.is_identity and sq.phase == 0


@given(paulis())
def test_weight_counts_support(p):
    assert weight(p) == sum(p.letter(q) != "I" for q in range(1, p.n + 1))


def test_letters_and_bits():
    p = parse_pauli("-X1 Y3 Z4", 4)
    assert format_pauli(p, dense=True) == "-XIYZ"
    assert p.a == [1, 0, 1, 0] and p.b == [0, 0, 1, 1]
    assert p.sign == -1
    assert PauliOp.from_bits(p.a, p.b, -1) == p


def test_y_is_hermitian_letter():
    y = PauliOp.single(1, 1, "Y")
    assert np.allclose(pauli_matrix(y), [[0, -1j], [1j, 0]])
    assert multiply(PauliOp.single(1, 1, "X"), PauliOp.single(1, 1, "Z")).phase == 3


def test_multiply_hermitian_flag():
    x, z = PauliOp.single(2, 1, "X"), PauliOp.single(2, 2, "Z")
    assert multiply(x, z, hermitian=True) == parse_pauli("X1 Z2", 2)
    with pytest.raises(ValueError):
        multiply(PauliOp.single(1, 1, "X"), PauliOp.single(1, 1, "Z"), hermitian=True)


def test_product_of_list():
    ops = [parse_pauli(s, 3) for s in ("X1", "X2", "X3")]
    assert product(ops) == parse_pauli("XXX", 3)


@pytest.mark.parametrize(
    "text, err",
    [("", "empty"), ("X1 X1", "duplicate"), ("X7", "out of range"), ("XQZ", "letter"), ("XX", "length"), ("X1Z2", "malformed")],
)
def test_parse_errors(text, err):
    with pytest.raises(ValueError, match=err):
        parse_pauli(text, 3)


def test_group_sign():
    gens = [parse_pauli("XXXX", 4), parse_pauli("ZZZZ", 4)]
    assert group_sign(gens, parse_pauli("YYYY", 4)) == 1
    assert group_sign(gens, parse_pauli("-YYYY", 4)) == -1
    assert group_sign(gens, parse_pauli("XXII", 4)) is None

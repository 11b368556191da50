import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qskstitch.engine import (
    CliffordCircuit,
    Gate,
    MappingConstraint,
    check_constraints,
    compose,
    conjugate,
    fix_signs,
    format_circuit,
    invert,
    pauli_layer,
    parse_circuit,
    parse_constraints,
    same_unitary,
    symplectic_of,
)
from qskstitch.oracle import conjugate_dense
from qskstitch.pauli import PauliOp, commutes, parse_pauli

from conftest import circuits, paulis


@st.composite
def circuit_and_pauli(draw, max_gates=30):
    n = draw(st.integers(1, 5))
    return draw(circuits(n, max_gates)), draw(paulis(n))


@given(circuit_and_pauli())
@settings(max_examples=150, deadline=None)
def test_conjugate_matches_dense(cp):
    c, p = cp
    assert conjugate(c, p) == conjugate_dense(c, p)


@given(circuit_and_pauli())
@settings(max_examples=100, deadline=None)
def test_invert_undoes(cp):
    c, p = cp
    assert conjugate(invert(c), conjugate(c, p)) == p
    assert same_unitary(compose(c, invert(c)), CliffordCircuit(c.n))


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(circuits(n), paulis(n), paulis(n))))
@settings(max_examples=100, deadline=None)
def test_conjugation_preserves_commutation(cpq):
    c, p, q = cpq
    assert commutes(p, q) == commutes(conjugate(c, p), conjugate(c, q))


@given(circuits(max_gates=20))
@settings(max_examples=100, deadline=None)
def test_circuit_text_roundtrip(c):
    assert parse_circuit(format_circuit(c)) == c


@given(circuits(max_gates=20))
@settings(max_examples=50, deadline=None)
def test_symplectic_matrix_is_symplectic(c):
    assert symplectic_of(c).is_symplectic()


def test_gate_images():
    c = CliffordCircuit(2, [Gate("CX", (1, 2))])
    assert conjugate(c, parse_pauli("X1", 2)) == parse_pauli("X1 X2", 2)
    assert conjugate(c, parse_pauli("Z2", 2)) == parse_pauli("Z1 Z2", 2)
    hy = CliffordCircuit(1, [Gate("HY", (1,))])
    assert conjugate(hy, parse_pauli("Y1", 1)) == parse_pauli("Z1", 1)
    assert conjugate(hy, parse_pauli("X1", 1)) == parse_pauli("-X1", 1)
    p = CliffordCircuit(1, [Gate("P", (1,))])
    assert conjugate(p, parse_pauli("X1", 1)) == parse_pauli("Y1", 1)


def test_same_unitary_sees_signs():
    a = CliffordCircuit(1, [Gate("P", (1,))])
    b = CliffordCircuit(1, [Gate("PDG", (1,))])
    assert (symplectic_of(a).F == symplectic_of(b).F).all()
    assert not same_unitary(a, b)
    assert same_unitary(CliffordCircuit(1, [Gate("P", (1,))] * 2), CliffordCircuit(1, [Gate("Z", (1,))]))


def test_check_constraints_statuses():
    c = CliffordCircuit(2, [Gate("H", (1,))])
    stabs = [parse_pauli("Z1 Z2", 2)]
    cons = [
        MappingConstraint(parse_pauli("X1", 2), parse_pauli("Z1", 2)),
        MappingConstraint(parse_pauli("X1", 2), parse_pauli("-Z1", 2), "up_to_sign"),
        MappingConstraint(parse_pauli("X1", 2), parse_pauli("Z2", 2), "up_to_stabilizer"),
        MappingConstraint(parse_pauli("X1", 2), parse_pauli("X1", 2)),
    ]
    rep = check_constraints(c, cons, stabilizers=stabs)
    assert [ch.status for ch in rep.checks] == ["exact", "sign_flip", "up_to_stabilizer", "wrong"]
    assert [ch.satisfied for ch in rep.checks] == [True, True, True, False]
    assert rep.first_failure() is rep.checks[3]
    assert rep.counts() == {"exact": 1, "sign_flip": 1, "up_to_stabilizer": 1, "wrong": 1}


@given(circuit_and_pauli(max_gates=15), st.data())
@settings(max_examples=100, deadline=None)
def test_fix_signs_repairs_any_flip_pattern(cp, data):
    c, _ = cp
    n = c.n
    inputs = [PauliOp.single(n, q, letter) for letter in "XZ" for q in range(1, n + 1)]
    flips = data.draw(st.lists(st.booleans(), min_size=len(inputs), max_size=len(inputs)))
    cons = [MappingConstraint(p, conjugate(c, p).negate() if f else conjugate(c, p)) for p, f in zip(inputs, flips)]
    fix = fix_signs(c, cons)
    fixed = c.extend(pauli_layer(fix))
    assert check_constraints(fixed, cons).all_exact


def test_fix_signs_rejects_letter_mismatch():
    c = CliffordCircuit(1)
    with pytest.raises(ValueError, match="not a sign issue"):
        fix_signs(c, [MappingConstraint(parse_pauli("X1", 1), parse_pauli("Z1", 1))])


def test_parse_circuit_errors():
    with pytest.raises(ValueError, match="line 2"):
        parse_circuit("qubits 2\nCX 1 1\n")
    with pytest.raises(ValueError, match="missing 'qubits N'"):
        parse_circuit("H 1\n")
    with pytest.raises(ValueError, match="non-ancilla"):
        parse_circuit("qubits 2\nPREP 2 X\n")
    with pytest.raises(ValueError, match="duplicate location tag"):
        parse_circuit("qubits 2\nH 1 @a\nH 2 @a\n")


def test_parse_constraints():
    cs = parse_constraints("# comment\nX1 X2 -> -Y1 X2\n\nZ1 -> Z1 # tail\n", 2)
    assert [str(c) for c in cs] == ["X1 X2 -> -Y1 X2", "Z1 -> Z1"]
    with pytest.raises(ValueError, match="line 1"):
        parse_constraints("X1 Z1\n", 2)

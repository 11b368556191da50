"""Dense state-vector oracle for the symplectic engine.

Qubit 1 is the most significant tensor factor, so ``"XZ"`` is ``X (x) Z``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import CliffordCircuit, Gate
from .pauli import PauliOp

MAX_QUBITS = 20
MAX_CONJ_QUBITS = 8

_S2 = 1 / np.sqrt(2)
GATE_MATRICES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "HY": np.array([[1, -1j], [1j, -1]], dtype=complex) * _S2,
    "P": np.diag([1, 1j]).astype(complex),
    "PDG": np.diag([1, -1j]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}
_PAULI = {"I": np.eye(2, dtype=complex), "X": GATE_MATRICES["X"], "Y": GATE_MATRICES["Y"], "Z": GATE_MATRICES["Z"]}


@dataclass
class DenseState:
    n: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n: int) -> DenseState:
        _check_size(n, MAX_QUBITS)
        amp = np.zeros(2**n, dtype=complex)
        amp[0] = 1
        return cls(n, amp)

    @classmethod
    def basis(cls, n: int, index: int) -> DenseState:
        _check_size(n, MAX_QUBITS)
        amp = np.zeros(2**n, dtype=complex)
        amp[index] = 1
        return cls(n, amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _check_size(n: int, cap: int):
    if n > cap:
        raise ValueError(f"{n} qubits exceeds the dense cap of {cap}")


def _apply_gate(t: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Apply ``g`` to a tensor of shape (2,)*n + (batch,)."""
    if g.kind in ("PREP", "MEAS"):
        raise ValueError("dense oracle does not model PREP/MEAS")
    if g.kind in GATE_MATRICES:
        ax = g.qubits[0] - 1
        t = np.tensordot(GATE_MATRICES[g.kind], t, axes=([1], [ax]))
        return np.moveaxis(t, 0, ax)
    a, b = g.qubits[0] - 1, g.qubits[1] - 1
    t = t.copy()
    idx = [slice(None)] * (n + 1)
    if g.kind == "CZ":
        idx[a] = 1
        idx[b] = 1
        t[tuple(idx)] *= -1
    elif g.kind == "CX":
        idx[a] = 1
        sub = t[tuple(idx)]
        tb = b if b < a else b - 1
        t[tuple(idx)] = np.flip(sub, axis=tb)
    elif g.kind == "SWAP":
        t = np.swapaxes(t, a, b)
    return t


def apply_gates(amplitudes: np.ndarray, c: CliffordCircuit) -> np.ndarray:
    """Apply ``c`` to a (2**n,) vector or a (2**n, batch) block of columns."""
    n = c.n
    _check_size(n, MAX_QUBITS)
    vec = amplitudes.ndim == 1
    t = amplitudes.reshape((2,) * n + (-1,))
    for g in c.gates:
        t = _apply_gate(t, g, n)
    out = np.ascontiguousarray(t).reshape(2**n, -1)
    return out[:, 0] if vec else out


def apply_circuit(state: DenseState, c: CliffordCircuit) -> DenseState:
    if state.n != c.n:
        raise ValueError("state and circuit differ in qubit count")
    amp = apply_gates(state.amplitudes, c)
    if abs(np.linalg.norm(amp) - 1) > 1e-10:
        raise AssertionError("norm drifted during dense simulation")
    return DenseState(c.n, amp)


def unitary(c: CliffordCircuit) -> np.ndarray:
    _check_size(c.n, MAX_CONJ_QUBITS + 4)
    return apply_gates(np.eye(2**c.n, dtype=complex), c)


def pauli_matrix(p: PauliOp) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for q in range(1, p.n + 1):
        m = np.kron(m, _PAULI[p.letter(q)])
    return m * (1j**p.phase)


def apply_pauli(amplitudes: np.ndarray, p: PauliOp) -> np.ndarray:
    """Apply ``p`` (with its phase) to a vector or column block."""
    n = p.n
    vec = amplitudes.ndim == 1
    t = amplitudes.reshape((2,) * n + (-1,))
    for q in range(1, n + 1):
        letter = p.letter(q)
        if letter != "I":
            t = np.moveaxis(np.tensordot(_PAULI[letter], t, axes=([1], [q - 1])), 0, q - 1)
    out = np.ascontiguousarray(t).reshape(2**n, -1) * (1j**p.phase)
    return out[:, 0] if vec else out


def match_pauli(m: np.ndarray, n: int, tol: float = 1e-8) -> PauliOp:
    """Identify a dense matrix as a signed Hermitian Pauli or raise."""
    col0 = m[:, 0]
    a_int = int(np.argmax(np.abs(col0)))
    if abs(abs(col0[a_int]) - 1) > tol:
        raise ValueError("matrix is not a Pauli (column 0 not a permutation entry)")
    # qubit 1 is the most significant bit of a basis index
    def bit(q):
        return 1 << (n - q)
    x = z = 0
    for q in range(1, n + 1):
        if a_int & bit(q):
            x |= 1 << (q - 1)
    ref = m[a_int, 0]
    for q in range(1, n + 1):
        j = bit(q)
        ratio = m[a_int ^ j, j] / ref
        if abs(ratio + 1) < tol:
            z |= 1 << (q - 1)
        elif abs(ratio - 1) > tol:
            raise ValueError("matrix is not a Pauli (inconsistent phases)")
    base = PauliOp(n, x, z)
    # ref = phase * i^{x.z}: E(x,z)|0> = i^{x.z}|x>
    k = (x & z).bit_count()
    coeff = ref / (1j**k)
    for phase in range(4):
        if abs(coeff - 1j**phase) < tol:
            cand = PauliOp(n, x, z, phase)
            if not np.allclose(pauli_matrix(cand), m, atol=tol):
                raise ValueError("matrix is not a Pauli")
            return cand
    raise ValueError("matrix is not a Pauli (bad global phase)")


def conjugate_dense(c: CliffordCircuit, p: PauliOp) -> PauliOp:
    """``U p U^dagger`` by dense matrices, matched back to a signed Pauli."""
    _check_size(c.n, MAX_CONJ_QUBITS)
    if p.n != c.n:
        raise ValueError("dimension mismatch")
    u = unitary(c)
    return match_pauli(u @ pauli_matrix(p) @ u.conj().T, c.n)


def global_phase_match(a: np.ndarray, b: np.ndarray, tol: float = 1e-9):
    """Return (matches, phase) comparing ``a`` to ``phase * b``."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < tol:
        return bool(np.allclose(a, 0, atol=tol)), 1.0
    phase = a[idx] / b[idx]
    if abs(abs(phase) - 1) > 1e-6:
        return False, phase
    return bool(np.allclose(a, phase * b, atol=tol)), phase


@dataclass
class EquivalenceResult:
    equivalent: bool
    leakage: float
    deviation: float
    phase: complex

    def __bool__(self):
        return self.equivalent


def codespace_basis(code) -> np.ndarray:
    """Columns are the encoded logical basis states |x> in binary order.

    Logical qubit 1 is the most significant bit of the column index.
    """
    n, k = code.n, code.k
    _check_size(n, MAX_QUBITS)
    projectors = list(code.stabilizers) + list(code.logical_z)

    def project(v):
        for s in projectors:
            v = (v + apply_pauli(v, s)) / 2
        return v

    seed = np.zeros(2**n, dtype=complex)
    seed[0] = 1
    zero = project(seed)
    if np.linalg.norm(zero) < 1e-6:
        rng = np.random.default_rng(0)
        seed = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        zero = project(seed)
    zero /= np.linalg.norm(zero)
    cols = np.empty((2**n, 2**k), dtype=complex)
    for idx in range(2**k):
        v = zero
        for i in range(k):
            if idx >> (k - 1 - i) & 1:
                v = apply_pauli(v, code.logical_x[i])
        cols[:, idx] = v
    return cols


def codespace_equiv(code, logical_c: CliffordCircuit, physical_c: CliffordCircuit, tol: float = 1e-9):
    """Compare the codespace action of ``physical_c`` with ``logical_c``."""
    if logical_c.n != code.k or physical_c.n != code.n:
        raise ValueError("circuit sizes do not match the code")
    basis = codespace_basis(code)
    image = apply_gates(basis, physical_c)
    action = basis.conj().T @ image
    leakage = float(np.linalg.norm(image - basis @ action))
    target = unitary(logical_c) if logical_c.gates else np.eye(2**code.k, dtype=complex)
    ok, phase = global_phase_match(action, target, tol=1e-8)
    deviation = float(np.linalg.norm(action - phase * target))
    return EquivalenceResult(ok and leakage < tol, leakage, deviation, complex(phase))

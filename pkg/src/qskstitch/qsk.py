"""Logical Clifford Trotter (QSK) circuits and their Pauli mapping constraints."""

from __future__ import annotations

from dataclasses import dataclass

from .codes import StabilizerCode
from .engine import CliffordCircuit, Gate, MappingConstraint, conjugate
from .pauli import PauliOp, format_pauli, multiply, parse_pauli, symplectic_product

_BASIS_CHANGE = {"X": "H", "Y": "HY"}


@dataclass(frozen=True)
class QskSpec:
    """The exponentiated Pauli ``E_1 ... E_k`` of ``exp(-i pi/4 E_1...E_k)``.

    ``I`` letters mark idle logical qubits that sit outside the CNOT ladder.
    ``padding`` lists logical qubits added only to make k even.
    """

    letters: str
    padding: tuple[int, ...] = ()

    def __post_init__(self):
        letters = self.letters.strip().upper()
        object.__setattr__(self, "letters", letters)
        if any(ch not in "XYZI" for ch in letters):
            raise ValueError(f"spec letters must be in X, Y, Z, I: {self.letters!r}")
        if len(self.active) < 2:
            raise ValueError("a QSK spec needs at least two non-idle letters")

    @property
    def k(self) -> int:
        return len(self.letters)

    def _indices(self, letter: str) -> tuple[int, ...]:
        return tuple(i for i, ch in enumerate(self.letters, 1) if ch == letter)

    @property
    def I_h(self) -> tuple[int, ...]:
        return self._indices("X")

    @property
    def I_hy(self) -> tuple[int, ...]:
        return self._indices("Y")

    @property
    def I_e(self) -> tuple[int, ...]:
        return self._indices("Z")

    @property
    def idle(self) -> tuple[int, ...]:
        return self._indices("I")

    @property
    def active(self) -> tuple[int, ...]:
        return tuple(i for i, ch in enumerate(self.letters, 1) if ch != "I")

    @property
    def h(self) -> int:
        return len(self.I_h)

    @property
    def hy(self) -> int:
        return len(self.I_hy)

    @property
    def h_only(self) -> bool:
        return not self.I_hy and not self.idle

    def substitute_y(self) -> QskSpec:
        """Replace every Y letter by X."""
        return QskSpec(self.letters.replace("Y", "X"), self.padding)

    def complement(self) -> QskSpec:
        """Swap X and Z letters."""
        table = str.maketrans("XZ", "ZX")
        return QskSpec(self.letters.translate(table), self.padding)

    def __str__(self):
        return self.letters


def build_logical_qsk(spec: QskSpec) -> CliffordCircuit:
    """Basis-change layer, CNOT ladder, P on the last qubit, then the mirror."""
    active = spec.active
    target = active[-1]
    layer = [Gate(_BASIS_CHANGE[spec.letters[i - 1]], (i,)) for i in active if spec.letters[i - 1] in _BASIS_CHANGE]
    ladder = [Gate("CX", (i, target)) for i in active[:-1]]
    gates = layer + ladder + [Gate("P", (target,))] + ladder[::-1] + layer
    return CliffordCircuit(spec.k, gates)


def _generators(k: int):
    for letter in "XZ":
        for i in range(1, k + 1):
            yield f"{letter}{i}", PauliOp.single(k, i, letter)


def logical_mappings(spec: QskSpec) -> list[MappingConstraint]:
    """Images of X_1..X_k then Z_1..Z_k under the logical QSK circuit."""
    c = build_logical_qsk(spec)
    return [MappingConstraint(p, conjugate(c, p), "exact", label) for label, p in _generators(spec.k)]


def closed_form_mappings(spec: QskSpec) -> list[MappingConstraint]:
    """The same mappings written down directly (H-only specs).

    For i outside I_h, X_i -> Y_i prod_{I_h} X_j prod_{rest} Z_j; for i in
    I_h, Z_i -> -Y_i prod_{I_h minus i} X_j prod_{outside I_h} Z_j.
    All other generators are fixed.
    """
    if not spec.h_only:
        raise ValueError("closed form covers specs with X and Z letters only")
    k = spec.k
    hset = 0
    for i in spec.I_h:
        hset |= 1 << (i - 1)
    full = (1 << k) - 1
    out = []
    for label, p in _generators(k):
        i = int(label[1:])
        bit = 1 << (i - 1)
        in_h = bool(hset & bit)
        if label[0] == "X" and not in_h:
            img = PauliOp(k, hset | bit, full & ~hset)
        elif label[0] == "Z" and in_h:
            img = PauliOp(k, hset, (full & ~hset) | bit, 2)
        else:
            img = p
        out.append(MappingConstraint(p, img, "exact", label))
    return out


def physical_constraints(spec: QskSpec, code: StabilizerCode, mode: str = "exact") -> list[MappingConstraint]:
    """Logical mappings rewritten in terms of the code's logical operators."""
    if code.k != spec.k:
        raise ValueError(f"spec has k={spec.k} but the code encodes {code.k} qubits")
    out = []
    for con in logical_mappings(spec):
        inp, outp = code.encode(con.input), code.encode(con.output)
        if not (inp.is_hermitian and outp.is_hermitian):
            raise AssertionError("encoded constraint is not Hermitian")
        out.append(MappingConstraint(inp, outp, mode, con.label))
    return out


def embed_odd_k(spec: QskSpec) -> QskSpec:
    """Pad an odd-k spec with a leading Z letter on a |0>-initialized qubit."""
    if spec.k % 2 == 0:
        raise ValueError(f"spec {spec} already has even k={spec.k}")
    return QskSpec("Z" + spec.letters, tuple(p + 1 for p in spec.padding) + (1,))


def subcode(code: StabilizerCode, padding) -> StabilizerCode:
    """Freeze padded logical qubits to |0> by adding their Z-bar to the stabilizers."""
    pad = set(padding)
    keep = [i for i in range(code.k) if i + 1 not in pad]
    stabs = list(code.stabilizers) + [code.logical_z[i - 1] for i in sorted(pad)]
    return StabilizerCode(
        code.n,
        len(keep),
        stabs,
        [code.logical_x[i] for i in keep],
        [code.logical_z[i] for i in keep],
        name=f"{code.name} with logical {sorted(pad)} fixed",
    ).validate()


def unpadded(spec: QskSpec) -> QskSpec:
    """Drop padded letters again."""
    pad = set(spec.padding)
    return QskSpec("".join(ch for i, ch in enumerate(spec.letters, 1) if i not in pad))


def load_constraint_fixture(name: str, n: int, mode: str = "exact") -> list[MappingConstraint]:
    """Load a shipped constraint list such as ``"zxxz_642"``."""
    from importlib import resources

    from .engine import parse_constraints

    text = resources.files("qskstitch.data").joinpath(f"constraints/{name}.txt").read_text()
    return parse_constraints(text, n, mode)


def compare_constraints(derived, listed) -> list[tuple[MappingConstraint, str]]:
    """Match each listed constraint to the derived one with the same input.

    Verdicts: ``exact``, ``sign_differs``, ``letters_differ`` or ``missing``.
    """
    by_input = {(c.input.x, c.input.z): c for c in derived}
    out = []
    for con in listed:
        ref = by_input.get((con.input.x, con.input.z))
        if ref is None:
            verdict = "missing"
        elif ref.output == con.output:
            verdict = "exact"
        elif ref.output.same_up_to_sign(con.output):
            verdict = "sign_differs"
        else:
            verdict = "letters_differ"
        out.append((con, verdict))
    return out


def spec_pauli(spec: QskSpec) -> PauliOp:
    """The logical Pauli E_1 ... E_k as an operator on k qubits."""
    return parse_pauli(" ".join(f"{ch}{i}" for i, ch in enumerate(spec.letters, 1) if ch != "I"), spec.k)


def rotation_image(e: PauliOp, p: PauliOp) -> PauliOp:
    """Image of ``p`` under exp(-i pi/4 e), from (I - i e) p (I + i e) / 2.

    Commuting operators are fixed; anticommuting ones map to i p e.
    """
    if symplectic_product(e, p) == 0:
        return p
    q = multiply(p, e)
    return PauliOp(q.n, q.x, q.z, (q.phase + 1) % 4)


def rotation_circuit(e: PauliOp) -> CliffordCircuit:
    """exp(-i pi/4 e) up to global phase: basis change, CX ladder, P, and back."""
    if not e.is_hermitian or e.is_identity:
        raise ValueError("rotation needs a Hermitian non-identity Pauli")
    support = [q for q in range(1, e.n + 1) if e.letter(q) != "I"]
    basis = [Gate(_BASIS_CHANGE[e.letter(q)], (q,)) for q in support if e.letter(q) in _BASIS_CHANGE]
    last = support[-1]
    ladder = [Gate("CX", (q, last)) for q in support[:-1]]
    phase = Gate("P" if e.sign > 0 else "PDG", (last,))
    return CliffordCircuit(e.n, basis + ladder + [phase] + ladder[::-1] + basis)


def encoded_rotation_constraints(spec: QskSpec, code: StabilizerCode) -> list[MappingConstraint]:
    """Physical constraints computed by the rotation identity instead of a circuit.

    Uses the physical representative of E built from the code's logical
    operators; images agree with ``physical_constraints`` exactly.
    """
    e = code.encode(spec_pauli(spec))
    out = []
    for label, p in _generators(spec.k):
        inp = code.encode(p)
        out.append(MappingConstraint(inp, rotation_image(e, inp), "exact", label))
    return out


def input_frame(derived, targets, k: int) -> PauliOp:
    """Logical Pauli Q such that ``targets`` are the images under QSK after Q.

    Running Q first flips the sign of every generator it anticommutes with,
    so a table that differs from the derived one only in signs is the exact
    table of Q followed by the QSK circuit. Raises ValueError if some target
    row differs in letters or has no derived counterpart.
    """
    by_input = {(c.input.x, c.input.z): c for c in derived}
    x = z = 0
    for con in targets:
        ref = by_input.get((con.input.x, con.input.z))
        if ref is None or not ref.label:
            raise ValueError(f"target {con} has no derived counterpart")
        if not ref.output.same_up_to_sign(con.output):
            raise ValueError(f"target {con} differs from the derived image {format_pauli(ref.output)} beyond a sign")
        if ref.output != con.output:
            letter, i = ref.label[0], int(ref.label[1:])
            if letter == "X":
                z |= 1 << (i - 1)
            else:
                x |= 1 << (i - 1)
    return PauliOp(k, x, z)

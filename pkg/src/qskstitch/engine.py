"""Clifford circuits: gates, exact signed Pauli conjugation, symplectic form.

Conjugation runs forward in the Heisenberg sense: ``conjugate(c, p)`` is
``U p U^dagger`` where ``U`` applies the gates of ``c`` in order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import gf2
from .pauli import PauliOp, format_pauli, group_sign, parse_pauli

SINGLE_QUBIT = ("H", "HY", "P", "PDG", "X", "Y", "Z")
TWO_QUBIT = ("CX", "CZ", "SWAP")
NONUNITARY = ("PREP", "MEAS")
GATE_KINDS = SINGLE_QUBIT + TWO_QUBIT + NONUNITARY
_INVERSE = {"P": "PDG", "PDG": "P"}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    basis: str | None = None
    tag: str | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(qs) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {qs}")
        if arity == 2 and qs[0] == qs[1]:
            raise ValueError(f"{self.kind} on repeated qubit {qs[0]}")
        if self.kind in NONUNITARY:
            if self.basis not in ("Z", "X"):
                raise ValueError(f"{self.kind} needs basis Z or X")
        elif self.basis is not None:
            raise ValueError(f"{self.kind} takes no basis")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT

    def label(self) -> str:
        """Gate identity without the tag, e.g. ``"CX 2 3"``."""
        s = " ".join([self.kind, *map(str, self.qubits)])
        return f"{s} {self.basis}" if self.basis else s

    def __str__(self) -> str:
        return self.label() + (f" @{self.tag}" if self.tag else "")


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    gates: tuple[Gate, ...] = ()
    ancillas: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancillas", tuple(sorted(set(self.ancillas))))
        tags = set()
        for g in self.gates:
            for q in g.qubits:
                if not 1 <= q <= self.n:
                    raise ValueError(f"gate {g} touches qubit {q} outside [1, {self.n}]")
            if g.kind in NONUNITARY and g.qubits[0] not in self.ancillas:
                raise ValueError(f"{g} acts on a non-ancilla qubit")
            if g.tag is not None:
                if g.tag in tags:
                    raise ValueError(f"duplicate location tag {g.tag!r}")
                tags.add(g.tag)
        for q in self.ancillas:
            if not 1 <= q <= self.n:
                raise ValueError(f"ancilla {q} outside [1, {self.n}]")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def data_qubits(self) -> tuple[int, ...]:
        anc = set(self.ancillas)
        return tuple(q for q in range(1, self.n + 1) if q not in anc)

    def append(self, kind: str, *qubits: int, basis: str | None = None, tag: str | None = None):
        return append_gate(self, Gate(kind, qubits, basis, tag))

    def extend(self, gates) -> CliffordCircuit:
        return CliffordCircuit(self.n, self.gates + tuple(gates), self.ancillas)

    def two_qubit_gates(self) -> list[tuple[int, Gate]]:
        return [(i, g) for i, g in enumerate(self.gates) if g.is_two_qubit]

    def untagged(self) -> CliffordCircuit:
        return CliffordCircuit(self.n, [replace(g, tag=None) for g in self.gates], self.ancillas)


def append_gate(c: CliffordCircuit, gate: Gate) -> CliffordCircuit:
    return CliffordCircuit(c.n, c.gates + (gate,), c.ancillas)


def compose(first: CliffordCircuit, second: CliffordCircuit) -> CliffordCircuit:
    """``first`` followed by ``second``."""
    if first.n != second.n:
        raise ValueError(f"dimension mismatch: {first.n} vs {second.n}")
    return CliffordCircuit(first.n, first.gates + second.gates, first.ancillas + second.ancillas)


def invert(c: CliffordCircuit) -> CliffordCircuit:
    gates = []
    for g in reversed(c.gates):
        if g.kind in NONUNITARY:
            raise ValueError("cannot invert a circuit with PREP/MEAS")
        gates.append(Gate(_INVERSE.get(g.kind, g.kind), g.qubits))
    return CliffordCircuit(c.n, gates, c.ancillas)


# Conjugation tables. Each rule acts on packed (x, z, phase) with phase in
# quarter turns; a sign flip adds 2.

def _conj_gate(kind: str, qs: tuple[int, ...], x: int, z: int, ph: int):
    if kind in TWO_QUBIT:
        a, b = qs[0] - 1, qs[1] - 1
        xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
        if kind == "CX":
            # X_a -> X_a X_b, Z_b -> Z_a Z_b, Y_a Z_b and X_a Y_b pick up a sign
            if xa and zb and (xb == za):
                ph += 2
            x ^= xa << b
            z ^= zb << a
        elif kind == "CZ":
            # X_a -> X_a Z_b, X_b -> Z_a X_b
            if xa and xb and (za != zb):
                ph += 2
            z ^= (xb << a) | (xa << b)
        else:  # SWAP
            if xa != xb:
                x ^= (1 << a) | (1 << b)
            if za != zb:
                z ^= (1 << a) | (1 << b)
        return x, z, ph
    j = qs[0] - 1
    m = 1 << j
    xj, zj = (x >> j) & 1, (z >> j) & 1
    if kind == "H":  # X <-> Z, Y -> -Y
        if xj and zj:
            ph += 2
        if xj != zj:
            x ^= m
            z ^= m
    elif kind == "P":  # X -> Y, Y -> -X
        if xj and zj:
            ph += 2
        z ^= xj << j
    elif kind == "PDG":  # X -> -Y, Y -> X
        if xj and not zj:
            ph += 2
        z ^= xj << j
    elif kind == "HY":  # X -> -X, Z -> Y, Y -> Z
        if xj and not zj:
            ph += 2
        x ^= zj << j
    elif kind == "X":
        ph += 2 * zj
    elif kind == "Z":
        ph += 2 * xj
    elif kind == "Y":
        ph += 2 * (xj ^ zj)
    else:
        raise ValueError(f"{kind} has no conjugation rule")
    return x, z, ph


def conjugate_gates(gates, p: PauliOp) -> PauliOp:
    x, z, ph = p.x, p.z, p.phase
    for g in gates:
        if g.kind == "MEAS":
            raise ValueError("cannot conjugate through MEAS")
        if g.kind == "PREP":
            raise ValueError("cannot conjugate through PREP")
        x, z, ph = _conj_gate(g.kind, g.qubits, x, z, ph)
    return PauliOp(p.n, x, z, ph)


def conjugate(c: CliffordCircuit, p: PauliOp) -> PauliOp:
    """Return ``U p U^dagger`` exactly, sign included."""
    if p.n != c.n:
        raise ValueError(f"dimension mismatch: Pauli on {p.n} qubits, circuit on {c.n}")
    return conjugate_gates(c.gates, p)


@dataclass(frozen=True)
class SymplecticMatrix:
    n: int
    F: np.ndarray
    signs: np.ndarray

    def is_symplectic(self) -> bool:
        n = self.n
        omega = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        omega[:n, n:] = np.eye(n, dtype=np.uint8)
        omega[n:, :n] = np.eye(n, dtype=np.uint8)
        F = self.F.astype(np.int64)
        return bool(np.array_equal((F @ omega @ F.T) % 2, omega))


def symplectic_of(c: CliffordCircuit) -> SymplecticMatrix:
    """Rows ``i`` and ``n + i`` are the images of ``X_i`` and ``Z_i`` in (a|b) form."""
    n = c.n
    F = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    signs = np.ones(2 * n, dtype=np.int8)
    for row in range(2 * n):
        q = row % n + 1
        img = conjugate(c, PauliOp.single(n, q, "X" if row < n else "Z"))
        F[row, :n] = img.a
        F[row, n:] = img.b
        signs[row] = img.sign
    return SymplecticMatrix(n, F, signs)


def same_unitary(c1: CliffordCircuit, c2: CliffordCircuit) -> bool:
    """True when both circuits implement the same Clifford up to global phase."""
    s1, s2 = symplectic_of(c1), symplectic_of(c2)
    return bool(np.array_equal(s1.F, s2.F) and np.array_equal(s1.signs, s2.signs))


# Mapping constraints

MODES = ("exact", "up_to_sign", "up_to_stabilizer")


@dataclass(frozen=True)
class MappingConstraint:
    input: PauliOp
    output: PauliOp
    mode: str = "exact"
    label: str | None = None

    def __post_init__(self):
        if self.input.n != self.output.n:
            raise ValueError("constraint input and output differ in dimension")
        if self.mode not in MODES:
            raise ValueError(f"unknown constraint mode {self.mode!r}")

    @property
    def n(self) -> int:
        return self.input.n

    def with_mode(self, mode: str) -> MappingConstraint:
        return replace(self, mode=mode)

    def __str__(self) -> str:
        return f"{format_pauli(self.input)} -> {format_pauli(self.output)}"


STATUSES = ("exact", "sign_flip", "up_to_stabilizer", "wrong")


@dataclass(frozen=True)
class ConstraintCheck:
    constraint: MappingConstraint
    image: PauliOp
    status: str

    @property
    def satisfied(self) -> bool:
        mode = self.constraint.mode
        if self.status == "exact":
            return True
        if self.status == "sign_flip":
            return mode in ("up_to_sign", "up_to_stabilizer")
        if self.status == "up_to_stabilizer":
            return mode == "up_to_stabilizer"
        return False


@dataclass(frozen=True)
class ConstraintReport:
    checks: tuple[ConstraintCheck, ...]

    @property
    def all_exact(self) -> bool:
        return all(ch.status == "exact" for ch in self.checks)

    @property
    def ok(self) -> bool:
        return all(ch.satisfied for ch in self.checks)

    def counts(self) -> dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for ch in self.checks:
            out[ch.status] += 1
        return out

    def first_failure(self) -> ConstraintCheck | None:
        return next((ch for ch in self.checks if not ch.satisfied), None)

    def to_dict(self) -> list[dict]:
        return [
            {
                "input": format_pauli(ch.constraint.input),
                "target": format_pauli(ch.constraint.output),
                "image": format_pauli(ch.image),
                "mode": ch.constraint.mode,
                "status": ch.status,
            }
            for ch in self.checks
        ]


def classify(image: PauliOp, target: PauliOp, stabilizers=None) -> str:
    if image == target:
        return "exact"
    if image.same_up_to_sign(target):
        return "sign_flip"
    if stabilizers is not None:
        diff = PauliOp(image.n, image.x ^ target.x, image.z ^ target.z)
        if group_sign(stabilizers, diff) is not None:
            return "up_to_stabilizer"
    return "wrong"


def check_constraints(c: CliffordCircuit, cs, stabilizers=None) -> ConstraintReport:
    """Conjugate each constraint input through ``c`` and classify the image.

    ``stabilizers`` enables the up-to-stabilizer verdict for constraints in
    that mode.
    """
    checks = []
    for con in cs:
        if con.n != c.n:
            raise ValueError(f"constraint on {con.n} qubits, circuit on {c.n}")
        img = conjugate(c, con.input)
        stabs = stabilizers if con.mode == "up_to_stabilizer" else None
        checks.append(ConstraintCheck(con, img, classify(img, con.output, stabs)))
    return ConstraintReport(tuple(checks))


def fix_signs(c: CliffordCircuit, cs) -> PauliOp:
    """Pauli ``F`` whose layer, appended to ``c``, makes every constraint exact."""
    n = c.n
    equations = []
    for ch in check_constraints(c, cs).checks:
        if ch.status not in ("exact", "sign_flip"):
            raise ValueError(f"constraint {ch.constraint} is not a sign issue (image {ch.image})")
        t = ch.image
        # <F, t> = F.x . t.z + F.z . t.x ; unknowns packed as F.x | F.z << n
        equations.append((t.z | (t.x << n), int(ch.status == "sign_flip")))
    sol = gf2.solve(equations)
    if sol is None:
        raise ValueError("sign flips cannot be fixed by a Pauli layer")
    mask = (1 << n) - 1
    return PauliOp(n, sol & mask, sol >> n)


def pauli_layer(p: PauliOp) -> list[Gate]:
    """Single-qubit gates applying Pauli ``p`` (sign ignored)."""
    return [Gate(p.letter(q), (q,)) for q in range(1, p.n + 1) if p.letter(q) != "I"]


# Text format

def format_circuit(c: CliffordCircuit) -> str:
    lines = [f"qubits {c.n}"]
    if c.ancillas:
        lines.append("ancillas " + " ".join(map(str, c.ancillas)))
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> CliffordCircuit:
    n = None
    ancillas: tuple[int, ...] = ()
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "qubits":
                if n is not None or len(toks) != 2:
                    raise ValueError("bad or repeated 'qubits' header")
                n = int(toks[1])
                continue
            if n is None:
                raise ValueError("missing 'qubits N' header")
            if toks[0] == "ancillas":
                ancillas = tuple(int(t) for t in toks[1:])
                continue
            tag = None
            if toks[-1].startswith("@"):
                tag = toks.pop()[1:]
            kind = toks[0].upper()
            basis = None
            args = toks[1:]
            if kind in NONUNITARY:
                if len(args) != 2:
                    raise ValueError(f"{kind} expects a qubit and a basis")
                basis = args.pop().upper()
            gates.append(Gate(kind, tuple(int(a) for a in args), basis, tag))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ValueError("missing 'qubits N' header")
    try:
        return CliffordCircuit(n, gates, ancillas)
    except ValueError as exc:
        raise ValueError(f"invalid circuit: {exc}") from None


def parse_constraints(text: str, n: int, mode: str = "exact") -> list[MappingConstraint]:
    """Lines of ``<input> -> <output>``; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ValueError(f"line {lineno}: expected '<input> -> <output>'")
        lhs, rhs = line.split("->", 1)
        try:
            out.append(MappingConstraint(parse_pauli(lhs, n), parse_pauli(rhs, n), mode))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def format_constraints(cs) -> str:
    return "".join(f"{con}\n" for con in cs)

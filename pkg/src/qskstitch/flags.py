"""Flag gadgets and the single-fault detectability audit.

A flag is an ancilla prepared in |+>, coupled to the data by a controlled
Pauli ``O`` before a group of two-qubit gates ``W`` and by ``O' = W O W^dag``
after it, then measured in the X basis. Without faults the couplings cancel.
A data error inside the group flips the flag when it anticommutes with ``O``
carried forward to where the error occurred.
"""

from __future__ import annotations

import csv
import io
from importlib import resources
from dataclasses import dataclass, field
from itertools import product

from .codes import StabilizerCode, in_stabilizer_group, logical_coset
from .engine import CliffordCircuit, Gate, _conj_gate, conjugate, format_circuit, same_unitary
from .pauli import PauliOp, format_pauli, parse_pauli, symplectic_product

# column order of the fault table
TWO_QUBIT_ERRORS = tuple(a + b for a, b in product("IXYZ", repeat=2) if a + b != "II")
SINGLE_QUBIT_ERRORS = ("X", "Y", "Z")
STYLES = ("per-gate", "merged")


@dataclass(frozen=True)
class FaultSite:
    """Pauli ``error`` right after gate ``gate_index``; letters follow the gate's qubit order."""

    gate_index: int
    gate: Gate
    error: str

    def __post_init__(self):
        if len(self.error) != len(self.gate.qubits) or set(self.error) - set("IXYZ") or set(self.error) == {"I"}:
            raise ValueError(f"bad error {self.error!r} for {self.gate}")

    @property
    def gate_id(self) -> str:
        return self.gate.tag or f"{self.gate.label()}#{self.gate_index}"

    def pauli(self, n: int) -> PauliOp:
        x = z = 0
        for q, letter in zip(self.gate.qubits, self.error):
            bit = 1 << (q - 1)
            if letter in "XY":
                x |= bit
            if letter in "ZY":
                z |= bit
        return PauliOp(n, x, z)


def propagate_fault(c: CliffordCircuit, site: FaultSite) -> tuple[PauliOp, tuple[int, ...]]:
    """Carry the fault to the end of ``c``.

    Returns the output error on all qubits (ancilla frames cleared by their
    last PREP/MEAS) and the ancillas whose measurement outcome flips.
    """
    if not 0 <= site.gate_index < len(c.gates) or c.gates[site.gate_index] != site.gate:
        raise ValueError(f"fault site {site.gate_id} is not in the circuit")
    p = site.pauli(c.n)
    x, z, ph = p.x, p.z, p.phase
    flips = []
    for g in c.gates[site.gate_index + 1 :]:
        if g.kind in ("PREP", "MEAS"):
            bit = 1 << (g.qubits[0] - 1)
            if g.kind == "MEAS":
                hit = z & bit if g.basis == "X" else x & bit
                if hit:
                    flips.append(g.qubits[0])
            x &= ~bit
            z &= ~bit
            continue
        x, z, ph = _conj_gate(g.kind, g.qubits, x, z, ph)
    return PauliOp(c.n, x, z, ph), tuple(flips)


def syndrome_detectable(code: StabilizerCode, e: PauliOp) -> bool:
    if e.n != code.n:
        raise ValueError(f"error on {e.n} qubits, code on {code.n}")
    return any(symplectic_product(e, s) for s in code.stabilizers)


@dataclass(frozen=True)
class FaultRow:
    site: FaultSite
    output: PauliOp
    flips: tuple[int, ...]
    syndrome: bool
    kind: str  # detectable, or for silent rows: identity, stabilizer or logical

    @property
    def flag(self) -> bool:
        return bool(self.flips)

    @property
    def detectable(self) -> bool:
        return self.syndrome or self.flag

    @property
    def verdict(self) -> str:
        """detectable, harmless (no net error beyond a stabilizer) or undetectable."""
        if self.detectable:
            return "detectable"
        return "harmless" if self.kind in ("identity", "stabilizer") else "undetectable"

    def to_dict(self) -> dict:
        return {
            "gate": self.site.gate.label(),
            "gate_id": self.site.gate_id,
            "error": self.site.error,
            "output": format_pauli(self.output),
            "syndrome": self.syndrome,
            "flag": self.flag,
            "detectable": self.detectable,
            "verdict": self.verdict,
        }


@dataclass
class FaultAuditReport:
    rows: list[FaultRow]
    circuit: CliffordCircuit

    @property
    def undetectable(self) -> list[FaultRow]:
        return [r for r in self.rows if r.verdict == "undetectable"]

    @property
    def undetectable_count(self) -> int:
        return len(self.undetectable)

    def undetectable_set(self) -> set[tuple[str, str]]:
        return {(r.site.gate.label(), r.site.error) for r in self.undetectable}

    def summary(self) -> str:
        gates = len({r.site.gate_index for r in self.rows})
        return f"{len(self.rows)} single faults on {gates} gates, {self.undetectable_count} undetectable"

    def to_dict(self) -> dict:
        return {
            "circuit": format_circuit(self.circuit),
            "faults": [r.to_dict() for r in self.rows],
            "undetectable": self.undetectable_count,
        }


def fault_sites(c: CliffordCircuit, include_single_qubit: bool = False) -> list[FaultSite]:
    sites = []
    for i, g in enumerate(c.gates):
        if g.is_two_qubit:
            sites += [FaultSite(i, g, e) for e in TWO_QUBIT_ERRORS]
        elif include_single_qubit and g.kind not in ("PREP", "MEAS"):
            sites += [FaultSite(i, g, e) for e in SINGLE_QUBIT_ERRORS]
    return sites


def _classify_output(code: StabilizerCode, data: PauliOp) -> str:
    if data.is_identity:
        return "identity"
    if in_stabilizer_group(code, data.unsigned()) is not None:
        return "stabilizer"
    if logical_coset(code, data.unsigned()) is not None:
        return "logical"
    return "detectable"


def audit_single_faults(code: StabilizerCode, c: CliffordCircuit, include_single_qubit: bool = False) -> FaultAuditReport:
    """Every single fault on every two-qubit gate, propagated and classified.

    Data qubits are 1..code.n; any further qubits must be ancillas.
    """
    if c.n < code.n or any(q <= code.n for q in c.ancillas) or c.n - code.n != len(c.ancillas):
        raise ValueError("circuit qubits beyond the code must all be ancillas")
    mask = (1 << code.n) - 1
    rows = []
    for site in fault_sites(c, include_single_qubit):
        out, flips = propagate_fault(c, site)
        if (out.x | out.z) >> code.n:
            raise AssertionError(f"fault {site.gate_id}/{site.error} left a residual error on an ancilla")
        data = PauliOp(code.n, out.x & mask, out.z & mask, out.phase)
        syn = syndrome_detectable(code, data)
        kind = "detectable" if syn else _classify_output(code, data)
        rows.append(FaultRow(site, data, flips, syn, kind))
    return FaultAuditReport(rows, c)


def fault_table_csv(report: FaultAuditReport) -> str:
    """One row per two-qubit gate, one column per error; ``*`` marks undetectable cells."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gate", "gate_id", *TWO_QUBIT_ERRORS])
    cells: dict[int, dict[str, str]] = {}
    ids = {}
    for r in report.rows:
        if len(r.site.error) != 2:
            continue
        text = format_pauli(r.output) + (" *" if r.verdict == "undetectable" else "")
        cells.setdefault(r.site.gate_index, {})[r.site.error] = text
        ids[r.site.gate_index] = r.site
    for idx in sorted(cells):
        site = ids[idx]
        w.writerow([site.gate.label(), site.gate_id, *(cells[idx].get(e, "") for e in TWO_QUBIT_ERRORS)])
    return buf.getvalue()


# Regrouping and gadget insertion


def _commute(g1: Gate, g2: Gate, n: int) -> bool:
    if not set(g1.qubits) & set(g2.qubits):
        return True
    return same_unitary(CliffordCircuit(n, [g1, g2]), CliffordCircuit(n, [g2, g1]))


def regroup(c: CliffordCircuit) -> CliffordCircuit:
    """Slide each CZ later, past gates it commutes with, until it meets another CZ.

    CZs that cannot reach another CZ stay put. The result is checked to be
    the same Clifford.
    """
    gates = list(c.gates)
    i = 0
    while i < len(gates):
        g = gates[i]
        nxt = next((j for j in range(i + 1, len(gates)) if gates[j].is_two_qubit), None)
        if g.kind == "CZ" and nxt is not None and gates[nxt].kind != "CZ":
            target = next((j for j in range(i + 1, len(gates)) if gates[j].kind == "CZ"), None)
            if target is not None and all(_commute(g, h, c.n) for h in gates[i + 1 : target]):
                gates.insert(target - 1, gates.pop(i))
                continue
        i += 1
    out = CliffordCircuit(c.n, gates, c.ancillas)
    if not same_unitary(out, c):
        raise AssertionError("regrouping changed the circuit")
    return out


def two_qubit_groups(c: CliffordCircuit, style: str) -> list[list[int]]:
    """Index runs of consecutive same-kind two-qubit gates (singletons for per-gate)."""
    groups: list[list[int]] = []
    prev_kind = None
    for i, g in enumerate(c.gates):
        if not g.is_two_qubit:
            prev_kind = None
            continue
        if style == "merged" and g.kind == prev_kind:
            groups[-1].append(i)
        else:
            groups.append([i])
        prev_kind = g.kind
    return groups


PATTERNS = ("XI", "ZI", "IX", "IZ")


@dataclass(frozen=True)
class FlagTemplate:
    """Which Pauli each of the two flags watches, per gate kind.

    A flag's rule is a cycle of two-letter patterns: the j-th gate of the group
    contributes pattern ``rule[j % len(rule)]`` on its (first, second) qubits.
    ``guard`` adds a CZ between the two flags on both sides of the gadget, so an
    X fault on one flag flips the other.
    """

    cx: tuple[tuple[str, ...], tuple[str, ...]] = (("IX",), ("IZ",))
    cz: tuple[tuple[str, ...], tuple[str, ...]] = (("IZ", "IX"), ("IX", "IZ"))
    guard: bool = True

    def __post_init__(self):
        for rules in (self.cx, self.cz):
            if len(rules) != 2 or any(not r for r in rules):
                raise ValueError("a template needs one non-empty rule per flag")
            for pat in (p for r in rules for p in r):
                if len(pat) != 2 or set(pat) - set("IXZ"):
                    raise ValueError(f"bad flag pattern {pat!r}")

    def for_kind(self, kind: str):
        if kind == "CX":
            return self.cx
        if kind == "CZ":
            return self.cz
        raise ValueError(f"no flag template for {kind}")


DEFAULT_TEMPLATE = FlagTemplate()


def watched_operator(gates, rule: tuple[str, ...], n: int) -> PauliOp:
    """Union of the rule's letters over the group; a qubit asked for both X and Z is an error."""
    x = z = 0
    for j, g in enumerate(gates):
        for q, letter in zip(g.qubits, rule[j % len(rule)]):
            bit = 1 << (q - 1)
            if letter == "X":
                x |= bit
            elif letter == "Z":
                z |= bit
    if x & z:
        raise ValueError("flag rule asks for both X and Z on one qubit")
    if not x | z:
        raise ValueError("flag rule watches nothing")
    return PauliOp(n, x, z)


def _controlled(f: int, p: PauliOp) -> list[Gate]:
    """Controlled-``p`` from flag ``f``; ``p`` must be free of Y factors."""
    out = []
    for q in range(1, p.n + 1):
        letter = p.letter(q)
        if letter == "X":
            out.append(Gate("CX", (f, q)))
        elif letter == "Z":
            out.append(Gate("CZ", (f, q)))
        elif letter == "Y":
            raise ValueError("watched operator picked up a Y factor")
    if p.sign < 0:
        out.append(Gate("Z", (f,)))
    return out


def gadget(body, flags: tuple[int, int], rules, guard: bool, n: int) -> list[Gate]:
    """PREP, couplings before, body, couplings after, MEAS."""
    w = CliffordCircuit(n, body)
    before, after = [], []
    for f, rule in zip(flags, rules):
        o = watched_operator(body, rule, n)
        before += _controlled(f, o)
        after += _controlled(f, conjugate(w, o))
    g = [Gate("CZ", flags)] if guard else []
    prep = [Gate("PREP", (f,), "X") for f in flags]
    meas = [Gate("MEAS", (f,), "X") for f in flags]
    return prep + g + before + list(body) + after + g + meas


def _check_gate_set(c: CliffordCircuit, style: str):
    if style not in STYLES:
        raise ValueError(f"style must be one of {STYLES}")
    if c.ancillas:
        raise ValueError("circuit already has ancillas")
    for g in c.gates:
        if g.is_two_qubit and g.kind not in ("CX", "CZ"):
            raise ValueError(f"no flag gadget for {g.kind}")


def insert_flags(c: CliffordCircuit, style: str = "merged", template: FlagTemplate = DEFAULT_TEMPLATE) -> CliffordCircuit:
    """Wrap two-qubit gate groups with two reusable X-basis flags.

    ``merged`` first regroups so CX gates and CZ gates sit in runs, then
    protects each run with one gadget; ``per-gate`` protects every gate.
    """
    _check_gate_set(c, style)
    base = regroup(c) if style == "merged" else c
    groups = two_qubit_groups(base, style)
    return _assemble(base, groups, [template.for_kind(base.gates[g[0]].kind) for g in groups], template.guard)


def _assemble(base: CliffordCircuit, groups, rules, guard: bool) -> CliffordCircuit:
    n = base.n + 2
    flags = (base.n + 1, base.n + 2)
    starts = {g[0]: (g, r) for g, r in zip(groups, rules)}
    out: list[Gate] = []
    i = 0
    while i < len(base.gates):
        if i not in starts:
            out.append(base.gates[i])
            i += 1
            continue
        idx, rule = starts[i]
        out += gadget([base.gates[j] for j in idx], flags, rule, guard, n)
        i = idx[-1] + 1
    flagged = CliffordCircuit(n, out, flags)
    _check_transparent(base, flagged)
    return flagged


def _check_transparent(base: CliffordCircuit, flagged: CliffordCircuit):
    """The unitary part of the gadgets must act as the bare circuit, flags untouched."""
    n = flagged.n
    lifted = CliffordCircuit(n, base.gates)
    unitary = CliffordCircuit(n, [g for g in flagged.gates if g.kind not in ("PREP", "MEAS")])
    for q in range(1, base.n + 1):
        for letter in "XZ":
            p = PauliOp.single(n, q, letter)
            if conjugate(unitary, p) != conjugate(lifted, p):
                raise AssertionError(f"flag gadgets disturb {letter}{q}")
    for f in flagged.ancillas:
        if not conjugate(unitary, PauliOp.single(n, f, "Z")).same_up_to_sign(PauliOp.single(n, f, "Z")):
            raise AssertionError(f"flag {f} is not left in its initial state")


def flag_couplings(flagged: CliffordCircuit) -> int:
    anc = set(flagged.ancillas)
    return sum(1 for g in flagged.gates if g.is_two_qubit and set(g.qubits) & anc)


def candidate_rules(max_cycle: int = 2):
    """Flag rules built from single-letter patterns, shortest cycles first."""
    for length in range(1, max_cycle + 1):
        yield from product(PATTERNS, repeat=length)


def _group_failures(code: StabilizerCode, c: CliffordCircuit, lo: int, hi: int) -> bool:
    """True if some fault at gate indices [lo, hi) goes undetected."""
    mask = (1 << code.n) - 1
    for site in fault_sites(c):
        if not lo <= site.gate_index < hi:
            continue
        out, flips = propagate_fault(c, site)
        if flips:
            continue
        data = PauliOp(code.n, out.x & mask, out.z & mask, out.phase)
        if not syndrome_detectable(code, data) and _classify_output(code, data) == "logical":
            return True
    return False


def fit_flags(code: StabilizerCode, c: CliffordCircuit, style: str = "merged", guard: bool = True, max_cycle: int = 2):
    """Pick flag rules group by group so that each gadget catches its own faults.

    Groups are fitted left to right against the still unflagged remainder, which
    can only hide detections, so the final audit is at least as good. Returns
    the flagged circuit and the chosen rules, or raises ValueError when some
    group has no passing rule pair.
    """
    _check_gate_set(c, style)
    base = regroup(c) if style == "merged" else c
    groups = two_qubit_groups(base, style)
    n = base.n + 2
    flags = (base.n + 1, base.n + 2)
    chosen = []
    prefix: list[Gate] = []
    pos = 0
    for idx in groups:
        prefix += base.gates[pos : idx[0]]
        body = [base.gates[j] for j in idx]
        kind = body[0].kind
        default = DEFAULT_TEMPLATE.for_kind(kind)
        options = [default] + [r for r in product(candidate_rules(max_cycle), repeat=2) if r != default]
        for rules in options:
            try:
                g = gadget(body, flags, rules, guard, n)
            except ValueError:
                continue
            trial = CliffordCircuit(n, prefix + g + list(base.gates[idx[-1] + 1 :]), flags)
            if not _group_failures(code, trial, len(prefix), len(prefix) + len(g)):
                chosen.append(rules)
                prefix += g
                break
        else:
            raise ValueError(f"no flag rule pair protects the {kind} group at gate {idx[0]}")
        pos = idx[-1] + 1
    flagged = _assemble(base, groups, chosen, guard)
    return flagged, chosen


@dataclass
class FlagSummary:
    style: str
    flag_qubits: tuple[int, ...]
    groups: int
    couplings: int
    audit: FaultAuditReport = field(repr=False)


def flagged_summary(code: StabilizerCode, c: CliffordCircuit, style: str = "merged") -> FlagSummary:
    flagged = insert_flags(c, style)
    audit = audit_single_faults(code, flagged)
    groups = sum(1 for g in flagged.gates if g.kind == "PREP") // 2
    return FlagSummary(style, flagged.ancillas, groups, flag_couplings(flagged), audit)


def load_reference_fault_table() -> dict[tuple[str, str], tuple[PauliOp, bool]]:
    """Published output errors for the canonical [[6,4,2]] circuit.

    Keys are (gate label, error); values are (output on 6 qubits, undetectable).
    """
    text = resources.files("qskstitch.data").joinpath("fault_table_642.csv").read_text()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    table = {}
    for row in csv.DictReader(lines):
        for err in TWO_QUBIT_ERRORS:
            cell = row[err].strip()
            table[(row["gate"], err)] = (parse_pauli(cell.rstrip("*"), 6), cell.endswith("*"))
    return table

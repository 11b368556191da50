"""Solve-and-stitch synthesis of logical QSK circuits on [[n, n-2, 2]] codes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product

from .codes import (
    PreservationReport,
    StabilizerCode,
    check_stabilizer_preservation,
    family_code,
    is_family_code,
)
from .depth import DepthSummary, applicable_bounds, paper_depth
from .engine import (
    CliffordCircuit,
    ConstraintReport,
    Gate,
    MappingConstraint,
    check_constraints,
    conjugate,
    fix_signs,
    pauli_layer,
)
from .pauli import PauliOp, format_pauli
from .qsk import QskSpec, embed_odd_k, input_frame, physical_constraints, subcode, unpadded


class SynthesisError(RuntimeError):
    """A synthesized circuit failed verification."""


COMPLEMENT_MODES = ("auto", "on", "off")
SCHEDULES = ("blocks", "rooted")


@dataclass(frozen=True)
class SynthOptions:
    use_logical_identity: bool = True
    use_complement: str = "auto"
    emit_blocks: bool = False
    schedule: str = "blocks"

    def __post_init__(self):
        if self.use_complement not in COMPLEMENT_MODES:
            raise ValueError(f"use_complement must be one of {COMPLEMENT_MODES}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        if self.schedule == "rooted" and self.use_logical_identity:
            raise ValueError("the rooted schedule is only defined without the identity gadget")


@dataclass(frozen=True)
class Block:
    name: str
    gates: tuple[Gate, ...]

    def __len__(self):
        return len(self.gates)


@dataclass
class SynthResult:
    spec: QskSpec
    code: StabilizerCode
    circuit: CliffordCircuit
    sign_fix: PauliOp
    block_plan: list[Block]
    constraints: list[MappingConstraint]
    verification: ConstraintReport
    preservation: PreservationReport
    depth: DepthSummary
    options: SynthOptions
    complement: bool = False
    phase_n: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verification.all_exact and self.preservation.all_exact

    def to_dict(self) -> dict:
        bounds = self.depth.bounds
        name, value = next(iter(bounds.items())) if bounds else (None, None)
        return {
            "spec": str(self.spec),
            "code": self.code.name,
            "constraints": self.verification.to_dict(),
            "stabilizers": self.preservation.to_dict(),
            "depth": {**self.depth.to_dict(), "bound_name": name, "bound_value": value},
            "sign_fix": format_pauli(self.sign_fix),
            "complement": self.complement,
            "phase_n": self.phase_n,
            "blocks": [{"name": b.name, "gates": [g.label() for g in b.gates]} for b in self.block_plan],
            "notes": list(self.notes),
        }


def _roots(indices) -> list[int]:
    return [i + 1 for i in indices]


def _x_side(spec: QskSpec) -> list[int]:
    return [i for i in range(1, spec.k + 1) if i not in spec.I_h]


def _require_h_only(spec: QskSpec):
    if not spec.h_only:
        raise ValueError(f"spec {spec} has Y or I letters; only X and Z are handled here")


def rooted_circuit_x(i: int, spec: QskSpec, n: int) -> CliffordCircuit:
    """Rooted circuit realizing the X-bar_i constraint, i outside I_h."""
    _require_h_only(spec)
    if i in spec.I_h or not 1 <= i <= spec.k:
        raise ValueError(f"logical {i} is not outside I_h for {spec}")
    r = i + 1
    odd = spec.h % 2
    gates = [Gate("CX", (r, 1))] if odd else []
    gates += [Gate("CX", (r, j)) for j in _roots(spec.I_h)]
    gates += [Gate("CZ", (r, j)) for j in _roots(_x_side(spec)) if j != r]
    if odd:
        gates.append(Gate("CZ", (r, n)))
    gates.append(Gate("P", (r,)))
    return CliffordCircuit(n, gates)


def rooted_circuit_z(i: int, spec: QskSpec, n: int) -> CliffordCircuit:
    """Rooted circuit realizing the Z-bar_i constraint, i in I_h."""
    _require_h_only(spec)
    if i not in spec.I_h:
        raise ValueError(f"logical {i} is not in I_h for {spec}")
    r = i + 1
    odd = spec.h % 2
    others = [j for j in _roots(spec.I_h) if j != r]
    gates = [Gate("CX", (n, r))] if odd else []
    gates += [Gate("CX", (a, r)) for a in _roots(_x_side(spec))]
    head = [1, r] if odd else [r]
    gates += [Gate("H", (q,)) for q in head] + [Gate("P", (q,)) for q in head]
    gates += [Gate("CZ", (r, j)) for j in others]
    if odd:
        gates.append(Gate("CZ", (1, r)))
    gates += [Gate("H", (q,)) for q in sorted(head + others)]
    return CliffordCircuit(n, gates)


def stitch_blocks(spec: QskSpec, n: int, phase_n: str = "P") -> list[Block]:
    """The stitched circuit as an ordered list of named blocks, before signs."""
    _require_h_only(spec)
    A = _roots(_x_side(spec))
    H = _roots(spec.I_h)
    odd = spec.h % 2
    zq = ([1] if odd else []) + H
    blocks = [
        Block("cz_x", tuple(Gate("CZ", (a, b)) for a, b in combinations(A, 2))),
        Block("cz_n", tuple(Gate("CZ", (a, n)) for a in A) if odd else ()),
        Block("phase", tuple(Gate("P", (a,)) for a in A) + ((Gate(phase_n, (n,)),) if odd else ())),
        Block("cx_x", tuple(Gate("CX", (a, j)) for a in A for j in H)),
        Block(
            "cx_repair",
            tuple([Gate("CX", (a, 1)) for a in A] + [Gate("CX", (n, 1))] + [Gate("CX", (n, j)) for j in H])
            if odd
            else (),
        ),
        Block("hp_z", tuple([Gate("H", (q,)) for q in zq] + [Gate("P", (q,)) for q in zq])),
        Block(
            "cz_z",
            tuple([Gate("CZ", (a, b)) for a, b in combinations(H, 2)] + ([Gate("CZ", (1, j)) for j in H] if odd else [])),
        ),
        Block("h_z", tuple(Gate("H", (q,)) for q in zq)),
    ]
    return [b for b in blocks if b.gates]


def logical_identity_gadget(n: int) -> CliffordCircuit:
    """CZ on every pair then P on every qubit: the logical identity on the family code."""
    if n < 4 or n % 2:
        raise ValueError(f"the gadget needs even n >= 4, got {n}")
    gates = [Gate("CZ", pair) for pair in combinations(range(1, n + 1), 2)]
    gates += [Gate("P", (q,)) for q in range(1, n + 1)]
    return CliffordCircuit(n, gates)


_PHASE_POWER = {"P": 1, "Z": 2, "PDG": 3}
_POWER_GATE = {1: "P", 2: "Z", 3: "PDG"}


def merge_identity(blocks: list[Block], n: int) -> list[Block]:
    """Prepend the identity gadget and cancel it against the diagonal prefix.

    The gadget and the CZ/phase blocks are all diagonal, so they commute and
    the CZ pairs cancel by exact matching; phase powers add mod 4.
    """
    by_name = {b.name: b for b in blocks}
    pairs = set(combinations(range(1, n + 1), 2))
    for name in ("cz_x", "cz_n"):
        for g in by_name.get(name, Block(name, ())).gates:
            pairs ^= {tuple(sorted(g.qubits))}
    power = {q: 1 for q in range(1, n + 1)}
    for g in by_name.get("phase", Block("phase", ())).gates:
        power[g.qubits[0]] += _PHASE_POWER[g.kind]
    head = [
        Block("identity_cz", tuple(Gate("CZ", p) for p in sorted(pairs))),
        Block(
            "phase",
            tuple(Gate(_POWER_GATE[power[q] % 4], (q,)) for q in range(1, n + 1) if power[q] % 4),
        ),
    ]
    rest = [b for b in blocks if b.name not in ("cz_x", "cz_n", "phase")]
    return [b for b in head if b.gates] + rest


def rooted_schedule(spec: QskSpec, n: int, phase_n: str = "P") -> list[Block]:
    """Same gates as :func:`stitch_blocks`, grouped root by root on the X side."""
    _require_h_only(spec)
    A = _roots(_x_side(spec))
    H = _roots(spec.I_h)
    odd = spec.h % 2
    x_gates = []
    for a in A:
        x_gates += [Gate("CX", (a, j)) for j in H]
        x_gates += [Gate("CZ", (a, b)) for b in A if b > a]
        if odd:
            x_gates += [Gate("CZ", (a, n)), Gate("CX", (a, 1))]
    blocks = [Block("rooted_x", tuple(x_gates))]
    std = {b.name: b for b in stitch_blocks(spec, n, phase_n)}
    if "phase" in std:
        blocks.append(std["phase"])
    if odd:
        blocks.append(Block("cx_repair", tuple([Gate("CX", (n, 1))] + [Gate("CX", (n, j)) for j in H])))
    blocks += [std[name] for name in ("hp_z", "cz_z", "h_z") if name in std]
    return [b for b in blocks if b.gates]


def _complement_wrap(inner: list[Block], n: int) -> list[Block]:
    """H on all qubits and SWAP(1, n) around the circuit for the complement spec.

    The trailing H layer of the inner circuit cancels against the closing
    H layer, leaving H only on the qubits it did not touch.
    """
    h_z = next((b for b in inner if b.name == "h_z"), Block("h_z", ()))
    touched = {g.qubits[0] for g in h_z.gates}
    out = [Block("complement_in", tuple([Gate("H", (q,)) for q in range(1, n + 1)] + [Gate("SWAP", (1, n))]))]
    out += [b for b in inner if b.name != "h_z"]
    closing = [Gate("H", (q,)) for q in range(1, n + 1) if q not in touched] + [Gate("SWAP", (1, n))]
    out.append(Block("complement_out", tuple(closing)))
    return out


def _circuit(blocks: list[Block], n: int, tagged: bool) -> CliffordCircuit:
    gates = []
    for b in blocks:
        for j, g in enumerate(b.gates):
            gates.append(Gate(g.kind, g.qubits, tag=f"{b.name}.{j}") if tagged else g)
    return CliffordCircuit(n, gates)


def _stabilizer_constraints(code: StabilizerCode) -> list[MappingConstraint]:
    return [MappingConstraint(s, s, "exact", f"S{i}") for i, s in enumerate(code.stabilizers, 1)]


def _finish(spec, code, blocks, opts, constraints, verify_code=None, **extra) -> SynthResult:
    """Append the sign-fix layer, verify, and package the result."""
    n = code.n
    verify_code = verify_code or code
    stab_cons = _stabilizer_constraints(verify_code)
    raw = _circuit(blocks, n, opts.emit_blocks)
    fix = fix_signs(raw, constraints + stab_cons)
    if not fix.is_identity:
        blocks = blocks + [Block("sign_fix", tuple(pauli_layer(fix)))]
    circuit = _circuit(blocks, n, opts.emit_blocks)
    report = check_constraints(circuit, constraints)
    pres = check_stabilizer_preservation(verify_code, circuit)
    if not (report.all_exact and pres.all_exact):
        bad = report.first_failure()
        raise SynthesisError(
            f"synthesized circuit for {spec} failed verification"
            + (f": {bad.constraint} gave {format_pauli(bad.image)}" if bad else ": stabilizers not preserved")
        )
    bounds = extra.pop("bounds", {})
    return SynthResult(
        spec=spec,
        code=code,
        circuit=circuit,
        sign_fix=fix,
        block_plan=blocks,
        constraints=constraints,
        verification=report,
        preservation=pres,
        depth=paper_depth(circuit, bounds=bounds),
        options=opts,
        **extra,
    )


def _x_stabilizer_sign_ok(blocks, n) -> bool:
    full = PauliOp(n, (1 << n) - 1, 0)
    return conjugate(_circuit(blocks, n, False), full) == full


def _check_family(code: StabilizerCode, spec: QskSpec):
    if not is_family_code(code):
        raise ValueError(f"solve-and-stitch needs an [[n, n-2, 2]] family code, got {code.name or code.n}")
    if code.k != spec.k:
        raise ValueError(f"spec has k={spec.k} but the code encodes {code.k} qubits")


def complement_active(spec: QskSpec, opts: SynthOptions) -> bool:
    if opts.use_complement == "on":
        return True
    if opts.use_complement == "off":
        return False
    return 2 * spec.h > spec.k


def _targets_or_derived(spec: QskSpec, code: StabilizerCode, targets) -> list[MappingConstraint]:
    """Derived constraints, or a supplied table that agrees with them up to signs."""
    derived = physical_constraints(spec, code)
    if targets is None:
        return derived
    targets = list(targets)
    input_frame(derived, targets, spec.k)
    return targets


def stitch(spec: QskSpec, code: StabilizerCode, opts: SynthOptions | None = None, targets=None) -> SynthResult:
    """Stitched physical circuit for an H-only spec on a family code.

    ``targets`` replaces the derived constraints by a table that may differ
    from them in signs only; the sign-fix layer then aims at that table.
    """
    opts = opts or SynthOptions()
    _require_h_only(spec)
    _check_family(code, spec)
    n = code.n
    comp = complement_active(spec, opts)
    if comp and opts.schedule == "rooted":
        raise ValueError("the rooted schedule does not combine with the complement wrap")
    inner_spec = spec.complement() if comp else spec
    constraints = _targets_or_derived(spec, code, targets)
    candidates = ("P", "PDG") if inner_spec.h % 2 else (None,)
    notes = []
    for phase_n in candidates:
        if opts.schedule == "rooted":
            blocks = rooted_schedule(inner_spec, n, phase_n or "P")
        else:
            blocks = stitch_blocks(inner_spec, n, phase_n or "P")
        if phase_n is not None and not _x_stabilizer_sign_ok(blocks, n):
            notes.append(f"{phase_n} on qubit {n} flips the X stabilizer sign")
            continue
        if opts.use_logical_identity:
            blocks = merge_identity(blocks, n)
        if comp:
            blocks = _complement_wrap(blocks, n)
        bounds = applicable_bounds(spec.k, spec.h, opts.use_logical_identity, comp)
        return _finish(
            spec, code, blocks, opts, constraints,
            complement=comp, phase_n=phase_n, notes=notes, bounds=bounds,
        )
    raise SynthesisError(f"no choice of P or PDG on qubit {n} keeps the X stabilizer for {spec}")


def hy_blocks(spec: QskSpec, n: int, phase_n: str = "P", schedule: str = "rooted") -> list[Block]:
    """Stitched blocks of the Y-to-X substituted spec with the parity patch applied.

    The default rooted layout puts the phase gates after the X-side CNOTs.
    With the block layout the odd-h/even-hy patch does not verify: the extra
    P on a Y root precedes the CNOT into it and cancels the leading CZ.
    """
    if not spec.I_hy or spec.idle:
        raise ValueError(f"spec {spec} has no Y letters (or has idle letters)")
    sub = spec.substitute_y()
    Y = _roots(spec.I_hy)
    E = _roots(spec.I_e)
    H = _roots(spec.I_h)
    h_odd, hy_odd = spec.h % 2, spec.hy % 2
    base = rooted_schedule(sub, n, phase_n) if schedule == "rooted" else stitch_blocks(sub, n, phase_n)
    p_y = tuple(Gate("P", (q,)) for q in Y)
    cz_ye = tuple(Gate("CZ", (y, e)) for y in Y for e in E)
    if not h_odd and not hy_odd:
        return [Block("hy_pre", p_y)] + base + [Block("hy_post", p_y)]
    if h_odd and hy_odd:
        tail = (
            [Gate("CZ", (e, n)) for e in E]
            + [Gate("CX", (n, j)) for j in H]
            + [Gate("CX", (n, y)) for y in Y]
            + [Gate("CZ", (y, n)) for y in Y]
        )
        return [Block("hy_pre", p_y)] + base + [Block("hy_post", p_y), Block("hy_repair", tuple(tail))]
    if h_odd and not hy_odd:
        out = [Block("hy_pre", cz_ye)]
        for b in base:
            out.append(Block(b.name, b.gates + p_y) if b.name == "phase" else b)
        return out + [Block("hy_post", p_y)]
    # even h, odd hy: strip the X-side CZ and P gates and everything on qubit n
    out = [Block("hy_pre", cz_ye)]
    for b in base:
        if b.name in ("cz_x", "cz_n", "phase"):
            continue
        if b.name == "hp_z":
            out.append(Block("hy_phase", p_y))
        kept = tuple(g for g in b.gates if n not in g.qubits)
        if kept:
            out.append(Block(b.name, kept))
    return out + [Block("hy_post", p_y)]


def stitch_hy(spec: QskSpec, code: StabilizerCode, opts: SynthOptions | None = None, targets=None) -> SynthResult:
    """Specs with Y letters: substitute, stitch, patch by parity, fix signs.

    The identity gadget and complement wrap are not applied here, and the
    rooted layout is always used. ``targets`` works as in ``stitch``.
    """
    opts = opts or SynthOptions()
    _check_family(code, spec)
    n = code.n
    constraints = _targets_or_derived(spec, code, targets)
    notes = []
    if opts.use_logical_identity or opts.use_complement == "on":
        notes.append("identity gadget and complement wrap are skipped for specs with Y letters")
    last = None
    candidates = ("P", "PDG") if spec.substitute_y().h % 2 else (None,)
    for phase_n in candidates:
        blocks = hy_blocks(spec, n, phase_n or "P")
        try:
            return _finish(spec, code, blocks, opts, constraints, phase_n=phase_n, notes=notes)
        except (SynthesisError, ValueError) as exc:
            last = exc
            notes.append(f"phase {phase_n} on qubit {n}: {exc}")
    raise SynthesisError(f"parity patch for {spec} does not verify: {last}")


def synth(spec: QskSpec | str, code: StabilizerCode | None = None, opts: SynthOptions | None = None,
          targets=None) -> SynthResult:
    """Front door: pads odd k, routes Y specs, defaults to the family code."""
    spec = QskSpec(spec) if isinstance(spec, str) else spec
    opts = opts or SynthOptions()
    if spec.idle:
        raise ValueError("idle letters are not synthesized; drop them or pad with a Z letter")
    padded = embed_odd_k(spec) if spec.k % 2 else spec
    if targets is not None and padded is not spec:
        raise ValueError("target tables are supported for even k only")
    code = code or family_code(padded.k + 2)
    run = stitch_hy if padded.I_hy else stitch
    result = run(padded, code, opts, targets)
    if padded is spec:
        return result
    # re-verify against the unpadded spec on the code with the pad frozen to |0>
    sub = subcode(code, padded.padding)
    cons = physical_constraints(unpadded(padded), sub, mode="up_to_stabilizer")
    report = check_constraints(result.circuit, cons, stabilizers=sub.stabilizers)
    pres = check_stabilizer_preservation(sub, result.circuit)
    if not (report.ok and pres.preserved):
        raise SynthesisError(f"padded synthesis for {spec} fails on the subcode")
    result.notes.append(f"odd k: padded to {padded} with logical qubit 1 fixed to |0>")
    return result


def synth_single_logical_h(code: StabilizerCode, target: int = 1) -> SynthResult:
    """Transversal-free logical H on one qubit of a family code."""
    if not is_family_code(code):
        raise ValueError("single logical H needs a family code")
    if not 1 <= target <= code.k:
        raise ValueError(f"target {target} outside [1, {code.k}]")
    n, r = code.n, target + 1
    gates = (
        Gate("CZ", (r, n)),
        Gate("CX", (r, 1)),
        Gate("H", (r,)),
        Gate("CX", (r, 1)),
        Gate("CZ", (r, n)),
        Gate("Z", (1,)),
    )
    blocks = [Block("single_h", gates)]
    logical = CliffordCircuit(code.k, [Gate("H", (target,))])
    constraints = []
    for i in range(code.k):
        for letter, ops in (("X", code.logical_x), ("Z", code.logical_z)):
            lp = PauliOp.single(code.k, i + 1, letter)
            constraints.append(MappingConstraint(ops[i], code.encode(conjugate(logical, lp)), "exact", f"{letter}{i + 1}"))
    spec = QskSpec("Z" * code.k)
    return _finish(spec, code, blocks, SynthOptions(), constraints, notes=["single logical H"])


# Breadth-first search for a minimum-depth circuit (small codes only)

_LAYER_GATES = (None, "H", "P", "HY")


def _moves(n: int, last_was_layer: bool):
    for a, b in combinations(range(1, n + 1), 2):
        yield (Gate("CZ", (a, b)),), False
        yield (Gate("CX", (a, b)),), False
        yield (Gate("CX", (b, a)),), False
    if last_was_layer:
        return
    for choice in product(_LAYER_GATES, repeat=n):
        if any(choice):
            yield tuple(Gate(k, (q,)) for q, k in enumerate(choice, 1) if k), True


def bfs_min_depth_oracle(code: StabilizerCode, constraints, gate_budget: int = 6) -> CliffordCircuit | None:
    """Minimum paper-depth circuit meeting the constraints up to sign.

    A step is one two-qubit gate or one single-qubit layer, both of depth 1,
    with no two layers in a row. Stabilizers must be preserved up to sign.
    Returns None when no circuit within ``gate_budget`` two-qubit gates exists.
    """
    n = code.n
    if n > 5 or gate_budget > 8:
        raise ValueError("BFS oracle is limited to n <= 5 and at most 8 two-qubit gates")
    cons = list(constraints) + [MappingConstraint(s, s) for s in code.stabilizers]
    inputs = [c.input for c in cons]
    targets = [c.output.unsigned() for c in cons]

    def key(images):
        return tuple((p.x, p.z) for p in images)

    def done(images):
        return all(img.x == t.x and img.z == t.z for img, t in zip(images, targets))

    # track Heisenberg images of the inputs; appending a gate conjugates each image
    start = tuple(p.unsigned() for p in inputs)
    if done(start):
        return CliffordCircuit(n)
    seen = {(key(start), False)}
    frontier = deque([(start, (), False, 0)])
    while frontier:
        images, gates, last_layer, twos = frontier.popleft()
        for move, is_layer in _moves(n, last_layer):
            nt = twos + (not is_layer)
            if nt > gate_budget:
                continue
            step = CliffordCircuit(n, move)
            new = tuple(conjugate(step, p).unsigned() for p in images)
            state = (key(new), is_layer)
            if state in seen:
                continue
            seen.add(state)
            path = gates + move
            if done(new):
                return CliffordCircuit(n, path)
            frontier.append((new, path, is_layer, nt))
    return None

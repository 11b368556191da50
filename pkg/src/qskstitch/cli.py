"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error. JSON reports
carry ``schema_version``; human summaries go to stderr.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .codes import CodeError, StabilizerCode, check_stabilizer_preservation, family_code, load_code, load_fixture
from .depth import applicable_bounds, paper_depth, scaling_csv, scaling_table
from .engine import CliffordCircuit, Gate, check_constraints, conjugate, format_circuit, parse_circuit, parse_constraints
from .flags import STYLES, audit_single_faults, fault_table_csv, insert_flags
from .pauli import PauliOp, format_pauli
from .qsk import QskSpec, build_logical_qsk, embed_odd_k
from .synth import COMPLEMENT_MODES, SCHEDULES, SynthesisError, SynthOptions, synth
from .transversal import GATES, check_transversal, qsk_targets, symbolic_verdict

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _emit(doc: dict, command: str):
    print(json.dumps({"schema_version": SCHEMA_VERSION, "command": command, **doc}, indent=2))


def _note(msg: str):
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_code_arg(arg: str) -> StabilizerCode:
    """A path to a code JSON document or the name of a shipped fixture."""
    if Path(arg).is_file():
        return load_code(_read(arg))
    try:
        return load_fixture(arg)
    except FileNotFoundError:
        raise InputError(f"no code file or fixture named {arg!r}") from None


def _k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return [k for k in range(int(lo), int(hi) + 1) if k % 2 == 0]
    return [int(t) for t in text.split(",")]


def _synth_options(args) -> SynthOptions:
    return SynthOptions(
        use_logical_identity=not args.no_identity,
        use_complement=args.complement,
        emit_blocks=args.blocks,
        schedule=args.schedule,
    )


def _write_outputs(out_dir: str | None, files: dict[str, str]):
    if not out_dir:
        return
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (d / name).write_text(text)


def cmd_synth(args) -> int:
    spec = QskSpec(args.spec)
    opts = _synth_options(args)
    code = None
    if args.n is not None:
        k = spec.k + spec.k % 2
        if args.n != k + 2:
            raise InputError(f"synthesis targets the [[{k + 2},{k},2]] family code; use 'verify' for other codes")
        code = family_code(args.n)
    try:
        result = synth(spec, code, opts)
    except SynthesisError as exc:
        _note(f"synthesis failed: {exc}")
        return EXIT_FAIL
    circuit = result.circuit
    report = result.to_dict()
    exit_code = EXIT_OK if result.ok else EXIT_FAIL
    if args.flags != "none":
        circuit = insert_flags(result.circuit, args.flags)
        audit = audit_single_faults(result.code, circuit)
        report["flags"] = {"style": args.flags, "undetectable": audit.undetectable_count}
        if audit.undetectable_count:
            exit_code = EXIT_FAIL
    text = format_circuit(circuit)
    _write_outputs(args.out, {"circuit.txt": text, "report.json": json.dumps(report, indent=2) + "\n"})
    counts = result.verification.counts()
    _note(f"{spec} on {result.code.name}: {counts.get('exact', 0)}/{len(result.constraints)} constraints exact, "
          f"paper-depth {result.depth.paper_depth}")
    if args.format == "json":
        _emit({"circuit": text, "report": report}, "synth")
    else:
        sys.stdout.write(text)
    return exit_code


def cmd_verify(args) -> int:
    code = _load_code_arg(args.code)
    circuit = parse_circuit(_read(args.circuit))
    if circuit.n != code.n:
        raise InputError(f"circuit has {circuit.n} qubits, code has {code.n}")
    cons = parse_constraints(_read(args.constraints), code.n, args.mode) if args.constraints else []
    report = check_constraints(circuit, cons, stabilizers=code.stabilizers)
    pres = check_stabilizer_preservation(code, circuit)
    depth = paper_depth(circuit)
    passed = report.all_exact if args.mode == "exact" else report.ok
    passed = passed and pres.preserved
    doc = {
        "code": code.name,
        "constraints": report.to_dict(),
        "stabilizers": pres.to_dict(),
        "depth": depth.to_dict(),
        "pass": passed,
    }
    first = report.first_failure()
    if first is not None:
        doc["first_failure"] = str(first.constraint)
        _note(f"first violated constraint: {first.constraint}")
    _note(f"{'pass' if passed else 'FAIL'}: {report.counts()} over {len(cons)} constraints, paper-depth {depth.paper_depth}")
    if args.format == "json":
        _emit(doc, "verify")
    else:
        print("pass" if passed else "fail")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_depth(args) -> int:
    if args.circuit:
        c = parse_circuit(_read(args.circuit))
        bounds = {}
        if args.k is not None and args.h is not None:
            bounds = applicable_bounds(args.k, args.h, args.identity, args.complement_bound)
        d = paper_depth(c, swap_as_cx=args.swap_as_cx, bounds=bounds)
        doc = d.to_dict()
        ok = all(d.paper_depth <= v for v in bounds.values())
    elif args.k is not None and args.h is not None:
        doc = {"bounds": applicable_bounds(args.k, args.h, args.identity, args.complement_bound)}
        ok = True
    else:
        raise InputError("give --circuit, or --k and --h for the closed-form bounds")
    if args.format == "json":
        _emit(doc, "depth")
    else:
        for key, val in doc.items():
            print(f"{key}: {val}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scaling(args) -> int:
    rows = scaling_table(args.h, _k_range(args.k))
    if args.format == "json":
        _emit({"h": args.h, "rows": [r.__dict__ for r in rows]}, "scaling")
    elif args.format == "csv":
        sys.stdout.write(scaling_csv(rows))
    else:
        for r in rows:
            print(f"k={r.k:3d} original={r.depth_original:4d} optimized={r.depth_optimized:4d}")
    return EXIT_OK


def cmd_ft_audit(args) -> int:
    if args.circuit:
        if not args.code:
            raise InputError("--circuit needs --code")
        code = _load_code_arg(args.code)
        circuit = parse_circuit(_read(args.circuit))
    else:
        spec = QskSpec(args.spec)
        result = synth(spec, None, SynthOptions(use_logical_identity=False, use_complement="off", schedule="rooted"))
        code, circuit = result.code, result.circuit
    if args.flags != "none":
        circuit = insert_flags(circuit, args.flags)
    report = audit_single_faults(code, circuit, include_single_qubit=args.single_qubit)
    _note(report.summary())
    if args.format == "json":
        _emit(report.to_dict(), "ft-audit")
    elif args.format == "csv":
        sys.stdout.write(fault_table_csv(report))
    else:
        for row in report.undetectable:
            print(f"{row.site.gate.label()} {row.site.error} -> {format_pauli(row.output)} ({row.kind})")
    return EXIT_OK if report.undetectable_count == 0 else EXIT_FAIL


def cmd_transversal(args) -> int:
    code = _load_code_arg(args.code) if args.code else family_code(args.n)
    doc = {"code": code.name, "gates": {}}
    for gate in GATES if args.gate == "both" else (args.gate,):
        verdict = check_transversal(code, gate)
        entry = {"concrete": verdict.to_dict()}
        if args.symbolic:
            entry["symbolic"] = symbolic_verdict(qsk_targets(code.k), gate).to_dict()
        doc["gates"][gate] = entry
        _note(f"{gate} on {code.name}: {'feasible' if verdict else 'infeasible'}")
    if args.format == "json":
        _emit(doc, "transversal")
    else:
        for gate, entry in doc["gates"].items():
            print(f"{gate}: {'feasible' if entry['concrete']['feasible'] else 'infeasible'}")
            sym = entry.get("symbolic")
            if sym:
                for rel in sym["relations"]:
                    print(f"  {rel}")
                if sym["witness"]:
                    print(f"  contradiction: {sym['witness']}")
    return EXIT_OK


def _random_circuit(rng: random.Random, n: int, length: int) -> CliffordCircuit:
    single = ("H", "HY", "P", "PDG", "X", "Y", "Z")
    two = ("CX", "CZ", "SWAP") if n > 1 else ()
    gates = []
    for _ in range(length):
        if two and rng.random() < 0.4:
            a, b = rng.sample(range(1, n + 1), 2)
            gates.append(Gate(rng.choice(two), (a, b)))
        else:
            gates.append(Gate(rng.choice(single), (rng.randint(1, n),)))
    return CliffordCircuit(n, gates)


def cmd_oracle_check(args) -> int:
    from .oracle import codespace_equiv, conjugate_dense

    rng = random.Random(args.seed)
    mismatches = []
    for trial in range(args.samples):
        n = rng.randint(1, args.max_n)
        c = _random_circuit(rng, n, rng.randint(0, args.max_gates))
        p = PauliOp(n, rng.getrandbits(n), rng.getrandbits(n), rng.choice((0, 2)))
        fast, dense = conjugate(c, p), conjugate_dense(c, p)
        if fast != dense:
            mismatches.append({"trial": trial, "circuit": format_circuit(c), "pauli": format_pauli(p),
                               "engine": format_pauli(fast), "dense": format_pauli(dense)})
    doc = {"samples": args.samples, "seed": args.seed, "mismatches": mismatches}
    ok = not mismatches
    for spec_text in args.spec or ():
        spec = QskSpec(spec_text)
        result = synth(spec)
        logical = build_logical_qsk(spec if spec.k == result.code.k else embed_odd_k(spec))
        eq = codespace_equiv(result.code, logical, result.circuit)
        doc.setdefault("codespace", []).append({"spec": spec_text, "code": result.code.name, "equivalent": eq.equivalent,
                                                "leakage": eq.leakage, "deviation": eq.deviation})
        ok = ok and eq.equivalent
    _note(f"{args.samples} random checks, {len(mismatches)} mismatches")
    if args.format == "json":
        _emit(doc, "oracle-check")
    else:
        print("pass" if ok else "fail")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qskstitch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a physical QSK circuit on the family code")
    s.add_argument("spec", help="Pauli letters, e.g. ZXXZ")
    s.add_argument("--n", type=int, help="physical qubits (must be k+2, rounded up for odd k)")
    s.add_argument("--no-identity", action="store_true", help="skip the logical identity gadget")
    s.add_argument("--complement", choices=COMPLEMENT_MODES, default="auto")
    s.add_argument("--schedule", choices=SCHEDULES, default="blocks")
    s.add_argument("--blocks", action="store_true", help="tag gates with their block")
    s.add_argument("--flags", choices=("none", *STYLES), default="none")
    s.add_argument("--out", help="directory for circuit.txt and report.json")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="check a circuit against a code and constraint list")
    v.add_argument("--code", required=True, help="code JSON file or fixture name")
    v.add_argument("--circuit", required=True)
    v.add_argument("--constraints")
    v.add_argument("--mode", choices=("exact", "up_to_stabilizer"), default="exact")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("depth", help="paper-depth of a circuit and the closed-form bounds")
    d.add_argument("--circuit")
    d.add_argument("--k", type=int)
    d.add_argument("--h", type=int)
    d.add_argument("--identity", action="store_true")
    d.add_argument("--complement-bound", action="store_true")
    d.add_argument("--swap-as-cx", action="store_true")
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.set_defaults(func=cmd_depth)

    sc = sub.add_parser("scaling", help="depth with and without the identity gadget over k")
    sc.add_argument("--h", type=int, default=2)
    sc.add_argument("--k", default="2..30", help="range lo..hi (even values) or a comma list")
    sc.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sc.set_defaults(func=cmd_scaling)

    f = sub.add_parser("ft-audit", help="single-fault detectability audit")
    f.add_argument("--spec", default="ZXXZ")
    f.add_argument("--circuit")
    f.add_argument("--code")
    f.add_argument("--flags", choices=("none", *STYLES), default="none")
    f.add_argument("--single-qubit", action="store_true", help="also inject faults after single-qubit gates")
    f.add_argument("--format", choices=("text", "json", "csv"), default="text")
    f.set_defaults(func=cmd_ft_audit)

    t = sub.add_parser("transversal", help="can transversal H or P realize the QSK mappings")
    t.add_argument("--code", help="code JSON file or fixture name")
    t.add_argument("--n", type=int, default=6)
    t.add_argument("--gate", choices=(*GATES, "both"), default="both")
    t.add_argument("--symbolic", action="store_true", help="also derive the symbolic contradiction")
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.set_defaults(func=cmd_transversal)

    o = sub.add_parser("oracle-check", help="compare the tableau engine with dense simulation")
    o.add_argument("--samples", type=int, default=1000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--max-n", type=int, default=6)
    o.add_argument("--max-gates", type=int, default=50)
    o.add_argument("--spec", action="append", help="also check codespace equivalence of synth SPEC")
    o.add_argument("--format", choices=("text", "json"), default="text")
    o.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, CodeError, ValueError) as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

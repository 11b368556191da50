"""Synthesis, verification and fault audit of logical Clifford Trotter circuits
on the [[n, n-2, 2]] code family."""

from .codes import StabilizerCode, family_code, load_code, load_fixture
from .depth import (
    bound_corollary13,
    bound_theorem11,
    bound_theorem12,
    paper_depth,
    scaling_table,
)
from .engine import (
    CliffordCircuit,
    Gate,
    MappingConstraint,
    check_constraints,
    conjugate,
    fix_signs,
    parse_circuit,
    parse_constraints,
)
from .flags import audit_single_faults, insert_flags, propagate_fault, syndrome_detectable
from .pauli import PauliOp, format_pauli, parse_pauli
from .qsk import QskSpec, build_logical_qsk, physical_constraints
from .synth import SynthesisError, SynthOptions, SynthResult, synth, synth_single_logical_h
from .transversal import check_transversal

__all__ = [
    "CliffordCircuit",
    "Gate",
    "MappingConstraint",
    "PauliOp",
    "QskSpec",
    "StabilizerCode",
    "SynthOptions",
    "SynthResult",
    "SynthesisError",
    "audit_single_faults",
    "bound_corollary13",
    "bound_theorem11",
    "bound_theorem12",
    "build_logical_qsk",
    "check_constraints",
    "check_transversal",
    "conjugate",
    "family_code",
    "fix_signs",
    "format_pauli",
    "insert_flags",
    "load_code",
    "load_fixture",
    "paper_depth",
    "parse_circuit",
    "parse_constraints",
    "parse_pauli",
    "physical_constraints",
    "propagate_fault",
    "scaling_table",
    "synth",
    "synth_single_logical_h",
    "syndrome_detectable",
]

"""Depth accounting and closed-form depth bounds."""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import CliffordCircuit, Gate


@dataclass(frozen=True)
class DepthSummary:
    paper_depth: int
    asap_depth: int
    two_qubit_count: int
    single_qubit_layers: int
    bounds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "paper": self.paper_depth,
            "asap": self.asap_depth,
            "two_qubit_gates": self.two_qubit_count,
            "single_qubit_layers": self.single_qubit_layers,
            "bounds": dict(self.bounds),
        }


def _expand_swaps(gates):
    for g in gates:
        if g.kind == "SWAP":
            a, b = g.qubits
            yield from (Gate("CX", (a, b)), Gate("CX", (b, a)), Gate("CX", (a, b)))
        else:
            yield g


def paper_depth(c: CliffordCircuit, swap_as_cx: bool = False, bounds=None) -> DepthSummary:
    """Every two-qubit gate costs 1; runs of single-qubit gates are packed
    greedily, left to right, into qubit-disjoint layers costing 1 each.

    ``swap_as_cx`` charges a SWAP as three CNOTs.
    """
    gates = list(_expand_swaps(c.gates)) if swap_as_cx else list(c.gates)
    two = 0
    layers = 0
    busy: set[int] | None = None
    for g in gates:
        if g.is_two_qubit:
            two += 1
            busy = None
            continue
        q = g.qubits[0]
        if busy is None or q in busy:
            layers += 1
            busy = set()
        busy.add(q)
    level = [0] * (c.n + 1)
    for g in gates:
        t = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = t
    return DepthSummary(two + layers, max(level), two, layers, dict(bounds or {}))


def _check(k: int, h: int):
    if k < 2 or k % 2 or not 0 <= h <= k:
        raise ValueError(f"invalid (k, h) = ({k}, {h}); need even k >= 2 and 0 <= h <= k")


def bound_theorem11(k: int, h: int) -> int:
    """Solve-and-stitch without the identity gadget."""
    _check(k, h)
    if h % 2 == 0:
        return k * (k - 1) // 2 + 5
    return (k + 2) * (k + 1) // 2 + 5


def bound_theorem12(k: int, h: int) -> int:
    """With the logical identity gadget cancelling the X-part CZs."""
    _check(k, h)
    if h % 2 == 0:
        return (2 + 2 * h) * k - h * h - h + 6
    return (2 + 2 * h) * k - h * h + h + 7


def bound_corollary13(k: int, h: int) -> int:
    """Identity gadget plus the transversal-H/SWAP complement, for h > k/2."""
    _check(k, h)
    if 2 * h <= k:
        raise ValueError(f"complement bound needs h > k/2, got h={h}, k={k}")
    if h % 2 == 0:
        return k * (k + 1) - h * h + h + 9
    return k * (k + 3) - h * h - h + 10


def plotted_original(k: int) -> int:
    """Reference depth of the unoptimized circuit at even h without the sign layer."""
    return k * (k - 1) // 2 + 4


def applicable_bounds(k: int, h: int, identity: bool, complement: bool) -> dict:
    """Bound(s) that a circuit built with these options must meet.

    The complement wrap costs 3 layers on top of the bound for k - h
    Hadamards; with the identity gadget this is the corollary-13 formula.
    """
    if complement:
        hh = k - h
        if identity:
            return {"corollary13": bound_theorem12(k, hh) + 3}
        return {"theorem11_complement": bound_theorem11(k, hh) + 3}
    if identity:
        return {"theorem12": bound_theorem12(k, h)}
    return {"theorem11": bound_theorem11(k, h)}


@dataclass(frozen=True)
class ScalingRow:
    k: int
    depth_original: int
    depth_optimized: int
    bound_t11: int
    bound_t12: int


def scaling_table(h: int, k_range) -> list[ScalingRow]:
    """Measured depth with and without the identity gadget for fixed h."""
    from .qsk import QskSpec
    from .synth import SynthOptions, stitch
    from .codes import family_code

    rows = []
    for k in k_range:
        if k % 2 or h > k:
            raise ValueError(f"scaling needs even k >= h, got k={k}, h={h}")
        spec = QskSpec("X" * h + "Z" * (k - h))
        code = family_code(k + 2)
        plain = stitch(spec, code, SynthOptions(use_logical_identity=False, use_complement="off"))
        opt = stitch(spec, code, SynthOptions(use_logical_identity=True, use_complement="off"))
        rows.append(ScalingRow(k, plain.depth.paper_depth, opt.depth.paper_depth,
                               bound_theorem11(k, h), bound_theorem12(k, h)))
    return rows


def scaling_csv(rows) -> str:
    lines = ["k,depth_original,depth_optimized,bound_t11,bound_t12"]
    lines += [f"{r.k},{r.depth_original},{r.depth_optimized},{r.bound_t11},{r.bound_t12}" for r in rows]
    return "\n".join(lines) + "\n"

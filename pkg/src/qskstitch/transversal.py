"""Can transversal H or transversal P realize a logical Clifford on a code?

Two paths. The concrete path conjugates each encoded logical through the
transversal gate and tests membership of ``image * target`` in the stabilizer
group up to sign. The symbolic path treats the logical operators as unknown
binary vectors ``X_i = E(x_i, z_i)``, ``Z_i = E(a_i, b_i)``, collects the
linear relations the targets impose, and looks for a clash with the
commutation relations after linearizing the bilinear terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .codes import StabilizerCode, logical_coset
from .engine import MappingConstraint
from .pauli import PauliOp, format_pauli, group_sign, multiply
from .qsk import QskSpec, logical_mappings

GATES = ("H-all", "P-all")


def transversal_image(gate: str, p: PauliOp) -> PauliOp:
    """Image of ``p`` up to sign: H-all gives E(z, x), P-all gives E(x, x ^ z)."""
    if gate == "H-all":
        return PauliOp(p.n, p.z, p.x)
    if gate == "P-all":
        return PauliOp(p.n, p.x, p.x ^ p.z)
    raise ValueError(f"gate must be one of {GATES}, got {gate!r}")


def qsk_targets(k: int) -> list[MappingConstraint]:
    """Logical QSK mappings used as the default target on k logical qubits."""
    letters = "ZX" if k == 2 else "ZXZ" + "I" * (k - 3)
    if k < 2:
        raise ValueError("need at least two logical qubits")
    return logical_mappings(QskSpec(letters))


@dataclass
class FeasibilityVerdict:
    feasible: bool
    witness: str | None
    failures: list[str] = field(default_factory=list)
    relations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.feasible

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "witness": self.witness,
            "failures": list(self.failures),
            "relations": list(self.relations),
        }


def check_transversal(code: StabilizerCode, gate: str, targets=None) -> FeasibilityVerdict:
    """Concrete check of logical targets (on k qubits) against the code."""
    targets = qsk_targets(code.k) if targets is None else list(targets)
    failures = []
    for con in targets:
        if con.n != code.k:
            raise ValueError(f"target on {con.n} logical qubits, code has k={code.k}")
        image = transversal_image(gate, code.encode(con.input).unsigned())
        want = code.encode(con.output)
        diff = multiply(image, want)
        # anticommuting image and target give an anti-Hermitian product
        if not diff.is_hermitian or group_sign(code.stabilizers, diff.unsigned()) is None:
            failures.append(
                f"{format_pauli(con.input)} -> {format_pauli(con.output)}: "
                f"transversal image {format_pauli(image)} is not in the target coset"
            )
    if failures:
        return FeasibilityVerdict(False, failures[0], failures)
    return FeasibilityVerdict(True, None, [], [f"all {len(targets)} targets hold up to stabilizer"])


def transversal_logical_action(code: StabilizerCode, gate: str) -> list[MappingConstraint] | None:
    """Logical mappings the transversal gate induces, or None if it leaves the normalizer."""
    out = []
    for letter, ops in (("X", code.logical_x), ("Z", code.logical_z)):
        for i, op in enumerate(ops, 1):
            split = logical_coset(code, transversal_image(gate, op))
            if split is None:
                return None
            out.append(MappingConstraint(PauliOp.single(code.k, i, letter), split[0], "up_to_stabilizer", f"{letter}{i}"))
    return out


# Symbolic path. Symbols are numbered 4(i-1) + {0: x, 1: z, 2: a, 3: b}.

_NAMES = "xzab"


def _sym(kind: str, i: int) -> int:
    return 4 * (i - 1) + _NAMES.index(kind)


def _sym_name(s: int) -> str:
    return f"{_NAMES[s % 4]}_{s // 4 + 1}"


def _render_form(form: int) -> str:
    if not form:
        return "0"
    return " ⊕ ".join(_sym_name(s) for s in range(form.bit_length()) if form >> s & 1)


def _operator_forms(p: PauliOp) -> tuple[int, int]:
    """(x-part, z-part) linear forms of a logical Pauli in terms of the symbols."""
    fx = fz = 0
    for i in range(1, p.n + 1):
        bit = 1 << (i - 1)
        if p.x & bit:
            fx ^= 1 << _sym("x", i)
            fz ^= 1 << _sym("z", i)
        if p.z & bit:
            fx ^= 1 << _sym("a", i)
            fz ^= 1 << _sym("b", i)
    return fx, fz


@dataclass(frozen=True)
class Relation:
    """Linear relation ``form = 0`` tagged with the target it came from."""

    form: int
    source: str

    def render(self) -> str:
        return f"{self.source}: {_render_form(self.form)} = 0"


@dataclass(frozen=True)
class Bilinear:
    """``<P, Q>_s = value`` for a pair of logical operators."""

    left: str
    right: str
    value: int
    forms: tuple[int, int, int, int]  # Px, Pz, Qx, Qz

    def render(self) -> str:
        px, pz, qx, qz = (_short(f) for f in self.forms)
        return f"{px} {qz}ᵀ ⊕ {pz} {qx}ᵀ = {self.value}"


def _short(form: int) -> str:
    s = _render_form(form)
    return s if " " not in s else f"({s})"


@dataclass
class SymbolicResult:
    gate: str
    k: int
    relations: list[Relation]
    chains: list[str]
    commutation: list[Bilinear]
    contradiction: list[Bilinear] | None

    @property
    def infeasible(self) -> bool:
        return self.contradiction is not None

    def witness(self) -> str | None:
        if self.contradiction is None:
            return None
        lines = list(self.chains)
        lines += [b.render() for b in self.contradiction]
        lines.append("after substituting the relations, these commutation constraints sum to 0 = 1")
        return "\n".join(lines)


def derive_binary_relations(targets, gate: str) -> SymbolicResult:
    """Linear relations, chains and a commutation contradiction (if any)."""
    targets = list(targets)
    if not targets:
        raise ValueError("no targets")
    k = targets[0].n
    nsym = 4 * k
    relations = []
    for con in targets:
        ix, iz = _operator_forms(con.input)
        ox, oz = _operator_forms(con.output)
        gx, gz = (iz, ix) if gate == "H-all" else (ix, ix ^ iz)
        if gate not in GATES:
            raise ValueError(f"gate must be one of {GATES}, got {gate!r}")
        label = con.label or format_pauli(con.input)
        for form in (gx ^ ox, gz ^ oz):
            if form:
                relations.append(Relation(form, label))

    # eliminate x and a symbols first so reduced forms read in z and b
    order = [s for s in range(nsym) if _NAMES[s % 4] in "xa"] + [s for s in range(nsym) if _NAMES[s % 4] in "zb"]
    basis = _reduce_basis([r.form for r in relations], order)

    def reduce(form: int) -> int:
        for pivot, row in basis:
            if form >> pivot & 1:
                form ^= row
        return form

    chains = _chains(k, gate, reduce)

    ops = {}
    for i in range(1, k + 1):
        ops[f"X_{i}"] = ((1 << _sym("x", i)), (1 << _sym("z", i)))
        ops[f"Z_{i}"] = ((1 << _sym("a", i)), (1 << _sym("b", i)))
    names = list(ops)
    commutation = []
    for p, q in combinations(names, 2):
        value = int(p[2:] == q[2:] and p[0] != q[0])
        px, pz = ops[p]
        qx, qz = ops[q]
        commutation.append(Bilinear(p, q, value, (px, pz, qx, qz)))

    # linearize: each bilinear constraint becomes a set of unordered monomials
    monomial_index: dict[tuple[int, int], int] = {}
    rows = []
    for b in commutation:
        px, pz, qx, qz = (reduce(f) for f in b.forms)
        mono = _bilinear(px, qz) ^ _bilinear(pz, qx)
        mask = 0
        for m in mono:
            mask ^= 1 << monomial_index.setdefault(m, len(monomial_index))
        rows.append((mask, b.value))
    contradiction = _find_contradiction(rows)
    return SymbolicResult(
        gate, k, relations, chains, commutation,
        None if contradiction is None else [commutation[i] for i in contradiction],
    )


def _reduce_basis(forms, order) -> list[tuple[int, int]]:
    """Fully reduced row basis; pivots taken in ``order`` preference."""
    rank_of = {s: r for r, s in enumerate(order)}
    basis: list[tuple[int, int]] = []
    for f in forms:
        for pivot, row in basis:
            if f >> pivot & 1:
                f ^= row
        if not f:
            continue
        pivot = min((s for s in range(f.bit_length()) if f >> s & 1), key=rank_of.__getitem__)
        basis = [(p, r ^ f if r >> pivot & 1 else r) for p, r in basis]
        basis.append((pivot, f))
    return basis


def _bilinear(u: int, v: int) -> set[tuple[int, int]]:
    """Monomials of (sum u_s)(sum v_t)^T as a set under XOR, with s.t = t.s."""
    out: set[tuple[int, int]] = set()
    us = [s for s in range(u.bit_length()) if u >> s & 1]
    vs = [t for t in range(v.bit_length()) if v >> t & 1]
    for s in us:
        for t in vs:
            out ^= {(min(s, t), max(s, t))}
    return out


def _find_contradiction(rows) -> list[int] | None:
    """Smallest-first search for constraints whose linearized sum is 0 = 1."""
    for i, (mask, val) in enumerate(rows):
        if mask == 0 and val:
            return [i]
    for (i, (m1, v1)), (j, (m2, v2)) in combinations(enumerate(rows), 2):
        if m1 == m2 and v1 != v2:
            return [i, j]
    # general elimination; rows carry the set of originals they combine
    basis: list[tuple[int, int, int, int]] = []  # pivot, mask, value, combo
    for idx, (mask, val) in enumerate(rows):
        combo = 1 << idx
        for pivot, bm, bv, bc in basis:
            if mask >> pivot & 1:
                mask ^= bm
                val ^= bv
                combo ^= bc
        if mask:
            basis.append((mask.bit_length() - 1, mask, val, combo))
        elif val:
            return [t for t in range(len(rows)) if combo >> t & 1]
    return None


def _chains(k: int, gate: str, reduce) -> list[str]:
    """Group the natural per-operator forms into equal classes."""
    forms = []
    for i in range(1, k + 1):
        if gate == "H-all":
            forms.append((f"x_{i} ⊕ z_{i}", (1 << _sym("x", i)) | (1 << _sym("z", i))))
            forms.append((f"a_{i} ⊕ b_{i}", (1 << _sym("a", i)) | (1 << _sym("b", i))))
        else:
            forms.append((f"x_{i}", 1 << _sym("x", i)))
            forms.append((f"a_{i}", 1 << _sym("a", i)))
    classes: dict[int, list[str]] = {}
    for text, f in forms:
        classes.setdefault(reduce(f), []).append(text)
    lines = []
    for canon, members in classes.items():
        if canon == 0:
            if gate == "H-all":
                lines.append(", ".join(m.replace(" ⊕ ", " = ") for m in members))
            else:
                lines.append(" = ".join(members) + " = 0")
        elif len(members) > 1:
            tail = _render_form(canon)
            parts = members + ([tail] if tail not in members else [])
            lines.append(" = ".join(parts))
    return lines


def symbolic_verdict(targets, gate: str) -> FeasibilityVerdict:
    res = derive_binary_relations(targets, gate)
    rel = [r.render() for r in res.relations]
    if res.infeasible:
        return FeasibilityVerdict(False, res.witness(), [], rel)
    return FeasibilityVerdict(True, None, [], rel)


def instantiate(relations, code: StabilizerCode) -> list[int]:
    """Evaluate each relation's form with the code's logical vectors (bit masks)."""
    vals = {}
    for i in range(1, code.k + 1):
        lx, lz = code.logical_x[i - 1], code.logical_z[i - 1]
        vals[_sym("x", i)], vals[_sym("z", i)] = lx.x, lx.z
        vals[_sym("a", i)], vals[_sym("b", i)] = lz.x, lz.z
    out = []
    for r in relations:
        v = 0
        for s in range(r.form.bit_length()):
            if r.form >> s & 1:
                v ^= vals[s]
        out.append(v)
    return out


__all__ = [
    "GATES",
    "FeasibilityVerdict",
    "SymbolicResult",
    "check_transversal",
    "derive_binary_relations",
    "instantiate",
    "qsk_targets",
    "symbolic_verdict",
    "transversal_image",
    "transversal_logical_action",
]

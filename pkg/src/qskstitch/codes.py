"""Stabilizer code descriptions and group-membership utilities."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from itertools import combinations

from . import gf2
from .engine import CliffordCircuit, conjugate
from .pauli import PauliOp, format_pauli, group_sign, multiply, parse_pauli, symplectic_product


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    k: int
    stabilizers: tuple[PauliOp, ...]
    logical_x: tuple[PauliOp, ...]
    logical_z: tuple[PauliOp, ...]
    name: str = ""

    def __post_init__(self):
        for field_name in ("stabilizers", "logical_x", "logical_z"):
            object.__setattr__(self, field_name, tuple(getattr(self, field_name)))

    def validate(self) -> StabilizerCode:
        n, k = self.n, self.k
        if len(self.stabilizers) != n - k:
            raise CodeError(f"expected {n - k} stabilizer generators, got {len(self.stabilizers)}")
        if len(self.logical_x) != k or len(self.logical_z) != k:
            raise CodeError(f"expected {k} logical X and Z operators")
        everything = list(self.stabilizers) + list(self.logical_x) + list(self.logical_z)
        for p in everything:
            if p.n != n:
                raise CodeError(f"{format_pauli(p)} is not on {n} qubits")
            if not p.is_hermitian:
                raise CodeError(f"{format_pauli(p)} is not Hermitian")
        stabs = list(self.stabilizers)
        for (i, s), (j, t) in combinations(enumerate(stabs, 1), 2):
            if symplectic_product(s, t):
                raise CodeError(f"stabilizers S{i} and S{j} anticommute")
        if gf2.rank(s.x | (s.z << n) for s in stabs) != len(stabs):
            raise CodeError("stabilizer generators are not independent (rank deficient)")
        # with independent commuting generators, -I is in the group only via signs;
        # independence rules out a nontrivial product equal to +-I
        for i, s in enumerate(stabs, 1):
            if s.is_identity:
                raise CodeError(f"stabilizer S{i} is the identity")
        for name, ops in (("X", self.logical_x), ("Z", self.logical_z)):
            for i, op in enumerate(ops, 1):
                for j, s in enumerate(stabs, 1):
                    if symplectic_product(op, s):
                        raise CodeError(f"logical {name}{i} anticommutes with stabilizer S{j}")
        for i in range(k):
            for j in range(k):
                want = int(i == j)
                if symplectic_product(self.logical_x[i], self.logical_z[j]) != want:
                    raise CodeError(f"logical X{i + 1} and Z{j + 1} have the wrong commutation")
                if i < j:
                    if symplectic_product(self.logical_x[i], self.logical_x[j]):
                        raise CodeError(f"logical X{i + 1} and X{j + 1} anticommute")
                    if symplectic_product(self.logical_z[i], self.logical_z[j]):
                        raise CodeError(f"logical Z{i + 1} and Z{j + 1} anticommute")
        return self

    def logical_y(self, i: int) -> PauliOp:
        """Y-bar_i = i X-bar_i Z-bar_i for 1-based ``i``."""
        p = multiply(self.logical_x[i - 1], self.logical_z[i - 1])
        return PauliOp(p.n, p.x, p.z, p.phase + 1)

    def encode(self, logical: PauliOp) -> PauliOp:
        """Physical representative of a logical Pauli on k qubits."""
        if logical.n != self.k:
            raise ValueError(f"logical Pauli on {logical.n} qubits, code has k={self.k}")
        acc = PauliOp(self.n, 0, 0, logical.phase + (logical.x & logical.z).bit_count())
        for i in range(self.k):
            if logical.x >> i & 1:
                acc = multiply(acc, self.logical_x[i])
        for i in range(self.k):
            if logical.z >> i & 1:
                acc = multiply(acc, self.logical_z[i])
        return acc

    def to_doc(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "stabilizers": [format_pauli(p, dense=True) for p in self.stabilizers],
            "logical_x": [format_pauli(p, dense=True) for p in self.logical_x],
            "logical_z": [format_pauli(p, dense=True) for p in self.logical_z],
        }


def family_code(n: int) -> StabilizerCode:
    """The [[n, n-2, 2]] code with X-bar_i = X_1 X_{i+1}, Z-bar_i = Z_{i+1} Z_n."""
    if n < 4 or n % 2:
        raise CodeError(f"family codes need even n >= 4, got {n}")
    full = (1 << n) - 1
    stabs = (PauliOp(n, full, 0), PauliOp(n, 0, full))
    lx = tuple(PauliOp(n, 1 | (1 << i), 0) for i in range(1, n - 1))
    lz = tuple(PauliOp(n, 0, (1 << i) | (1 << (n - 1))) for i in range(1, n - 1))
    return StabilizerCode(n, n - 2, stabs, lx, lz, name=f"[[{n},{n - 2},2]]").validate()


def is_family_code(code: StabilizerCode) -> bool:
    if code.n < 4 or code.n % 2:
        return False
    ref = family_code(code.n)
    return (
        code.k == ref.k
        and code.stabilizers == ref.stabilizers
        and code.logical_x == ref.logical_x
        and code.logical_z == ref.logical_z
    )


def load_code(doc) -> StabilizerCode:
    """Build a code from a dict (or JSON text) and validate it."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        n, k = int(doc["n"]), int(doc["k"])
        stabs = [parse_pauli(s, n) for s in doc["stabilizers"]]
        lx = [parse_pauli(s, n) for s in doc["logical_x"]]
        lz = [parse_pauli(s, n) for s in doc["logical_z"]]
    except KeyError as exc:
        raise CodeError(f"code document missing field {exc}") from None
    return StabilizerCode(n, k, stabs, lx, lz, name=doc.get("name", "")).validate()


def load_fixture(name: str) -> StabilizerCode:
    """Load a shipped code document such as ``"hgp_20_4_2"``."""
    text = resources.files("qskstitch.data").joinpath(f"codes/{name}.json").read_text()
    return load_code(text)


def in_stabilizer_group(code: StabilizerCode, p: PauliOp) -> int | None:
    """+1 if ``p`` is in the stabilizer group, -1 if ``-p`` is, None otherwise."""
    if p.n != code.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {code.n}")
    return group_sign(code.stabilizers, p)


def in_normalizer(code: StabilizerCode, p: PauliOp) -> bool:
    return all(symplectic_product(p, s) == 0 for s in code.stabilizers)


PRESERVATION = ("exact", "sign_flip", "other_element", "not_preserved")


@dataclass(frozen=True)
class PreservationReport:
    images: tuple[PauliOp, ...]
    verdicts: tuple[str, ...]

    @property
    def all_exact(self) -> bool:
        return all(v == "exact" for v in self.verdicts)

    @property
    def preserved(self) -> bool:
        """Group preserved (signs included), generators possibly permuted."""
        return all(v in ("exact", "other_element") for v in self.verdicts)

    def to_dict(self) -> list[dict]:
        return [{"image": format_pauli(p), "verdict": v} for p, v in zip(self.images, self.verdicts)]


def check_stabilizer_preservation(code: StabilizerCode, c: CliffordCircuit) -> PreservationReport:
    if c.n < code.n:
        raise ValueError(f"circuit on {c.n} qubits, code on {code.n}")
    images, verdicts = [], []
    for s in code.stabilizers:
        lifted = PauliOp(c.n, s.x, s.z, s.phase)
        img = conjugate(c, lifted)
        data_img = PauliOp(code.n, img.x & ((1 << code.n) - 1), img.z & ((1 << code.n) - 1), img.phase)
        if img.n != code.n and (img.x >> code.n or img.z >> code.n):
            verdicts.append("not_preserved")
        elif data_img == s:
            verdicts.append("exact")
        elif data_img.same_up_to_sign(s):
            verdicts.append("sign_flip")
        else:
            sgn = in_stabilizer_group(code, data_img)
            verdicts.append("other_element" if sgn == 1 else "not_preserved")
        images.append(data_img)
    return PreservationReport(tuple(images), tuple(verdicts))


def logical_coset(code: StabilizerCode, p: PauliOp):
    """Split a normalizer element into (logical Pauli on k qubits, stabilizer part).

    Returns None when ``p`` is outside the normalizer.
    """
    if not in_normalizer(code, p):
        return None
    k = code.k
    # logical content read off by commutation with the logical basis
    lx = lz = 0
    for i in range(k):
        if symplectic_product(p, code.logical_z[i]):
            lx |= 1 << i
        if symplectic_product(p, code.logical_x[i]):
            lz |= 1 << i
    rep = code.encode(PauliOp(k, lx, lz))
    rest = multiply(rep, p)
    if group_sign(code.stabilizers, PauliOp(p.n, rest.x, rest.z)) is None:
        raise AssertionError("normalizer decomposition failed")
    return PauliOp(k, lx, lz), rest

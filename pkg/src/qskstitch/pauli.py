"""Signed Pauli operators in binary symplectic form.

An operator is ``i**phase * E(x, z)`` where ``E(x, z)`` is the Hermitian
Pauli with X where ``x`` has a bit set, Z where ``z`` does and Y where both do.
Bit vectors are packed into Python ints; bit ``j`` is qubit ``j + 1``.
Hermitian operators carry an even phase (0 or 2, i.e. sign +1 or -1);
odd phases only show up transiently in products.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_LETTERS = "IXZY"  # index = x | (z << 1)
_TOKEN = re.compile(r"([IXYZ])(\d+)$")


class PhaseError(ValueError):
    """Raised when a product is not Hermitian but a Hermitian result was required."""


@dataclass(frozen=True)
class PauliOp:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bit vector wider than n")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction helpers
    @classmethod
    def identity(cls, n: int) -> PauliOp:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, sign: int = 1) -> PauliOp:
        """Single-qubit Pauli ``letter`` on 1-based ``qubit``."""
        if not 1 <= qubit <= n:
            raise ValueError(f"qubit {qubit} out of range [1, {n}]")
        code = _LETTERS.index(letter)
        bit = 1 << (qubit - 1)
        return cls(n, bit if code & 1 else 0, bit if code & 2 else 0, 0 if sign > 0 else 2)

    @classmethod
    def from_bits(cls, a, b, sign: int = 1) -> PauliOp:
        """Build from two equal-length 0/1 sequences."""
        if len(a) != len(b):
            raise ValueError("a and b differ in length")
        return cls(len(a), _pack(a), _pack(b), 0 if sign > 0 else 2)

    # views
    @property
    def sign(self) -> int:
        if self.phase & 1:
            raise PhaseError(f"operator carries phase i^{self.phase}, not a sign")
        return -1 if self.phase == 2 else 1

    @property
    def is_hermitian(self) -> bool:
        return not self.phase & 1

    @property
    def a(self) -> list[int]:
        return _unpack(self.x, self.n)

    @property
    def b(self) -> list[int]:
        return _unpack(self.z, self.n)

    @property
    def is_identity(self) -> bool:
        return not (self.x or self.z)

    @property
    def support(self) -> int:
        return self.x | self.z

    def letter(self, qubit: int) -> str:
        j = qubit - 1
        return _LETTERS[((self.x >> j) & 1) | (((self.z >> j) & 1) << 1)]

    def unsigned(self) -> PauliOp:
        return PauliOp(self.n, self.x, self.z)

    def negate(self) -> PauliOp:
        return PauliOp(self.n, self.x, self.z, self.phase + 2)

    def with_sign(self, sign: int) -> PauliOp:
        return PauliOp(self.n, self.x, self.z, 0 if sign > 0 else 2)

    def same_up_to_sign(self, other: PauliOp) -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def __mul__(self, other: PauliOp) -> PauliOp:
        return multiply(self, other)

    def __str__(self) -> str:
        return format_pauli(self)


def _pack(bits) -> int:
    v = 0
    for j, bit in enumerate(bits):
        if bit:
            v |= 1 << j
    return v


def _unpack(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


def _check_dims(p: PauliOp, q: PauliOp):
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")


def symplectic_product(p: PauliOp, q: PauliOp) -> int:
    """0 if ``p`` and ``q`` commute, 1 if they anticommute."""
    _check_dims(p, q)
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) & 1


def commutes(p: PauliOp, q: PauliOp) -> bool:
    return symplectic_product(p, q) == 0


def multiply(p: PauliOp, q: PauliOp, hermitian: bool = False) -> PauliOp:
    """Operator product ``p @ q`` with the global phase tracked exactly.

    With ``hermitian=True`` a product carrying +-i raises PhaseError.
    """
    _check_dims(p, q)
    # E(x,z) = i^{x.z} X^x Z^z, so moving Z^{z1} past X^{x2} costs (-1)^{z1.x2}
    x, z = p.x ^ q.x, p.z ^ q.z
    k = (
        p.phase + q.phase
        + (p.x & p.z).bit_count()
        + (q.x & q.z).bit_count()
        + 2 * (p.z & q.x).bit_count()
        - (x & z).bit_count()
    )
    r = PauliOp(p.n, x, z, k)
    if hermitian and not r.is_hermitian:
        raise PhaseError(f"product {format_pauli(p)} * {format_pauli(q)} is not Hermitian")
    return r


def product(ops, n: int | None = None, hermitian: bool = False) -> PauliOp:
    """Left-to-right product of an iterable of PauliOps."""
    ops = list(ops)
    if not ops:
        if n is None:
            raise ValueError("empty product needs n")
        return PauliOp.identity(n)
    acc = ops[0]
    for op in ops[1:]:
        acc = multiply(acc, op)
    if hermitian and not acc.is_hermitian:
        raise PhaseError("product is not Hermitian")
    return acc


def weight(p: PauliOp) -> int:
    return p.support.bit_count()


def parse_pauli(text: str, n: int) -> PauliOp:
    """Parse ``"-XZIY"`` (dense) or ``"-X1 Z2 Y4"`` (subscripted) text."""
    s = text.strip()
    sign = 1
    if s.startswith(("-", "+")):
        sign = -1 if s[0] == "-" else 1
        s = s[1:].strip()
    if not s:
        raise ValueError("empty Pauli string")
    if s == "I":
        return PauliOp(n, 0, 0, 0 if sign > 0 else 2)
    tokens = s.split()
    if len(tokens) == 1 and not any(ch.isdigit() for ch in s):
        if len(s) != n:
            raise ValueError(f"dense Pauli {s!r} has length {len(s)}, expected {n}")
        x = z = 0
        for j, ch in enumerate(s):
            if ch not in _LETTERS:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            code = _LETTERS.index(ch)
            x |= (code & 1) << j
            z |= ((code >> 1) & 1) << j
        return PauliOp(n, x, z, 0 if sign > 0 else 2)
    x = z = 0
    seen = set()
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"malformed Pauli token {tok!r}")
        letter, idx = m.group(1), int(m.group(2))
        if not 1 <= idx <= n:
            raise ValueError(f"qubit index {idx} out of range [1, {n}]")
        if idx in seen:
            raise ValueError(f"duplicate qubit index {idx} in {text!r}")
        seen.add(idx)
        code = _LETTERS.index(letter)
        x |= (code & 1) << (idx - 1)
        z |= ((code >> 1) & 1) << (idx - 1)
    return PauliOp(n, x, z, 0 if sign > 0 else 2)


def format_pauli(p: PauliOp, dense: bool = False) -> str:
    """Subscripted text like ``"-X1 Y2"``; ``dense=True`` gives ``"-XYII"``."""
    if p.phase == 0:
        prefix = ""
    elif p.phase == 2:
        prefix = "-"
    else:
        prefix = "i" if p.phase == 1 else "-i"
    if dense:
        return prefix + "".join(p.letter(q) for q in range(1, p.n + 1))
    if p.is_identity:
        return prefix + "I"
    body = " ".join(f"{p.letter(q)}{q}" for q in range(1, p.n + 1) if p.letter(q) != "I")
    return prefix + body


def group_sign(generators, p: PauliOp) -> int | None:
    """Locate ``p`` in the group generated by commuting Hermitian ``generators``.

    Returns +1 if ``p`` is a group element, -1 if ``-p`` is, None if neither.
    """
    from .gf2 import express

    gens = list(generators)
    if not gens:
        return (1 if p.sign > 0 else -1) if p.is_identity else None
    n = p.n
    mask = express([g.x | (g.z << n) for g in gens], p.x | (p.z << n))
    if mask is None:
        return None
    elem = PauliOp.identity(n)
    for i, g in enumerate(gens):
        if mask >> i & 1:
            elem = multiply(elem, g, hermitian=True)
    return 1 if elem.phase == p.phase else -1

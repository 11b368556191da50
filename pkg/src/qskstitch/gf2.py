"""Small GF(2) linear algebra on rows packed into Python ints."""

from __future__ import annotations


def rank(rows) -> int:
    return len(_echelon(list(rows))[0])


def _echelon(rows):
    """Return (pivot rows, pivot bits, combination masks) of a reduced basis."""
    basis: list[int] = []
    pivots: list[int] = []
    combos: list[int] = []
    for i, r in enumerate(rows):
        c = 1 << i
        for b, p, m in zip(basis, pivots, combos):
            if r & p:
                r ^= b
                c ^= m
        if r:
            p = r & -r
            for j in range(len(basis)):
                if basis[j] & p:
                    basis[j] ^= r
                    combos[j] ^= c
            basis.append(r)
            pivots.append(p)
            combos.append(c)
    return basis, pivots, combos


def express(rows, target: int) -> int | None:
    """Find a mask ``m`` with XOR of ``rows[i]`` for bits ``i`` of ``m`` equal to ``target``.

    Returns None when ``target`` is outside the row span.
    """
    basis, pivots, combos = _echelon(list(rows))
    mask = 0
    for b, p, m in zip(basis, pivots, combos):
        if target & p:
            target ^= b
            mask ^= m
    return mask if target == 0 else None


def solve(equations) -> int | None:
    """Solve ``popcount(coef & v) % 2 == rhs`` for every ``(coef, rhs)``.

    Returns one solution ``v`` (free variables set to 0) or None if inconsistent.
    """
    rows: list[list[int]] = []  # [coef, rhs, pivot]; pivots appear in one row only
    for coef, rhs in equations:
        rhs &= 1
        for c, r, p in rows:
            if coef & p:
                coef ^= c
                rhs ^= r
        if coef == 0:
            if rhs:
                return None
            continue
        p = coef & -coef
        for row in rows:
            if row[0] & p:
                row[0] ^= coef
                row[1] ^= rhs
        rows.append([coef, rhs, p])
    v = 0
    for c, r, p in rows:
        if r:
            v |= p
    return v

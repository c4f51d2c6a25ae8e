"""Exact linear algebra: integer kernels, rational/F_p nullspaces, trial division."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import InvkitError

__all__ = [
    "integer_kernel",
    "rational_kernel",
    "modp_kernel",
    "primitive",
    "factorint",
    "TRIAL_DIVISION_LIMIT",
]

TRIAL_DIVISION_LIMIT = 10**6


def primitive(v: Sequence[int]) -> list[int]:
    """Divide out the content and make the first nonzero entry positive."""
    g = 0
    for a in v:
        g = gcd(g, a)
    if g == 0:
        return list(v)
    out = [a // g for a in v]
    for a in out:
        if a:
            if a < 0:
                out = [-b for b in out]
            break
    return out


def integer_kernel(matrix: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """A Z-basis of ``{v in Z^n : A v = 0}``.

    Unimodular row reduction of ``[A^T | I]``: rows whose left block vanishes
    carry kernel vectors in their right block.  ``ncols`` is needed when the
    matrix has no rows.
    """
    rows_a = [list(map(int, r)) for r in matrix]
    n = ncols if ncols is not None else (len(rows_a[0]) if rows_a else 0)
    m = len(rows_a)
    work = []
    for j in range(n):
        left = [rows_a[i][j] for i in range(m)]
        right = [1 if k == j else 0 for k in range(n)]
        work.append(left + right)
    pivot = 0
    for col in range(m):
        while True:
            nz = [r for r in range(pivot, n) if work[r][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda r: (abs(work[r][col]), r))
            work[pivot], work[best] = work[best], work[pivot]
            prow = work[pivot]
            clean = True
            for r in range(pivot + 1, n):
                a = work[r][col]
                if a:
                    q = a // prow[col]
                    if q:
                        work[r] = [x - q * y for x, y in zip(work[r], prow)]
                    if work[r][col]:
                        clean = False
            if clean:
                pivot += 1
                break
    basis = [primitive(row[m:]) for row in work[pivot:]]
    return _size_reduce(basis)


def _sign_normal(v: list[int]) -> list[int]:
    for a in v:
        if a:
            return v if a > 0 else [-b for b in v]
    return v


def _size_reduce(basis: list[list[int]]) -> list[list[int]]:
    # cheap pairwise reduction keeps certificates readable; the lattice is unchanged
    basis = [list(b) for b in basis]
    changed = True
    rounds = 0
    while changed and rounds < 50:
        changed = False
        rounds += 1
        for i in range(len(basis)):
            for j in range(len(basis)):
                if i == j:
                    continue
                bi, bj = basis[i], basis[j]
                nj = sum(x * x for x in bj)
                if nj == 0:
                    continue
                dot = sum(x * y for x, y in zip(bi, bj))
                q = round(Fraction(dot, nj))
                if q:
                    cand = [x - q * y for x, y in zip(bi, bj)]
                    if sum(x * x for x in cand) < sum(x * x for x in bi):
                        basis[i] = cand
                        changed = True
    basis = [_sign_normal(b) for b in basis]
    basis.sort(key=lambda b: (sum(x * x for x in b), [-abs(x) for x in b], b))
    return basis


def rational_kernel(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list[int]]:
    """Integer basis (primitive vectors) of the rational nullspace."""
    rows = []
    for r in matrix:
        r = [Fraction(x) for x in r]
        den = 1
        for x in r:
            den = lcm(den, x.denominator)
        rows.append([int(x * den) for x in r])
    return integer_kernel(rows, ncols)


def modp_kernel(matrix: Sequence[Sequence[int]], p: int, ncols: int | None = None) -> list[list[int]]:
    """Nullspace over F_p, entries lifted to the symmetric range."""
    rows = [[int(x) % p for x in r] for r in matrix]
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc] % p
        basis.append([x - p if x > p // 2 else x for x in v])
    return basis


def factorint(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` by trial division up to 10^6."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor zero")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        if d > TRIAL_DIVISION_LIMIT:
            raise InvkitError(
                f"{n} has no factor below {TRIAL_DIVISION_LIMIT}; trial division limit exceeded"
            )
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out

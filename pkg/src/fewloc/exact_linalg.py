"""Exact rational and modular-prime linear algebra.

Two routes with one-sided soundness each:
  * modular: Gaussian elimination over a seeded prime.  A nonzero pivot
    minor mod p has nonzero integer determinant, so the returned rank is a
    certified lower bound on the rational rank.
  * exact: fraction-free (Bareiss) elimination over arbitrary-precision
    integers; rank and kernels are exact.

Kernel vectors are always produced and re-verified in exact arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - gmpy2 present in normal installs
    mpz = int

# Primes just under 2**25: int64 matmuls with inner dimension up to ~2000
# stay below 2**63 without intermediate reduction.
PRIME_TABLE = (
    33554393, 33554383, 33554371, 33554347, 33554341,
    33554317, 33554291, 33554273, 33554267, 33554249,
)


def pick_prime(seed: int = 0, offset: int = 0) -> int:
    rng = random.Random(seed)
    idx = rng.randrange(len(PRIME_TABLE))
    return PRIME_TABLE[(idx + offset) % len(PRIME_TABLE)]


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, data: Iterable[Sequence]) -> "RationalMatrix":
        rows = tuple(tuple(Fraction(x) for x in row) for row in data)
        if not rows:
            raise ValueError("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(rows=len(rows), cols=ncols, entries=rows)

    def integer_rows(self) -> list[list[int]]:
        """Clear denominators row by row (rank-invariant scaling)."""
        out = []
        for row in self.entries:
            denom = 1
            for x in row:
                denom = lcm(denom, x.denominator)
            out.append([int(x * denom) for x in row])
        return out

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            rows=self.cols, cols=self.rows,
            entries=tuple(zip(*self.entries)),
        )


@dataclass(frozen=True)
class RankCertificate:
    rank_lower_bound: int
    method: str  # "modular_prime(p)" or "exact_rational"
    exact: bool
    witness_rows: tuple[int, ...] | None = None
    witness_cols: tuple[int, ...] | None = None


def mod_echelon(a: np.ndarray, p: int) -> tuple[int, list[int], list[int], np.ndarray]:
    """In-place row echelon of ``a`` mod p.

    Returns (rank, pivot_row_original_indices, pivot_cols, echelon_matrix).
    """
    m, n = a.shape
    a = np.mod(a, p)
    rowidx = list(range(m))
    piv_rows: list[int] = []
    piv_cols: list[int] = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
            rowidx[r], rowidx[i] = rowidx[i], rowidx[r]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        below = a[r + 1:, c]
        mask = below != 0
        if mask.any():
            a[r + 1:][mask] = (a[r + 1:][mask] - below[mask, None] * a[r][None, :]) % p
        piv_rows.append(rowidx[r])
        piv_cols.append(c)
        r += 1
    return r, piv_rows, piv_cols, a


def mod_kernel(a: np.ndarray, p: int) -> np.ndarray:
    """Right kernel basis mod p (rows of the result are kernel vectors)."""
    m, n = a.shape
    rank, _, piv_cols, ech = mod_echelon(a.copy(), p)
    # back-substitute to reduced echelon
    for k in range(rank - 1, -1, -1):
        c = piv_cols[k]
        above = ech[:k, c]
        mask = above != 0
        if mask.any():
            ech[:k][mask] = (ech[:k][mask] - above[mask, None] * ech[k][None, :]) % p
    free = [c for c in range(n) if c not in set(piv_cols)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for bi, fc in enumerate(free):
        basis[bi, fc] = 1
        for k, c in enumerate(piv_cols):
            basis[bi, c] = (-int(ech[k, fc])) % p
    return basis


def mod_inverse_matrix(a: np.ndarray, p: int) -> np.ndarray | None:
    """Inverse of a square matrix mod p, or None when singular."""
    n = a.shape[0]
    aug = np.concatenate([np.mod(a, p), np.eye(n, dtype=np.int64)], axis=1)
    rank, _, piv_cols, ech = mod_echelon(aug, p)
    if rank < n or piv_cols[:n] != list(range(n)):
        return None
    for k in range(n - 1, -1, -1):
        above = ech[:k, k]
        mask = above != 0
        if mask.any():
            ech[:k][mask] = (ech[:k][mask] - above[mask, None] * ech[k][None, :]) % p
    return ech[:, n:]


def bareiss_echelon(data: list[list[int]]) -> tuple[int, list[int], list[int], list[list]]:
    """Fraction-free elimination over the integers.

    Returns (rank, pivot_rows, pivot_cols, echelon) with exact integer
    entries; the echelon rows are the Bareiss-transformed pivot rows.
    """
    a = [[mpz(x) for x in row] for row in data]
    m = len(a)
    n = len(a[0]) if m else 0
    piv_rows: list[int] = []
    piv_cols: list[int] = []
    rowidx = list(range(m))
    prev = mpz(1)
    r = 0
    for c in range(n):
        if r >= m:
            break
        sel = None
        for i in range(r, m):
            if a[i][c]:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            a[r], a[sel] = a[sel], a[r]
            rowidx[r], rowidx[sel] = rowidx[sel], rowidx[r]
        pivot = a[r][c]
        for i in range(r + 1, m):
            ai = a[i]
            ar = a[r]
            f = ai[c]
            if f:
                for j in range(c, n):
                    ai[j] = (pivot * ai[j] - f * ar[j]) // prev
            else:
                # the pivot scaling keeps later divisions exact
                for j in range(c, n):
                    ai[j] = (pivot * ai[j]) // prev
        prev = pivot
        piv_rows.append(rowidx[r])
        piv_cols.append(c)
        r += 1
    return r, piv_rows, piv_cols, a


def exact_rank(data: list[list[int]]) -> int:
    rank, _, _, _ = bareiss_echelon(data)
    return rank


def integer_kernel(data: list[list[int]]) -> list[list[int]]:
    """Exact right kernel basis of an integer matrix, scaled to integers.

    Each basis vector is re-verified against the input matrix.
    """
    m = len(data)
    n = len(data[0]) if m else 0
    rank, _, piv_cols, ech = bareiss_echelon(data)
    pivset = set(piv_cols)
    free = [c for c in range(n) if c not in pivset]
    basis: list[list[int]] = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for k in range(rank - 1, -1, -1):
            c = piv_cols[k]
            s = Fraction(0)
            row = ech[k]
            for j in range(c + 1, n):
                if row[j] and vec[j]:
                    s += Fraction(int(row[j])) * vec[j]
            vec[c] = -s / Fraction(int(row[c]))
        denom = 1
        for x in vec:
            denom = lcm(denom, x.denominator)
        ivec = [int(x * denom) for x in vec]
        g = 0
        for x in ivec:
            g = gcd(g, abs(x))
        if g > 1:
            ivec = [x // g for x in ivec]
        basis.append(ivec)
    for vec in basis:
        for row in data:
            assert sum(int(r) * x for r, x in zip(row, vec)) == 0, "kernel verification failed"
    return basis


def rank(matrix: RationalMatrix, mode: str = "modular", seed: int = 0) -> RankCertificate:
    """Rank certificate; modular gives a sound lower bound, exact is exact."""
    if mode not in ("modular", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    data = matrix.integer_rows()
    if mode == "exact":
        r, prows, pcols, _ = bareiss_echelon(data)
        return RankCertificate(
            rank_lower_bound=r, method="exact_rational", exact=True,
            witness_rows=tuple(prows), witness_cols=tuple(pcols),
        )
    p = pick_prime(seed)
    arr = np.array([[x % p for x in row] for row in data], dtype=np.int64)
    r, prows, pcols, _ = mod_echelon(arr, p)
    return RankCertificate(
        rank_lower_bound=r, method=f"modular_prime({p})", exact=False,
        witness_rows=tuple(prows), witness_cols=tuple(pcols),
    )


def kernel_basis(matrix: RationalMatrix, side: str = "right") -> list[list[Fraction]]:
    """Exact rational basis of the requested null space."""
    if side == "left":
        matrix = matrix.transpose()
    elif side != "right":
        raise ValueError(f"unknown side {side!r}")
    data = matrix.integer_rows()
    ibasis = integer_kernel(data)
    return [[Fraction(x) for x in vec] for vec in ibasis]

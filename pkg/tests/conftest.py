"""Shared oracles for the test suite.

Oracle policy: values tagged [DERIVED] were computed by an independent
method (usually the Fraction-Gauss routines below, or by hand) and then
frozen; values tagged [TRIVIAL] follow directly from definitions.
"""

from fractions import Fraction


def gauss_rank(rows):
    """Independent rank oracle: plain Gaussian elimination over Fraction."""
    a = [[Fraction(x) for x in row] for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    rank = 0
    for c in range(n):
        piv = next((i for i in range(rank, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = a[rank][c]
        a[rank] = [x / inv for x in a[rank]]
        for i in range(m):
            if i != rank and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == m:
            break
    return rank


def edge_length_derivative(placement, vel, u, v):
    """d/dt |f(u)-f(v)|^2 along the velocity field, up to a factor of 2."""
    return sum((placement[u][k] - placement[v][k]) * (vel[u][k] - vel[v][k])
               for k in range(len(placement[u])))

"""Abstract simplicial 2-complexes: validation, links, surface invariants.

Triangles are stored as sorted 3-tuples of integer vertex ids.  A complex
is immutable once built; every operation returns fresh data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class ComplexError(ValueError):
    """Rejected input: not a valid simplicial 2-complex."""


class NotASurfaceError(ComplexError):
    """Structural failure of a closed-surface criterion."""


def _norm_triangle(t: Sequence[int]) -> tuple[int, int, int]:
    if len(t) != 3:
        raise ComplexError(f"triangle needs 3 vertices, got {tuple(t)}")
    a, b, c = sorted(int(x) for x in t)
    if a == b or b == c:
        raise ComplexError(f"degenerate triangle {tuple(t)}")
    if a < 0:
        raise ComplexError(f"negative vertex id in {tuple(t)}")
    return (a, b, c)


@dataclass(frozen=True)
class Complex2:
    vertices: tuple[int, ...]
    triangles: frozenset[tuple[int, int, int]]
    edges: frozenset[tuple[int, int]] = field(init=False)

    def __post_init__(self):
        edges = set()
        for a, b, c in self.triangles:
            edges.add((a, b))
            edges.add((a, c))
            edges.add((b, c))
        object.__setattr__(self, "edges", frozenset(edges))

    @classmethod
    def from_triangles(cls, triangle_list: Iterable[Sequence[int]]) -> "Complex2":
        tris = []
        seen = set()
        for t in triangle_list:
            nt = _norm_triangle(t)
            if nt in seen:
                raise ComplexError(f"duplicate triangle {nt}")
            seen.add(nt)
            tris.append(nt)
        if not tris:
            raise ComplexError("empty triangle list")
        verts = sorted({v for t in tris for v in t})
        return cls(vertices=tuple(verts), triangles=frozenset(tris))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    def triangles_sorted(self) -> list[tuple[int, int, int]]:
        return sorted(self.triangles)

    def edge_triangles(self) -> dict[tuple[int, int], list[tuple[int, int, int]]]:
        out: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
        for t in self.triangles_sorted():
            a, b, c = t
            for e in ((a, b), (a, c), (b, c)):
                out.setdefault(e, []).append(t)
        return out

    def vertex_triangles(self) -> dict[int, list[tuple[int, int, int]]]:
        out: dict[int, list[tuple[int, int, int]]] = {v: [] for v in self.vertices}
        for t in self.triangles_sorted():
            for v in t:
                out[v].append(t)
        return out

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def degree(self, v: int) -> int:
        return len(self.adjacency()[v])


@dataclass(frozen=True)
class SurfaceReport:
    is_closed_surface: bool
    connected: bool
    euler_characteristic: int
    orientable: bool
    genus: int
    failure: str | None = None


def _links_ok(c: Complex2) -> tuple[bool, str | None]:
    vt = c.vertex_triangles()
    for v, tris in vt.items():
        try:
            cyc = _link_cycle_from_star(v, tris)
        except NotASurfaceError as exc:
            return False, str(exc)
        if len(cyc) < 3:
            return False, f"link of {v} too short"
    return True, None


def _link_cycle_from_star(v: int, tris: list[tuple[int, int, int]]) -> list[int]:
    # walk the neighbor graph induced by the triangles at v; a surface
    # vertex yields a single simple cycle
    nbr: dict[int, list[int]] = {}
    for t in tris:
        a, b = (x for x in t if x != v)
        nbr.setdefault(a, []).append(b)
        nbr.setdefault(b, []).append(a)
    for w, ns in nbr.items():
        if len(ns) != 2:
            raise NotASurfaceError(f"link of {v} is not a single cycle at {w}")
    start = min(nbr)
    cycle = [start]
    prev, cur = None, start
    while True:
        a, b = nbr[cur]
        nxt = b if a == prev else a
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
        if len(cycle) > len(nbr):
            raise NotASurfaceError(f"link of {v} is not a single cycle")
    if len(cycle) != len(nbr):
        raise NotASurfaceError(f"link of {v} has more than one component")
    return cycle


def _connected(c: Complex2) -> bool:
    adj = c.adjacency()
    seen = {c.vertices[0]}
    stack = [c.vertices[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(c.vertices)


def _orientable(c: Complex2) -> bool:
    # BFS over the dual graph, propagating a coherent orientation; a
    # conflict certifies non-orientability
    et = c.edge_triangles()
    tris = c.triangles_sorted()
    index = {t: i for i, t in enumerate(tris)}
    orient: list[tuple[int, int, int] | None] = [None] * len(tris)

    def oriented_edges(ot):
        a, b, c_ = ot
        return [(a, b), (b, c_), (c_, a)]

    orient[0] = tris[0]
    stack = [0]
    while stack:
        i = stack.pop()
        oi = orient[i]
        for de in oriented_edges(oi):
            e = tuple(sorted(de))
            for t in et[e]:
                j = index[t]
                if j == i:
                    continue
                # neighbor must traverse the shared edge in reverse
                want = (de[1], de[0])
                a, b, c_ = t
                cands = [(a, b, c_), (b, c_, a), (c_, a, b)]
                flipped = [(a, c_, b), (c_, b, a), (b, a, c_)]
                pick = None
                for ot in cands + flipped:
                    if want in [(ot[0], ot[1]), (ot[1], ot[2]), (ot[2], ot[0])]:
                        pick = ot
                        break
                if pick is None:  # pragma: no cover - shared edge always found
                    raise AssertionError("dual adjacency inconsistent")
                if orient[j] is None:
                    orient[j] = pick
                    stack.append(j)
                else:
                    have = orient[j]
                    rots = [(have[0], have[1], have[2]),
                            (have[1], have[2], have[0]),
                            (have[2], have[0], have[1])]
                    if pick not in rots:
                        return False
    return True


def build_and_validate(triangle_list: Iterable[Sequence[int]]) -> tuple[Complex2, SurfaceReport]:
    """Build a complex and check the closed-surface criteria.

    Closed surface: every edge in exactly 2 triangles, every vertex link a
    single cycle, and the complex connected.
    """
    c = Complex2.from_triangles(triangle_list)
    failure = None
    et = c.edge_triangles()
    edge_ok = all(len(ts) == 2 for ts in et.values())
    if not edge_ok:
        bad = next(e for e, ts in et.items() if len(ts) != 2)
        failure = f"edge {bad} lies in {len(et[bad])} triangles"
    conn = _connected(c)
    if failure is None and not conn:
        failure = "complex is disconnected"
    links_ok = False
    if edge_ok:
        links_ok, link_fail = _links_ok(c)
        if failure is None and not links_ok:
            failure = link_fail
    closed = edge_ok and links_ok and conn
    chi = c.euler_characteristic()
    orientable = _orientable(c) if closed else False
    if closed and orientable:
        genus = (2 - chi) // 2
    elif closed:
        genus = 2 - chi
    else:
        genus = 0
    report = SurfaceReport(
        is_closed_surface=closed,
        connected=conn,
        euler_characteristic=chi,
        orientable=orientable,
        genus=genus,
        failure=failure,
    )
    return c, report


def link_cycle(c: Complex2, v: int) -> list[int]:
    """Neighbors of v in their cyclic order around v.

    Raises NotASurfaceError when the link is not a single cycle.
    """
    if v not in c.vertices:
        raise ComplexError(f"vertex {v} not in complex")
    tris = [t for t in c.triangles_sorted() if v in t]
    if not tris:
        raise NotASurfaceError(f"vertex {v} has empty star")
    return _link_cycle_from_star(v, tris)


def missing_triangles(c: Complex2) -> set[tuple[int, int, int]]:
    """3-cliques of the 1-skeleton that are not triangles of the complex."""
    adj = c.adjacency()
    out = set()
    for a, b in sorted(c.edges):
        for w in adj[a] & adj[b]:
            if w > b:
                t = (a, b, w)
                if t not in c.triangles:
                    out.add(t)
    return out


def boundary_matrix(c: Complex2) -> tuple[list[list[int]], list[tuple[int, int]], list[tuple[int, int, int]]]:
    """Signed edge-by-triangle incidence matrix over the integers.

    Orientation from sorted vertex order: d[i,j,k] = [j,k] - [i,k] + [i,j].
    """
    edges = sorted(c.edges)
    tris = c.triangles_sorted()
    row = {e: i for i, e in enumerate(edges)}
    mat = [[0] * len(tris) for _ in edges]
    for j, (a, b, cc) in enumerate(tris):
        mat[row[(b, cc)]][j] += 1
        mat[row[(a, cc)]][j] -= 1
        mat[row[(a, b)]][j] += 1
    return mat, edges, tris


def minimal_cycle_check(c: Complex2) -> dict:
    """Rational kernel of the triangle boundary operator.

    is_cycle: kernel dimension >= 1.  is_minimal: kernel dimension exactly 1
    and the generator supported on every triangle.
    """
    from . import exact_linalg

    mat, _edges, tris = boundary_matrix(c)
    basis = exact_linalg.integer_kernel(mat)
    result: dict = {
        "is_cycle": len(basis) >= 1,
        "is_minimal": False,
        "cycle_vector": None,
        "kernel_dim": len(basis),
        "triangles": tris,
    }
    if len(basis) == 1 and all(x != 0 for x in basis[0]):
        result["is_minimal"] = True
        result["cycle_vector"] = [Fraction(x) for x in basis[0]]
    elif len(basis) >= 1:
        result["cycle_vector"] = [Fraction(x) for x in basis[0]]
    return result


def format_triangulation(c: Complex2) -> str:
    lines = [f"{c.n_vertices} {c.n_triangles}"]
    for a, b, cc in c.triangles_sorted():
        lines.append(f"{a} {b} {cc}")
    return "\n".join(lines) + "\n"


def parse_triangulation(text: str) -> Complex2:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ComplexError("empty triangulation file")
    head = lines[0].split()
    if len(head) != 2:
        raise ComplexError(f"bad header {lines[0]!r}")
    nv, nt = int(head[0]), int(head[1])
    tris = []
    for ln in lines[1:1 + nt]:
        parts = ln.split()
        if len(parts) != 3:
            raise ComplexError(f"bad triangle line {ln!r}")
        tris.append(tuple(int(x) for x in parts))
    if len(tris) != nt:
        raise ComplexError(f"expected {nt} triangles, found {len(tris)}")
    c = Complex2.from_triangles(tris)
    if c.n_vertices != nv:
        raise ComplexError(f"header says {nv} vertices, triangles use {c.n_vertices}")
    return c

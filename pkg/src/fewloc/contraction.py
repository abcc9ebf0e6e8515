"""Edge contraction and vertex splitting on surface triangulations.

Contractibility of edge vu on a closed surface is the link condition:
lk(v) and lk(u) share exactly the two apices of the triangles on vu, and
no triangle spans both apices through another face pair.  On closed
surfaces this is equivalent to "vu lies in no missing triangle".
"""

from __future__ import annotations

from dataclasses import dataclass

from .complex2 import Complex2, ComplexError, link_cycle


class ContractionError(ValueError):
    """Refused contraction or inconsistent split step."""


@dataclass(frozen=True)
class ContractionStep:
    removed_vertex: int
    target_vertex: int
    link_cycle_of_v: tuple[int, ...]

    @property
    def degree_of_v(self) -> int:
        return len(self.link_cycle_of_v)

    def __post_init__(self):
        if self.target_vertex not in self.link_cycle_of_v:
            raise ContractionError("target vertex not in the recorded link cycle")


@dataclass(frozen=True)
class ReductionSchedule:
    steps: tuple[ContractionStep, ...]
    base: Complex2


def edge_apices(c: Complex2, v: int, u: int, adj: dict[int, set[int]] | None = None) -> tuple[int, int]:
    if adj is None:
        adj = c.adjacency()
    apices = sorted(w for w in adj[v] & adj[u]
                    if tuple(sorted((v, u, w))) in c.triangles)
    if len(apices) != 2:
        raise ContractionError(f"edge ({v},{u}) lies in {len(apices)} triangles")
    return apices[0], apices[1]


def contractible(c: Complex2, v: int, u: int,
                 adj: dict[int, set[int]] | None = None) -> tuple[bool, tuple[int, int, int] | None]:
    """Link condition for contracting v to u; returns the offending
    missing triangle on failure."""
    if (min(v, u), max(v, u)) not in c.edges:
        raise ContractionError(f"({v},{u}) is not an edge")
    if c.n_vertices <= 4:
        return False, None
    if adj is None:
        adj = c.adjacency()
    common = adj[v] & adj[u]
    a, b = edge_apices(c, v, u, adj)
    if common != {a, b}:
        w = min(common - {a, b})
        return False, tuple(sorted((v, u, w)))
    # both apices joined by an edge spanning two faces at v and at u would
    # create a duplicate triangle after the rewrite
    if (min(a, b), max(a, b)) in c.edges:
        tau = tuple(sorted((u, a, b)))
        tav = tuple(sorted((v, a, b)))
        if tau in c.triangles and tav in c.triangles:
            return False, None
    return True, None


def contract_edge(c: Complex2, v: int, u: int) -> Complex2:
    """Contract v to u; refuses when the link condition fails."""
    ok, missing = contractible(c, v, u)
    if not ok:
        raise ContractionError(
            f"edge ({v},{u}) not contractible"
            + (f": missing triangle {missing}" if missing else ""))
    new_tris = []
    for t in c.triangles:
        if v in t and u in t:
            continue
        if v in t:
            nt = tuple(sorted(u if x == v else x for x in t))
            new_tris.append(nt)
        else:
            new_tris.append(t)
    return Complex2.from_triangles(new_tris)


def vertex_split(c: Complex2, step: ContractionStep) -> Complex2:
    """Inverse of contract_edge: reinsert the removed vertex.

    The recorded link cycle names u and, around it, the two shared apices;
    the arc between the apices not containing u is transferred to v.
    """
    v, u = step.removed_vertex, step.target_vertex
    cyc = list(step.link_cycle_of_v)
    if u not in c.vertices:
        raise ContractionError(f"target vertex {u} absent")
    if v in c.vertices:
        raise ContractionError(f"vertex {v} already present")
    k = len(cyc)
    i = cyc.index(u)
    a, b = cyc[(i - 1) % k], cyc[(i + 1) % k]
    arc = [cyc[(i + 1 + j) % k] for j in range(k - 1)]  # a ... b around, u removed
    assert arc[0] == b and arc[-1] == a
    adj_u = c.adjacency().get(u, set())
    for w in cyc:
        if w != u and w not in adj_u:
            raise ContractionError(f"link vertex {w} not adjacent to target {u}")
    new_tris = set(c.triangles)
    # interior arc triangles move from u to v
    for w1, w2 in zip(arc, arc[1:]):
        told = tuple(sorted((u, w1, w2)))
        if told not in new_tris:
            raise ContractionError(f"expected triangle {told} absent")
        new_tris.remove(told)
        new_tris.add(tuple(sorted((v, w1, w2))))
    new_tris.add(tuple(sorted((u, v, a))))
    new_tris.add(tuple(sorted((u, v, b))))
    return Complex2.from_triangles(new_tris)


def find_reducible_vertex(c: Complex2, max_degree: int) -> tuple[int, int] | None:
    """Smallest vertex of degree <= max_degree with a contractible edge,
    paired with its smallest valid neighbor."""
    adj = c.adjacency()
    for v in c.vertices:
        if len(adj[v]) > max_degree:
            continue
        for u in sorted(adj[v]):
            try:
                ok, _ = contractible(c, v, u, adj)
            except ContractionError:
                continue
            if ok:
                return v, u
    return None


def reduction_schedule(c: Complex2, max_degree: int, floor_size: int = 4) -> ReductionSchedule:
    """Greedy contraction until no reducible vertex or the size floor."""
    steps = []
    cur = c
    while cur.n_vertices > floor_size:
        found = find_reducible_vertex(cur, max_degree)
        if found is None:
            break
        v, u = found
        cyc = link_cycle(cur, v)
        steps.append(ContractionStep(removed_vertex=v, target_vertex=u,
                                     link_cycle_of_v=tuple(cyc)))
        cur = contract_edge(cur, v, u)
    return ReductionSchedule(steps=tuple(steps), base=cur)


def replay(schedule: ReductionSchedule) -> Complex2:
    """Reconstruct the original complex by splitting in reverse order."""
    cur = schedule.base
    for step in reversed(schedule.steps):
        cur = vertex_split(cur, step)
    return cur


def format_schedule(schedule: ReductionSchedule) -> str:
    from .complex2 import format_triangulation

    lines = []
    for s in schedule.steps:
        cyc = " ".join(str(x) for x in s.link_cycle_of_v)
        lines.append(f"{s.removed_vertex} {s.target_vertex} {s.degree_of_v}: {cyc}")
    lines.append("base:")
    return "\n".join(lines) + "\n" + format_triangulation(schedule.base)


def parse_schedule(text: str) -> ReductionSchedule:
    from .complex2 import parse_triangulation

    lines = text.splitlines()
    steps = []
    base_at = None
    for i, ln in enumerate(lines):
        if ln.strip() == "base:":
            base_at = i
            break
        head, _, cyc = ln.partition(":")
        try:
            v, u, deg = (int(x) for x in head.split())
            cycle = tuple(int(x) for x in cyc.split())
        except ValueError as exc:
            raise ContractionError(f"bad schedule line {ln!r}") from exc
        if len(cycle) != deg:
            raise ContractionError(f"bad schedule line {ln!r}")
        steps.append(ContractionStep(removed_vertex=v, target_vertex=u,
                                     link_cycle_of_v=cycle))
    if base_at is None:
        raise ContractionError("schedule missing base complex")
    base = parse_triangulation("\n".join(lines[base_at + 1:]))
    return ReductionSchedule(steps=tuple(steps), base=base)

"""Test-family constructors: canonical and random triangulations, genus
surfaces, apex-augmented graph families, and the minimal-2-cycle tower,
together with their explicit collision motion witnesses.

Every generator validates its output before returning it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import exact_linalg
from .complex2 import Complex2, build_and_validate, link_cycle, minimal_cycle_check
from .contraction import ContractionStep, vertex_split
from .rigidity import Framework, MotionWitness, is_infinitesimally_rigid


class GeneratorError(ValueError):
    """Refused generator input or unattainable construction."""


_PRIMITIVES: dict[str, list[tuple[int, int, int]]] = {
    "tetrahedron": [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],
    "octahedron": [
        # apexes 0 and 5, equator 1-2-3-4
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 1, 4),
        (5, 1, 2), (5, 2, 3), (5, 3, 4), (5, 1, 4),
    ],
    "moebius_torus": (
        [tuple(sorted((i % 7, (i + 1) % 7, (i + 3) % 7))) for i in range(7)]
        + [tuple(sorted((i % 7, (i + 2) % 7, (i + 3) % 7))) for i in range(7)]
    ),
    "rp2_6": [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
    ],
}


def primitive(name: str) -> Complex2:
    if name not in _PRIMITIVES:
        raise GeneratorError(f"unknown primitive {name!r}")
    c, report = build_and_validate(_PRIMITIVES[name])
    assert report.is_closed_surface
    return c


def stacked_sphere(n: int, seed: int = 0) -> Complex2:
    """Sphere built from the tetrahedron by repeated face subdivision."""
    if n < 4:
        raise GeneratorError("stacked sphere needs n >= 4")
    rng = random.Random(seed)
    tris = set(_PRIMITIVES["tetrahedron"])
    next_id = 4
    while next_id < n:
        t = rng.choice(sorted(tris))
        tris.remove(t)
        a, b, c = t
        v = next_id
        tris.update({tuple(sorted((a, b, v))), tuple(sorted((a, c, v))),
                     tuple(sorted((b, c, v)))})
        next_id += 1
    return Complex2.from_triangles(tris)


def _random_split(c: Complex2, rng: random.Random, max_new_degree: int | None) -> Complex2:
    verts = list(c.vertices)
    rng.shuffle(verts)
    v_new = max(c.vertices) + 1
    for x in verts:
        cyc = link_cycle(c, x)
        t = len(cyc)
        max_len = t if max_new_degree is None else min(t, max_new_degree - 1)
        if max_len < 2:
            continue
        s = rng.randrange(t)
        length = rng.randint(2, max_len)
        arc = [cyc[(s + j) % t] for j in range(length)]
        step = ContractionStep(removed_vertex=v_new, target_vertex=x,
                               link_cycle_of_v=tuple([x] + arc))
        return vertex_split(c, step)
    raise GeneratorError("no vertex admits a split")


def random_sphere(n: int, seed: int = 0, max_new_degree: int | None = None) -> Complex2:
    """Sphere triangulation grown by random vertex splits from the
    tetrahedron.  ``max_new_degree`` caps the degree of each inserted
    vertex (4 yields members of the degree-<=4-reducible family)."""
    if n < 4:
        raise GeneratorError("sphere needs n >= 4")
    rng = random.Random(seed)
    c = primitive("tetrahedron")
    while c.n_vertices < n:
        c = _random_split(c, rng, max_new_degree)
    return c


def _tube_faces(cycle1, cycle2):
    a, b, c = cycle1
    d, e, f = cycle2
    return [tuple(sorted(t)) for t in
            ((a, b, d), (b, d, e), (b, c, e), (c, e, f), (c, a, f), (a, f, d))]


def _attach_tube(tris: set, t1, t2) -> set:
    out = set(tris)
    out.remove(tuple(sorted(t1)))
    out.remove(tuple(sorted(t2)))
    out.update(_tube_faces(t1, t2))
    return out


def _disjoint_face_pair(c: Complex2, rng: random.Random):
    adj = c.adjacency()
    faces = c.triangles_sorted()
    order = list(range(len(faces)))
    rng.shuffle(order)
    for i in order:
        for j in order:
            if i >= j:
                continue
            t1, t2 = faces[i], faces[j]
            if set(t1) & set(t2):
                continue
            if any(y in adj[x] for x in t1 for y in t2):
                continue
            return t1, t2
    return None


def genus_surface(g: int, orientable: bool, n: int, seed: int = 0) -> Complex2:
    """Closed surface of the requested genus, refined to n vertices.

    Handles are 6-triangle tubes between far-apart faces; each tube drops
    the Euler characteristic by 2.  Non-orientable surfaces start from the
    6-vertex projective plane (odd genus) or an orientation-reversed tube
    on a sphere (even genus).
    """
    if orientable:
        if g < 0:
            raise GeneratorError("genus must be >= 0")
        c = random_sphere(12, seed=seed)
        handles = g
        want_chi = 2 - 2 * g
    else:
        if g < 1:
            raise GeneratorError("non-orientable genus must be >= 1")
        if g % 2 == 1:
            c = primitive("rp2_6")
            handles = (g - 1) // 2
        else:
            c = random_sphere(12, seed=seed)
            handles = g // 2  # first tube is glued orientation-reversing
        want_chi = 2 - g
    rng = random.Random(seed + 1)
    for h in range(handles):
        pair = None
        for _ in range(20):
            pair = _disjoint_face_pair(c, rng)
            if pair is not None:
                break
            c = _random_split(c, rng, None)
        if pair is None:
            raise GeneratorError("cannot find vertex-disjoint faces for a tube")
        t1, t2 = pair
        built = None
        for flip in (False, True):
            c2 = tuple(reversed(t2)) if flip else t2
            cand = Complex2.from_triangles(_attach_tube(set(c.triangles), t1, c2))
            _, rep = build_and_validate(cand.triangles_sorted())
            if not rep.is_closed_surface:
                continue
            # the last tube must land on the requested orientability
            if h == handles - 1 and rep.orientable != orientable:
                continue
            built = cand
            break
        if built is None:
            raise GeneratorError("tube attachment failed both orientations")
        c = built
    while c.n_vertices < n:
        c = _random_split(c, rng, None)
    _, rep = build_and_validate(c.triangles_sorted())
    if not (rep.is_closed_surface and rep.euler_characteristic == want_chi
            and rep.orientable == orientable):
        raise GeneratorError(f"surface construction invalid: {rep}")
    return c


# ---------------------------------------------------------------------------
# apex-augmented rigid graphs


@dataclass(frozen=True)
class LamanInstance:
    dim: int
    base_vertices: tuple[int, ...]
    base_edges: tuple[tuple[int, int], ...]
    aug_vertices: tuple[int, ...]
    aug_edges: tuple[tuple[int, int], ...]
    apex_index: dict[frozenset, int] = field(hash=False)


def random_laman(nv: int, seed: int = 0) -> tuple[list[int], list[tuple[int, int]]]:
    """Laman graph from seeded Henneberg type-I moves."""
    if nv < 2:
        raise GeneratorError("need at least 2 vertices")
    rng = random.Random(seed)
    edges = [(0, 1)]
    for v in range(2, nv):
        a, b = rng.sample(range(v), 2)
        edges.append(tuple(sorted((a, v))))
        edges.append(tuple(sorted((b, v))))
    return list(range(nv)), edges


def generic_placement(vertices, dim: int, seed: int, bound: int = 2 ** 40) -> dict:
    rng = random.Random(seed)
    return {v: tuple(Fraction(rng.randint(-bound, bound)) for _ in range(dim))
            for v in vertices}


def check_minimally_rigid(vertices, edges, dim: int, seed: int = 0) -> bool:
    """Count condition plus a certified generic full-rank check."""
    from math import comb

    n = len(vertices)
    if len(edges) != dim * n - comb(dim + 1, 2):
        return False
    fw = Framework.build(vertices, edges, dim, generic_placement(vertices, dim, seed))
    return is_infinitesimally_rigid(fw, seed=seed).rigid


def cone(vertices, edges) -> tuple[list[int], list[tuple[int, int]]]:
    """Join a new vertex to every vertex of the graph."""
    apex = max(vertices) + 1
    new_edges = list(edges) + [(v, apex) for v in vertices]
    return list(vertices) + [apex], [tuple(sorted(e)) for e in new_edges]


def laman_counterexample(vertices, edges, dim: int = 2, seed: int = 0) -> LamanInstance:
    """Apex-augment a minimally rigid graph: one new degree-d vertex over
    every d-subset of the base vertex set."""
    if dim not in (2, 3):
        raise GeneratorError("dim must be 2 or 3")
    if not check_minimally_rigid(vertices, edges, dim, seed=seed):
        raise GeneratorError("base graph fails the minimal-rigidity rank check")
    base_vs = tuple(sorted(vertices))
    base_es = tuple(sorted(tuple(sorted(e)) for e in edges))
    next_id = max(base_vs) + 1
    apex_index: dict[frozenset, int] = {}
    aug_edges = list(base_es)
    for group in itertools.combinations(base_vs, dim):
        apex_index[frozenset(group)] = next_id
        for x in group:
            aug_edges.append((x, next_id))
        next_id += 1
    aug_vs = base_vs + tuple(sorted(apex_index.values()))
    return LamanInstance(dim=dim, base_vertices=base_vs, base_edges=base_es,
                         aug_vertices=aug_vs,
                         aug_edges=tuple(sorted(aug_edges)),
                         apex_index=apex_index)


# ---------------------------------------------------------------------------
# minimal 2-cycle tower


@dataclass(frozen=True)
class MinimalCycleInstance:
    base: Complex2
    result: Complex2
    apex_index: dict[frozenset, int] = field(hash=False)


def _subdivide_edge(tris: set, a: int, b: int, m: int) -> None:
    """Split edge (a, b) at a new vertex m (the edge must lie in 2 faces)."""
    faces = [t for t in tris if a in t and b in t]
    assert len(faces) == 2
    for t in faces:
        x = next(v for v in t if v not in (a, b))
        tris.remove(t)
        tris.add(tuple(sorted((a, m, x))))
        tris.add(tuple(sorted((b, m, x))))


def minimal_cycle_counterexample(mu: Complex2, rounds: int = 1) -> MinimalCycleInstance:
    """Grow a minimal 2-cycle apexing the star triple system of each round.

    Per round, an anchor vertex is fixed and every vertex triple through
    the anchor gets a cap: a degree-3 apex w coned over the triple plus a
    hexagonal ring around an open inner triangle, connected back to the
    body through a 6-triangle tube at a removed host face.  Edges inside
    the triple are pre-subdivided away when possible so the cap glues
    cleanly; the apexed triples are restricted to a star system because
    apexing all four triples of any 4-vertex set creates a cone subcycle
    and destroys minimality.
    """
    check = minimal_cycle_check(mu)
    if not (check["is_cycle"] and check["is_minimal"]):
        raise GeneratorError("input complex is not a minimal 2-cycle")
    base = mu
    apex_index: dict[frozenset, int] = {}
    apex_verts: set[int] = set()
    cur = mu
    for _ in range(rounds):
        round_vertices = sorted(cur.vertices)
        anchor = round_vertices[0]
        tris = set(cur.triangles)
        next_id = max(cur.vertices) + 1
        fresh_all: set[int] = set()
        for pair in itertools.combinations(round_vertices[1:], 2):
            triple = tuple(sorted((anchor,) + pair))
            t1, t2, t3 = triple
            # cap edges on the triple must be fresh where the complex
            # allows it; faces at existing apexes are never split
            for x, y in ((t1, t2), (t1, t3), (t2, t3)):
                faces_xy = [t for t in tris if x in t and y in t]
                if len(faces_xy) == 2 and not any(set(t) & apex_verts
                                                  for t in faces_xy):
                    _subdivide_edge(tris, x, y, next_id)
                    next_id += 1
            w, g1, g2, g3 = range(next_id, next_id + 4)
            next_id += 4
            copy_fresh = {w, g1, g2, g3}
            tris.update({
                tuple(sorted((w, t1, t2))), tuple(sorted((w, t1, t3))),
                tuple(sorted((w, t2, t3))),
                tuple(sorted((t1, t2, g1))), tuple(sorted((t2, g1, g2))),
                tuple(sorted((t2, t3, g2))), tuple(sorted((t3, g2, g3))),
                tuple(sorted((t3, t1, g3))), tuple(sorted((t1, g3, g1))),
            })
            # host face to open up: smallest face avoiding all apparatus,
            # else smallest face avoiding fresh and apex vertices
            banned_strict = fresh_all | copy_fresh | set(triple) | apex_verts
            banned_weak = fresh_all | copy_fresh | apex_verts
            s = None
            for cand in sorted(tris):
                if not (set(cand) & banned_strict):
                    s = cand
                    break
            if s is None:
                for cand in sorted(tris):
                    if not (set(cand) & banned_weak):
                        s = cand
                        break
            if s is None:
                raise GeneratorError("no host face available; grow the base first")
            tris.remove(s)
            tris.update(_tube_faces((g1, g2, g3), s))
            apex_index[frozenset(triple)] = w
            apex_verts.add(w)
            fresh_all |= copy_fresh
        cur = Complex2.from_triangles(tris)
        check = minimal_cycle_check(cur)
        if not (check["is_cycle"] and check["is_minimal"]):
            raise GeneratorError("construction lost the minimal-cycle property")
    return MinimalCycleInstance(base=base, result=cur, apex_index=apex_index)


# ---------------------------------------------------------------------------
# collision witnesses


def _orthogonal_velocity(directions: list[tuple[Fraction, ...]], dim: int) -> list[list[Fraction]]:
    """Exact basis of the orthogonal complement of the span."""
    if not directions:
        rows = [[Fraction(1) if i == j else Fraction(0) for j in range(dim)]
                for i in range(dim)]
        return rows
    data = exact_linalg.RationalMatrix.from_rows(directions).integer_rows()
    basis = exact_linalg.integer_kernel(data)
    return [[Fraction(x) for x in vec] for vec in basis]


def collision_motion_witness(instance, assignment: dict[int, int],
                             points: list[tuple]) -> MotionWitness:
    """Explicit nontrivial motion supported on one apex vertex.

    Looks for an apexed group whose members occupy too few locations; the
    apex velocity is taken orthogonal to the (degenerate) span of its edge
    directions, zero elsewhere.  The returned witness is verified against
    the full framework.
    """
    if isinstance(instance, LamanInstance):
        dim = instance.dim
        verts, edges = instance.aug_vertices, instance.aug_edges
        needs_single_location = False
    elif isinstance(instance, MinimalCycleInstance):
        dim = 3
        c = instance.result
        verts, edges = c.vertices, tuple(sorted(c.edges))
        needs_single_location = True
    else:
        raise GeneratorError(f"unsupported instance {type(instance).__name__}")

    pts = [tuple(Fraction(x) for x in p) for p in points]
    placement = {v: pts[assignment[v]] for v in verts}
    fw = Framework.build(verts, edges, dim, placement)

    for group, apex in sorted(instance.apex_index.items(),
                              key=lambda kv: sorted(kv[0])):
        locs = {assignment[x] for x in group}
        if needs_single_location:
            if len(locs) != 1:
                continue
        elif len(locs) >= len(group):
            continue
        directions = []
        fa = placement[apex]
        for x in group:
            d = tuple(placement[x][k] - fa[k] for k in range(dim))
            if any(v != 0 for v in d):
                directions.append(d)
        perp = _orthogonal_velocity(directions, dim)
        if not perp:
            continue
        zero = tuple(Fraction(0) for _ in range(dim))
        combos = list(perp)
        if len(perp) >= 2:
            combos.append([a + b for a, b in zip(perp[0], perp[1])])
        from .rigidity import _find_violated_pair

        for vec in combos:
            vel = {v: zero for v in verts}
            vel[apex] = tuple(vec)
            pair = _find_violated_pair(fw, vel)
            if pair is None:
                continue
            witness = MotionWitness(velocities=vel, violated_pair=pair)
            assert witness.verify(fw)
            return witness
    raise GeneratorError("no collision with a usable apex found; enlarge the "
                         "instance or shrink the location set")

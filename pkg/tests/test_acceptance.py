"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line (shown in the run log via -rP) and
asserts its stated tolerances.  Numeric tolerances: all rank and count
checks are exact integer comparisons; the only tolerances are the wall
clock budgets (600 s for criterion 1, 300 s for criterion 4) and the
999/1000 modular-vs-exact agreement floor in criterion 9.
"""

import itertools
import random
import time

import numpy as np
import pytest

from fewloc.complex2 import minimal_cycle_check
from fewloc.contraction import reduction_schedule, replay, vertex_split
from fewloc.exact_linalg import PRIME_TABLE, exact_rank, mod_echelon
from fewloc.generators import (
    collision_motion_witness,
    generic_placement,
    genus_surface,
    laman_counterexample,
    minimal_cycle_counterexample,
    primitive,
    random_laman,
    random_sphere,
    stacked_sphere,
)
from fewloc.placement import avoidance_set, generate_locations, place
from fewloc.rigidity import Framework, is_infinitesimally_rigid

_C1_STATS = {"failure_counts": [], "done": False}


def _report(num, ok, detail):
    line = f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def test_criterion_1_hundred_spheres_one_location_set():
    """100 random spheres, 50 <= n <= 300, one fixed seeded 76-point set:
    every placement certified at rank 3n-6 with condition C, under 600 s."""
    ls = generate_locations(76, seed=42)
    rng = random.Random(2024)
    t0 = time.time()
    successes = 0
    for trial in range(100):
        n = rng.randint(50, 300)
        c = random_sphere(n, seed=rng.randrange(10 ** 9))
        result = place(c, ls, strategy="sphere76", seed=0)
        cert = result.certificate
        assert cert.rank == cert.required_rank == 3 * n - 6
        assert cert.condition_mode == "C" and cert.condition_ok
        _C1_STATS["failure_counts"].extend(result.failure_counts.values())
        successes += 1
    elapsed = time.time() - t0
    _C1_STATS["done"] = True
    _report(1, successes == 100 and elapsed < 600,
            f"{successes}/100 spheres certified rank 3n-6, condition C, "
            f"in {elapsed:.1f}s (budget 600s)")


def test_criterion_2_failure_counts_below_56():
    """Per-vertex rank-failing candidate counts from criterion 1 stay
    below 56 = C(8,3); the empirical maximum is reported."""
    if not _C1_STATS["done"]:
        pytest.skip("criterion 1 statistics unavailable")
    counts = _C1_STATS["failure_counts"]
    worst = max(counts, default=0)
    _report(2, worst < 56,
            f"empirical max rank-failing candidates per vertex = {worst} "
            f"(bound 56) over {len(counts)} insertions")


def test_criterion_3_stacked_four_locations_and_k4_three_points():
    """Stacked spheres up to n=500 place into 4 locations; every one of
    the 3^4 = 81 assignments of K4 into 3 generic points is non-rigid."""
    ls = generate_locations(4, seed=9)
    for n in (50, 200, 500):
        c = stacked_sphere(n, seed=n)
        result = place(c, ls, strategy="stacked")
        assert result.certificate.rank == 3 * n - 6
        assert len(set(result.assignment.values())) <= 4

    pts = [tuple(p) for p in generic_placement(range(3), 3, seed=31).values()]
    k4_edges = list(itertools.combinations(range(4), 2))
    rigid_count = 0
    for combo in itertools.product(range(3), repeat=4):
        fw = Framework.build(range(4), k4_edges, 3,
                             {v: pts[combo[v]] for v in range(4)})
        if is_infinitesimally_rigid(fw).rigid:
            rigid_count += 1
    _report(3, rigid_count == 0,
            f"stacked spheres n<=500 placed with |A|=4; "
            f"{rigid_count}/81 K4-into-3-points assignments rigid (expected 0)")


def test_criterion_4_octahedron_exhaustive_six_points():
    """All 6^6 = 46656 assignments of the octahedron into 6 fixed generic
    points: rigid exactly on the 720 injective ones, under 300 s."""
    t0 = time.time()
    c = primitive("octahedron")
    verts = sorted(c.vertices)
    edges = sorted(c.edges)
    pts = [tuple(int(x) for x in p)
           for p in generic_placement(range(6), 3, seed=23).values()]
    p = PRIME_TABLE[0]
    diffs = {}
    for i in range(6):
        for j in range(6):
            diffs[(i, j)] = np.array(
                [(pts[i][k] - pts[j][k]) % p for k in range(3)], dtype=np.int64)

    rigid_set = set()
    deficient = []
    for combo in itertools.product(range(6), repeat=6):
        mat = np.zeros((18, 12), dtype=np.int64)
        for col, (u, v) in enumerate(edges):
            mat[3 * u:3 * u + 3, col] = diffs[(combo[u], combo[v])]
            mat[3 * v:3 * v + 3, col] = diffs[(combo[v], combo[u])]
        r, _, _, _ = mod_echelon(mat, p)
        if r == 12:
            rigid_set.add(combo)  # certified: nonzero minor mod p
        else:
            deficient.append(combo)

    # settle every modular-deficient case exactly: rank < 12 leaves a
    # motion beyond the trivial ones, hence non-rigid
    for combo in deficient:
        rows = []
        for u in verts:
            for k in range(3):
                rows.append([0] * 12)
        for col, (u, v) in enumerate(edges):
            for k in range(3):
                rows[3 * u + k][col] = pts[combo[u]][k] - pts[combo[v]][k]
                rows[3 * v + k][col] = pts[combo[v]][k] - pts[combo[u]][k]
        assert exact_rank(rows) < 12

    injective = {c_ for c_ in itertools.product(range(6), repeat=6)
                 if len(set(c_)) == 6}
    elapsed = time.time() - t0
    _report(4, rigid_set == injective and len(rigid_set) == 720
            and elapsed < 300,
            f"{len(rigid_set)}/46656 assignments rigid, matching the 720 "
            f"injective ones, in {elapsed:.1f}s (budget 300s)")


def test_criterion_5_low_degree_family_ten_locations():
    """50 spheres reducible through degree-<=4 contractions place into 10
    locations with at most one rank-failing candidate per reinsertion."""
    ls = generate_locations(10, seed=11)
    rng = random.Random(5)
    worst = 0
    for trial in range(50):
        n = rng.randint(20, 80)
        c = random_sphere(n, seed=rng.randrange(10 ** 9), max_new_degree=4)
        result = place(c, ls, strategy="q10")
        assert result.certificate.rank == 3 * n - 6
        assert result.certificate.condition_ok
        worst = max(worst, result.max_failures)
    _report(5, worst <= 1,
            f"50/50 low-degree spheres placed with |A|=10; max failing "
            f"candidates per reinsertion = {worst} (bound 1)")


def test_criterion_6_apex_augmented_graph_never_rigid_on_8_points():
    """Apex augmentation of a 10-vertex minimally rigid graph: 1000 random
    assignments into 8 generic plane points each yield a verified motion
    witness and a negative rigidity decision."""
    vs, es = random_laman(10, seed=4)
    inst = laman_counterexample(vs, es, dim=2, seed=4)
    pts = [tuple(p) for p in generic_placement(range(8), 2, seed=7).values()]
    rng = random.Random(99)
    for trial in range(1000):
        assignment = {v: rng.randrange(8) for v in inst.aug_vertices}
        w = collision_motion_witness(inst, assignment, pts)
        placement = {v: pts[assignment[v]] for v in inst.aug_vertices}
        fw = Framework.build(inst.aug_vertices, inst.aug_edges, 2, placement)
        assert w.verify(fw)
        assert not is_infinitesimally_rigid(fw).rigid
    _report(6, True,
            "1000/1000 assignments: verified motion witness and "
            "non-rigid decision agree")


def test_criterion_7_surfaces_with_refinement():
    """Genus-1 and genus-2 orientable plus genus-1 non-orientable surfaces
    refined to n <= 300 place into a seeded 200-point set at rank 3n-6;
    fan avoidance stays <= 48 and per-vertex failures stay < 84."""
    ls = generate_locations(200, seed=17)
    cases = [(1, True), (2, True), (1, False)]
    max_avoid = 0
    max_fail = 0
    for g, orientable in cases:
        c = genus_surface(g, orientable=orientable, n=240, seed=g)
        assert c.n_vertices <= 300
        result = place(c, ls, strategy="surface", seed=0)
        n = c.n_vertices
        assert result.certificate.rank == 3 * n - 6
        assert result.certificate.condition_mode == 'C"'
        assert result.certificate.condition_ok
        max_fail = max(max_fail, result.max_failures)
        # replay the schedule and measure every avoidance set independently
        sched = reduction_schedule(c, max_degree=6, floor_size=4)
        assignment = {v: result.assignment[v] for v in sched.base.vertices}
        cur = sched.base
        for step in reversed(sched.steps):
            cur = vertex_split(cur, step)
            v = step.removed_vertex
            max_avoid = max(max_avoid,
                            len(avoidance_set(cur, v, assignment, 'C"')))
            assignment[v] = result.assignment[v]
    _report(7, max_avoid <= 48 and max_fail < 84,
            f"3 surfaces certified at rank 3n-6; max avoidance {max_avoid} "
            f"(bound 48), max per-vertex failures {max_fail} (bound 84)")


def test_criterion_8_minimal_cycle_tower_collisions():
    """The tower built over the tetrahedron has more than 12 vertices,
    remains a minimal 2-cycle, and 100 forced-triple-collision assignments
    into 6 locations each yield a verified motion witness."""
    inst = minimal_cycle_counterexample(primitive("tetrahedron"), rounds=1)
    c = inst.result
    assert c.n_vertices > 12
    chk = minimal_cycle_check(c)
    assert chk["is_minimal"] and chk["kernel_dim"] == 1
    assert all(x != 0 for x in chk["cycle_vector"])

    pts = [tuple(p) for p in generic_placement(range(6), 3, seed=13).values()]
    triples = sorted(inst.apex_index, key=lambda t: sorted(t))
    rng = random.Random(8)
    for trial in range(100):
        triple = triples[rng.randrange(len(triples))]
        assignment = {v: rng.randrange(6) for v in c.vertices}
        loc = rng.randrange(6)
        for x in triple:
            assignment[x] = loc
        w = collision_motion_witness(inst, assignment, pts)
        placement = {v: pts[assignment[v]] for v in c.vertices}
        fw = Framework.build(c.vertices, sorted(c.edges), 3, placement)
        assert w.verify(fw)
    _report(8, True,
            f"tower has {c.n_vertices} vertices (>12), minimal 2-cycle "
            f"holds; 100/100 forced collisions yield verified witnesses")


def test_criterion_9_round_trips_and_rank_agreement():
    """200 random spheres survive the contraction/split round trip with
    3n-6 edges; modular and exact rank agree on at least 999 of 1000
    random 50x50 matrices with entries in [-1000, 1000]."""
    rng = random.Random(77)
    for trial in range(200):
        n = rng.randint(10, 60)
        c = random_sphere(n, seed=rng.randrange(10 ** 9))
        assert c.n_edges == 3 * n - 6
        sched = reduction_schedule(c, max_degree=5, floor_size=4)
        assert replay(sched).triangles == c.triangles

    agree = 0
    disagreements = []
    for trial in range(1000):
        rows = [[rng.randint(-1000, 1000) for _ in range(50)]
                for _ in range(50)]
        arr = np.array(rows, dtype=np.int64) % PRIME_TABLE[1]
        modular, _, _, _ = mod_echelon(arr, PRIME_TABLE[1])
        exact = exact_rank(rows)
        assert modular <= exact  # one-sided soundness
        if modular == exact:
            agree += 1
        else:
            disagreements.append((trial, rows, exact))
    # protocol: on disagreement, a fresh prime must restore agreement
    for trial, rows, exact in disagreements:
        arr = np.array(rows, dtype=np.int64) % PRIME_TABLE[2]
        retry, _, _, _ = mod_echelon(arr, PRIME_TABLE[2])
        assert retry == exact
    _report(9, agree >= 999,
            f"200/200 sphere round trips with 3n-6 edges; modular/exact "
            f"rank agreement {agree}/1000 (floor 999)")

import random

import pytest

from fewloc.complex2 import build_and_validate, minimal_cycle_check
from fewloc.generators import (
    GeneratorError,
    check_minimally_rigid,
    collision_motion_witness,
    cone,
    generic_placement,
    genus_surface,
    laman_counterexample,
    minimal_cycle_counterexample,
    primitive,
    random_laman,
    random_sphere,
    stacked_sphere,
)
from fewloc.rigidity import Framework, is_infinitesimally_rigid


def test_primitives_are_valid_surfaces():
    for name in ("tetrahedron", "octahedron", "moebius_torus", "rp2_6"):
        _, rep = build_and_validate(primitive(name).triangles_sorted())
        assert rep.is_closed_surface
    with pytest.raises(GeneratorError):
        primitive("icosahedron")


def test_stacked_sphere_counts_and_determinism():
    c = stacked_sphere(60, seed=3)
    _, rep = build_and_validate(c.triangles_sorted())
    assert rep.is_closed_surface and rep.euler_characteristic == 2
    assert c.n_edges == 3 * 60 - 6  # [TRIVIAL] sphere edge count
    assert stacked_sphere(60, seed=3).triangles == c.triangles
    with pytest.raises(GeneratorError):
        stacked_sphere(3)


def test_random_sphere_determinism_and_degree_cap():
    c = random_sphere(40, seed=8)
    assert random_sphere(40, seed=8).triangles == c.triangles
    _, rep = build_and_validate(c.triangles_sorted())
    assert rep.is_closed_surface and rep.euler_characteristic == 2
    # the capped family stays reducible through degree-<=4 contractions
    from fewloc.contraction import reduction_schedule

    q = random_sphere(40, seed=8, max_new_degree=4)
    assert reduction_schedule(q, max_degree=4, floor_size=4).base.n_vertices == 4


@pytest.mark.parametrize("g,orientable,chi", [
    (1, True, 0), (2, True, -2), (1, False, 1), (2, False, 0), (3, False, -1),
])
def test_genus_surface_topology(g, orientable, chi):
    c = genus_surface(g, orientable=orientable, n=40, seed=1)
    _, rep = build_and_validate(c.triangles_sorted())
    assert rep.is_closed_surface
    assert rep.orientable == orientable
    assert rep.euler_characteristic == chi  # [TRIVIAL] 2-2g resp. 2-g
    assert c.n_vertices >= 40


def test_genus_surface_rejects_bad_genus():
    with pytest.raises(GeneratorError):
        genus_surface(-1, orientable=True, n=20)
    with pytest.raises(GeneratorError):
        genus_surface(0, orientable=False, n=20)


def test_random_laman_counts_and_rigidity():
    for seed in range(3):
        vs, es = random_laman(10, seed=seed)
        assert len(es) == 2 * 10 - 3  # [TRIVIAL] Henneberg-I count
        assert check_minimally_rigid(vs, es, dim=2, seed=seed)


def test_cone_of_triangle_is_k4():
    vs, es = cone([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    assert vs == [0, 1, 2, 3]
    assert sorted(es) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_laman_counterexample_structure():
    vs, es = random_laman(6, seed=2)
    inst = laman_counterexample(vs, es, dim=2, seed=2)
    # one apex over each pair of base vertices
    assert len(inst.apex_index) == 15
    assert len(inst.aug_vertices) == 6 + 15
    # [TRIVIAL] count matches minimal rigidity in the plane
    assert len(inst.aug_edges) == 2 * len(inst.aug_vertices) - 3
    assert check_minimally_rigid(inst.aug_vertices, inst.aug_edges, dim=2, seed=5)


def test_laman_counterexample_refuses_flexible_base():
    with pytest.raises(GeneratorError):
        laman_counterexample([0, 1, 2, 3], [(0, 1), (1, 2), (2, 3)], dim=2)


def test_laman_collision_witness():
    vs, es = random_laman(6, seed=2)
    inst = laman_counterexample(vs, es, dim=2, seed=2)
    pts = [tuple(p) for p in generic_placement(range(4), 2, seed=6).values()]
    rng = random.Random(0)
    assignment = {v: rng.randrange(len(pts)) for v in inst.aug_vertices}
    w = collision_motion_witness(inst, assignment, pts)
    placement = {v: pts[assignment[v]] for v in inst.aug_vertices}
    fw = Framework.build(inst.aug_vertices, inst.aug_edges, 2, placement)
    assert w.verify(fw)
    assert not is_infinitesimally_rigid(fw).rigid


def test_minimal_cycle_counterexample_tetra_round():
    mu = primitive("tetrahedron")
    inst = minimal_cycle_counterexample(mu, rounds=1)
    c = inst.result
    assert c.n_vertices > 12
    chk = minimal_cycle_check(c)
    assert chk["is_minimal"] and chk["kernel_dim"] == 1
    assert all(x != 0 for x in chk["cycle_vector"])
    # each recorded apex is joined exactly to its triple
    adj = c.adjacency()
    for triple, apex in inst.apex_index.items():
        assert adj[apex] == set(triple)


def test_minimal_cycle_counterexample_refuses_non_cycle():
    with pytest.raises(GeneratorError):
        minimal_cycle_counterexample(primitive("rp2_6"))


def test_minimal_cycle_collision_witness():
    mu = primitive("tetrahedron")
    inst = minimal_cycle_counterexample(mu, rounds=1)
    c = inst.result
    pts = [tuple(p) for p in generic_placement(range(6), 3, seed=12).values()]
    rng = random.Random(1)
    triple = sorted(next(iter(inst.apex_index)))
    assignment = {v: rng.randrange(len(pts)) for v in c.vertices}
    loc = rng.randrange(len(pts))
    for x in triple:
        assignment[x] = loc  # force one apexed triple onto one location
    w = collision_motion_witness(inst, assignment, pts)
    placement = {v: pts[assignment[v]] for v in c.vertices}
    fw = Framework.build(c.vertices, sorted(c.edges), 3, placement)
    assert w.verify(fw)

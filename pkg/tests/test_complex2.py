import pytest

from fewloc.complex2 import (
    Complex2,
    ComplexError,
    build_and_validate,
    format_triangulation,
    link_cycle,
    minimal_cycle_check,
    missing_triangles,
    parse_triangulation,
)
from fewloc.generators import primitive, stacked_sphere

TETRA = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


def test_tetrahedron_is_a_sphere():
    c, rep = build_and_validate(TETRA)
    assert rep.is_closed_surface and rep.connected and rep.orientable
    # [TRIVIAL] V - E + F = 4 - 6 + 4
    assert rep.euler_characteristic == 2 and rep.genus == 0
    assert (c.n_vertices, c.n_edges, c.n_triangles) == (4, 6, 4)


def test_octahedron_counts():
    c, rep = build_and_validate(primitive("octahedron").triangles_sorted())
    assert rep.is_closed_surface and rep.euler_characteristic == 2
    assert (c.n_vertices, c.n_edges, c.n_triangles) == (6, 12, 8)
    assert c.degree(0) == 4


def test_seven_vertex_torus():
    c, rep = build_and_validate(primitive("moebius_torus").triangles_sorted())
    # [DERIVED] 7 - 21 + 14 = 0, orientable, so genus 1
    assert rep.is_closed_surface and rep.orientable
    assert rep.euler_characteristic == 0 and rep.genus == 1
    assert c.n_edges == 21 and c.n_triangles == 14


def test_six_vertex_projective_plane():
    _, rep = build_and_validate(primitive("rp2_6").triangles_sorted())
    # [DERIVED] 6 - 15 + 10 = 1, non-orientable genus 1
    assert rep.is_closed_surface and not rep.orientable
    assert rep.euler_characteristic == 1 and rep.genus == 1


def test_open_disc_rejected():
    _, rep = build_and_validate([(0, 1, 2)])
    assert not rep.is_closed_surface
    assert rep.failure


def test_bad_triangles_rejected():
    with pytest.raises(ComplexError):
        Complex2.from_triangles([(0, 1, 1)])
    with pytest.raises(ComplexError):
        Complex2.from_triangles(TETRA + [(2, 1, 0)])  # duplicate up to order


def test_link_cycle_octahedron():
    c = primitive("octahedron")
    cyc = link_cycle(c, 0)
    assert sorted(cyc) == [1, 2, 3, 4]
    # consecutive link vertices bound triangles at the center
    k = len(cyc)
    for i in range(k):
        assert tuple(sorted((0, cyc[i], cyc[(i + 1) % k]))) in c.triangles


def test_missing_triangles():
    # [TRIVIAL] every 3-clique of the tetrahedron and octahedron is a face
    assert missing_triangles(primitive("tetrahedron")) == set()
    assert missing_triangles(primitive("octahedron")) == set()
    # [DERIVED] subdividing face (a,b,c) leaves the clique a,b,c faceless
    c = stacked_sphere(5, seed=0)
    missing = missing_triangles(c)
    assert len(missing) == 1
    t = next(iter(missing))
    assert 4 not in t


def test_minimal_cycle_check_sphere():
    chk = minimal_cycle_check(primitive("tetrahedron"))
    assert chk["is_cycle"] and chk["is_minimal"] and chk["kernel_dim"] == 1
    assert all(abs(x) == 1 for x in chk["cycle_vector"])
    chk8 = minimal_cycle_check(primitive("octahedron"))
    assert chk8["is_minimal"]


def test_minimal_cycle_check_orientability_dichotomy():
    # [DERIVED] orientable closed surfaces carry a fundamental 2-cycle over
    # the rationals; non-orientable ones do not
    assert minimal_cycle_check(primitive("moebius_torus"))["is_minimal"]
    chk = minimal_cycle_check(primitive("rp2_6"))
    assert not chk["is_cycle"] and chk["kernel_dim"] == 0


def test_format_parse_round_trip():
    c = primitive("octahedron")
    text = format_triangulation(c)
    c2 = parse_triangulation(text)
    assert c2.triangles == c.triangles


def test_parse_errors():
    with pytest.raises(ComplexError):
        parse_triangulation("")
    with pytest.raises(ComplexError):
        parse_triangulation("4\n0 1 2\n")
    with pytest.raises(ComplexError):
        parse_triangulation("9 4\n0 1 2\n0 1 3\n0 2 3\n1 2 3\n")  # header lies

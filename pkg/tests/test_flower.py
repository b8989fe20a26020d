from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pluri import flower as fl
from pluri.errors import InvalidFlower, NotInterior
from pluri.forms import FieldAssignment
from pluri.lattice_qan import CellChain, Kind, canonicalize, corner_at, facets, offset
from pluri.sampling import rng_for, sample_alpha


def kinds(dec):
    return Counter(c.kind for c, _ in dec.corners)


def test_validate_examples():
    octa = canonicalize(Kind.OCTAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    assert fl.validate(fl.TwoManifold(facets(octa), 3)) == []
    t = canonicalize(Kind.BLACK_TRIANGLE, (0, 0, 0, 0), (0, 1, 2))
    double = fl.validate(fl.TwoManifold(CellChain.of(t, t), 3))
    assert [v["type"] for v in double] == ["coefficient"]
    # two black triangles sharing [01] with the same orientation of that edge
    u = canonicalize(Kind.BLACK_TRIANGLE, (0, 0, 0, 0), (0, 1, 3))
    same = fl.validate(fl.TwoManifold(CellChain.of(t, u), 3))
    assert [v["type"] for v in same] == ["orientation"]
    assert fl.validate(fl.TwoManifold(CellChain.of(t, -u), 3)) == []


def test_flower_at():
    tet = canonicalize(Kind.BLACK_TETRAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    closed = fl.TwoManifold(facets(tet), 3)
    x0 = offset((0, 0, 0, 0), (0,))
    f = fl.flower_at(closed, x0)
    assert f.chain == corner_at(tet, x0) and len(f.chain) == 3
    corner = fl.TwoManifold(corner_at(tet, x0), 3)
    with pytest.raises(NotInterior):
        fl.flower_at(corner, offset((0, 0, 0, 0), (1,)))


def test_planar_flower_in_plane():
    f = fl.planar_flower()
    assert fl.validate(f.manifold) == []
    assert Counter(t.kind for t in f.chain.cells()) == {Kind.BLACK_TRIANGLE: 3, Kind.WHITE_TRIANGLE: 3}
    assert fl.flower_at(f.manifold, f.center).chain == f.chain


def test_disconnected_flower_rejected():
    n = (0,) * 7
    a = corner_at(canonicalize(Kind.BLACK_TETRAHEDRON, n, (0, 1, 2, 3)), offset(n, (0,)))
    b = corner_at(canonicalize(Kind.BLACK_TETRAHEDRON, n, (0, 4, 5, 6)), offset(n, (0,)))
    m = fl.TwoManifold(a + b, 6)
    assert fl.validate(m) == []
    with pytest.raises(InvalidFlower):
        fl.flower_at(m, offset(n, (0,)))


def test_decompose_planar():
    f = fl.planar_flower()
    dec = fl.decompose(f)
    assert kinds(dec) == {Kind.BLACK_TETRAHEDRON: 3, Kind.OCTAHEDRON: 3, Kind.WHITE_TETRAHEDRON: 3}
    assert fl.verify_decomposition(f, dec)
    assert dec.stages[0].coefficients() <= {-1, 1}
    assert not dec.stages[-1]


def test_decompose_black_corner():
    tet = canonicalize(Kind.BLACK_TETRAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    x0 = offset((0, 0, 0, 0), (0,))
    f = fl.Flower(fl.TwoManifold(corner_at(tet, x0), 3), x0)
    dec = fl.decompose(f)
    assert kinds(dec) == {Kind.BLACK_TETRAHEDRON: 3}
    assert not dec.stages[0]
    assert fl.verify_decomposition(f, dec)


def test_verify_rejects_broken_sums():
    f = fl.planar_flower()
    corners = fl.decompose(f).corners
    assert not fl.verify_decomposition(f, corners[1:])
    assert not fl.verify_decomposition(f, corners + corners[:1])


def test_empty_flower():
    f = fl.Flower(fl.TwoManifold(CellChain(), 2), (0, 0, 0))
    assert fl.decompose(f).corners == []
    assert fl.verify_decomposition(f, [])


@pytest.mark.parametrize("name,flower", fl.corner_flowers(), ids=lambda v: v if isinstance(v, str) else "")
def test_corner_flowers(name, flower):
    dec = fl.decompose(flower)
    assert fl.verify_decomposition(flower, dec)
    for stage in dec.stages:
        assert stage.coefficients() <= {-1, 1}


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), dim=st.sampled_from([3, 4]))
def test_random_flowers_decompose(seed, dim):
    f = fl.random_flower(rng_for(seed), dim)
    assert fl.validate(f.manifold) == []
    assert 8 <= len(f.chain) <= 12
    dec = fl.decompose(f)
    assert fl.verify_decomposition(f, dec)
    assert not dec.stages[-1]


def test_flower_roundtrip():
    f = fl.random_flower(rng_for(3), 4)
    g = fl.Flower.from_dict(f.to_dict())
    assert g.chain == f.chain and g.center == f.center and g.manifold.ambient_dim == 4


@pytest.mark.parametrize("family", ["cross-ratio", "mixed"])
def test_el_sum_planar(family):
    f = fl.planar_flower()
    rng = rng_for(1)
    rec = fl.el_sum_check(family, f, fl.random_flower_field(rng, f), sample_alpha(rng, range(3)), seed=5)
    assert rec["status"] == "PASS"
    assert rec["extension_spread"] <= 1e-9


def test_el_sum_all_white():
    tet = canonicalize(Kind.WHITE_TETRAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    x = offset((0, 0, 0, 0), (0, 1, 2))
    f = fl.Flower(fl.TwoManifold(corner_at(tet, x), 3), x)
    rec = fl.el_sum_check("cross-ratio", f, FieldAssignment(extension_seed=2),
                          {d: 0.5 + 0.25 * d for d in range(4)}, seed=0)
    assert rec["status"] == "PASS"
    # the corners reach into auxiliary black triangles, whose legs cancel in the sum
    assert all(e["flower_residual"] == 0.0 for e in rec["extensions"])
    assert all(abs(e["corner_sum"]) <= 1e-12 for e in rec["extensions"])

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pluri.errors import InvalidDirection
from pluri.lattice_qan import CellChain, Kind, _positive_facets, canonicalize, facets, permutation_sign, shift, vertices
from pluri.lattice_zn import (
    Projection,
    cube_correspondence,
    cube_facets,
    cube_vertex_map,
    pullback_chain,
    quad_correspondence,
)


def zpoint(labels, n=3):
    return tuple(1 if d in labels else 0 for d in range(n))


def test_project_point_examples():
    P = Projection(1)
    assert P.project_point((0, 2, 0, 0)) == (0, 0, 0)  # x_ii -> x
    assert P.project_point((1, 1, 0, 0)) == (1, 0, 0)  # x_ij -> x_j
    assert P.project_point((1, 0, 1, 0)) == (1, 1, 0)
    assert P.project_point((1, -1, 1, 1)) == (1, 1, 1)
    assert Projection(0).project_point((2, 0, 0, 0)) == (0, 0, 0)
    with pytest.raises(InvalidDirection):
        Projection(5).project_point((0, 0, 0))


@given(st.integers(0, 4), st.lists(st.integers(-5, 5), min_size=4, max_size=4), st.integers(-3, 3))
def test_unproject_roundtrip(i, m, level):
    P = Projection(i)
    p = P.unproject_point(tuple(m), level)
    assert sum(p) == level
    assert P.project_point(p) == tuple(m)


@pytest.mark.parametrize("i", range(4))
def test_quad_correspondence_vertex_image(i):
    P = Projection(i)
    quad = canonicalize(Kind.QUAD, (0, 0, 0), (0, 2))
    chain = quad_correspondence(quad, P)
    black, white = sorted(chain.cells(), key=lambda c: c.kind.label)
    assert black.kind is Kind.BLACK_TRIANGLE and white.kind is Kind.WHITE_TRIANGLE
    # T_i[ijk] - <ijk> with the dropped index written first
    assert black.sign == permutation_sign((i, P.q_dir(0), P.q_dir(2))) == -white.sign
    image = {P.project_point(v) for c in chain.cells() for v in vertices(c)}
    assert image == {zpoint(()), zpoint((0,)), zpoint((2,)), zpoint((0, 2))}
    assert quad_correspondence(-quad, P) == -chain


@pytest.mark.parametrize("i", range(4))
def test_cube_correspondence(i):
    P = Projection(i)
    cube = canonicalize(Kind.CUBE, (0, 0, 0), (0, 1, 2))
    corr = cube_correspondence(cube, P)
    kinds = {c.kind: c.sign for c in corr.cells()}
    s = permutation_sign((i, *(P.q_dir(d) for d in range(3))))
    assert kinds == {Kind.BLACK_TETRAHEDRON: -s, Kind.OCTAHEDRON: s, Kind.WHITE_TETRAHEDRON: -s}
    assert sum(len(_positive_facets(c)) for c in corr.cells()) == 16
    image = {P.project_point(v) for c in corr.cells() for v in vertices(c)}
    assert image == set(vertices(cube))
    vmap = cube_vertex_map(cube, P)
    assert len(set(vmap.values())) == 8


def test_cube_facets_recipe():
    cube = canonicalize(Kind.CUBE, (0, 0, 0), (0, 1, 2))
    Q = lambda d: canonicalize(Kind.QUAD, (0, 0, 0), d)
    expected = CellChain.of(Q((0, 1)), -Q((0, 2)), Q((1, 2)),
                            -shift(Q((0, 1)), 2), shift(Q((0, 2)), 1), -shift(Q((1, 2)), 0))
    assert cube_facets(cube) == expected
    assert cube_facets(-cube) == -expected
    assert not facets(cube_facets(cube))


@pytest.mark.parametrize("i", range(4))
def test_correspondence_compatibility(i):
    # quad-by-quad pullback of the cube boundary is the triangle boundary of the
    # corresponded 3-cells, with the opposite overall orientation
    P = Projection(i)
    cube = canonicalize(Kind.CUBE, (1, -2, 0), (0, 1, 2))
    assert pullback_chain(cube_facets(cube), P) == -facets(cube_correspondence(cube, P))


@pytest.mark.parametrize("i", range(4))
def test_projection_injective_on_cells(i):
    P = Projection(i)
    cube = canonicalize(Kind.CUBE, (0, 0, 0), (0, 1, 2))
    for c in cube_correspondence(cube, P).cells():
        vs = vertices(c)
        assert len({P.project_point(v) for v in vs}) == len(vs)

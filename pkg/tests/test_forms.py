import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pluri.errors import MissingParameter, SingularEvaluation
from pluri.forms import (
    FieldAssignment,
    FormParameters,
    action,
    cube_facets_action,
    eval_one_form,
    eval_pushforward,
    eval_two_form,
    exterior_derivative,
    get_family,
    leg_scale,
    pushforward_exterior_derivative,
    two_form,
)
from pluri.lattice_qan import CellChain, Kind, canonicalize, facets, offset, vertices
from pluri.lattice_zn import Projection
from pluri.sampling import all_pairs, rng_for, sample_alpha, sample_field_values

FAMILIES = ["cross-ratio", "mixed"]
seeds = st.integers(0, 2**32)


def random_setup(family, cell3, seed):
    rng = rng_for(seed)
    L = two_form(family, sample_alpha(rng, range(len(cell3.base))))
    vs = vertices(cell3)
    field = FieldAssignment(sample_field_values(rng, vs, all_pairs(vs)))
    return L, field


def test_log_edge_value():
    F = get_family("cross-ratio")
    edge = canonicalize(Kind.EDGE, (0, 0), (0, 1))
    field = FieldAssignment({(1, 0): 3.0, (0, 1): 1.0})
    params = FormParameters({0: 2.0, 1: 1.0})
    assert eval_one_form(F, params, edge, field) == pytest.approx(0.693147, abs=1e-6)
    assert eval_one_form(F, params, -edge, field) == pytest.approx(-math.log(2), abs=1e-15)


def test_bilinear_edge_value():
    F = get_family("mixed")
    edge = canonicalize(Kind.EDGE, (0, 0, 0, 0), (0, 1))
    field = FieldAssignment({(1, 0, 0, 0): 2.0, (0, 1, 0, 0): 5.0})
    assert eval_one_form(F, FormParameters({}), edge, field) == -10.0


def test_black_triangle_value():
    L = two_form("cross-ratio", {0: 3.0, 1: 2.0, 2: 1.0})
    tri = canonicalize(Kind.BLACK_TRIANGLE, (0, 0, 0), (0, 1, 2))
    field = FieldAssignment({(1, 0, 0): 0.0, (0, 1, 0): 1.0, (0, 0, 1): 3.0})
    expected = 1 * math.log(1) - 2 * math.log(3) + 1 * math.log(2)
    assert eval_two_form(L, tri, field) == pytest.approx(expected, abs=1e-15)
    assert eval_two_form(L, -tri, field) == pytest.approx(-expected, abs=1e-15)


def test_white_triangle_is_zero():
    L = two_form("cross-ratio", {0: 3.0, 1: 2.0, 2: 1.0})
    tri = canonicalize(Kind.WHITE_TRIANGLE, (0, 0, 0), (0, 1, 2))
    assert eval_two_form(L, tri, FieldAssignment(extension_seed=1)) == 0.0


def test_empty_action():
    L = two_form("cross-ratio", {0: 1.0})
    assert action(L, CellChain(), FieldAssignment()) == 0.0


def test_singular_and_missing():
    L = two_form("cross-ratio", {0: 2.0, 1: 1.0, 2: 0.5})
    tri = canonicalize(Kind.BLACK_TRIANGLE, (0, 0, 0), (0, 1, 2))
    field = FieldAssignment({(1, 0, 0): 1.0, (0, 1, 0): 1.0, (0, 0, 1): 3.0})
    with pytest.raises(SingularEvaluation):
        eval_two_form(L, tri, field)
    L2 = two_form("cross-ratio", {0: 2.0})
    with pytest.raises(MissingParameter):
        eval_two_form(L2, tri, FieldAssignment(extension_seed=3))


def test_mixed_family_rule():
    F = get_family("mixed")
    p = FormParameters({m: float(m) for m in range(6)})
    assert type(F.edge(0, 2, p)).__name__ == "BilinearEdge"
    assert type(F.edge(1, 3, p)).__name__ == "LogEdge"
    assert type(F.edge(0, 4, p)).__name__ == "LogEdge"
    assert F.edge(0, 4, p).coef == -4.0


def test_field_extension_reproducible():
    a, b = FieldAssignment(extension_seed=9), FieldAssignment(extension_seed=9)
    p = (3, -1, 2)
    assert a[p] == a[p] == b[p]
    assert -1.0 <= a[p] < 1.0
    with pytest.raises(KeyError):
        FieldAssignment()[p]


@pytest.mark.parametrize("family", FAMILIES)
@given(seed=seeds)
def test_black_tetrahedron_closed(family, seed):
    tet = canonicalize(Kind.BLACK_TETRAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    L, field = random_setup(family, tet, seed)
    assert abs(exterior_derivative(L, tet, field)) <= 1e-12 * leg_scale(L, facets(tet), field)


@pytest.mark.parametrize("family", FAMILIES)
@given(seed=seeds)
def test_white_tetrahedron_exactly_zero(family, seed):
    tet = canonicalize(Kind.WHITE_TETRAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    L, field = random_setup(family, tet, seed)
    assert exterior_derivative(L, tet, field) == 0.0


@pytest.mark.parametrize("family", FAMILIES)
@given(seed=seeds)
def test_orientation_antisymmetry(family, seed):
    octa = canonicalize(Kind.OCTAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    L, field = random_setup(family, octa, seed)
    for tri in facets(octa).cells():
        assert eval_two_form(L, -tri, field) == -eval_two_form(L, tri, field)
    chain = facets(octa)
    assert action(L, -chain, field) == -action(L, chain, field)


@given(seed=seeds)
def test_octahedron_twelve_term_sum(seed):
    octa = canonicalize(Kind.OCTAHEDRON, (0, 0, 0, 0), (0, 1, 2, 3))
    L, field = random_setup("cross-ratio", octa, seed)
    a = L.params

    def x(*d):
        return field[offset((0, 0, 0, 0), d)]

    def lam(i, j, u, v):
        return (a[i] - a[j]) * math.log(abs(u - v))

    def black(i, j, k, t):
        # T_t[ijk]: vertices x_it, x_jt, x_kt
        return lam(i, j, x(i, t), x(j, t)) - lam(i, k, x(i, t), x(k, t)) + lam(j, k, x(j, t), x(k, t))

    expected = black(0, 1, 2, 3) - black(0, 1, 3, 2) + black(0, 2, 3, 1) - black(1, 2, 3, 0)
    got = exterior_derivative(L, octa, field)
    assert got == pytest.approx(expected, abs=1e-12 * leg_scale(L, facets(octa), field))
    assert action(L, facets(octa), field) == got


@pytest.mark.parametrize("i", range(4))
@given(seed=seeds)
def test_pushforward_quad_value(i, seed):
    rng = rng_for(seed)
    alpha = sample_alpha(rng, range(4))
    L = two_form("cross-ratio", alpha)
    P = Projection(i)
    Lz = L.pushforward(P)
    quad = canonicalize(Kind.QUAD, (0, 0, 0), (0, 2))
    pts = vertices(quad)
    zfield = FieldAssignment(sample_field_values(rng, pts, all_pairs(pts)))
    j, k = P.q_dir(0), P.q_dir(2)
    X, Xj, Xk = zfield[(0, 0, 0)], zfield[(1, 0, 0)], zfield[(0, 0, 1)]
    a = alpha
    expected = ((a[i] - a[j]) * math.log(abs(X - Xj)) - (a[i] - a[k]) * math.log(abs(X - Xk))
                + (a[j] - a[k]) * math.log(abs(Xj - Xk)))
    assert eval_pushforward(Lz, quad, zfield) == pytest.approx(expected, abs=1e-13)
    assert eval_pushforward(Lz, -quad, zfield) == -eval_pushforward(Lz, quad, zfield)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("i", range(4))
def test_cube_facet_sum_is_negated_exterior_derivative(family, i):
    rng = rng_for(i)
    L = two_form(family, sample_alpha(rng, range(4)))
    Lz = L.pushforward(Projection(i))
    cube = canonicalize(Kind.CUBE, (0, 0, 0), (0, 1, 2))
    pts = vertices(cube)
    zfield = FieldAssignment(sample_field_values(rng, pts, all_pairs(pts)))
    d = pushforward_exterior_derivative(Lz, cube, zfield)
    assert cube_facets_action(Lz, cube, zfield) == pytest.approx(-d, abs=1e-12)

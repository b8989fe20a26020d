from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pluri import quad_systems as qs
from pluri.errors import DegenerateCoefficient
from pluri.forms import FieldAssignment, two_form
from pluri.lattice_qan import vertices
from pluri.lattice_zn import Projection
from pluri.sampling import all_pairs, rng_for, sample_alpha, sample_field_values
from pluri.variational import cube_corner_residual, unit_cube

EQS = [qs.CrossRatioQ1, qs.KdVH1, qs.TrapezoidalH1]
reals = st.floats(-2, 2, allow_nan=False)
params = st.floats(0.5, 2, allow_nan=False)


@pytest.mark.parametrize("eq", EQS, ids=lambda e: e.label)
@given(vals=st.lists(reals, min_size=4, max_size=4), p=st.tuples(params, params),
       h=st.floats(0.1, 1.0), slot=st.integers(0, 3))
def test_multi_affine(eq, vals, p, h, slot):
    def f(t):
        v = list(vals)
        v[slot] += t
        return eq(*v, *p)

    assert abs(f(h) - 2 * f(0) + f(-h)) <= 1e-10


@pytest.mark.parametrize("eq", EQS, ids=lambda e: e.label)
@given(vals=st.lists(reals, min_size=3, max_size=3), p=st.tuples(params, params),
       target=st.sampled_from(qs.CORNERS))
def test_solve_round_trip(eq, vals, p, target):
    known = dict(zip([c for c in qs.CORNERS if c != target], vals))
    try:
        root = qs.solve_corner(eq, known, target, p)
    except DegenerateCoefficient:
        return
    args = {**known, target: root}
    r = eq(*(args[c] for c in qs.CORNERS), *p)
    scale = max(1.0, abs(root)) * max(1.0, *(abs(v) for v in vals))
    assert abs(r) <= 1e-12 * scale


def test_solve_examples():
    known = {"x": Fraction(0), "xa": Fraction(1), "xb": Fraction(3)}
    assert qs.solve_corner(qs.KdVH1, known, "xab", (2, 1)) == Fraction(1, 2)
    assert qs.solve_corner(qs.CrossRatioQ1, known, "xab", (2, 1)) == Fraction(3, 5)
    with pytest.raises(DegenerateCoefficient):
        qs.solve_corner(qs.KdVH1, {"x": 0.0, "xa": 1.0, "xb": 1.0}, "xab", (2, 1))


@pytest.mark.parametrize("name", sorted(qs.SYSTEMS))
def test_exact_consistency_bit_identical(name):
    rep = qs.consistency_trials(name, 10, seed=3, exact=True)
    assert rep.all_pass
    for r in rep.records:
        assert r["exact"] and len(set(r["routes"].values())) == 1


def test_exact_golden_kdv():
    # independent hand computation of the three routes for integer data
    alpha = {0: Fraction(1), 1: Fraction(3), 2: Fraction(2), 3: Fraction(5)}
    system = qs.kdv_all(alpha)
    initial = {(): Fraction(0), (0,): Fraction(1), (1,): Fraction(4), (2,): Fraction(-2)}
    values, tops = qs.propagate_cube(system, initial)
    p = [alpha[1], alpha[2], alpha[3]]
    x, x0, x1, x2 = 0, Fraction(1), Fraction(4), Fraction(-2)
    x01 = x - (p[0] - p[1]) / (x0 - x1)
    x02 = x - (p[0] - p[2]) / (x0 - x2)
    x12 = x - (p[1] - p[2]) / (x1 - x2)
    top = x0 - (p[1] - p[2]) / (x01 - x02)
    assert values[(0, 1)] == x01 and values[(0, 2)] == x02 and values[(1, 2)] == x12
    assert set(tops.values()) == {top}


@pytest.mark.parametrize("name", sorted(qs.SYSTEMS))
def test_float_consistency_and_tetrahedron(name):
    assert qs.consistency_trials(name, 20, seed=1).all_pass
    assert qs.tetrahedron_trials(name, 10, seed=1).all_pass


def test_tetrahedron_negative_control():
    rng = rng_for(0)
    system = qs.kdv_all(qs.random_alpha(rng)).with_face((0, 1), qs.CrossRatioQ1)
    assert not qs.tetrahedron_trials(system, 5, seed=0).all_pass
    assert not qs.consistency_trials(system, 5, seed=0).all_pass


@given(vals=st.lists(reals, min_size=8, max_size=8))
def test_flip_involution(vals):
    keys = [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
    cube = dict(zip(keys, vals))
    flipped = qs.flip_cube(cube)
    assert flipped[(1,)] == cube[(0, 1)] and flipped[(2,)] == cube[(0, 2)]
    assert qs.flip_cube(flipped) == cube


def test_flip_side_faces():
    rep = qs.flip_trials("kdv_all", 20, seed=4)
    assert rep.all_pass and rep.extra["max_side_residual"] <= 1e-10


@pytest.mark.parametrize("name", sorted(qs.SYSTEMS))
def test_three_leg_small(name):
    assert qs.three_leg_difference_check(name, 20, seed=6).all_pass


def test_three_leg_negated_sides():
    a = {0: 0.0, 1: 1.3, 2: 0.7, 3: 1.9}
    x = lambda *l: 0.1 * sum((m + 1) ** 2 for m in l) - 0.37 * len(l)
    left, right = qs.cross_ratio_three_leg(a, x, 1, 2, 3)
    assert abs((-left) - (-right) + (left - right)) <= 1e-10


@pytest.mark.parametrize("name", sorted(qs.SYSTEMS))
def test_inclusion_unit_patch(name):
    assert qs.quad_solutions_satisfy_corners(name, 1, 10, seed=2).all_pass


def test_non_inclusion_witness():
    w = qs.non_inclusion_witness(seed=0)
    assert w["status"] == "PASS"
    assert w["max_quad_residual"] > 1e-3 and w["max_corner_residual"] <= 1e-9


def test_projections_give_different_systems():
    rng = rng_for(12)
    L = two_form("mixed", sample_alpha(rng, range(4)))
    cube = unit_cube()
    pts = vertices(cube)
    zfield = FieldAssignment(sample_field_values(rng, pts, all_pairs(pts)))
    worst = 0.0
    for v in pts:
        r0 = cube_corner_residual(L.pushforward(Projection(0)), cube, v, zfield).value
        r3 = cube_corner_residual(L.pushforward(Projection(3)), cube, v, zfield).value
        worst = max(worst, abs(r0 - r3))
    assert worst > 0.1


def test_unknown_system():
    with pytest.raises(KeyError):
        qs.get_system("nope", {})

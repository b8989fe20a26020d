"""Discrete 1-forms, triangle 2-forms, actions and exterior derivatives.

A 2-form here vanishes on white triangles and on a black triangle [ijk] is

    L([ijk]) = Lam^ij([ij]) - Lam^ik([ik]) + Lam^jk([jk])

with one edge function ``Lam^ij`` per direction pair. Every evaluation is
expanded into signed edge terms ("legs") and summed with ``math.fsum``, so
legs that cancel pairwise cancel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import InvalidCell, MissingParameter, SingularEvaluation
from .lattice_qan import (
    CellChain,
    Kind,
    OrientedCell,
    Point,
    THREE_CELLS,
    facets,
    offset,
)
from .lattice_zn import Projection, cube_correspondence, cube_facets, pullback_chain, quad_correspondence
from .sampling import hash_unit, FIELD_RANGE


# ---------------------------------------------------------------------------
# edge functions


class EdgeFunction:
    """Real function ``(u, v)`` of the two endpoint values of an edge [ij]."""

    def value(self, u, v):
        raise NotImplementedError

    def grad(self, u, v):
        raise NotImplementedError

    def hess(self, u, v):
        """Return ``(d2/du2, d2/dudv, d2/dv2)``."""
        raise NotImplementedError


@dataclass(frozen=True)
class LogEdge(EdgeFunction):
    """``coef * log|u - v|``."""

    coef: float

    def _diff(self, u, v):
        d = u - v
        if d == 0:
            raise SingularEvaluation(f"log|u - v| at coincident values u = v = {u}")
        return d

    def value(self, u, v):
        return self.coef * math.log(abs(self._diff(u, v)))

    def grad(self, u, v):
        g = self.coef / self._diff(u, v)
        return g, -g

    def hess(self, u, v):
        d = self._diff(u, v)
        h = self.coef / (d * d)
        return -h, h, -h


@dataclass(frozen=True)
class BilinearEdge(EdgeFunction):
    """``coef * u * v``."""

    coef: float

    def value(self, u, v):
        return self.coef * u * v

    def grad(self, u, v):
        return self.coef * v, self.coef * u

    def hess(self, u, v):
        return 0.0, self.coef, 0.0


@dataclass(frozen=True)
class CallableEdge(EdgeFunction):
    """User edge function; missing derivatives fall back to central differences."""

    fn: Callable
    dfn: Callable | None = None
    d2fn: Callable | None = None
    step: float = 1e-5

    def value(self, u, v):
        return self.fn(u, v)

    def grad(self, u, v):
        if self.dfn is not None:
            return self.dfn(u, v)
        hu = self.step * max(1.0, abs(u))
        hv = self.step * max(1.0, abs(v))
        return ((self.fn(u + hu, v) - self.fn(u - hu, v)) / (2 * hu),
                (self.fn(u, v + hv) - self.fn(u, v - hv)) / (2 * hv))

    def hess(self, u, v):
        if self.d2fn is not None:
            return self.d2fn(u, v)
        hu = self.step * max(1.0, abs(u))
        hv = self.step * max(1.0, abs(v))
        gp, gm = self.grad(u + hu, v), self.grad(u - hu, v)
        duu = (gp[0] - gm[0]) / (2 * hu)
        duv = (gp[1] - gm[1]) / (2 * hu)
        gp, gm = self.grad(u, v + hv), self.grad(u, v - hv)
        dvv = (gp[1] - gm[1]) / (2 * hv)
        return duu, duv, dvv


# ---------------------------------------------------------------------------
# families and parameters


@dataclass(frozen=True)
class FormParameters:
    alpha: Mapping

    def __getitem__(self, d):
        try:
            return self.alpha[d]
        except KeyError:
            raise MissingParameter(f"no alpha assigned to direction {d}") from None

    def __contains__(self, d):
        return d in self.alpha

    def with_alpha(self, extra: Mapping) -> "FormParameters":
        merged = dict(self.alpha)
        merged.update(extra)
        return FormParameters(merged)


@dataclass(frozen=True)
class OneFormFamily:
    """Rule assigning an :class:`EdgeFunction` to each direction pair ``i < j``."""

    name: str
    rule: Callable  # (i, j, params) -> EdgeFunction

    def edge(self, i: int, j: int, params: FormParameters) -> EdgeFunction:
        if not i < j:
            raise InvalidCell(f"edge directions must be increasing, got ({i}, {j})")
        return self.rule(i, j, params)


def _cross_ratio_rule(i, j, params):
    return LogEdge(params[i] - params[j])


def _mixed_rule(i, j, params):
    # bilinear legs only on [0m], m = 1, 2, 3; everything else is logarithmic
    if i == 0 and 1 <= j <= 3:
        return BilinearEdge(-1.0)
    return LogEdge(params[i] - params[j])


cross_ratio_log = OneFormFamily("cross-ratio", _cross_ratio_rule)
mixed_q_a3 = OneFormFamily("mixed", _mixed_rule)


def bilinear_control(perturbed=(0, 1), factor=2.0) -> OneFormFamily:
    """``x_i * x_j`` on every pair, scaled by ``factor`` on one pair."""

    def rule(i, j, params):
        return BilinearEdge(factor if (i, j) == tuple(perturbed) else 1.0)

    return OneFormFamily("bilinear-control", rule)


FAMILIES = {
    "cross-ratio": cross_ratio_log,
    "mixed": mixed_q_a3,
    "bilinear-control": bilinear_control(),
}


def get_family(name: str) -> OneFormFamily:
    key = name.replace("_", "-")
    aliases = {"cross-ratio-log": "cross-ratio", "mixed-q-a3": "mixed"}
    key = aliases.get(key, key)
    if key not in FAMILIES:
        raise KeyError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    return FAMILIES[key]


@dataclass(frozen=True)
class TwoForm:
    family: OneFormFamily
    params: FormParameters

    def edge(self, i, j) -> EdgeFunction:
        return self.family.edge(i, j, self.params)

    def pushforward(self, proj: Projection) -> "PushforwardForm":
        return PushforwardForm(self, proj)


def two_form(family: OneFormFamily | str, alpha: Mapping) -> TwoForm:
    if isinstance(family, str):
        family = get_family(family)
    return TwoForm(family, FormParameters(dict(alpha)))


@dataclass(frozen=True)
class PushforwardForm:
    """``(P_i)_* L`` on Z^N, evaluated through the quad correspondence."""

    form: TwoForm
    projection: Projection


# ---------------------------------------------------------------------------
# fields


class FieldAssignment:
    """Real field on lattice points with optional seeded lazy extension.

    Points missing from ``values`` are filled with a value that depends only on
    ``extension_seed`` and the point, then cached. Without a seed, reading a
    missing point raises KeyError.
    """

    def __init__(self, values: Mapping | None = None, extension_seed: int | None = None,
                 value_range=FIELD_RANGE):
        self.values = {tuple(k): v for k, v in (values or {}).items()}
        self.extension_seed = extension_seed
        self.value_range = value_range

    def __getitem__(self, p):
        p = tuple(p)
        try:
            return self.values[p]
        except KeyError:
            pass
        if self.extension_seed is None:
            raise KeyError(f"field undefined at {p}")
        lo, hi = self.value_range
        v = lo + (hi - lo) * hash_unit(self.extension_seed, p)
        self.values[p] = v
        return v

    def __contains__(self, p):
        return tuple(p) in self.values

    def with_values(self, overrides: Mapping) -> "FieldAssignment":
        out = FieldAssignment(self.values, self.extension_seed, self.value_range)
        out.values.update({tuple(k): v for k, v in overrides.items()})
        return out

    def __repr__(self):
        return f"FieldAssignment({len(self.values)} points, seed={self.extension_seed})"


class PulledBackField:
    """Q(A_N) view of a Z^N field: ``x(p) = z[P_i(p)]``."""

    def __init__(self, zfield, proj: Projection):
        self.zfield = zfield
        self.proj = proj

    def __getitem__(self, p):
        return self.zfield[self.proj.project_point(p)]


class _Overlay:
    def __init__(self, base, overrides):
        self.base = base
        self.overrides = overrides

    def __getitem__(self, p):
        p = tuple(p)
        if p in self.overrides:
            return self.overrides[p]
        return self.base[p]


def overlay(field, overrides: Mapping):
    """Read-only view of ``field`` with some values replaced."""
    return _Overlay(field, {tuple(k): v for k, v in overrides.items()})


# ---------------------------------------------------------------------------
# legs


@dataclass(frozen=True)
class Leg:
    """Signed edge term ``coef * Lam^ij(x[p], x[q])``."""

    coef: int
    i: int
    j: int
    p: Point
    q: Point

    @property
    def edge(self) -> OrientedCell:
        base = tuple(a - (d == self.i) for d, a in enumerate(self.p))
        return OrientedCell(Kind.EDGE, base, (self.i, self.j), 1)


def legs(chain) -> list:
    """Expand a triangle chain (or a single triangle) into legs."""
    if isinstance(chain, OrientedCell):
        chain = CellChain.of(chain)
    out = []
    for tri, coef in chain.terms():
        if tri.kind is Kind.WHITE_TRIANGLE:
            continue
        if tri.kind is not Kind.BLACK_TRIANGLE:
            raise InvalidCell(f"2-forms are evaluated on triangles, got {tri.kind.label}")
        for e in facets(tri):
            i, j = e.dirs
            out.append(Leg(coef * e.sign, i, j, offset(e.base, (i,)), offset(e.base, (j,))))
    return out


def _leg_value(L: TwoForm, leg: Leg, field):
    return leg.coef * L.edge(leg.i, leg.j).value(field[leg.p], field[leg.q])


def leg_scale(L: TwoForm, chain, field) -> float:
    """Sum of absolute leg values; the natural magnitude for roundoff bounds."""
    return math.fsum(abs(_leg_value(L, leg, field)) for leg in legs(chain))


def eval_one_form(family: OneFormFamily, params: FormParameters, edge: OrientedCell, field) -> float:
    if edge.kind is not Kind.EDGE:
        raise InvalidCell(f"expected an edge, got {edge.kind.label}")
    i, j = edge.dirs
    f = family.edge(i, j, params)
    return edge.sign * f.value(field[offset(edge.base, (i,))], field[offset(edge.base, (j,))])


def eval_two_form(L: TwoForm, triangle: OrientedCell, field) -> float:
    if triangle.kind not in (Kind.BLACK_TRIANGLE, Kind.WHITE_TRIANGLE):
        raise InvalidCell(f"expected a triangle, got {triangle.kind.label}")
    if triangle.kind is Kind.WHITE_TRIANGLE:
        return 0.0
    return math.fsum(_leg_value(L, leg, field) for leg in legs(triangle))


def action(L: TwoForm, manifold: CellChain, field) -> float:
    """Sum of the 2-form over a chain of triangles."""
    return math.fsum(_leg_value(L, leg, field) for leg in legs(manifold))


def exterior_derivative(L: TwoForm, cell3: OrientedCell, field) -> float:
    if cell3.kind not in THREE_CELLS:
        raise InvalidCell(f"expected a 3-cell, got {cell3.kind.label}")
    return action(L, facets(cell3), field)


# ---------------------------------------------------------------------------
# derivatives


def leg_contributions(L: TwoForm, chain, field, center) -> list:
    """Per-edge derivative contributions at ``center``, summed over repeats.

    Returns ``[(edge, contribution)]`` for every edge of the chain incident to
    ``center``, in first-appearance order.
    """
    center = tuple(center)
    acc: dict = {}
    for leg in legs(chain):
        if center != leg.p and center != leg.q:
            continue
        du, dv = L.edge(leg.i, leg.j).grad(field[leg.p], field[leg.q])
        c = leg.coef * (du if center == leg.p else dv)
        acc.setdefault(leg.edge, []).append(c)
    return [(e, math.fsum(cs)) for e, cs in acc.items()]


def action_gradient(L: TwoForm, chain, field, points) -> np.ndarray:
    index = {tuple(p): n for n, p in enumerate(points)}
    parts = [[] for _ in index]
    for leg in legs(chain):
        a, b = index.get(leg.p), index.get(leg.q)
        if a is None and b is None:
            continue
        du, dv = L.edge(leg.i, leg.j).grad(field[leg.p], field[leg.q])
        if a is not None:
            parts[a].append(leg.coef * du)
        if b is not None:
            parts[b].append(leg.coef * dv)
    return np.array([math.fsum(p) for p in parts])


def action_hessian(L: TwoForm, chain, field, points) -> np.ndarray:
    index = {tuple(p): n for n, p in enumerate(points)}
    H = np.zeros((len(index), len(index)))
    for leg in legs(chain):
        a, b = index.get(leg.p), index.get(leg.q)
        if a is None and b is None:
            continue
        huu, huv, hvv = L.edge(leg.i, leg.j).hess(field[leg.p], field[leg.q])
        c = leg.coef
        if a is not None:
            H[a, a] += c * huu
        if b is not None:
            H[b, b] += c * hvv
        if a is not None and b is not None:
            H[a, b] += c * huv
            H[b, a] += c * huv
    return H


# ---------------------------------------------------------------------------
# pushforward to Z^N


def _pulled(Lz: PushforwardForm, zfield):
    return PulledBackField(zfield, Lz.projection)


def eval_pushforward(Lz: PushforwardForm, quad: OrientedCell, zfield) -> float:
    """``(P_i)_* L`` on a quad: L on ``T_i[ijk] - <ijk>`` with the pulled-back field."""
    return action(Lz.form, quad_correspondence(quad, Lz.projection), _pulled(Lz, zfield))


def cube_chain(Lz: PushforwardForm, cube: OrientedCell) -> CellChain:
    """Triangle chain whose action is the exterior derivative on ``cube``."""
    return facets(cube_correspondence(cube, Lz.projection))


def pushforward_exterior_derivative(Lz: PushforwardForm, cube: OrientedCell, zfield) -> float:
    """Exterior derivative of the pushforward on a cube.

    Evaluated as ``(P_i)_*`` of dL on the corresponded 3-cells; the two
    tetrahedra contribute nothing, so this is the pulled-back value of dL on
    the (signed) octahedron of the correspondence.
    """
    return action(Lz.form, cube_chain(Lz, cube), _pulled(Lz, zfield))


def cube_facets_action(Lz: PushforwardForm, cube: OrientedCell, zfield) -> float:
    """Sum of the pushforward over the six cube facets.

    Under the facet recipe this is the negative of
    :func:`pushforward_exterior_derivative`: the corresponded 3-cell chain
    carries the opposite orientation.
    """
    return action(Lz.form, pullback_chain(cube_facets(cube), Lz.projection), _pulled(Lz, zfield))

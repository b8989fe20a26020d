"""Flowers in Q(A_N) and their decomposition into 3D corners.

A flower is the star of an interior vertex ``X`` in an oriented triangle
surface. :func:`decompose` writes it as a sum of 3D corners at ``X`` on
3-cells of Q(A_{N+2}), using two auxiliary directions ``M = N + 1`` and
``L = N + 2`` (the flower's points are padded with two zero coordinates).
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field as dc_field

from .errors import InvalidFlower, InvalidManifold, NotInterior
from .forms import FieldAssignment, action_gradient, two_form
from .lattice_qan import (
    CellChain,
    Kind,
    OrientedCell,
    canonicalize,
    cell_from_dict,
    cell_to_dict,
    corner_at,
    facets,
    pad,
    shift_point,
    vertices,
)
from .reports import SuiteReport
from .sampling import derive_seed, rng_for, sample_alpha, sample_field_values


@dataclass(frozen=True)
class TwoManifold:
    chain: CellChain
    ambient_dim: int  # N for Q(A_N); points have N + 1 coordinates

    @classmethod
    def of(cls, triangles, ambient_dim=None) -> "TwoManifold":
        triangles = list(triangles)
        if ambient_dim is None:
            ambient_dim = len(triangles[0].base) - 1 if triangles else 0
        return cls(CellChain(triangles), ambient_dim)


@dataclass(frozen=True)
class Flower:
    manifold: TwoManifold
    center: tuple

    @property
    def chain(self) -> CellChain:
        return self.manifold.chain

    def to_dict(self):
        return {"center": list(self.center), "ambient_dim": self.manifold.ambient_dim,
                "triangles": [cell_to_dict(c) for c in self.chain.cells()]}

    @classmethod
    def from_dict(cls, d) -> "Flower":
        tris = [cell_from_dict(t) for t in d["triangles"]]
        center = tuple(d["center"])
        ambient = d.get("ambient_dim", len(center) - 1)
        return cls(TwoManifold(CellChain(tris), ambient), center)


# ---------------------------------------------------------------------------
# validation


def _edge_uses(chain: CellChain):
    """``{edge key: [(triangle, signed coefficient of the edge)]}``."""
    uses = defaultdict(list)
    for tri, coef in chain.terms():
        for e, ec in facets(tri).items():
            uses[e].append((tri, coef * ec))
    return uses


def validate(manifold: TwoManifold) -> list:
    """Structured violations; an empty list means the chain is a valid 2-manifold."""
    out = []
    for tri, coef in manifold.chain.terms():
        if tri.kind not in (Kind.BLACK_TRIANGLE, Kind.WHITE_TRIANGLE):
            out.append({"type": "not_a_triangle", "cell": repr(tri)})
        elif coef not in (1, -1):
            out.append({"type": "coefficient", "cell": repr(tri), "coefficient": coef})
        if len(tri.base) != manifold.ambient_dim + 1:
            out.append({"type": "dimension", "cell": repr(tri)})
    if out:
        return out
    for (kind, base, dirs), uses in sorted(_edge_uses(manifold.chain).items(), key=lambda kv: repr(kv[0])):
        edge = repr(OrientedCell(kind, base, dirs))
        if len(uses) > 2:
            out.append({"type": "edge_overused", "edge": edge, "count": len(uses)})
        elif len(uses) == 2 and uses[0][1] * uses[1][1] > 0:
            out.append({"type": "orientation", "edge": edge,
                        "triangles": [repr(t) for t, _ in uses]})
    return out


def _incident_edges(chain: CellChain, center):
    counts = Counter()
    for tri, coef in chain.terms():
        for e in facets(tri).cells():
            if center in vertices(e):
                counts[e.key] += 1
    return counts


def _connected(chain: CellChain, center) -> bool:
    tris = [t for t, _ in chain.terms()]
    if not tris:
        return True
    by_edge = defaultdict(list)
    for n, t in enumerate(tris):
        for e in facets(t).cells():
            if center in vertices(e):
                by_edge[e.key].append(n)
    seen, todo = {0}, [0]
    while todo:
        n = todo.pop()
        for e in facets(tris[n]).cells():
            for m in by_edge.get(e.key, ()):
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
    return len(seen) == len(tris)


def flower_at(manifold: TwoManifold, vertex) -> Flower:
    """Triangles of ``manifold`` containing ``vertex``, checked to form a flower."""
    vertex = tuple(vertex)
    problems = validate(manifold)
    if problems:
        raise InvalidManifold(f"not a 2-manifold: {problems[:3]}")
    star = manifold.chain.restrict(lambda t: vertex in vertices(t))
    if not star:
        raise NotInterior(f"{vertex} is not a vertex of the manifold")
    for key, count in _incident_edges(star, vertex).items():
        if count != 2:
            raise NotInterior(f"edge {OrientedCell(*key)!r} at {vertex} lies in {count} triangle(s)")
    if not _connected(star, vertex):
        raise InvalidFlower(f"the triangles around {vertex} are not edge-connected")
    return Flower(TwoManifold(star, manifold.ambient_dim), vertex)


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class Decomposition:
    corners: list  # [(signed 3-cell, center)]
    stages: list = dc_field(default_factory=list)  # residual chains after steps 1-2 and 3

    def chain(self) -> CellChain:
        return corner_sum(self.corners)


def corner_sum(corners) -> CellChain:
    out = CellChain()
    for cell3, center in corners:
        for c, coef in corner_at(cell3, center).terms():
            out._add(c.key, coef)
    return out


def padded_flower(flower: Flower) -> tuple[CellChain, tuple]:
    chain = CellChain({(k, pad(b, 2), d): v for (k, b, d), v in flower.chain.items()})
    return chain, pad(flower.center, 2)


def decompose(flower: Flower) -> Decomposition:
    """Three-step construction of the corner sum for a flower.

    1. each black ``s[ijk]`` adds the corner at X on the black tetrahedron ``s[ijkM]``;
    2. each white ``s<ijk>`` adds the corner at X on the octahedron ``s[ijkM]``;
    3. each white ``s<ijM>`` left over adds the corner at X on the white
       tetrahedron ``-s T_{-L}<ijML>``.
    """
    N = flower.manifold.ambient_dim
    M, L = N + 1, N + 2
    sigma, X = padded_flower(flower)
    corners = []
    for tri in sigma.cells():
        if tri.kind is Kind.BLACK_TRIANGLE:
            cell3 = canonicalize(Kind.BLACK_TETRAHEDRON, tri.base, tri.dirs + (M,), tri.sign)
        elif tri.kind is Kind.WHITE_TRIANGLE:
            cell3 = canonicalize(Kind.OCTAHEDRON, tri.base, tri.dirs + (M,), tri.sign)
        else:
            raise InvalidFlower(f"{tri!r} is not a triangle")
        if X not in vertices(cell3):
            raise InvalidFlower(f"{tri!r} does not contain the center")
        corners.append((cell3, X))
    residual = corner_sum(corners) - sigma
    stages = [residual]
    for tri, coef in residual.terms():
        if tri.kind is not Kind.WHITE_TRIANGLE or tri.dirs[-1] != M:
            raise InvalidFlower(f"unexpected residual {coef} * {tri!r} after steps 1-2")
        # a multiplicity above one occurs when several white triangles at
        # X share the pair of directions spanning X; each copy gets a corner
        cell3 = canonicalize(Kind.WHITE_TETRAHEDRON, shift_point(tri.base, L, -1), tri.dirs + (L,),
                             -1 if coef > 0 else 1)
        corners.extend([(cell3, X)] * abs(coef))
    stages.append(corner_sum(corners) - sigma)
    return Decomposition(corners, stages)


def verify_decomposition(flower: Flower, corners) -> bool:
    """Exact chain equality of the corner sum and the padded flower."""
    if isinstance(corners, Decomposition):
        corners = corners.corners
    sigma, _ = padded_flower(flower)
    return corner_sum(corners) == sigma


# ---------------------------------------------------------------------------
# Euler-Lagrange sums


class AuxiliaryField:
    """Field on Q(A_{N+2}): the flower field on padded points, seeded values elsewhere."""

    def __init__(self, field, extension_seed: int):
        self.field = field
        self.extension = FieldAssignment(extension_seed=extension_seed)

    def __getitem__(self, p):
        p = tuple(p)
        if p[-2:] == (0, 0):
            return self.field[p[:-2]]
        return self.extension[p]


def el_sum_check(family, flower: Flower, field, alpha: dict, seed: int, extensions=3, tol=1e-9) -> dict:
    """Compare the flower's Euler-Lagrange residual with its sum of corner residuals.

    Repeated for ``extensions`` independent fills of the auxiliary vertices.
    """
    from .variational import corner_residual

    N = flower.manifold.ambient_dim
    M, L_ = N + 1, N + 2
    rng = rng_for(seed, 0)
    full_alpha = sample_alpha(rng, [M, L_], existing=alpha)
    form = two_form(family, full_alpha)
    dec = decompose(flower)
    sigma, X = padded_flower(flower)
    records = []
    for k in range(extensions):
        aux = AuxiliaryField(field, derive_seed(seed, k + 1))
        lhs = float(action_gradient(form, sigma, aux, [X])[0])
        parts = [corner_residual(form, c, X, aux).value for c, _ in dec.corners]
        rhs = math.fsum(parts)
        records.append({"extension": k, "flower_residual": lhs, "corner_sum": rhs, "difference": abs(lhs - rhs)})
    spread = max(r["corner_sum"] for r in records) - min(r["corner_sum"] for r in records)
    worst = max(r["difference"] for r in records)
    return {"status": "PASS" if worst <= tol and spread <= tol else "FAIL", "max_difference": worst,
            "extension_spread": spread, "corners": len(dec.corners), "extensions": records}


# ---------------------------------------------------------------------------
# flower construction


def link_triangle(center, u, v):
    """The triangle spanned by ``center`` and two neighbours ``X + e_a - e_b``.

    Neighbours are given as ``(a, b)``. Returns the positive triangle, or
    None if the three points do not span a triangle.
    """
    (a1, b1), (a2, b2) = u, v
    if b1 == b2 and a1 != a2:
        # black: X = n + e_b, other vertices n + e_a1, n + e_a2
        return canonicalize(Kind.BLACK_TRIANGLE, shift_point(center, b1, -1), (b1, a1, a2))
    if a1 == a2 and b1 != b2:
        # white: X = n + e_b1 + e_b2, other vertices n + e_a + e_b2, n + e_a + e_b1
        n = shift_point(shift_point(center, b1, -1), b2, -1)
        return canonicalize(Kind.WHITE_TRIANGLE, n, (a1, b1, b2))
    return None


def link_neighbours(center):
    n = len(center)
    return [(a, b) for a in range(n) for b in range(n) if a != b]


def _spoke(center, nb):
    a, b = nb
    return shift_point(shift_point(center, a), b, -1)


def flower_from_cycle(center, cycle) -> Flower:
    """Orient the triangles of a closed neighbour cycle consistently."""
    center = tuple(center)
    tris = []
    for k in range(len(cycle)):
        t = link_triangle(center, cycle[k], cycle[(k + 1) % len(cycle)])
        if t is None:
            raise InvalidFlower(f"{cycle[k]} and {cycle[(k + 1) % len(cycle)]} are not linked")
        tris.append(t)
    signed = [tris[0]]
    for k in range(1, len(tris)):
        spoke = _spoke(center, cycle[k])
        prev, cur = signed[-1], tris[k]
        cp = _spoke_coefficient(prev, center, spoke)
        cc = _spoke_coefficient(cur, center, spoke)
        signed.append(cur if cp * cc < 0 else -cur)
    flower = Flower(TwoManifold.of(signed), center)
    if validate(flower.manifold):
        raise InvalidFlower("inconsistent orientation around the cycle")
    return flower


def _spoke_coefficient(tri, center, spoke):
    for e in facets(tri).cells():
        vs = vertices(e)
        if center in vs and spoke in vs:
            return e.sign
    raise InvalidFlower(f"{tri!r} has no edge {center}-{spoke}")


def planar_flower(center=(0, 0, 0)) -> Flower:
    """The six-triangle flower of a Q(A_2) plane (three black, three white)."""
    return flower_from_cycle(center, [(1, 0), (2, 0), (2, 1), (0, 1), (0, 2), (1, 2)])


def random_flower(rng, ambient_dim: int, min_len=8, max_len=12, center=None, tries=2000) -> Flower:
    """Random simple cycle of length ``min_len..max_len`` in the link of a vertex."""
    n = ambient_dim + 1
    center = tuple(center) if center is not None else (0,) * n
    nbs = link_neighbours(center)
    adj = {u: [v for v in nbs if v != u and link_triangle(center, u, v) is not None] for u in nbs}
    target = int(rng.integers(min_len, max_len + 1))
    for _ in range(tries):
        start = nbs[int(rng.integers(len(nbs)))]
        path = [start]
        while len(path) < target:
            options = [v for v in adj[path[-1]] if v not in path]
            if not options:
                break
            path.append(options[int(rng.integers(len(options)))])
        if len(path) == target and path[0] in adj[path[-1]]:
            return flower_from_cycle(center, path)
    raise InvalidFlower(f"no cycle of length {target} found")


def corner_flowers(ambient_dim=3):
    """Every 3D corner of the three 3-cell kinds on directions 0..3, as flowers."""
    base = (0,) * (ambient_dim + 1)
    out = []
    for kind in (Kind.BLACK_TETRAHEDRON, Kind.OCTAHEDRON, Kind.WHITE_TETRAHEDRON):
        cell3 = canonicalize(kind, base, (0, 1, 2, 3))
        for v in vertices(cell3):
            out.append((f"{kind.label}@{v}", Flower(TwoManifold(corner_at(cell3, v), ambient_dim), v)))
    return out


def builtin_corpus(seed=2024, randomized=50):
    """Named flowers: all 3D corners, the planar flower, and random fans."""
    corpus = corner_flowers()
    corpus.append(("planar", planar_flower()))
    for k in range(randomized):
        rng = rng_for(seed, k)
        dim = 3 if k % 2 == 0 else 4
        corpus.append((f"random-{k}-A{dim}", random_flower(rng, dim)))
    return corpus


def random_flower_field(rng, flower: Flower) -> FieldAssignment:
    pts = sorted({v for t in flower.chain.cells() for v in vertices(t)})
    pairs = [(p, q) for t in flower.chain.cells() for p, q in _pairs(vertices(t))]
    return FieldAssignment(sample_field_values(rng, pts, pairs))


def _pairs(vs):
    vs = list(vs)
    return [(vs[a], vs[b]) for a in range(len(vs)) for b in range(a + 1, len(vs))]


def decomposition_suite(corpus) -> SuiteReport:
    records = []
    for name, fl in corpus:
        dec = decompose(fl)
        ok = verify_decomposition(fl, dec)
        stage_coefs = sorted({c for ch in dec.stages for c in ch.coefficients()})
        records.append({"flower": name, "status": "PASS" if ok else "FAIL", "triangles": len(fl.chain),
                        "corners": len(dec.corners),
                        "corner_kinds": dict(sorted(Counter(c.kind.label for c, _ in dec.corners).items())),
                        "stage_coefficients": stage_coefs})
    return SuiteReport("flower-decompose", {"flowers": len(corpus)}, records)


def el_sum_suite(family, corpus, seed: int, tol=1e-9) -> SuiteReport:
    records = []
    for k, (name, fl) in enumerate(corpus):
        rng = rng_for(seed, k)
        alpha = sample_alpha(rng, range(fl.manifold.ambient_dim + 1))
        fld = random_flower_field(rng, fl)
        rec = el_sum_check(family, fl, fld, alpha, derive_seed(seed, k), tol=tol)
        records.append({"flower": name, **rec})
    fam = family if isinstance(family, str) else family.name
    rep = SuiteReport("el-sum", {"family": fam, "seed": seed, "tolerance": tol, "flowers": len(corpus)}, records)
    rep.extra["max_difference"] = rep.max_of("max_difference")
    return rep

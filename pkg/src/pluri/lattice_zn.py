"""The cubic lattice Z^N and its relation to Q(A_N).

A :class:`Projection` drops one ambient coordinate ``i`` of Z^{N+1}. Cubic
directions are numbered ``0..N-1`` after the deletion; :meth:`Projection.q_dir`
translates them back to root-lattice labels.

Corresponded cells are based so that all their vertices lie on the level
``sum(n) == 0``, where ``P_i`` is one-to-one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidDirection
from .lattice_qan import (
    CellChain,
    Kind,
    OrientedCell,
    Point,
    canonicalize,
    facets,
    shift_point,
)


@dataclass(frozen=True)
class Projection:
    dropped: int

    def project_point(self, p: Point) -> Point:
        if not 0 <= self.dropped < len(p):
            raise InvalidDirection(f"cannot drop coordinate {self.dropped} of a {len(p)}-point")
        return tuple(p[: self.dropped]) + tuple(p[self.dropped + 1:])

    def unproject_point(self, m: Point, level: int = 0) -> Point:
        """Reinsert the dropped coordinate so that the coordinates sum to ``level``."""
        if not 0 <= self.dropped <= len(m):
            raise InvalidDirection(f"cannot reinsert coordinate {self.dropped} into a {len(m)}-point")
        m = tuple(m)
        return m[: self.dropped] + (level - sum(m),) + m[self.dropped:]

    def q_dir(self, zdir: int) -> int:
        if zdir < 0:
            raise InvalidDirection(f"negative direction {zdir}")
        return zdir if zdir < self.dropped else zdir + 1

    def z_dir(self, qdir: int) -> int:
        if qdir == self.dropped:
            raise InvalidDirection(f"direction {qdir} is the projected one")
        return qdir if qdir < self.dropped else qdir - 1


def project_point(proj: Projection, p: Point) -> Point:
    return proj.project_point(p)


def _q_base(proj: Projection, m: Point, rise: int) -> Point:
    # vertices of the corresponded cells sit ``rise`` levels above the base
    return proj.unproject_point(m, level=-rise)


def _check_cubic(c: OrientedCell, kind: Kind, proj: Projection):
    if c.kind is not kind:
        raise InvalidDirection(f"expected a {kind.label}, got {c.kind.label}")
    if len(set(c.dirs)) != len(c.dirs):
        raise InvalidDirection(f"overlapping directions {c.dirs}")


def quad_correspondence(quad: OrientedCell, proj: Projection) -> CellChain:
    """Q(A_N) chain ``T_i[ijk] - <ijk>`` (black minus white) for the quad ``{jk}``."""
    _check_cubic(quad, Kind.QUAD, proj)
    i = proj.dropped
    j, k = (proj.q_dir(d) for d in quad.dirs)
    n = _q_base(proj, quad.base, 2)
    black = canonicalize(Kind.BLACK_TRIANGLE, shift_point(n, i), (i, j, k), quad.sign)
    white = canonicalize(Kind.WHITE_TRIANGLE, n, (i, j, k), -quad.sign)
    return CellChain.of(black, white)


def cube_correspondence(cube: OrientedCell, proj: Projection) -> CellChain:
    """Q(A_N) chain of 3-cells for the cube ``{jkl}``.

    Returns ``-T_i[ijkl] + [ijkl] - T_(-i)<ijkl>`` (black tetrahedron,
    octahedron, white tetrahedron), with the dropped index written first.
    """
    _check_cubic(cube, Kind.CUBE, proj)
    i = proj.dropped
    j, k, l = (proj.q_dir(d) for d in cube.dirs)
    n = _q_base(proj, cube.base, 2)
    dirs = (i, j, k, l)
    s = cube.sign
    return CellChain.of(
        canonicalize(Kind.BLACK_TETRAHEDRON, shift_point(n, i), dirs, -s),
        canonicalize(Kind.OCTAHEDRON, n, dirs, s),
        canonicalize(Kind.WHITE_TETRAHEDRON, shift_point(n, i, -1), dirs, -s),
    )


def correspondence_octahedron(cube: OrientedCell, proj: Projection) -> OrientedCell:
    """The signed octahedron inside :func:`cube_correspondence`."""
    for c in cube_correspondence(cube, proj):
        if c.kind is Kind.OCTAHEDRON:
            return c
    raise AssertionError("cube correspondence without octahedron")


def cube_facets(cube: OrientedCell) -> CellChain:
    """``{jk} - {jl} + {kl} - T_l{jk} + T_k{jl} - T_j{kl}``."""
    if cube.kind is not Kind.CUBE:
        raise InvalidDirection(f"expected a cube, got {cube.kind.label}")
    return facets(cube)


def pullback_chain(chain: CellChain, proj: Projection) -> CellChain:
    """Map a chain of quads to the Q(A_N) triangle chain, linearly."""
    out = CellChain()
    for q, coef in chain.terms():
        out = out + coef * quad_correspondence(q, proj)
    return out


def cube_vertex_map(cube: OrientedCell, proj: Projection) -> dict:
    """Map each cube vertex (Z^N) to its Q(A_N) preimage on level 0."""
    return {proj.project_point(v): v for v in _level_zero_vertices(cube, proj)}


def _level_zero_vertices(cube: OrientedCell, proj: Projection):
    seen = []
    for c in cube_correspondence(cube, proj):
        for v in c.vertices():
            if v not in seen:
                seen.append(v)
    return seen

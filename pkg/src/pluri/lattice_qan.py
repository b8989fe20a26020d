"""Oriented cell complex of the root lattice Q(A_N).

Points are integer tuples in the ambient Z^{N+1}. A cell is a base point, a
strictly increasing tuple of direction indices, a kind and a sign. The vertex
sets are::

    Edge [ij]            {n+e_i, n+e_j}
    BlackTriangle        {n+e_i, n+e_j, n+e_k}
    WhiteTriangle        {n+e_i+e_j, n+e_i+e_k, n+e_j+e_k}
    BlackTetrahedron     {n+e_a}            for a in dirs
    Octahedron           {n+e_a+e_b}        for a < b in dirs
    WhiteTetrahedron     {n+e_a+e_b+e_c}    for a < b < c in dirs

The cubic-lattice kinds (ZEdge, Quad, Cube) share the same representation;
their vertex set is {n + sum(e_d for d in S)} over all subsets S of dirs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .errors import DimensionMismatch, InvalidCell, NotAVertex

Point = tuple  # tuple[int, ...]


class Kind(enum.Enum):
    VERTEX = ("vertex", 0, 0)
    EDGE = ("edge", 1, 2)
    BLACK_TRIANGLE = ("black_triangle", 2, 3)
    WHITE_TRIANGLE = ("white_triangle", 2, 3)
    BLACK_TETRAHEDRON = ("black_tetrahedron", 3, 4)
    OCTAHEDRON = ("octahedron", 3, 4)
    WHITE_TETRAHEDRON = ("white_tetrahedron", 3, 4)
    ZEDGE = ("zedge", 1, 1)
    QUAD = ("quad", 2, 2)
    CUBE = ("cube", 3, 3)

    def __init__(self, label, dim, ndirs):
        self.label = label
        self.dim = dim
        self.ndirs = ndirs

    @classmethod
    def from_label(cls, label: str) -> "Kind":
        for k in cls:
            if k.label == label:
                return k
        raise InvalidCell(f"unknown cell kind {label!r}")


TRIANGLES = (Kind.BLACK_TRIANGLE, Kind.WHITE_TRIANGLE)
THREE_CELLS = (Kind.BLACK_TETRAHEDRON, Kind.OCTAHEDRON, Kind.WHITE_TETRAHEDRON)
CUBIC_KINDS = (Kind.ZEDGE, Kind.QUAD, Kind.CUBE)


def unit(n: int, i: int) -> Point:
    return tuple(1 if d == i else 0 for d in range(n))


def shift_point(p: Point, direction: int, steps: int = 1) -> Point:
    q = list(p)
    q[direction] += steps
    return tuple(q)


def offset(p: Point, dirs: Iterable[int]) -> Point:
    q = list(p)
    for d in dirs:
        q[d] += 1
    return tuple(q)


def pad(p: Point, extra: int) -> Point:
    """Embed a point into a larger ambient lattice by appending zeros."""
    return tuple(p) + (0,) * extra


def permutation_sign(seq: Iterable[int]) -> int:
    seq = list(seq)
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class OrientedCell:
    kind: Kind
    base: Point
    dirs: tuple
    sign: int = 1

    @property
    def dim(self) -> int:
        return self.kind.dim

    @property
    def key(self) -> tuple:
        return (self.kind, self.base, self.dirs)

    def __neg__(self) -> "OrientedCell":
        return OrientedCell(self.kind, self.base, self.dirs, -self.sign)

    def positive(self) -> "OrientedCell":
        return OrientedCell(self.kind, self.base, self.dirs, 1)

    def vertices(self) -> tuple:
        return vertices(self)

    def __repr__(self) -> str:
        s = "+" if self.sign > 0 else "-"
        d = "".join(str(x) for x in self.dirs)
        return f"{s}{self.kind.label}[{d}]@{self.base}"


def canonicalize(kind: Kind, base: Iterable[int], dirs: Iterable[int], sign: int = 1) -> OrientedCell:
    """Sort the direction indices, flipping the sign once per transposition."""
    base = tuple(int(b) for b in base)
    dirs = tuple(int(d) for d in dirs)
    if sign not in (1, -1):
        raise InvalidCell(f"sign must be +1 or -1, got {sign}")
    if len(dirs) != kind.ndirs:
        raise InvalidCell(f"{kind.label} needs {kind.ndirs} directions, got {dirs}")
    if len(set(dirs)) != len(dirs):
        raise InvalidCell(f"duplicate direction index in {dirs}")
    for d in dirs:
        if not 0 <= d < len(base):
            raise InvalidCell(f"direction {d} outside ambient range 0..{len(base) - 1}")
    return OrientedCell(kind, base, tuple(sorted(dirs)), sign * permutation_sign(dirs))


def vertices(c: OrientedCell) -> tuple:
    k, n, dirs = c.kind, c.base, c.dirs
    if k is Kind.VERTEX:
        return (n,)
    if k in (Kind.EDGE, Kind.BLACK_TRIANGLE, Kind.BLACK_TETRAHEDRON):
        return tuple(offset(n, (d,)) for d in dirs)
    if k in (Kind.WHITE_TRIANGLE, Kind.OCTAHEDRON):
        return tuple(offset(n, pair) for pair in combinations(dirs, 2))
    if k is Kind.WHITE_TETRAHEDRON:
        return tuple(offset(n, triple) for triple in combinations(dirs, 3))
    if k in CUBIC_KINDS:
        out = []
        for r in range(len(dirs) + 1):
            out.extend(offset(n, s) for s in combinations(dirs, r))
        return tuple(out)
    raise InvalidCell(f"unsupported kind {k}")


def shift(c: OrientedCell, direction: int, steps: int = 1) -> OrientedCell:
    """Translate a cell by ``steps`` unit vectors in ``direction``."""
    return OrientedCell(c.kind, shift_point(c.base, direction, steps), c.dirs, c.sign)


class CellChain:
    """Formal integer combination of oriented cells.

    Keys are sign-stripped cells ``(kind, base, dirs)``; zero coefficients are
    dropped eagerly so equality is plain dict equality.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable | None = None):
        self._terms: dict = {}
        if terms is None:
            return
        if isinstance(terms, Mapping):
            for k, v in terms.items():
                self._add(k, v)
        else:
            for c in terms:
                self._add(c.key, c.sign)

    def _add(self, key, coef):
        if isinstance(key, OrientedCell):
            coef *= key.sign
            key = key.key
        v = self._terms.get(key, 0) + coef
        if v:
            self._terms[key] = v
        else:
            self._terms.pop(key, None)

    @classmethod
    def of(cls, *cells: OrientedCell) -> "CellChain":
        return cls(cells)

    def items(self):
        return self._terms.items()

    def terms(self) -> Iterator[tuple]:
        """Yield ``(positive cell, coefficient)`` pairs in a stable order."""
        for key in sorted(self._terms, key=_sort_key):
            kind, base, dirs = key
            yield OrientedCell(kind, base, dirs, 1), self._terms[key]

    def cells(self) -> list:
        """Unit-coefficient view: each term as a signed cell.

        Raises InvalidCell if some coefficient is not +-1.
        """
        out = []
        for c, coef in self.terms():
            if coef not in (1, -1):
                raise InvalidCell(f"coefficient {coef} on {c}")
            out.append(OrientedCell(c.kind, c.base, c.dirs, coef))
        return out

    def coefficient(self, c: OrientedCell) -> int:
        return self._terms.get(c.key, 0) * c.sign

    def coefficients(self) -> set:
        return set(self._terms.values())

    def restrict(self, predicate) -> "CellChain":
        out = CellChain()
        for c, coef in self.terms():
            if predicate(c):
                out._add(c.key, coef)
        return out

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __iter__(self):
        return iter(self.cells())

    def __eq__(self, other):
        if isinstance(other, OrientedCell):
            other = CellChain.of(other)
        if not isinstance(other, CellChain):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if isinstance(other, OrientedCell):
            other = CellChain.of(other)
        out = CellChain(self._terms)
        for k, v in other._terms.items():
            out._add(k, v)
        return out

    __radd__ = __add__

    def __neg__(self):
        return CellChain({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, OrientedCell):
            other = CellChain.of(other)
        return self + (-other)

    def __mul__(self, n: int):
        return CellChain({k: n * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        if not self._terms:
            return "CellChain(0)"
        parts = []
        for c, coef in self.terms():
            parts.append(f"{coef:+d}*{c.kind.label}[{''.join(map(str, c.dirs))}]@{c.base}")
        return "CellChain(" + " ".join(parts) + ")"


def _sort_key(key):
    kind, base, dirs = key
    return (kind.dim, kind.label, dirs, base)


def _recipe_sign(position: int, length: int) -> int:
    # "+" on the last index, alternating towards the front
    return 1 if (length - 1 - position) % 2 == 0 else -1


def _positive_facets(c: OrientedCell) -> list:
    """Facets of the positively oriented cell as (OrientedCell) list."""
    k, n, dirs = c.kind, c.base, c.dirs
    m = len(dirs)
    out = []
    if k is Kind.VERTEX:
        raise InvalidCell("a vertex has no facets")
    if k is Kind.EDGE:
        i, j = dirs
        # omit j ("+"), omit i ("-")
        out.append(OrientedCell(Kind.VERTEX, offset(n, (i,)), (), 1))
        out.append(OrientedCell(Kind.VERTEX, offset(n, (j,)), (), -1))
        return out
    for p, d in enumerate(dirs):
        s = _recipe_sign(p, m)
        rest = dirs[:p] + dirs[p + 1:]
        if k is Kind.BLACK_TRIANGLE:
            out.append(OrientedCell(Kind.EDGE, n, rest, s))
        elif k is Kind.WHITE_TRIANGLE:
            out.append(OrientedCell(Kind.EDGE, shift_point(n, d), rest, s))
        elif k is Kind.BLACK_TETRAHEDRON:
            out.append(OrientedCell(Kind.BLACK_TRIANGLE, n, rest, s))
        elif k is Kind.WHITE_TETRAHEDRON:
            out.append(OrientedCell(Kind.WHITE_TRIANGLE, shift_point(n, d), rest, s))
        elif k is Kind.OCTAHEDRON:
            out.append(OrientedCell(Kind.BLACK_TRIANGLE, shift_point(n, d), rest, s))
        elif k in CUBIC_KINDS:
            lower = Kind.VERTEX if k is Kind.ZEDGE else (Kind.ZEDGE if k is Kind.QUAD else Kind.QUAD)
            out.append(OrientedCell(lower, n, rest, s))
            out.append(OrientedCell(lower, shift_point(n, d), rest, -s))
        else:
            raise InvalidCell(f"unsupported kind {k}")
    if k is Kind.OCTAHEDRON:
        for p, d in enumerate(dirs):
            s = _recipe_sign(p, m)
            rest = dirs[:p] + dirs[p + 1:]
            out.append(OrientedCell(Kind.WHITE_TRIANGLE, n, rest, s))
    return out


def facets(c) -> CellChain:
    """Signed facet chain of a cell, or the linear extension over a chain."""
    if isinstance(c, CellChain):
        out = CellChain()
        for cc, coef in c.terms():
            for f in _positive_facets(cc):
                out._add(f.key, coef * f.sign)
        return out
    if c.kind.dim < 1:
        raise InvalidCell("facets need a cell of dimension >= 1")
    return CellChain(f if c.sign > 0 else -f for f in _positive_facets(c))


boundary = facets


def corner_at(cell3: OrientedCell, center: Point) -> CellChain:
    """The 3D corner of ``cell3`` at ``center``: facets containing the vertex."""
    if cell3.kind not in THREE_CELLS:
        raise InvalidCell(f"3D corners are defined on 3-cells, got {cell3.kind.label}")
    center = tuple(center)
    if center not in vertices(cell3):
        raise NotAVertex(f"{center} is not a vertex of {cell3!r}")
    return facets(cell3).restrict(lambda f: center in vertices(f))


def is_adjacent(a: OrientedCell, b: OrientedCell) -> bool:
    if a.dim != b.dim:
        raise DimensionMismatch(f"cells of dimension {a.dim} and {b.dim}")
    if a.dim < 1:
        raise DimensionMismatch("adjacency needs cells of dimension >= 1")
    fa, fb = facets(a), facets(b)
    for f, coef in fa.items():
        if fb._terms.get(f, 0) * coef < 0:
            return True
    return False


def cell_to_dict(c: OrientedCell) -> dict:
    return {"kind": c.kind.label, "base": list(c.base), "dirs": list(c.dirs), "sign": c.sign}


def cell_from_dict(d: Mapping) -> OrientedCell:
    return canonicalize(Kind.from_label(d["kind"]), d["base"], d["dirs"], int(d.get("sign", 1)))

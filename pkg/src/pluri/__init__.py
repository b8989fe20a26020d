"""Pluri-Lagrangian 2-forms on the root lattice Q(A_N) and on Z^N.

Cells, chains and facets live in :mod:`pluri.lattice_qan`; projections to the
cubic lattice in :mod:`pluri.lattice_zn`; 2-forms and their actions in
:mod:`pluri.forms`; corner equations and consistency checks in
:mod:`pluri.variational`; quad-equations in :mod:`pluri.quad_systems`;
flower decompositions in :mod:`pluri.flower`.
"""

from .errors import PluriError
from .forms import FieldAssignment, get_family, two_form
from .lattice_qan import CellChain, Kind, OrientedCell, canonicalize, corner_at, facets, vertices
from .lattice_zn import Projection

__all__ = [
    "CellChain",
    "FieldAssignment",
    "Kind",
    "OrientedCell",
    "PluriError",
    "Projection",
    "canonicalize",
    "corner_at",
    "facets",
    "get_family",
    "two_form",
    "vertices",
]

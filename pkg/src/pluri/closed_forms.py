"""Closed-form corner equations and their three-leg splittings.

Every function takes ``a`` (direction parameters, indexable by label) and
``x``, a callable returning the field value at the vertex reached by the
given labels: ``x()`` is the base vertex, ``x(j, k)`` the vertex ``x_jk``.

These are written out by hand, independently of the chain machinery, and
serve as oracles for it. Each returns the value for the labeling it is
called with; relative to a canonically oriented cell the generated residual
differs by the sign of the labeling permutation.
"""

from __future__ import annotations


def cross_ratio_octahedron_corner(a, x, i, j, k, l):
    """Four-leg corner equation of the log cross-ratio form at ``x_ij`` of [ijkl]."""
    c = x(i, j)
    return ((a[i] - a[k]) / (c - x(j, k)) - (a[i] - a[l]) / (c - x(j, l))
            - (a[j] - a[k]) / (c - x(i, k)) + (a[j] - a[l]) / (c - x(i, l)))


def cross_ratio_cube_corner(a, x, i, j, k, l):
    """Cube corner at ``x_j`` for the cross-ratio pushforward along ``i``."""
    c = x(j)
    return ((a[i] - a[k]) / (c - x(j, k)) - (a[i] - a[l]) / (c - x(j, l))
            - (a[j] - a[k]) / (c - x(k)) + (a[j] - a[l]) / (c - x(l)))


def cross_ratio_cube_corner_opposite(a, x, i, j, k, l):
    """Cube corner at ``x_kl`` for the cross-ratio pushforward along ``i``."""
    c = x(k, l)
    return ((a[i] - a[k]) / (x(l) - c) - (a[j] - a[k]) / (x(j, l) - c)
            - (a[i] - a[l]) / (x(k) - c) + (a[j] - a[l]) / (x(j, k) - c))


def cross_ratio_three_leg(a, x, j, k, l):
    """Three-leg splitting of the cube corner at ``x_j``, with ``a[i] = 0``.

    Returns the pair ``(left, right)``; the corner equation is ``left - right``.
    """
    c = x(j)

    def leg(m):
        return a[j] / (c - x()) - a[m] / (c - x(j, m)) - (a[j] - a[m]) / (c - x(m))

    return leg(k), leg(l)


def cross_ratio_three_leg_opposite(a, x, j, k, l):
    """Three-leg splitting of the cube corner at ``x_kl``, with ``a[i] = 0``."""
    c = x(k, l)
    top = a[j] / (x(j, k, l) - c)
    left = top - a[k] / (x(l) - c) - (a[j] - a[k]) / (x(j, l) - c)
    right = top - a[l] / (x(k) - c) - (a[j] - a[l]) / (x(j, k) - c)
    return left, right


# ---------------------------------------------------------------------------
# mixed form: bilinear on [0m], logarithmic on [mn]


def mixed_octahedron_corner_0j(a, x, j, k, l):
    return (-x(j, k) + x(j, l) - (a[j] - a[k]) / (x(0, j) - x(0, k))
            + (a[j] - a[l]) / (x(0, j) - x(0, l)))


def mixed_octahedron_corner_kl(a, x, j, k, l):
    return (x(0, l) - (a[j] - a[k]) / (x(j, l) - x(k, l)) - x(0, k)
            + (a[j] - a[l]) / (x(j, k) - x(k, l)))


def kdv_cube_corner(a, x, j, k, l):
    """Corner at ``x_j`` of the pushforward along direction 0."""
    return (-x(j, k) + x(j, l) - (a[j] - a[k]) / (x(j) - x(k))
            + (a[j] - a[l]) / (x(j) - x(l)))


def kdv_cube_corner_opposite(a, x, j, k, l):
    """Corner at ``x_kl`` of the pushforward along direction 0."""
    return (x(l) - (a[j] - a[k]) / (x(j, l) - x(k, l)) - x(k)
            + (a[j] - a[l]) / (x(j, k) - x(k, l)))


def kdv_three_leg(a, x, j, k, l):
    left = x() - x(j, k) - (a[j] - a[k]) / (x(j) - x(k))
    right = x() - x(j, l) - (a[j] - a[l]) / (x(j) - x(l))
    return left, right


def kdv_three_leg_opposite(a, x, j, k, l):
    left = x(l) - x(j, k, l) - (a[j] - a[k]) / (x(j, l) - x(k, l))
    right = x(k) - x(j, k, l) - (a[j] - a[l]) / (x(j, k) - x(k, l))
    return left, right


# Corners of the pushforward along direction 3 on the cube {012}; keyed by
# the labels of the center vertex.

def _d(a, m, n):
    return a[m] - a[n]


TRAPEZOIDAL_CORNERS = {
    (0,): lambda a, x: (-x(1) + x(2) - _d(a, 1, 3) / (x(0, 1) - x(0))
                        + _d(a, 2, 3) / (x(0, 2) - x(0))),
    (1,): lambda a, x: (-x(0) + _d(a, 1, 2) / (x(1) - x(2)) + x(0, 1)
                        - _d(a, 2, 3) / (x(1, 2) - x(1))),
    (2,): lambda a, x: (x(0) - _d(a, 1, 2) / (x(1) - x(2)) - x(0, 2)
                        + _d(a, 1, 3) / (x(1, 2) - x(2))),
    (0, 1): lambda a, x: (-x(1, 2) + x(1) - _d(a, 1, 2) / (x(0, 1) - x(0, 2))
                          + _d(a, 1, 3) / (x(0, 1) - x(0))),
    (0, 2): lambda a, x: (x(1, 2) - x(2) + _d(a, 1, 2) / (x(0, 1) - x(0, 2))
                          - _d(a, 2, 3) / (x(0, 2) - x(0))),
    (1, 2): lambda a, x: (x(0, 2) - _d(a, 1, 3) / (x(1, 2) - x(2)) - x(0, 1)
                          + _d(a, 2, 3) / (x(1, 2) - x(1))),
}


# three-leg pairs with a[3] = 0
TRAPEZOIDAL_THREE_LEGS = {
    (0,): lambda a, x: (x() - x(1) - a[1] / (x(0, 1) - x(0)),
                        x() - x(2) - a[2] / (x(0, 2) - x(0))),
    (1,): lambda a, x: (-x(0) + x(0, 1) - a[1] / (x() - x(1)),
                        -a[1] / (x() - x(1)) + a[2] / (x(1, 2) - x(1))
                        - (a[1] - a[2]) / (x(1) - x(2))),
    (2,): lambda a, x: (x(0) - x(0, 2) + a[2] / (x() - x(2)),
                        a[2] / (x() - x(2)) - a[1] / (x(1, 2) - x(2))
                        + (a[1] - a[2]) / (x(1) - x(2))),
    (0, 1): lambda a, x: (-x(1, 2) + x(1) + a[2] / (x(0, 1) - x(0, 1, 2)),
                          a[2] / (x(0, 1) - x(0, 1, 2)) - a[1] / (x(0, 1) - x(0))
                          + (a[1] - a[2]) / (x(0, 1) - x(0, 2))),
    (0, 2): lambda a, x: (x(1, 2) - x(2) - a[1] / (x(0, 2) - x(0, 1, 2)),
                          -a[1] / (x(0, 2) - x(0, 1, 2)) + a[2] / (x(0, 2) - x(0))
                          - (a[1] - a[2]) / (x(0, 1) - x(0, 2))),
    (1, 2): lambda a, x: (x(0, 2) - x(0, 1, 2) - a[1] / (x(1, 2) - x(2)),
                          x(0, 1) - x(0, 1, 2) - a[2] / (x(1, 2) - x(1))),
}

"""Packaged worked example: the two-value stratified circle.

The circle carrying values {0, z^(-1)} has two Stokes points with
antichain fibers and two open arcs with opposite total orders.  The
helpers build rank-(1,1) functors on it with prescribed gluing matrices,
in the coordinates where every fiber is the ordered sum of the value
tops (the 'a' top first).
"""

from __future__ import annotations

from .exactmath import GaussianRational, Matrix
from .functors import StokesFunctor, cover_arrow_id, lift_arrow_id
from .geometry import CircleSpace, ExponentialData, IrregularValue, build_circle_space


def two_value_exponential() -> ExponentialData:
    return ExponentialData({"a": IrregularValue.zero(), "b": IrregularValue.of((1, GaussianRational.of(1)))})


def two_value_circle() -> CircleSpace:
    return build_circle_space(two_value_exponential())


def rank_one_one_functor(space: CircleSpace, gluings: dict | None = None) -> StokesFunctor:
    """A rank-(1,1) functor on a two-value circle space.

    Each fiber value is presented on the tops: at a point both values are
    one-dimensional; on an arc the larger value carries the ordered sum
    (smaller top first).  ``gluings`` maps base arrow names to invertible
    2x2 matrices in top coordinates (default: identities); entry (i, j)
    feeds top j of the point into top slot i of the arc, where slot order
    on an arc lists the minimal value first.
    """
    fib = space.fibration
    gluings = gluings or {}
    spaces = {}
    arrows = {}
    for x in fib.base.objects:
        fiber = fib.fiber(x)
        for v in fiber.elements:
            spaces[(x, v)] = len([w for w in fiber.elements if fiber.le(w, v)])
    for x in fib.base.objects:
        for u, v in fib.fiber(x).covers():
            # ordered sum: the minimal top is the first coordinate
            arrows[cover_arrow_id(x, u, v)] = Matrix.from_rows([[1], [0]])
    for arr in fib.base.arrows:
        g = gluings.get(arr.name, Matrix.identity(2))
        if not (g.rows == g.cols == 2):
            raise ValueError("gluings must be 2x2")
        arc_fiber = fib.fiber(arr.target)
        order = arc_fiber.linear_extension()  # (minimal, maximal)
        for j, v in enumerate(order):
            col = g.submatrix([0, 1], [j])
            if v == order[0]:
                # target value is one-dimensional: the minimal top slot
                arrows[lift_arrow_id(arr.name, v)] = col.submatrix([0], [0])
            else:
                arrows[lift_arrow_id(arr.name, v)] = col
    return StokesFunctor(fib, spaces, arrows)


def nonsplit_witness(space: CircleSpace) -> StokesFunctor:
    """A rank-(1,1) functor with one nontrivial gluing: Stokes but not split.

    The unipotent twist feeds the maximal top into the minimal slot on one
    arc, obstructing any natural global section around the circle.
    """
    twist = {space.fibration.base.arrows[0].name: Matrix.from_rows([[1, 1], [0, 1]])}
    return rank_one_one_functor(space, twist)

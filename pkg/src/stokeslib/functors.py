"""Representations of poset fibrations in finite-dimensional rational spaces.

A functor assigns a dimension to every total object (x, a) and an exact
matrix to every generating total arrow: Hasse covers inside fibers and one
cocartesian lift per (base arrow, fiber element).  The operations decide
punctual splitting by the top-dimension count, cocartesianness through
specialization matrices, perform induction and graduation on split
coordinates, realize the level-induction pullback square, solve global
splitting as one exact linear system, and compute Ext dimensions from the
nerve cochain complex of the total category.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bases import BaseFunctor
from .exactmath import (
    Matrix,
    block_diag,
    column_space_complement,
    hstack_all,
    inverse,
    is_invertible,
    kernel_basis,
    mat_rank,
    mat_solve,
    matrix_sparse_rows,
    sparse_kernel_basis,
    sparse_rank,
    sparse_solve,
)
from .fibrations import (
    FibrationMorphism,
    StokesFibration,
    TotalCategory,
    fiberwise_set,
    graded_fibration,
    is_level_fibration_morphism,
    nondegenerate_chains,
    pullback_fibration,
    validate_fibration,
)


def cover_arrow_id(x: str, a: str, b: str) -> str:
    return f"{x}::{a}<{b}"


def lift_arrow_id(base_arrow: str, a: str) -> str:
    return f"{base_arrow}::{a}"


@dataclass(frozen=True)
class StokesFunctor:
    fibration: StokesFibration
    spaces: dict  # (x, a) -> dimension
    arrows: dict  # generating total arrow id -> Matrix

    def dim(self, x: str, a: str) -> int:
        return self.spaces[(x, a)]

    def cover_matrix(self, x: str, a: str, b: str) -> Matrix:
        return self.arrows[cover_arrow_id(x, a, b)]

    def lift_matrix(self, base_arrow: str, a: str) -> Matrix:
        return self.arrows[lift_arrow_id(base_arrow, a)]

    def fiber_matrix(self, x: str, a: str, b: str) -> Matrix:
        """Composite along any cover path from a to b inside fiber x."""
        fib = self.fibration.fiber(x)
        if not fib.le(a, b):
            raise ValueError(f"{a} is not below {b} in fiber at {x}")
        if a == b:
            return Matrix.identity(self.dim(x, a))
        for u, v in fib.covers():
            if v == b and fib.le(a, u):
                return self.cover_matrix(x, u, v) @ self.fiber_matrix(x, a, u)
        raise ValueError(f"no cover path from {a} to {b} in fiber at {x}")

    def morphism_matrix(self, tm) -> Matrix:
        """Value on a morphism of the total category."""
        x, a = tm.source
        y, c = tm.target
        cur = a
        out = Matrix.identity(self.dim(x, a))
        for g in tm.base.gens:
            out = self.lift_matrix(g, cur) @ out
            cur = self.fibration.transition(g)(cur)
        return self.fiber_matrix(y, cur, c) @ out

    def total_dimension(self) -> int:
        return sum(self.spaces.values())


def generating_arrow_shapes(fib: StokesFibration) -> dict:
    """Expected (target, source) total objects for every generating arrow id."""
    shapes = {}
    for x in fib.base.objects:
        for a, b in fib.fiber(x).covers():
            shapes[cover_arrow_id(x, a, b)] = ((x, b), (x, a))
    for arr in fib.base.arrows:
        t = fib.transition(arr.name)
        for a in fib.fiber(arr.source).elements:
            shapes[lift_arrow_id(arr.name, a)] = ((arr.target, t(a)), (arr.source, a))
    return shapes


def validate_functor(f: StokesFunctor) -> tuple[bool, str]:
    """Shapes plus every path-independence relation as exact matrix identities."""
    ok, why = validate_fibration(f.fibration)
    if not ok:
        return False, f"fibration: {why}"
    fib = f.fibration
    for x in fib.base.objects:
        for a in fib.fiber(x).elements:
            if (x, a) not in f.spaces or f.spaces[(x, a)] < 0:
                return False, f"missing or negative dimension at ({x},{a})"
    shapes = generating_arrow_shapes(fib)
    for arrow_id, (tgt, src) in shapes.items():
        m = f.arrows.get(arrow_id)
        if m is None:
            return False, f"missing matrix for arrow {arrow_id}"
        if (m.rows, m.cols) != (f.spaces[tgt], f.spaces[src]):
            return False, f"shape mismatch on arrow {arrow_id}"
    # fiber functoriality: all cover paths between comparable pairs agree
    for x in fib.base.objects:
        p = fib.fiber(x)
        for a in p.elements:
            for b in p.elements:
                if not p.lt(a, b):
                    continue
                mats = [_path_matrix(f, x, path) for path in _cover_paths(p, a, b)]
                if any(m.entries != mats[0].entries for m in mats[1:]):
                    return False, f"fiber functoriality fails between {a} and {b} at {x}"
    # naturality of cocartesian lifts against fiber covers
    for arr in fib.base.arrows:
        t = fib.transition(arr.name)
        for a, b in fib.fiber(arr.source).covers():
            left = f.lift_matrix(arr.name, b) @ f.cover_matrix(arr.source, a, b)
            right = f.fiber_matrix(arr.target, t(a), t(b)) @ f.lift_matrix(arr.name, a)
            if left.entries != right.entries:
                return False, f"lift naturality fails for {arr.name} at cover {a}<{b}"
    # base-level path independence for poset bases
    if fib.base.kind == "poset":
        p = fib.base.poset
        for x in p.elements:
            for y in p.elements:
                if not p.lt(x, y):
                    continue
                paths = fib.base.all_hasse_paths(x, y)
                if len(paths) < 2:
                    continue
                for a in fib.fiber(x).elements:
                    mats = [_lift_path_matrix(f, a, path) for path in paths]
                    if any(m.entries != mats[0].entries for m in mats[1:]):
                        return False, f"lift path independence fails over {x}->{y} at {a}"
    return True, "ok"


def _cover_paths(p, a, b) -> list:
    if a == b:
        return [[]]
    out = []
    for u, v in p.covers():
        if u == a and p.le(v, b):
            out.extend([[(u, v)] + rest for rest in _cover_paths(p, v, b)])
    return out


def _path_matrix(f: StokesFunctor, x: str, path) -> Matrix:
    out = f.cover_matrix(x, *path[0])
    for u, v in path[1:]:
        out = f.cover_matrix(x, u, v) @ out
    return out


def _lift_path_matrix(f: StokesFunctor, a: str, gens) -> Matrix:
    cur = a
    x = f.fibration.base.arrow(gens[0]).source
    out = Matrix.identity(f.dim(x, a))
    for g in gens:
        out = f.lift_matrix(g, cur) @ out
        cur = f.fibration.transition(g)(cur)
    return out


# ---------------------------------------------------------------------------
# punctual splitting


@dataclass(frozen=True)
class Splitting:
    """Split coordinates of one fiber: tops V_b and the natural iso theta.

    ``theta[a]`` is the invertible map from the ordered direct sum of V_b
    over b <= a (block order given by ``order``) onto the fiber value at a;
    ``sections[b]`` is the chosen section of the top quotient at b.
    """

    at: str
    order: tuple
    dims: dict
    sections: dict
    theta: dict
    theta_inv: dict

    def blocks(self, le, a) -> list:
        return [b for b in self.order if le(b, a)]

    def top_offset(self, le, b) -> int:
        """Column offset of the top block inside theta[b]."""
        return sum(self.dims[c] for c in self.blocks(le, b) if c != b)


def split_fiber(f: StokesFunctor, x: str, rng=None) -> Splitting | None:
    """Split coordinates at x, or None when the fiber does not split.

    The fiber splits iff for every a the dimension of F(a) equals the sum
    over b <= a of dim F(b) / (sum of images from below b); the canonical
    comparison built from any sections of the top quotients is then
    automatically invertible.  ``rng`` randomizes the section choices.
    """
    fib = f.fibration.fiber(x)
    order = fib.linear_extension()
    dims = {}
    sections = {}
    for b in order:
        below = [c for c in fib.elements if fib.lt(c, b)]
        d_b = f.dim(x, b)
        if below:
            rad = hstack_all([f.fiber_matrix(x, c, b) for c in below], d_b)
        else:
            rad = Matrix.zeros(d_b, 0)
        r = mat_rank(rad)
        dims[b] = d_b - r
        idx = column_space_complement(rad)
        sec = Matrix(
            d_b,
            dims[b],
            tuple(Fraction(1 if i == idx[j] else 0) for i in range(d_b) for j in range(dims[b])),
        )
        if rng is not None and dims[b] > 0:
            sec = _random_section(rad, d_b, dims[b], rng)
        sections[b] = sec
    for a in fib.elements:
        if f.dim(x, a) != sum(dims[b] for b in fib.elements if fib.le(b, a)):
            return None
    theta = {}
    theta_inv = {}
    for a in fib.elements:
        blocks = [b for b in order if fib.le(b, a)]
        cols = [f.fiber_matrix(x, b, a) @ sections[b] for b in blocks]
        th = hstack_all(cols, f.dim(x, a))
        if not is_invertible(th):
            raise ArithmeticError("dimension count passed but the comparison is singular")
        theta[a] = th
        theta_inv[a] = inverse(th)
    return Splitting(x, order, dims, sections, theta, theta_inv)


def _random_section(rad: Matrix, d: int, k: int, rng) -> Matrix:
    for _ in range(64):
        cand = Matrix(d, k, tuple(Fraction(rng.randint(-3, 3)) for _ in range(d * k)))
        if mat_rank(rad.hstack(cand)) == mat_rank(rad) + k:
            return cand
    raise RuntimeError("failed to draw a random complement")


def punctual_splittings(f: StokesFunctor, rng=None) -> dict | None:
    out = {}
    for x in f.fibration.base.objects:
        s = split_fiber(f, x, rng=rng)
        if s is None:
            return None
        out[x] = s
    return out


def is_punctually_split(f: StokesFunctor) -> bool:
    return punctual_splittings(f) is not None


def top_projection(f: StokesFunctor, s: Splitting, a: str) -> Matrix:
    """The quotient F(x, a) -> V_a in the coordinates of the splitting."""
    fib = f.fibration.fiber(s.at)
    off = s.top_offset(fib.le, a)
    rows = list(range(off, off + s.dims[a]))
    return s.theta_inv[a].submatrix(rows, list(range(s.theta_inv[a].cols)))


# ---------------------------------------------------------------------------
# specialization matrices and the Stokes condition


def specialization_matrix(f: StokesFunctor, base_arrow: str, s: Splitting) -> dict:
    """Per target-fiber element a, the canonical map out of the induced sum.

    The V_b block (over f_gamma(b) <= a, in splitting order) is
    F(f_gamma(b) <= a) . F(lift at b) . section_b.
    """
    arr = f.fibration.base.arrow(base_arrow)
    if s.at != arr.source:
        raise ValueError("splitting is not at the source of the arrow")
    t = f.fibration.transition(base_arrow)
    target_fiber = f.fibration.fiber(arr.target)
    out = {}
    for a in target_fiber.elements:
        blocks = [b for b in s.order if target_fiber.le(t(b), a)]
        cols = [
            f.fiber_matrix(arr.target, t(b), a) @ f.lift_matrix(base_arrow, b) @ s.sections[b]
            for b in blocks
        ]
        out[a] = hstack_all(cols, f.dim(arr.target, a))
    return out


def is_cocartesian_at(f: StokesFunctor, base_arrow: str, splitting: Splitting | None = None) -> bool | None:
    """True/False; None (not applicable) when the source fiber is not split."""
    arr = f.fibration.base.arrow(base_arrow)
    s = splitting if splitting is not None else split_fiber(f, arr.source)
    if s is None:
        return None
    spec = specialization_matrix(f, base_arrow, s)
    return all(is_invertible(m) for m in spec.values())


def is_stokes(f: StokesFunctor) -> bool:
    """Punctually split and cocartesian at every base arrow."""
    return stokes_witness(f)[0]


def stokes_witness(f: StokesFunctor) -> tuple[bool, str]:
    """Verdict plus a reason on the negative side."""
    splittings = {}
    for x in f.fibration.base.objects:
        s = split_fiber(f, x)
        if s is None:
            return False, f"not punctually split at {x}"
        splittings[x] = s
    for arr in f.fibration.base.arrows:
        spec = specialization_matrix(f, arr.name, splittings[arr.source])
        for a, m in spec.items():
            if not is_invertible(m):
                return False, f"singular specialization matrix at arrow {arr.name}, element {a}"
    return True, "ok"


# ---------------------------------------------------------------------------
# standard split coordinates, induction and graduation


@dataclass
class _StdForm:
    functor: StokesFunctor
    splittings: dict  # base object -> Splitting

    def std_lift(self, base_arrow: str, a: str) -> Matrix:
        """theta_inv . lift . theta: the lift in split coordinates."""
        f = self.functor
        arr = f.fibration.base.arrow(base_arrow)
        t = f.fibration.transition(base_arrow)
        return (
            self.splittings[arr.target].theta_inv[t(a)]
            @ f.lift_matrix(base_arrow, a)
            @ self.splittings[arr.source].theta[a]
        )

    def std_lift_top_columns(self, base_arrow: str, b: str) -> Matrix:
        """Columns of the standardized lift at b restricted to the top block V_b."""
        f = self.functor
        arr = f.fibration.base.arrow(base_arrow)
        s_x = self.splittings[arr.source]
        m = self.std_lift(base_arrow, b)
        off = s_x.top_offset(f.fibration.fiber(arr.source).le, b)
        return m.submatrix(list(range(m.rows)), list(range(off, off + s_x.dims[b])))


def _standardize(f: StokesFunctor, rng=None) -> _StdForm:
    splittings = punctual_splittings(f, rng=rng)
    if splittings is None:
        raise ValueError("functor is not punctually split")
    return _StdForm(f, splittings)


@dataclass
class _BlockIndex:
    """An ordered list of labelled blocks with dimensions."""

    labels: list
    dims: dict

    @property
    def total(self) -> int:
        return sum(self.dims[b] for b in self.labels)

    def offset(self, b) -> int:
        out = 0
        for lbl in self.labels:
            if lbl == b:
                return out
            out += self.dims[lbl]
        raise KeyError(b)


def _inclusion_matrix(small: _BlockIndex, big: _BlockIndex) -> Matrix:
    ent = [[Fraction(0)] * max(small.total, 0) for _ in range(big.total)]
    for b in small.labels:
        ro, co = big.offset(b), small.offset(b)
        for i in range(small.dims[b]):
            ent[ro + i][co + i] = Fraction(1)
    if big.total == 0:
        return Matrix(0, small.total, ())
    return Matrix.from_rows(ent)


def _scatter_block_rows(stacked: Matrix, row_blocks: list, dims: dict, tgt: _BlockIndex) -> Matrix:
    """Embed rows of ``stacked`` (grouped by ``row_blocks``) into tgt rows."""
    ent = [[Fraction(0)] * stacked.cols for _ in range(tgt.total)]
    ro = 0
    for b in row_blocks:
        t_off = tgt.offset(b)
        for i in range(dims[b]):
            for j in range(stacked.cols):
                ent[t_off + i][j] = stacked.at(ro + i, j)
        ro += dims[b]
    if tgt.total == 0:
        return Matrix(0, stacked.cols, ())
    return Matrix.from_rows(ent)


@dataclass
class InducedFunctor:
    """Induction along a fibrationwise map, with canonical block data.

    ``blocks[(x, c)]`` lists the source elements b with p(b) <= c feeding
    the value at (x, c), in splitting order; ``units[(x, a)]`` is the unit
    F(x, a) -> G(x, p(a)) of the induction adjunction.
    """

    functor: StokesFunctor
    blocks: dict
    units: dict


def induce_with_blocks(p: FibrationMorphism, f: StokesFunctor, rng=None) -> InducedFunctor:
    if f.fibration != p.source:
        raise ValueError("functor does not live on the source of the morphism")
    if not p.squares_commute():
        raise ValueError("fibration morphism squares do not commute")
    std = _standardize(f, rng=rng)
    target = p.target
    spaces = {}
    blocks = {}
    for x in target.base.objects:
        s = std.splittings[x]
        fib_j = target.fiber(x)
        px = p.map_at(x)
        for a in fib_j.elements:
            labels = [b for b in s.order if fib_j.le(px(b), a)]
            bi = _BlockIndex(labels, {b: s.dims[b] for b in labels})
            blocks[(x, a)] = bi
            spaces[(x, a)] = bi.total
    arrows = {}
    for x in target.base.objects:
        for a, b in target.fiber(x).covers():
            arrows[cover_arrow_id(x, a, b)] = _inclusion_matrix(blocks[(x, a)], blocks[(x, b)])
    for arr in target.base.arrows:
        x, y = arr.source, arr.target
        g_j = target.transition(arr.name)
        f_i = p.source.transition(arr.name)
        s_y = std.splittings[y]
        fib_iy = p.source.fiber(y)
        for a in target.fiber(x).elements:
            src_bi = blocks[(x, a)]
            tgt_bi = blocks[(y, g_j(a))]
            cols = []
            for b in src_bi.labels:
                top = std.std_lift_top_columns(arr.name, b)
                present = s_y.blocks(fib_iy.le, f_i(b))
                cols.append(_scatter_block_rows(top, present, s_y.dims, tgt_bi))
            arrows[lift_arrow_id(arr.name, a)] = hstack_all(cols, tgt_bi.total)
    out = StokesFunctor(target, spaces, arrows)
    units = {}
    for x in target.base.objects:
        s = std.splittings[x]
        px = p.map_at(x)
        fib_i = p.source.fiber(x)
        for a in fib_i.elements:
            labels = [b for b in s.order if fib_i.le(b, a)]
            small = _BlockIndex(labels, {b: s.dims[b] for b in labels})
            units[(x, a)] = _inclusion_matrix(small, blocks[(x, px(a))]) @ s.theta_inv[a]
    return InducedFunctor(out, blocks, units)


def induce(p: FibrationMorphism, f: StokesFunctor) -> StokesFunctor:
    """Left Kan extension along a fibrationwise map, on split coordinates."""
    return induce_with_blocks(p, f).functor


@dataclass
class GradedFunctor:
    """Graduation along a graduation morphism, with canonical block data.

    ``blocks[(x, a)]`` lists the same-level elements below a in splitting
    order; ``quotients[(x, a)]`` is the projection F(x, a) -> Gr(x, a).
    """

    functor: StokesFunctor
    blocks: dict
    quotients: dict


def grade_with_blocks(p: FibrationMorphism, f: StokesFunctor, rng=None) -> GradedFunctor:
    if f.fibration != p.source:
        raise ValueError("functor does not live on the source of the morphism")
    if not all(p.target.transition(a.name).is_bijective() for a in p.target.base.arrows):
        raise ValueError("not a graduation morphism: target set-fibration is not locally constant")
    std = _standardize(f, rng=rng)
    gfib = graded_fibration(p)
    spaces = {}
    blocks = {}
    quotients = {}
    for x in gfib.base.objects:
        s = std.splittings[x]
        fib_i = p.source.fiber(x)
        px = p.map_at(x)
        for a in fib_i.elements:
            labels = [b for b in s.order if fib_i.le(b, a) and px(b) == px(a)]
            bi = _BlockIndex(labels, {b: s.dims[b] for b in labels})
            blocks[(x, a)] = bi
            spaces[(x, a)] = bi.total
            rows = []
            off = 0
            for b in s.blocks(fib_i.le, a):
                if b in labels:
                    rows.extend(range(off, off + s.dims[b]))
                off += s.dims[b]
            quotients[(x, a)] = s.theta_inv[a].submatrix(rows, list(range(s.theta_inv[a].cols)))
    arrows = {}
    for x in gfib.base.objects:
        for a, b in gfib.fiber(x).covers():
            arrows[cover_arrow_id(x, a, b)] = _inclusion_matrix(blocks[(x, a)], blocks[(x, b)])
    for arr in gfib.base.arrows:
        x, y = arr.source, arr.target
        f_i = p.source.transition(arr.name)
        s_y = std.splittings[y]
        fib_iy = p.source.fiber(y)
        for a in gfib.fiber(x).elements:
            src_bi = blocks[(x, a)]
            tgt_bi = blocks[(y, f_i(a))]
            cols = []
            for b in src_bi.labels:
                top = std.std_lift_top_columns(arr.name, b)
                present = s_y.blocks(fib_iy.le, f_i(b))
                rows = []
                off = 0
                for c in present:
                    if c in tgt_bi.labels:
                        rows.extend(range(off, off + s_y.dims[c]))
                    off += s_y.dims[c]
                kept = top.submatrix(rows, list(range(top.cols)))
                kept_blocks = [c for c in present if c in tgt_bi.labels]
                cols.append(_scatter_block_rows(kept, kept_blocks, s_y.dims, tgt_bi))
            arrows[lift_arrow_id(arr.name, a)] = hstack_all(cols, tgt_bi.total)
    return GradedFunctor(StokesFunctor(gfib, spaces, arrows), blocks, quotients)


def grade(p: FibrationMorphism, f: StokesFunctor) -> StokesFunctor:
    """Associated graded along a graduation morphism, on split coordinates."""
    return grade_with_blocks(p, f).functor


def grade_right_adjoint(p: FibrationMorphism, h: StokesFunctor) -> StokesFunctor:
    """Right adjoint of graduation: same values, zero maps across level jumps."""
    gfib = graded_fibration(p)
    if h.fibration != gfib:
        raise ValueError("functor does not live on the graded fibration")
    src = p.source
    spaces = {}
    arrows = {}
    for x in src.base.objects:
        for a in src.fiber(x).elements:
            spaces[(x, a)] = h.dim(x, a)
    for x in src.base.objects:
        px = p.map_at(x)
        for a, b in src.fiber(x).covers():
            if px(a) == px(b):
                arrows[cover_arrow_id(x, a, b)] = h.fiber_matrix(x, a, b)
            else:
                arrows[cover_arrow_id(x, a, b)] = Matrix.zeros(h.dim(x, b), h.dim(x, a))
    for arr in src.base.arrows:
        for a in src.fiber(arr.source).elements:
            arrows[lift_arrow_id(arr.name, a)] = h.lift_matrix(arr.name, a)
    return StokesFunctor(src, spaces, arrows)


# ---------------------------------------------------------------------------
# level induction


def _set_target_morphism(p: FibrationMorphism) -> FibrationMorphism:
    """pi: graded fibration -> underlying-set fibration of the target."""
    from .posets import MonotoneMap

    gfib = graded_fibration(p)
    jset = fiberwise_set(p.target)
    maps = {
        x: MonotoneMap(gfib.fiber(x), jset.fiber(x), p.map_at(x).assignment)
        for x in gfib.base.objects
    }
    return FibrationMorphism(gfib, jset, maps)


def level_disassemble(p: FibrationMorphism, f: StokesFunctor):
    """Break a functor across a level graduation morphism.

    Returns (g, h, alpha): the induction to the quotient, the graduation,
    and the canonical identification alpha[(x, c)] from the graduation of g
    to the induction of h over the underlying-set fibration of the target.
    """
    if not is_level_fibration_morphism(p):
        raise ValueError("not a level graduation morphism")
    std = _standardize(f)
    g_data = induce_with_blocks(p, f)
    h_data = grade_with_blocks(p, f)
    g, h = g_data.functor, h_data.functor
    gr_g = grade_with_blocks(FibrationMorphism.identity(p.target), g)
    pi_h = induce_with_blocks(_set_target_morphism(p), h)
    alpha = {}
    for x in p.target.base.objects:
        px = p.map_at(x)
        s = std.splittings[x]
        for c in p.target.fiber(x).elements:
            # both sides refine to the tops of f with p(b) = c, in splitting order
            labels = [b for b in s.order if px(b) == c]
            fine = _BlockIndex(labels, {b: s.dims[b] for b in labels})
            map1 = gr_g.quotients[(x, c)] @ _inclusion_matrix(fine, g_data.blocks[(x, c)])
            cols = [pi_h.units[(x, b)] @ _top_inclusion_in_graded(h_data, x, b) for b in labels]
            map2 = hstack_all(cols, pi_h.functor.dim(x, c))
            if not is_invertible(map1):
                raise ArithmeticError("canonical comparison into the graduation is singular")
            alpha[(x, c)] = map2 @ inverse(map1)
    return g, h, alpha


def _top_inclusion_in_graded(h_data: GradedFunctor, x: str, b) -> Matrix:
    bi = h_data.blocks[(x, b)]
    ent = [[Fraction(0)] * bi.dims[b] for _ in range(bi.total)]
    off = bi.offset(b)
    for i in range(bi.dims[b]):
        ent[off + i][i] = Fraction(1)
    if bi.total == 0:
        return Matrix(0, bi.dims[b], ())
    return Matrix.from_rows(ent)


def level_assemble(p: FibrationMorphism, g: StokesFunctor, h: StokesFunctor, alpha: dict) -> StokesFunctor:
    """Reassemble the level-induction square objectwise as exact kernels.

    The value at (x, a) presents the fiber product of g at p(a) and h at a
    over the common graduation, glued through alpha; structure maps are the
    induced maps on kernels, solved exactly.
    """
    if not is_level_fibration_morphism(p):
        raise ValueError("not a level graduation morphism")
    gr_g = grade_with_blocks(FibrationMorphism.identity(p.target), g)
    pi_h = induce_with_blocks(_set_target_morphism(p), h)
    src = p.source
    for key, m in alpha.items():
        if not is_invertible(m):
            raise ValueError(f"alpha at {key} is not invertible")

    kernels = {}
    spaces = {}
    for x in src.base.objects:
        px = p.map_at(x)
        for a in src.fiber(x).elements:
            c = px(a)
            q_side = alpha[(x, c)] @ gr_g.quotients[(x, c)]
            r_side = pi_h.units[(x, a)]
            glue = q_side.hstack(-r_side)
            k = kernel_basis(glue)
            kernels[(x, a)] = k
            spaces[(x, a)] = k.cols

    def induced_on_kernels(src_key, tgt_key, gm: Matrix, hm: Matrix) -> Matrix:
        big = block_diag([gm, hm])
        sol = mat_solve(kernels[tgt_key], big @ kernels[src_key])
        if sol is None:
            raise ArithmeticError("structure map does not preserve the assembled kernels")
        return sol

    arrows = {}
    for x in src.base.objects:
        px = p.map_at(x)
        for a, b in src.fiber(x).covers():
            gm = g.fiber_matrix(x, px(a), px(b))
            if px(a) == px(b):
                hm = h.fiber_matrix(x, a, b)
            else:
                hm = Matrix.zeros(h.dim(x, b), h.dim(x, a))
            arrows[cover_arrow_id(x, a, b)] = induced_on_kernels((x, a), (x, b), gm, hm)
    for arr in src.base.arrows:
        f_i = src.transition(arr.name)
        px = p.map_at(arr.source)
        for a in src.fiber(arr.source).elements:
            gm = g.lift_matrix(arr.name, px(a))
            hm = h.lift_matrix(arr.name, a)
            arrows[lift_arrow_id(arr.name, a)] = induced_on_kernels(
                (arr.source, a), (arr.target, f_i(a)), gm, hm
            )
    return StokesFunctor(src, spaces, arrows)


# ---------------------------------------------------------------------------
# global splitting


@dataclass(frozen=True)
class GlobalSplitting:
    """A functor on the set fibration plus the natural iso onto the input."""

    graded: StokesFunctor
    iso: dict  # (x, a) -> invertible Matrix from the ordered sum of tops


def top_functor(f: StokesFunctor, splittings: dict) -> StokesFunctor:
    """The graduation of f as a functor on the underlying set fibration."""
    iset = fiberwise_set(f.fibration)
    spaces = {}
    arrows = {}
    for x in iset.base.objects:
        s = splittings[x]
        for a in iset.fiber(x).elements:
            spaces[(x, a)] = s.dims[a]
    for arr in iset.base.arrows:
        t = f.fibration.transition(arr.name)
        for a in f.fibration.fiber(arr.source).elements:
            m = (
                top_projection(f, splittings[arr.target], t(a))
                @ f.lift_matrix(arr.name, a)
                @ splittings[arr.source].sections[a]
            )
            arrows[lift_arrow_id(arr.name, a)] = m
    return StokesFunctor(iset, spaces, arrows)


def split_global(f: StokesFunctor) -> GlobalSplitting | None:
    """A global splitting, or None when the natural-section system is infeasible.

    Splitness is the existence of a section of the canonical map from the
    restriction of f to the set fibration onto its graduation, natural over
    every base arrow; feasibility is one exact linear solve.
    """
    splittings = punctual_splittings(f)
    if splittings is None:
        return None
    tops = top_functor(f, splittings)
    fib = f.fibration
    var_offset = {}
    total = 0
    for x in fib.base.objects:
        for a in fib.fiber(x).elements:
            var_offset[(x, a)] = total
            total += f.dim(x, a) * splittings[x].dims[a]

    def sigma_entry(key, i, j) -> int:
        return var_offset[key] + i * splittings[key[0]].dims[key[1]] + j

    rhs_col = total
    rows: list[dict] = []
    # q . sigma = identity at every total object
    for x in fib.base.objects:
        s = splittings[x]
        for a in fib.fiber(x).elements:
            q = top_projection(f, s, a)
            d_top = s.dims[a]
            for r in range(d_top):
                for c in range(d_top):
                    row: dict[int, Fraction] = {}
                    for k in range(f.dim(x, a)):
                        if q.at(r, k):
                            e = sigma_entry((x, a), k, c)
                            row[e] = row.get(e, Fraction(0)) + q.at(r, k)
                    if r == c:
                        row[rhs_col] = Fraction(-1)
                    rows.append(row)
    # naturality: lift . sigma_src = sigma_tgt . top-transition
    for arr in fib.base.arrows:
        t = fib.transition(arr.name)
        for a in fib.fiber(arr.source).elements:
            lmat = f.lift_matrix(arr.name, a)
            tmat = tops.lift_matrix(arr.name, a)
            src_key = (arr.source, a)
            tgt_key = (arr.target, t(a))
            for r in range(f.dim(arr.target, t(a))):
                for c in range(splittings[arr.source].dims[a]):
                    row = {}
                    for k in range(f.dim(arr.source, a)):
                        if lmat.at(r, k):
                            e = sigma_entry(src_key, k, c)
                            row[e] = row.get(e, Fraction(0)) + lmat.at(r, k)
                    for k in range(splittings[arr.target].dims[t(a)]):
                        if tmat.at(k, c):
                            e = sigma_entry(tgt_key, r, k)
                            row[e] = row.get(e, Fraction(0)) - tmat.at(k, c)
                    rows.append(row)
    if total:
        sol = sparse_solve(rows, rhs_col)
        if sol is None:
            return None
        sol_entries = [Fraction(0)] * total
        for col, v in sol:
            sol_entries[col] = v
    else:
        sol_entries = []
    sigmas = {}
    for x in fib.base.objects:
        s = splittings[x]
        for a in fib.fiber(x).elements:
            d_f, d_top = f.dim(x, a), s.dims[a]
            off = var_offset[(x, a)]
            sigmas[(x, a)] = Matrix(
                d_f, d_top,
                tuple(sol_entries[off + i * d_top + j] for i in range(d_f) for j in range(d_top)),
            )
    iso = {}
    for x in fib.base.objects:
        fibx = fib.fiber(x)
        s = splittings[x]
        for a in fibx.elements:
            cols = [f.fiber_matrix(x, b, a) @ sigmas[(x, b)] for b in s.blocks(fibx.le, a)]
            th = hstack_all(cols, f.dim(x, a))
            if not is_invertible(th):
                raise ArithmeticError("feasible section produced a singular comparison")
            iso[(x, a)] = th
    return GlobalSplitting(tops, iso)


# ---------------------------------------------------------------------------
# natural transformations, Ext and tangent dimensions


def natural_transformation_basis(f: StokesFunctor, g: StokesFunctor) -> list[dict]:
    """A basis of the space of natural transformations f -> g."""
    if f.fibration != g.fibration:
        raise ValueError("functors live on different fibrations")
    fib = f.fibration
    keys = [(x, a) for x in fib.base.objects for a in fib.fiber(x).elements]
    offsets = {}
    total = 0
    for key in keys:
        offsets[key] = total
        total += f.spaces[key] * g.spaces[key]

    def entry(key, i, j) -> int:
        # eta_key has shape g.spaces[key] x f.spaces[key], row-major
        return offsets[key] + i * f.spaces[key] + j

    rows: list[dict] = []
    for arrow_id, (tgt, src) in generating_arrow_shapes(fib).items():
        fm = f.arrows[arrow_id]
        gm = g.arrows[arrow_id]
        for r in range(g.spaces[tgt]):
            for c in range(f.spaces[src]):
                row: dict[int, Fraction] = {}
                # (eta_tgt . F(m) - G(m) . eta_src)[r, c] = 0
                for k in range(f.spaces[tgt]):
                    if fm.at(k, c):
                        e = entry(tgt, r, k)
                        row[e] = row.get(e, Fraction(0)) + fm.at(k, c)
                for k in range(g.spaces[src]):
                    if gm.at(r, k):
                        e = entry(src, k, c)
                        row[e] = row.get(e, Fraction(0)) - gm.at(r, k)
                if row:
                    rows.append(row)
    if total == 0:
        return []
    kernel = sparse_kernel_basis(rows, total)
    out = []
    for vec in kernel:
        eta = {}
        for key in keys:
            d_g, d_f = g.spaces[key], f.spaces[key]
            off = offsets[key]
            eta[key] = Matrix(
                d_g, d_f,
                tuple(vec.get(off + i * d_f + jj, Fraction(0)) for i in range(d_g) for jj in range(d_f)),
            )
        out.append(eta)
    return out


def natural_isomorphism(f: StokesFunctor, g: StokesFunctor, seed: int = 7, tries: int = 64) -> dict | None:
    """A natural isomorphism f -> g found by exact solve, or None."""
    import random

    if f.fibration != g.fibration:
        return None
    keys = [(x, a) for x in f.fibration.base.objects for a in f.fibration.fiber(x).elements]
    if any(f.spaces[k] != g.spaces[k] for k in keys):
        return None
    if all(f.spaces[k] == 0 for k in keys):
        return {k: Matrix.zeros(0, 0) for k in keys}
    basis = natural_transformation_basis(f, g)
    if not basis:
        return None
    rng = random.Random(seed)
    for attempt in range(tries):
        bound = 1 + attempt // 8
        coeffs = [Fraction(rng.randint(-bound, bound)) for _ in basis]
        eta = {}
        for key in keys:
            m = Matrix.zeros(g.spaces[key], f.spaces[key])
            for co, b in zip(coeffs, basis):
                if co:
                    m = m + b[key].scale(co)
            eta[key] = m
        if all(is_invertible(eta[k]) for k in keys):
            return eta
    return None


@dataclass
class HomComplex:
    """A finite cochain complex of exact matrices, supported in degrees >= 0."""

    dims: list
    differentials: list  # differentials[i]: C^i -> C^(i+1)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * d for i, d in enumerate(self.dims))

    def cohomology_dims(self) -> list:
        ranks = [sparse_rank(matrix_sparse_rows(d)) for d in self.differentials]
        out = []
        for i, dim in enumerate(self.dims):
            r_out = ranks[i] if i < len(ranks) else 0
            r_in = ranks[i - 1] if i >= 1 else 0
            out.append(dim - r_out - r_in)
        return out


def hom_complex(f: StokesFunctor, g: StokesFunctor) -> HomComplex:
    """Nerve cochains of the total category with Hom(F(head), G(tail)) parts.

    A degree-n cochain assigns to each composable chain of n nonidentity
    morphisms a matrix F(source of chain) -> G(target of chain); the
    simplicial differential's cohomology computes the Ext groups between
    the two functors over the total category.
    """
    if f.fibration != g.fibration:
        raise ValueError("functors live on different fibrations")
    total_cat = TotalCategory.of(f.fibration)
    chains = nondegenerate_chains(total_cat)
    max_len = max(chains.keys())

    def ends(level: int, ch):
        if level == 0:
            return ch, ch
        return ch[0].source, ch[-1].target

    coords: list[dict] = []
    dims: list[int] = []
    for level in range(max_len + 1):
        offset = {}
        run = 0
        for ch in chains.get(level, []):
            src, tgt = ends(level, ch)
            offset[_chain_key(level, ch)] = run
            run += f.spaces[src] * g.spaces[tgt]
        coords.append(offset)
        dims.append(run)

    diffs = []
    for level in range(max_len):
        rows, cols = dims[level + 1], dims[level]
        ent = [[Fraction(0)] * cols for _ in range(rows)]
        for ch in chains.get(level + 1, []):
            src, tgt = ends(level + 1, ch)
            d_src, d_tgt = f.spaces[src], g.spaces[tgt]
            r_off = coords[level + 1][_chain_key(level + 1, ch)]

            def out_idx(r: int, s: int) -> int:
                # component (r, s) of the value on ch: row r of G(tgt), col s of F(src)
                return r_off + r * d_src + s

            # face 0: drop the first morphism, precompose with F(ch[0])
            face = ch[1:] if level >= 1 else ch[0].target
            c_off = coords[level][_chain_key(level, face)]
            fsrc, ftgt = ends(level, face)
            pre = f.morphism_matrix(ch[0])  # F(src) -> F(fsrc)
            for r in range(g.spaces[ftgt]):
                for j in range(f.spaces[fsrc]):
                    var = c_off + r * f.spaces[fsrc] + j
                    for s in range(d_src):
                        if pre.at(j, s):
                            ent[out_idx(r, s)][var] += pre.at(j, s)
            # inner faces: merge consecutive morphisms
            for i in range(1, level + 1):
                merged = ch[: i - 1] + (total_cat.compose(ch[i - 1], ch[i]),) + ch[i + 1 :]
                c_off = coords[level][_chain_key(level, merged)]
                sign = Fraction((-1) ** i)
                for r in range(d_tgt):
                    for s in range(d_src):
                        ent[out_idx(r, s)][c_off + r * d_src + s] += sign
            # last face: drop the last morphism, postcompose with G(ch[-1])
            face = ch[:-1] if level >= 1 else ch[0].source
            c_off = coords[level][_chain_key(level, face)]
            fsrc, ftgt = ends(level, face)
            post = g.morphism_matrix(ch[-1])  # G(ftgt) -> G(tgt)
            sign = Fraction((-1) ** (level + 1))
            for i2 in range(g.spaces[ftgt]):
                for s in range(f.spaces[fsrc]):
                    var = c_off + i2 * f.spaces[fsrc] + s
                    for r in range(d_tgt):
                        if post.at(r, i2):
                            ent[out_idx(r, s)][var] += sign * post.at(r, i2)
        diffs.append(Matrix(rows, cols, tuple(v for row in ent for v in row)))
    return HomComplex(dims, diffs)


def _chain_key(level: int, ch):
    if level == 0:
        return ch
    return tuple(m.key() for m in ch)


def ext_dims(f: StokesFunctor, g: StokesFunctor) -> list:
    """Exact cohomology dimensions of the hom complex."""
    return hom_complex(f, g).cohomology_dims()


def tangent_dims(f: StokesFunctor) -> list:
    """Self-Ext dimensions reported one degree down; index 0 is degree -1."""
    return list(ext_dims(f, f))


# ---------------------------------------------------------------------------
# pullback of functors along base functors


def pullback_functor(bf: BaseFunctor, f: StokesFunctor) -> StokesFunctor:
    """Restrict a functor along a base functor (generators to generators)."""
    fib = pullback_fibration(bf, f.fibration)
    spaces = {}
    arrows = {}
    for x in fib.base.objects:
        for a in fib.fiber(x).elements:
            spaces[(x, a)] = f.dim(bf.object_map[x], a)
    for x in fib.base.objects:
        for a, b in fib.fiber(x).covers():
            arrows[cover_arrow_id(x, a, b)] = f.cover_matrix(bf.object_map[x], a, b)
    for arr in fib.base.arrows:
        img = bf.arrow_map.get(arr.name)
        for a in fib.fiber(arr.source).elements:
            if img is None:
                arrows[lift_arrow_id(arr.name, a)] = Matrix.identity(spaces[(arr.source, a)])
            else:
                arrows[lift_arrow_id(arr.name, a)] = f.lift_matrix(img, a)
    return StokesFunctor(fib, spaces, arrows)

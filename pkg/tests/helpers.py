"""Shared test utilities: independent oracles and instance generators.

The elimination, splitting and centralizer oracles here are deliberately
written from scratch against plain lists of Fractions so that library
results are checked by a second route.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from stokeslib import (
    FinPoset,
    Matrix,
    MonotoneMap,
    StokesFibration,
    StokesFunctor,
    cover_arrow_id,
    lift_arrow_id,
    make_circle_base,
)


# ---------------------------------------------------------------------------
# independent exact elimination (the oracle side of dual-route checks)


def oracle_rref(rows):
    """Gauss-Jordan over Q on a list of row lists; returns (rref, pivot cols)."""
    m = [list(map(Fraction, r)) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        pr = None
        for i in range(r, nr):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def oracle_rank(rows) -> int:
    return len(oracle_rref(rows)[1])


def oracle_is_invertible(rows) -> bool:
    n = len(rows)
    return n == 0 or (len(rows[0]) == n and oracle_rank(rows) == n)


def oracle_solve(a_rows, b_col):
    """One solution of A x = b or None, by independent elimination."""
    nr = len(a_rows)
    nc = len(a_rows[0]) if nr else 0
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(a_rows, b_col)]
    red, pivots = oracle_rref(aug)
    for row in red:
        if all(v == 0 for v in row[:nc]) and row[nc] != 0:
            return None
    sol = [Fraction(0)] * nc
    for r, c in enumerate(pivots):
        if c < nc:
            sol[c] = red[r][nc]
        elif red[r][nc] != 0:
            return None
    return sol


def mat_rows(m: Matrix):
    return [list(m.row(i)) for i in range(m.rows)]


# ---------------------------------------------------------------------------
# brute-force splitting oracle (projective-cover comparison map)


def oracle_split_verdict(f: StokesFunctor, x: str) -> bool:
    """Build the canonical comparison from chosen top sections and test that
    every component is invertible, using only the oracle elimination."""
    fib = f.fibration.fiber(x)
    elems = list(fib.elements)
    tops = {}
    secs = {}
    for b in elems:
        below = [c for c in elems if fib.lt(c, b)]
        cols = []
        for c in below:
            mat = f.fiber_matrix(x, c, b)
            for j in range(mat.cols):
                cols.append([mat.at(i, j) for i in range(mat.rows)])
        d = f.dim(x, b)
        rad_rank = oracle_rank(_transpose(cols, d)) if cols else 0
        tops[b] = d - rad_rank
        # greedily extend by standard vectors
        chosen = []
        current = list(cols)
        rank = rad_rank
        for i in range(d):
            e = [Fraction(1 if k == i else 0) for k in range(d)]
            cand = current + [e]
            r2 = oracle_rank(_transpose(cand, d))
            if r2 > rank:
                chosen.append(e)
                current = cand
                rank = r2
        secs[b] = chosen  # list of columns
    for a in elems:
        cols = []
        for b in elems:
            if not fib.le(b, a):
                continue
            mat = f.fiber_matrix(x, b, a)
            for col in secs[b]:
                image = [sum(mat.at(i, k) * col[k] for k in range(mat.cols)) for i in range(mat.rows)]
                cols.append(image)
        d = f.dim(x, a)
        if len(cols) != d:
            return False
        if d and not oracle_is_invertible(_transpose(cols, d)):
            return False
    return True


def _transpose(cols, nrows):
    return [[col[i] for col in cols] for i in range(nrows)]


def oracle_centralizer_dim(m_rows) -> int:
    """dim of {X : X M = M X} by independent elimination."""
    n = len(m_rows)
    rows = []
    for i in range(n):
        for j in range(n):
            row = [Fraction(0)] * (n * n)
            for k in range(n):
                row[i * n + k] += m_rows[k][j]
                row[k * n + j] -= m_rows[i][k]
            rows.append(row)
    return n * n - oracle_rank(rows) if n else 0


# ---------------------------------------------------------------------------
# poset enumeration


def all_labeled_posets(n: int):
    """Every partial order on elements e0..e{n-1}."""
    elems = [f"e{i}" for i in range(n)]
    pairs = [(a, b) for a in elems for b in elems if a != b]
    out = []
    for bits in itertools.product([0, 1], repeat=len(pairs)):
        rel = {(a, a) for a in elems}
        rel.update(p for p, bit in zip(pairs, bits) if bit)
        if _is_partial_order(elems, rel):
            out.append(FinPoset(tuple(elems), frozenset(rel)))
    return out


def _is_partial_order(elems, rel) -> bool:
    for a, b in rel:
        if a != b and (b, a) in rel:
            return False
    for a, b in rel:
        for b2, c in rel:
            if b2 == b and (a, c) not in rel:
                return False
    return True


def canonical_posets(n: int):
    """One representative per isomorphism class of posets on n elements."""
    elems = [f"e{i}" for i in range(n)]
    seen = set()
    out = []
    for p in all_labeled_posets(n):
        canon = min(
            tuple(sorted((perm[a], perm[b]) for a, b in p.leq))
            for perm in ({a: b for a, b in zip(elems, img)} for img in itertools.permutations(elems))
        )
        if canon not in seen:
            seen.add(canon)
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# valid functors with prescribed dimensions (sums of convex thin modules)


def random_functor_with_dims(poset: FinPoset, dims: dict, rng, conjugate=True, prefer_split=False):
    """A valid functor on a one-point base with the given dimension vector.

    Built as a direct sum of thin modules supported on convex subsets
    (down-sets when prefer_split), then optionally conjugated by random
    invertible matrices.  Convexity makes each summand functorial.
    """
    from stokeslib import make_poset_base

    base = make_poset_base(FinPoset.antichain(["x"]))
    fib = StokesFibration(base, {"x": poset}, {})
    remaining = dict(dims)
    summands = []
    while any(v > 0 for v in remaining.values()):
        support = [a for a in poset.elements if remaining[a] > 0]
        seed = rng.choice(support)
        if prefer_split:
            conv = _down_closure_within(poset, seed, support)
        else:
            conv = _random_convex(poset, seed, support, rng)
        summands.append(conv)
        for a in conv:
            remaining[a] -= 1
    spaces = {("x", a): dims[a] for a in poset.elements}
    arrows = {}
    offsets = {}
    for a in poset.elements:
        offsets[a] = {}
        k = 0
        for idx, conv in enumerate(summands):
            if a in conv:
                offsets[a][idx] = k
                k += 1
    for a, b in poset.covers():
        ent = [[Fraction(0)] * dims[a] for _ in range(dims[b])]
        for idx, conv in enumerate(summands):
            if a in conv and b in conv:
                ent[offsets[b][idx]][offsets[a][idx]] = Fraction(1)
        arrows[cover_arrow_id("x", a, b)] = (
            Matrix.from_rows(ent) if dims[b] else Matrix(0, dims[a], ())
        )
    f = StokesFunctor(fib, spaces, arrows)
    if conjugate:
        f = conjugate_functor(f, rng)
    return f


def _down_closure_within(poset, seed, support):
    down = {b for b in poset.elements if poset.le(b, seed)}
    return down if down <= set(support) else {seed}


def _random_convex(poset, seed, support, rng):
    conv = {seed}
    for _ in range(rng.randint(0, 2)):
        boundary = [
            b
            for b in support
            if b not in conv
            and any(poset.le(b, c) or poset.le(c, b) for c in conv)
            and _stays_convex(poset, conv | {b})
        ]
        if not boundary:
            break
        conv.add(rng.choice(sorted(boundary)))
    return conv


def _stays_convex(poset, subset) -> bool:
    for a in subset:
        for c in subset:
            if not poset.lt(a, c):
                continue
            for b in poset.elements:
                if poset.lt(a, b) and poset.lt(b, c) and b not in subset:
                    return False
    return True


def random_invertible(n: int, rng) -> Matrix:
    while True:
        ent = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        m = Matrix.from_rows(ent) if n else Matrix(0, 0, ())
        from stokeslib import is_invertible

        if is_invertible(m):
            return m


def conjugate_functor(f: StokesFunctor, rng) -> StokesFunctor:
    """Conjugate by random invertible matrices at every total object."""
    from stokeslib import inverse
    from stokeslib.functors import generating_arrow_shapes

    conj = {key: random_invertible(d, rng) for key, d in f.spaces.items()}
    conj_inv = {key: inverse(m) for key, m in conj.items()}
    arrows = {}
    for arrow_id, (tgt, src) in generating_arrow_shapes(f.fibration).items():
        arrows[arrow_id] = conj[tgt] @ f.arrows[arrow_id] @ conj_inv[src]
    return StokesFunctor(f.fibration, dict(f.spaces), arrows)


# ---------------------------------------------------------------------------
# random level morphisms (by construction)


def random_level_setup(rng, max_classes=3, max_class_size=2):
    """A poset I, a level morphism assignment onto a random poset J."""
    nj = rng.randint(1, max_classes)
    j_elems = [f"j{i}" for i in range(nj)]
    j_rel = [(a, b) for a in j_elems for b in j_elems if a < b and rng.random() < 0.5]
    J = FinPoset.from_relation(j_elems, j_rel)
    i_elems = []
    assignment = {}
    class_members = {}
    for j in j_elems:
        size = rng.randint(1, max_class_size)
        members = [f"{j}_{k}" for k in range(size)]
        class_members[j] = members
        for m in members:
            assignment[m] = j
        i_elems.extend(members)
    rel = []
    for j in j_elems:
        members = class_members[j]
        for a in members:
            for b in members:
                if a < b and rng.random() < 0.5:
                    rel.append((a, b))
    for j1 in j_elems:
        for j2 in j_elems:
            if J.lt(j1, j2):
                rel.extend((a, b) for a in class_members[j1] for b in class_members[j2])
    I = FinPoset.from_relation(i_elems, rel)
    return I, J, assignment


# ---------------------------------------------------------------------------
# random Stokes-style functors on fibrations with name-preserving transitions


def random_standard_functor(fib: StokesFibration, dims: dict, rng, singular_at=None, conjugate=False):
    """Punctually split functor in standard coordinates on a fibration whose
    transitions are identity assignments; triangular per-arrow gluings with
    invertible diagonal blocks (Stokes) unless ``singular_at`` names a base
    arrow whose diagonal is made singular."""
    names = list(next(iter(fib.fibers.values())).elements)
    order = {x: fib.fiber(x).linear_extension() for x in fib.base.objects}

    def blocks(x, a):
        p = fib.fiber(x)
        return [b for b in order[x] if p.le(b, a)]

    spaces = {}
    for x in fib.base.objects:
        p = fib.fiber(x)
        for a in p.elements:
            spaces[(x, a)] = sum(dims[b] for b in blocks(x, a))

    def inclusion(small, big):
        rows = sum(dims[b] for b in big)
        cols = sum(dims[b] for b in small)
        ent = [[Fraction(0)] * cols for _ in range(rows)]
        ro = {b: sum(dims[c] for c in big[:i]) for i, b in enumerate(big)}
        co = {b: sum(dims[c] for c in small[:i]) for i, b in enumerate(small)}
        for b in small:
            for i in range(dims[b]):
                ent[ro[b] + i][co[b] + i] = Fraction(1)
        return Matrix.from_rows(ent) if rows else Matrix(0, cols, ())

    arrows = {}
    for x in fib.base.objects:
        for a, b in fib.fiber(x).covers():
            arrows[cover_arrow_id(x, a, b)] = inclusion(blocks(x, a), blocks(x, b))

    def random_triangular(order_poset, singular=False):
        blocks_t = {}
        for b in names:
            for b2 in names:
                if b2 == b:
                    d = dims[b]
                    diag = random_invertible(d, rng)
                    if singular and d:
                        diag = Matrix.zeros(d, d)
                    blocks_t[(b2, b)] = diag
                elif order_poset.lt(b2, b):
                    blocks_t[(b2, b)] = Matrix(
                        dims[b2], dims[b], tuple(Fraction(rng.randint(-2, 2)) for _ in range(dims[b2] * dims[b]))
                    )
        return blocks_t

    def full_matrix(blocks_t):
        rows = sum(dims[b] for b in names)
        ent = [[Fraction(0)] * rows for _ in range(rows)]
        off = {b: sum(dims[c] for c in names[:i]) for i, b in enumerate(names)}
        for (b2, b), blk in blocks_t.items():
            for i in range(blk.rows):
                for j in range(blk.cols):
                    ent[off[b2] + i][off[b] + j] = blk.at(i, j)
        return Matrix.from_rows(ent) if rows else Matrix(0, 0, ())

    total = sum(dims[b] for b in names)
    off = {b: sum(dims[c] for c in names[:i]) for i, b in enumerate(names)}
    if fib.base.kind == "poset":
        # frames per object keep parallel paths equal; over a poset base the
        # exit category has an initial object, so this family is exhaustive
        from stokeslib import inverse

        frames = {x: full_matrix(random_triangular(fib.fiber(x))) for x in fib.base.objects}
        transition_matrix = {
            arr.name: frames[arr.target] @ inverse(frames[arr.source]) for arr in fib.base.arrows
        }
    else:
        transition_matrix = {
            arr.name: full_matrix(random_triangular(fib.fiber(arr.target), singular=(singular_at == arr.name)))
            for arr in fib.base.arrows
        }
    for arr in fib.base.arrows:
        tmat = transition_matrix[arr.name]
        for a in fib.fiber(arr.source).elements:
            bs = blocks(arr.source, a)
            bt = blocks(arr.target, a)
            rows = sum(dims[b] for b in bt)
            cols = sum(dims[b] for b in bs)
            ent = [[Fraction(0)] * cols for _ in range(rows)]
            ro = {b: sum(dims[c] for c in bt[:i]) for i, b in enumerate(bt)}
            co = {b: sum(dims[c] for c in bs[:i]) for i, b in enumerate(bs)}
            for b in bs:
                for b2 in bt:
                    for i in range(dims[b2]):
                        for j in range(dims[b]):
                            ent[ro[b2] + i][co[b] + j] = tmat.at(off[b2] + i, off[b] + j)
            arrows[lift_arrow_id(arr.name, a)] = Matrix.from_rows(ent) if rows else Matrix(0, cols, ())
    f = StokesFunctor(fib, spaces, arrows)
    if conjugate:
        f = conjugate_functor(f, rng)
    return f


# ---------------------------------------------------------------------------
# circle-space surgery and comparison


def subdivide_arc(fib: StokesFibration, i: int):
    """Insert a redundant point inside arc s{i}; returns (fibration, old->new map)."""
    n = fib.base.n
    new_base = make_circle_base(n + 1)

    def new_point(j):  # old point index -> new index
        return j if j <= i else j + 1

    fibers = {}
    transitions = {}
    corr = {}
    for j in range(n):
        fibers[f"p{new_point(j)}"] = fib.fiber(f"p{j}")
        corr[f"p{j}"] = f"p{new_point(j)}"
    fibers[f"p{i + 1}"] = fib.fiber(f"s{i}")
    for j in range(n):
        if j < i:
            fibers[f"s{j}"] = fib.fiber(f"s{j}")
            corr[f"s{j}"] = f"s{j}"
        elif j == i:
            fibers[f"s{i}"] = fib.fiber(f"s{i}")
            fibers[f"s{i + 1}"] = fib.fiber(f"s{i}")
            corr[f"s{i}"] = f"s{i}"
        else:
            fibers[f"s{j + 1}"] = fib.fiber(f"s{j}")
            corr[f"s{j}"] = f"s{j + 1}"
    ident = lambda p: MonotoneMap(p, p, {e: e for e in p.elements})
    for j in range(n):
        nj = new_point(j)
        old_ccw = fib.transition(f"p{j}+")
        old_cw = fib.transition(f"p{j}-")
        tgt_ccw = f"s{nj}"
        tgt_cw = f"s{(nj - 1) % (n + 1)}"
        transitions[f"p{nj}+"] = MonotoneMap(fibers[f"p{nj}"], fibers[tgt_ccw], old_ccw.assignment)
        transitions[f"p{nj}-"] = MonotoneMap(fibers[f"p{nj}"], fibers[tgt_cw], old_cw.assignment)
    mid = fibers[f"p{i + 1}"]
    transitions[f"p{i + 1}+"] = ident(mid)
    transitions[f"p{i + 1}-"] = MonotoneMap(mid, fibers[f"s{i}"], {e: e for e in mid.elements})
    return StokesFibration(new_base, fibers, transitions), corr


def subdivide_functor(f: StokesFunctor, fib_new: StokesFibration, i: int) -> StokesFunctor:
    """Extend a functor across the subdivision of arc s{i}."""
    old = f.fibration
    n = old.base.n

    def new_point(j):
        return j if j <= i else j + 1

    def old_arc(j_new):
        if j_new <= i:
            return j_new
        return j_new - 1

    spaces = {}
    arrows = {}
    for j in range(n):
        for a in old.fiber(f"p{j}").elements:
            spaces[(f"p{new_point(j)}", a)] = f.dim(f"p{j}", a)
    for a in old.fiber(f"s{i}").elements:
        spaces[(f"p{i + 1}", a)] = f.dim(f"s{i}", a)
    for j_new in range(n + 1):
        for a in fib_new.fiber(f"s{j_new}").elements:
            spaces[(f"s{j_new}", a)] = f.dim(f"s{old_arc(j_new)}", a)
    for j_new in range(n + 1):
        x = f"s{j_new}"
        for a, b in fib_new.fiber(x).covers():
            arrows[cover_arrow_id(x, a, b)] = f.cover_matrix(f"s{old_arc(j_new)}", a, b)
    for j_new in range(n + 1):
        x = f"p{j_new}"
        for a, b in fib_new.fiber(x).covers():
            if j_new == i + 1:
                arrows[cover_arrow_id(x, a, b)] = f.cover_matrix(f"s{i}", a, b)
            else:
                old_j = j_new if j_new <= i else j_new - 1
                arrows[cover_arrow_id(x, a, b)] = f.cover_matrix(f"p{old_j}", a, b)
    for j in range(n):
        nj = new_point(j)
        for a in old.fiber(f"p{j}").elements:
            arrows[lift_arrow_id(f"p{nj}+", a)] = f.lift_matrix(f"p{j}+", a)
            arrows[lift_arrow_id(f"p{nj}-", a)] = f.lift_matrix(f"p{j}-", a)
    for a in fib_new.fiber(f"p{i + 1}").elements:
        d = spaces[(f"p{i + 1}", a)]
        arrows[lift_arrow_id(f"p{i + 1}+", a)] = Matrix.identity(d)
        arrows[lift_arrow_id(f"p{i + 1}-", a)] = Matrix.identity(d)
    return StokesFunctor(fib_new, spaces, arrows)


def fibrations_isomorphic_up_to_rotation(f1: StokesFibration, f2: StokesFibration) -> bool:
    """Equality of circle fibrations after a rotation of the point indexing."""
    if f1.base.kind != "circle" or f2.base.kind != "circle" or f1.base.n != f2.base.n:
        return False
    n = f1.base.n
    for r in range(n):
        ok = True
        for j in range(n):
            if f1.fiber(f"p{j}").leq != f2.fiber(f"p{(j + r) % n}").leq:
                ok = False
                break
            if f1.fiber(f"s{j}").leq != f2.fiber(f"s{(j + r) % n}").leq:
                ok = False
                break
            for sgn in "+-":
                t1 = f1.transition(f"p{j}{sgn}").assignment
                t2 = f2.transition(f"p{(j + r) % n}{sgn}").assignment
                if t1 != t2:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False

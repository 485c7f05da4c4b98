"""Stokes stratified circles from irregular values, and polyhedral spaces.

An irregular value is a truncated Laurent tail sum c * z^(-q) with exact
Gaussian-rational coefficients and positive rational pole orders.  The
order between two values at a circle direction theta is the sign of
Re(c * exp(-i*m*theta)) for the leading term (m, c) of their difference;
the directions where the sign vanishes are the Stokes directions of the
pair, and the circle stratified by all of them carries the fibration of
pointwise orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .bases import BaseFunctor, make_circle_base, make_poset_base, sub_interval_functor
from .directions import (
    Angle,
    ExactAngle,
    StokesDirection,
    angles_equal,
    compare_angles,
    cyclically_between,
    pair_sign_at,
    rational_angle_between,
    sort_angles,
)
from .exactmath import GaussianRational, rat
from .fibrations import (
    FibrationMorphism,
    LevelStructure,
    StokesFibration,
    pullback_fibration,
    validate_fibration,
)
from .posets import FinPoset, MonotoneMap
from .functors import StokesFunctor, pullback_functor


@dataclass(frozen=True)
class IrregularValue:
    """A truncated Laurent tail: terms (q, c) with strictly decreasing q > 0."""

    terms: tuple  # tuple of (Fraction q, GaussianRational c)

    def __post_init__(self):
        qs = [q for q, _ in self.terms]
        if any(q <= 0 for q in qs):
            raise ValueError("pole orders must be positive")
        if any(qs[i] <= qs[i + 1] for i in range(len(qs) - 1)):
            raise ValueError("terms must have strictly decreasing orders")
        if any(c.is_zero() for _, c in self.terms):
            raise ValueError("zero coefficients are not stored")

    @staticmethod
    def of(*terms) -> "IrregularValue":
        out = tuple((rat(q), c) for q, c in terms)
        return IrregularValue(out)

    @staticmethod
    def zero() -> "IrregularValue":
        return IrregularValue(())


def _difference_terms(a: IrregularValue, b: IrregularValue) -> list:
    acc: dict[Fraction, GaussianRational] = {}
    for q, c in a.terms:
        acc[q] = acc.get(q, GaussianRational.of(0)) + c
    for q, c in b.terms:
        acc[q] = acc.get(q, GaussianRational.of(0)) - c
    out = [(q, c) for q, c in acc.items() if not c.is_zero()]
    out.sort(key=lambda t: t[0], reverse=True)
    return out


def leading_data(a: IrregularValue, b: IrregularValue):
    """Leading (order, coefficient) of a - b, or None when a = b."""
    diff = _difference_terms(a, b)
    if not diff:
        return None
    return diff[0]


@dataclass(frozen=True)
class ExponentialData:
    """A finite set of named, pairwise distinct irregular values."""

    values: dict  # name -> IrregularValue

    def __post_init__(self):
        names = sorted(self.values)
        for i, na in enumerate(names):
            for nb in names[i + 1 :]:
                if leading_data(self.values[na], self.values[nb]) is None:
                    raise ValueError(f"values {na} and {nb} coincide")

    @property
    def names(self) -> list[str]:
        return sorted(self.values)

    @property
    def ramification(self) -> int:
        d = 1
        for v in self.values.values():
            for q, _ in v.terms:
                d = lcm(d, q.denominator)
        return d

    def pairs(self) -> list[tuple[str, str]]:
        names = self.names
        return [(a, b) for i, a in enumerate(names) for b in names[i + 1 :]]


def order_at(a: IrregularValue, b: IrregularValue, where: Angle) -> str:
    """'LT', 'GT', 'EQ' or 'INCOMPARABLE' for the moderate-growth order at a direction.

    a is below b when the leading term (m, c) of a - b satisfies
    Re(c * exp(-i*m*theta)) < 0; the zeros are exactly the pair's Stokes
    directions, where the two values cannot be compared.
    """
    lead = leading_data(a, b)
    if lead is None:
        return "EQ"
    q, c = lead
    if q.denominator != 1:
        raise ValueError("ramified pair; pass through a Kummer cover first")
    sign = pair_sign_at(c, int(q), where)
    if sign == 0:
        return "INCOMPARABLE"
    return "LT" if sign < 0 else "GT"


def stokes_directions(a: IrregularValue, b: IrregularValue) -> list[StokesDirection]:
    """The 2m directions of an unequal pair, sorted by the circle order."""
    lead = leading_data(a, b)
    if lead is None:
        raise ValueError("equal values have no Stokes directions")
    q, c = lead
    if q.denominator != 1:
        raise ValueError("ramified pair; pass through a Kummer cover first")
    m = int(q)
    dirs = [StokesDirection(c, m, k) for k in range(2 * m)]
    return sort_angles(dirs)


def kummer_pullback(e: ExponentialData, d: int) -> ExponentialData:
    """Substitute z -> z^d, multiplying every pole order by d."""
    if d < 1 or d % e.ramification != 0:
        raise ValueError("cover degree must be a positive multiple of the ramification")
    values = {
        name: IrregularValue(tuple((q * d, c) for q, c in v.terms))
        for name, v in e.values.items()
    }
    return ExponentialData(values)


@dataclass(frozen=True)
class CircleSpace:
    """The stratified circle adapted to an ExponentialData set.

    ``points[i]`` is the angle of point stratum p{i}; ``arc_samples[i]`` is
    a certified rational angle strictly inside arc s{i} (from points[i]
    counterclockwise to points[i+1]); ``provenance[i]`` lists the pairs
    whose Stokes directions produced points[i].
    """

    data: ExponentialData
    fibration: StokesFibration
    points: tuple
    arc_samples: tuple
    provenance: dict
    degenerate: bool = False


def _order_poset(e: ExponentialData, where: Angle) -> FinPoset:
    names = e.names
    rel = []
    for a, b in e.pairs():
        verdict = order_at(e.values[a], e.values[b], where)
        if verdict == "LT":
            rel.append((a, b))
        elif verdict == "GT":
            rel.append((b, a))
    return FinPoset.from_relation(names, rel)


def build_circle_space(e: ExponentialData) -> CircleSpace:
    """Points at all pairwise Stokes directions, pointwise orders on strata."""
    if len(e.values) < 1:
        raise ValueError("at least one irregular value is required")
    if e.ramification != 1:
        raise ValueError("ramified data; apply kummer_pullback first")
    all_dirs: list[Angle] = []
    for a, b in e.pairs():
        all_dirs.extend(stokes_directions(e.values[a], e.values[b]))
    points = sort_angles(all_dirs)
    if not points:
        # single value: a degenerate one-point circle carrying the constant fibration
        base = make_circle_base(1)
        only = FinPoset.antichain(e.names)
        ident = MonotoneMap(only, only, {n: n for n in e.names})
        fib = StokesFibration(base, {"p0": only, "s0": only}, {"p0+": ident, "p0-": ident})
        return CircleSpace(e, fib, (ExactAngle(Fraction(0)),), (ExactAngle(Fraction(1)),), {0: []}, True)
    n = len(points)
    base = make_circle_base(n)
    samples = []
    for i in range(n):
        samples.append(rational_angle_between(points[i], points[(i + 1) % n]))
    fibers = {}
    for i, theta in enumerate(points):
        fibers[f"p{i}"] = _order_poset(e, theta)
    for i, sample in enumerate(samples):
        fibers[f"s{i}"] = _order_poset(e, sample)
    transitions = {}
    for i in range(n):
        ident = {name: name for name in e.names}
        transitions[f"p{i}+"] = MonotoneMap(fibers[f"p{i}"], fibers[f"s{i}"], ident)
        transitions[f"p{i}-"] = MonotoneMap(fibers[f"p{i}"], fibers[f"s{(i - 1) % n}"], ident)
    fib = StokesFibration(base, fibers, transitions)
    ok, why = validate_fibration(fib)
    if not ok:
        raise AssertionError(f"constructed circle fibration invalid: {why}")
    provenance = {i: [] for i in range(n)}
    for a, b in e.pairs():
        for d in stokes_directions(e.values[a], e.values[b]):
            for i, theta in enumerate(points):
                if angles_equal(d, theta):
                    provenance[i].append((a, b))
                    break
    return CircleSpace(e, fib, tuple(points), tuple(samples), provenance, False)


# ---------------------------------------------------------------------------
# pole-order level structure


def _pole_classes(e: ExponentialData, threshold: int) -> dict:
    """Partition names: same class when the difference has order <= threshold."""
    names = e.names
    cls = {name: {name} for name in names}
    for a, b in e.pairs():
        lead = leading_data(e.values[a], e.values[b])
        if lead is not None and lead[0] <= threshold:
            merged = cls[a] | cls[b]
            for n in merged:
                cls[n] = merged
    out = {}
    for name in names:
        out[name] = "+".join(sorted(cls[name]))
    return out


def pole_level_structure(s: CircleSpace) -> LevelStructure:
    """The chain of quotient fibrations from truncating pole orders.

    With r the maximal pairwise leading order, stage k (from r down to 1)
    identifies values whose difference has order <= r - k; every stage is
    a level graduation morphism over the circle base, with the unique
    quotient order making the fiber maps level morphisms.
    """
    e = s.data
    orders = [leading_data(e.values[a], e.values[b])[0] for a, b in e.pairs()]
    r = int(max(orders)) if orders else 1
    strata_angles = list(enumerate(s.points)) + [(("s", i), a) for i, a in enumerate(s.arc_samples)]

    def quotient_fibration(threshold: int) -> tuple[StokesFibration, dict]:
        classes = _pole_classes(e, threshold)
        class_names = sorted(set(classes.values()))
        members = {cn: [n for n in e.names if classes[n] == cn] for cn in class_names}
        fibers = {}
        for obj in s.fibration.base.objects:
            where = _stratum_angle(s, obj)
            rel = []
            for i, ca in enumerate(class_names):
                for cb in class_names[i + 1 :]:
                    verdicts = {
                        order_at(e.values[a], e.values[b], where)
                        for a in members[ca]
                        for b in members[cb]
                    }
                    if "LT" in verdicts:
                        rel.append((ca, cb))
                    if "GT" in verdicts:
                        rel.append((cb, ca))
            fibers[obj] = FinPoset.from_relation(class_names, rel)
        transitions = {}
        for arr in s.fibration.base.arrows:
            ident = {cn: cn for cn in class_names}
            transitions[arr.name] = MonotoneMap(fibers[arr.source], fibers[arr.target], ident)
        return StokesFibration(s.fibration.base, fibers, transitions), classes

    stages = []
    prev_fib = s.fibration
    prev_classes = {n: n for n in e.names}
    for k in range(r - 1, -1, -1):
        threshold = r - k
        fib_k, classes_k = quotient_fibration(threshold)
        maps = {}
        for obj in s.fibration.base.objects:
            assignment = {}
            for elem in prev_fib.fiber(obj).elements:
                member = elem.split("+")[0]
                assignment[elem] = classes_k[member]
            maps[obj] = MonotoneMap(prev_fib.fiber(obj), fib_k.fiber(obj), assignment)
        stages.append(FibrationMorphism(prev_fib, fib_k, maps))
        prev_fib = fib_k
        prev_classes = classes_k
    return LevelStructure(tuple(stages))


def _stratum_angle(s: CircleSpace, obj: str) -> Angle:
    idx = int(obj[1:])
    return s.points[idx] if obj.startswith("p") else s.arc_samples[idx]


# ---------------------------------------------------------------------------
# elementary arcs and covers


@dataclass(frozen=True)
class Arc:
    """A closed arc from start counterclockwise to end; full = whole circle."""

    start: Angle | None
    end: Angle | None
    full: bool = False

    def __post_init__(self):
        if not self.full:
            if self.start is None or self.end is None:
                raise ValueError("bounded arcs need both endpoints")
            if compare_angles(self.start, self.end) == 0:
                raise ValueError("degenerate arc")

    def contains_strictly(self, x: Angle) -> bool:
        if self.full:
            return True
        return cyclically_between(self.start, x, self.end)

    def on_boundary(self, x: Angle) -> bool:
        if self.full:
            return False
        return angles_equal(x, self.start) or angles_equal(x, self.end)


def is_elementary_arc(s: CircleSpace, arc: Arc) -> bool:
    """Each unequal pair has exactly one Stokes point in the closed arc,
    interior, with opposite strict orders on the two sides."""
    if s.degenerate:
        return True
    for a, b in s.data.pairs():
        va, vb = s.data.values[a], s.data.values[b]
        dirs = stokes_directions(va, vb)
        if arc.full:
            return False  # 2m >= 2 locus points
        if any(arc.on_boundary(d) for d in dirs):
            return False
        inside = [d for d in dirs if arc.contains_strictly(d)]
        if len(inside) != 1:
            return False
        d0 = inside[0]
        left = rational_angle_between(arc.start, d0)
        right = rational_angle_between(d0, arc.end)
        o1, o2 = order_at(va, vb, left), order_at(va, vb, right)
        if {o1, o2} != {"LT", "GT"}:
            return False
    return True


def _interiors_cover(s: CircleSpace, arcs: list[Arc]) -> bool:
    if any(a.full for a in arcs):
        return True
    if not arcs:
        return False
    critical = sort_angles([a.start for a in arcs] + [a.end for a in arcs] + list(s.points))
    probes = list(critical)
    for i in range(len(critical)):
        j = (i + 1) % len(critical)
        if compare_angles(critical[i], critical[j]) != 0:
            probes.append(rational_angle_between(critical[i], critical[j]))
    return all(any(a.contains_strictly(x) for a in arcs) for x in probes)


def elementary_cover(s: CircleSpace) -> list[Arc] | None:
    """Closed elementary arcs whose interiors cover the circle, or None.

    Arcs of exact length pi/m around the top level are placed at gap
    midpoints; when a gap has the full length pi/m the midpoint-centred arc
    degenerates onto Stokes points, so point-flanking and quarter-shifted
    candidates are added.  Every candidate is verified, and failure of the
    verified set to cover the circle reports None (one level step is then
    needed first).
    """
    if s.degenerate:
        return [Arc(None, None, full=True)]
    e = s.data
    orders = [int(leading_data(e.values[a], e.values[b])[0]) for a, b in e.pairs()]
    m = max(orders)
    half = Fraction(1, 2 * m)  # half arc length, in units of pi
    n = len(s.points)
    centers: list[ExactAngle] = []
    for i in range(n):
        lo, hi = s.points[i], s.points[(i + 1) % n]
        mid = rational_angle_between(lo, hi)
        centers.append(mid)
        centers.append(rational_angle_between(lo, mid))
        centers.append(rational_angle_between(mid, hi))
    candidates = [Arc(ExactAngle(c.t - half), ExactAngle(c.t + half)) for c in centers]
    # arcs flanking each Stokes point, bounded by neighbouring gap samples
    for i in range(n):
        prev_mid = rational_angle_between(s.points[(i - 1) % n], s.points[i])
        next_mid = rational_angle_between(s.points[i], s.points[(i + 1) % n])
        if compare_angles(prev_mid, next_mid) != 0:
            candidates.append(Arc(prev_mid, next_mid))
    verified = [a for a in candidates if is_elementary_arc(s, a)]
    if not _interiors_cover(s, verified):
        return None
    # prune arcs that are not needed for the cover
    pruned = list(verified)
    for a in list(verified):
        rest = [x for x in pruned if x is not a]
        if rest and _interiors_cover(s, rest):
            pruned = rest
    return pruned


# ---------------------------------------------------------------------------
# restriction to arcs


def restrict_to_arc(s: CircleSpace, arc: Arc) -> tuple[StokesFibration, BaseFunctor]:
    """The fibration over the closed arc's exit poset, with the inclusion functor.

    Arc endpoints must lie strictly inside open arcs of the stratification.
    """
    if arc.full:
        raise ValueError("restriction expects a proper closed arc")
    if any(angles_equal(arc.start, p) or angles_equal(arc.end, p) for p in s.points):
        raise ValueError("arc endpoints must avoid the point strata")
    n = len(s.points)
    inside = [i for i in range(n) if arc.contains_strictly(s.points[i])]
    if not inside:
        # the arc sits inside one open stratum: find it and restrict trivially
        for i in range(n):
            if cyclically_between(s.points[i], arc.start, s.points[(i + 1) % n]):
                pt = FinPoset.antichain(["t0"])
                basef = BaseFunctor(make_poset_base(pt), s.fibration.base, {"t0": f"s{i}"}, {})
                return pullback_fibration(basef, s.fibration), basef
        raise AssertionError("arc start not located inside any stratum")
    # consecutive run of contained points, starting with the first after arc.start
    if len(inside) == n:
        first = next(
            i for i in range(n) if cyclically_between(s.points[(i - 1) % n], arc.start, s.points[i])
        )
    else:
        first = next(i for i in inside if (i - 1) % n not in inside)
    num = len(inside)
    basef = sub_interval_functor(s.fibration.base, first, num)
    return pullback_fibration(basef, s.fibration), basef


def restrict_functor_to_arc(s: CircleSpace, arc: Arc, f: StokesFunctor) -> StokesFunctor:
    _, basef = restrict_to_arc(s, arc)
    return pullback_functor(basef, f)


# ---------------------------------------------------------------------------
# polyhedral spaces


@dataclass(frozen=True)
class AffineForm:
    """phi(x) = coeffs . x + const over Q^n."""

    coeffs: tuple
    const: Fraction

    @staticmethod
    def of(coeffs, const=0) -> "AffineForm":
        return AffineForm(tuple(rat(c) for c in coeffs), rat(const))

    def __call__(self, point) -> Fraction:
        return sum((c * rat(p) for c, p in zip(self.coeffs, point)), self.const)


def sign_vector_at(forms, point) -> str:
    out = []
    for phi in forms:
        v = phi(point)
        out.append("0" if v == 0 else ("+" if v > 0 else "-"))
    return "".join(out)


def _sign_leq(sv: str, tv: str) -> bool:
    # 0 is initial in the span poset; deeper strata lie below
    return all(s == "0" or s == t for s, t in zip(sv, tv))


@dataclass(frozen=True)
class PolyhedralSpace:
    forms: tuple
    strata: tuple  # realized sign vectors
    fibration: StokesFibration
    pair_data: dict  # (name, name) -> (form index, orientation '+'/'-')


def build_polyhedral_space(forms, sign_vectors, pair_data) -> PolyhedralSpace:
    """Sign-vector poset base with the fiber orders cut out by one form per pair.

    ``pair_data[(a, b)] = (form index, orient)`` declares a < b on the
    strata where the form has sign ``orient`` and b < a on the opposite
    side; the pair is incomparable exactly on the form's zero stratum set.
    """
    forms = tuple(forms)
    strata = tuple(sign_vectors)
    if len(set(strata)) != len(strata):
        raise ValueError("duplicate sign vectors")
    for sv in strata:
        if len(sv) != len(forms) or any(ch not in "-0+" for ch in sv):
            raise ValueError(f"malformed sign vector {sv!r}")
    names = sorted({n for pair in pair_data for n in pair})
    pairs = {(a, b) for i, a in enumerate(names) for b in names[i + 1 :]}
    normalized = {}
    for (a, b), (idx, orient) in pair_data.items():
        key = (a, b) if (a, b) in pairs else (b, a)
        if key != (a, b):
            orient = "+" if orient == "-" else "-"
        if not 0 <= idx < len(forms) or orient not in "+-":
            raise ValueError("inconsistent pair data")
        normalized[key] = (idx, orient)
    if set(normalized) != pairs:
        raise ValueError("every unordered pair needs exactly one form assignment")
    rel = [(sv, tv) for sv in strata for tv in strata if sv != tv and _sign_leq(sv, tv)]
    base_poset = FinPoset.from_relation(strata, rel)
    base = make_poset_base(base_poset)
    fibers = {}
    for sv in strata:
        fiber_rel = []
        for (a, b), (idx, orient) in normalized.items():
            sign = sv[idx]
            if sign == "0":
                continue
            if sign == orient:
                fiber_rel.append((a, b))
            else:
                fiber_rel.append((b, a))
        fibers[sv] = FinPoset.from_relation(names, fiber_rel)
    transitions = {}
    for arr in base.arrows:
        ident = {n: n for n in names}
        transitions[arr.name] = MonotoneMap(fibers[arr.source], fibers[arr.target], ident)
    fib = StokesFibration(base, fibers, transitions)
    ok, why = validate_fibration(fib)
    if not ok:
        raise ValueError(f"inconsistent pair data: {why}")
    return PolyhedralSpace(forms, strata, fib, normalized)


def check_polyhedral_elementarity(s: PolyhedralSpace) -> bool:
    """Hypotheses of the polyhedral splitting criterion, per unequal pair:
    nonempty zero locus, both open sides realized and connected, with the
    declared order flip across the wall."""
    poset = s.fibration.base.poset
    for (a, b), (idx, orient) in s.pair_data.items():
        zero = [sv for sv in s.strata if sv[idx] == "0"]
        plus = [sv for sv in s.strata if sv[idx] == "+"]
        minus = [sv for sv in s.strata if sv[idx] == "-"]
        if not zero or not plus or not minus:
            return False
        if not _connected(poset, plus) or not _connected(poset, minus):
            return False
        # the declared flip: a < b on the orient side, b < a on the other
        for sv in plus + minus:
            fiber = s.fibration.fiber(sv)
            if sv[idx] == orient:
                if not fiber.lt(a, b):
                    return False
            else:
                if not fiber.lt(b, a):
                    return False
        for sv in zero:
            fiber = s.fibration.fiber(sv)
            if fiber.le(a, b) or fiber.le(b, a):
                return False
    return True


def _connected(poset: FinPoset, subset: list) -> bool:
    if not subset:
        return False
    keep = set(subset)
    adj = {v: set() for v in keep}
    for u in keep:
        for v in keep:
            if u != v and (poset.le(u, v) or poset.le(v, u)):
                adj[u].add(v)
                adj[v].add(u)
    seen = set()
    stack = [subset[0]]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adj[v] - seen)
    return seen == keep

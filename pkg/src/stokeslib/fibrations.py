"""Cocartesian fibrations in finite posets over circle and poset bases."""

from __future__ import annotations

from dataclasses import dataclass

from .bases import BaseCategory, BaseFunctor, BaseMorphism, make_circle_base
from .posets import FinPoset, MonotoneMap, graded_poset, is_level_morphism, underlying_set, validate_poset


@dataclass(frozen=True)
class StokesFibration:
    """A finite poset per base object, a monotone transition per base arrow."""

    base: BaseCategory
    fibers: dict  # base object -> FinPoset
    transitions: dict  # base arrow name -> MonotoneMap

    def fiber(self, x: str) -> FinPoset:
        return self.fibers[x]

    def transition(self, arrow_name: str) -> MonotoneMap:
        return self.transitions[arrow_name]

    def transition_along(self, m: BaseMorphism) -> MonotoneMap:
        out = MonotoneMap.identity(self.fiber(m.source))
        for g in m.gens:
            out = self.transition(g).compose_after(out)
        return out


def validate_fibration(i: StokesFibration) -> tuple[bool, str]:
    """Check fibers, transitions and (for poset bases) path independence."""
    for x in i.base.objects:
        if x not in i.fibers:
            return False, f"missing fiber at {x}"
        ok, why = validate_poset(i.fiber(x))
        if not ok:
            return False, f"fiber at {x}: {why}"
    for a in i.base.arrows:
        t = i.transitions.get(a.name)
        if t is None:
            return False, f"missing transition for arrow {a.name}"
        if t.source != i.fiber(a.source) or t.target != i.fiber(a.target):
            return False, f"transition {a.name} has wrong endpoints"
        if not t.is_valid():
            return False, f"transition {a.name} is not monotone"
    if i.base.kind == "poset":
        p = i.base.poset
        for x in p.elements:
            for y in p.elements:
                if not p.lt(x, y):
                    continue
                paths = i.base.all_hasse_paths(x, y)
                composites = []
                for path in paths:
                    comp = i.transition_along(BaseMorphism(x, y, tuple(path)))
                    composites.append(comp.assignment)
                if any(c != composites[0] for c in composites[1:]):
                    return False, f"path independence fails between {x} and {y}"
    return True, "ok"


def fiberwise_set(i: StokesFibration) -> StokesFibration:
    """Replace every fiber by its underlying set, transitions by the same maps."""
    fibers = {x: underlying_set(f) for x, f in i.fibers.items()}
    transitions = {
        name: MonotoneMap(fibers[i.base.arrow(name).source], fibers[i.base.arrow(name).target], t.assignment)
        for name, t in i.transitions.items()
    }
    return StokesFibration(i.base, fibers, transitions)


@dataclass(frozen=True)
class CocartesianSection:
    choice: dict  # base object -> fiber element

    def __call__(self, x: str) -> str:
        return self.choice[x]


def section_is_valid(i: StokesFibration, s: CocartesianSection) -> bool:
    return all(
        i.transition(a.name)(s(a.source)) == s(a.target)
        for a in i.base.arrows
    ) and all(x in s.choice and s(x) in i.fiber(x).elements for x in i.base.objects)


def cocartesian_sections(i: StokesFibration) -> list[CocartesianSection]:
    """Exhaustive list, by backtracking over the base objects."""
    objects = list(i.base.objects)
    arrows = list(i.base.arrows)
    sections: list[CocartesianSection] = []

    def extend(idx: int, partial: dict) -> None:
        if idx == len(objects):
            sections.append(CocartesianSection(dict(partial)))
            return
        x = objects[idx]
        for a in i.fiber(x).elements:
            partial[x] = a
            ok = True
            for arr in arrows:
                if arr.source in partial and arr.target in partial:
                    if i.transition(arr.name)(partial[arr.source]) != partial[arr.target]:
                        ok = False
                        break
            if ok:
                extend(idx + 1, partial)
            del partial[x]

    extend(0, {})
    return sections


def stokes_locus(i: StokesFibration, s: CocartesianSection, t: CocartesianSection) -> set[str]:
    """Base objects where the two section values cannot be compared."""
    out = set()
    for x in i.base.objects:
        f = i.fiber(x)
        a, b = s(x), t(x)
        if not (f.le(a, b) or f.le(b, a)):
            out.add(x)
    return out


@dataclass(frozen=True)
class FibrationMorphism:
    """A fiberwise map of fibrations over one base, commuting with transitions."""

    source: StokesFibration
    target: StokesFibration
    maps: dict  # base object -> MonotoneMap fiber_I(x) -> fiber_J(x)

    def map_at(self, x: str) -> MonotoneMap:
        return self.maps[x]

    @staticmethod
    def identity(i: StokesFibration) -> "FibrationMorphism":
        return FibrationMorphism(i, i, {x: MonotoneMap.identity(i.fiber(x)) for x in i.base.objects})

    def squares_commute(self) -> bool:
        for a in self.source.base.arrows:
            f_gamma = self.source.transition(a.name)
            g_gamma = self.target.transition(a.name)
            p_x, p_y = self.maps[a.source], self.maps[a.target]
            for elem in f_gamma.source.elements:
                if g_gamma(p_x(elem)) != p_y(f_gamma(elem)):
                    return False
        return True


def terminal_fibration(base: BaseCategory) -> StokesFibration:
    pt = FinPoset.antichain(["*"])
    return StokesFibration(
        base,
        {x: pt for x in base.objects},
        {a.name: MonotoneMap(pt, pt, {"*": "*"}) for a in base.arrows},
    )


def terminal_morphism(i: StokesFibration) -> FibrationMorphism:
    t = terminal_fibration(i.base)
    maps = {
        x: MonotoneMap(i.fiber(x), t.fiber(x), {a: "*" for a in i.fiber(x).elements})
        for x in i.base.objects
    }
    return FibrationMorphism(i, t, maps)


def is_level_fibration_morphism(p: FibrationMorphism) -> bool:
    """Fiberwise level, commuting squares, and target set-transitions bijective."""
    if p.source.base is not p.target.base and p.source.base != p.target.base:
        return False
    if not p.squares_commute():
        return False
    if not all(is_level_morphism(p.maps[x]) for x in p.source.base.objects):
        return False
    # graduation-morphism condition: the target's underlying-set fibration
    # is locally constant, i.e. every transition is a bijection on elements
    return all(p.target.transition(a.name).is_bijective() for a in p.target.base.arrows)


def graded_fibration(p: FibrationMorphism) -> StokesFibration:
    """Fiberwise graded posets; transitions restrict because the target's
    set-transitions are bijective."""
    if not p.squares_commute():
        raise ValueError("fibration morphism squares do not commute")
    if not all(p.target.transition(a.name).is_bijective() for a in p.target.base.arrows):
        raise ValueError("target set-fibration is not locally constant")
    fibers = {x: graded_poset(p.maps[x]) for x in p.source.base.objects}
    transitions = {}
    for a in p.source.base.arrows:
        t = p.source.transition(a.name)
        transitions[a.name] = MonotoneMap(fibers[a.source], fibers[a.target], t.assignment)
        if not transitions[a.name].is_valid():
            raise ValueError(f"graded transition {a.name} not monotone")
    return StokesFibration(p.source.base, fibers, transitions)


def pullback_fibration(f: BaseFunctor, i: StokesFibration) -> StokesFibration:
    """Base change along a functor mapping generators to generators or identities."""
    if f.target != i.base:
        raise ValueError("functor target does not match the fibration base")
    fibers = {x: i.fiber(f.object_map[x]) for x in f.source.objects}
    transitions = {}
    for a in f.source.arrows:
        img = f.arrow_map.get(a.name)
        if img is None:
            transitions[a.name] = MonotoneMap.identity(fibers[a.source])
        else:
            t = i.transition(img)
            transitions[a.name] = MonotoneMap(fibers[a.source], fibers[a.target], t.assignment)
    return StokesFibration(f.source, fibers, transitions)


# ---------------------------------------------------------------------------
# total category and composable chains


@dataclass(frozen=True)
class TotalMorphism:
    """A nonidentity-or-identity morphism (gamma, a, c) with f_gamma(a) <= c."""

    base: BaseMorphism
    source: tuple[str, str]
    target: tuple[str, str]

    @property
    def is_identity(self) -> bool:
        return self.base.is_identity and self.source == self.target

    def key(self) -> tuple:
        return (self.base.key(), self.source, self.target)


@dataclass
class TotalCategory:
    """The Grothendieck construction of a fibration, as a finite category.

    Morphisms (x,a) -> (y,c) correspond to pairs of a base morphism
    gamma: x -> y and a fiber comparison f_gamma(a) <= c; parallel
    generator paths over one gamma are identified by the cocartesian-lift
    relations, so these pairs already present the quotient category.
    """

    fibration: StokesFibration
    objects: list
    morphisms: list

    @staticmethod
    def of(fib: StokesFibration) -> "TotalCategory":
        objects = [(x, a) for x in fib.base.objects for a in fib.fiber(x).elements]
        morphisms = []
        for bm in fib.base.morphisms():
            t = fib.transition_along(bm)
            fib_target = fib.fiber(bm.target)
            for a in fib.fiber(bm.source).elements:
                fa = t(a)
                for c in fib_target.elements:
                    if fib_target.le(fa, c):
                        morphisms.append(TotalMorphism(bm, (bm.source, a), (bm.target, c)))
        return TotalCategory(fib, objects, morphisms)

    def nonidentity(self) -> list:
        return [m for m in self.morphisms if not m.is_identity]

    def compose(self, first: TotalMorphism, second: TotalMorphism) -> TotalMorphism:
        if first.target != second.source:
            raise ValueError("not composable")
        return TotalMorphism(
            self.fibration.base.compose(first.base, second.base), first.source, second.target
        )

    def check_acyclic(self) -> None:
        for m in self.nonidentity():
            if m.source == m.target:
                raise ValueError(f"cycle detected through {m.source}")


def nondegenerate_chains(t: TotalCategory, maxlen: int | None = None) -> dict[int, list]:
    """Composable chains of nonidentity morphisms, grouped by length.

    Length 0 chains are the objects.  Enumeration stops when a length has
    no chains or when maxlen is reached.
    """
    t.check_acyclic()
    chains: dict[int, list] = {0: list(t.objects)}
    by_source: dict = {}
    for m in t.nonidentity():
        by_source.setdefault(m.source, []).append(m)
    level = [(m,) for m in t.nonidentity()]
    length = 1
    while level and (maxlen is None or length <= maxlen):
        chains[length] = level
        nxt = []
        for ch in level:
            for m in by_source.get(ch[-1].target, []):
                nxt.append(ch + (m,))
        level = nxt
        length += 1
    return chains


# ---------------------------------------------------------------------------
# level structures and refinement collapse


@dataclass(frozen=True)
class LevelStructure:
    """A chain of fibrations I^d -> ... -> I^0 over one base.

    ``stages[k]`` is the morphism I^(d-k) -> I^(d-k-1); every stage must be
    a level graduation morphism.
    """

    stages: tuple

    def __post_init__(self):
        for a, b in zip(self.stages, self.stages[1:]):
            if a.target is not b.source and a.target != b.source:
                raise ValueError("stages do not chain")

    @property
    def top(self) -> StokesFibration:
        return self.stages[0].source

    @property
    def bottom(self) -> StokesFibration:
        return self.stages[-1].target

    def validate(self) -> tuple[bool, str]:
        for idx, p in enumerate(self.stages):
            if not is_level_fibration_morphism(p):
                return False, f"stage {idx} is not a level graduation morphism"
        return True, "ok"


def collapse_refinement(i: StokesFibration) -> tuple[StokesFibration, dict, bool]:
    """Merge circle strata across points whose transitions are isomorphisms.

    Returns (collapsed fibration, old-object -> new-object map, fully_constant).
    When every transition is an isomorphism the input is returned unchanged
    with the fully-constant flag set.
    """
    if i.base.kind != "circle":
        raise ValueError("refinement collapse applies to circle bases")
    n = i.base.n
    removable = []
    for j in range(n):
        ccw = i.transition(f"p{j}+")
        cw = i.transition(f"p{j}-")
        removable.append(ccw.is_poset_isomorphism() and cw.is_poset_isomorphism())
    if all(removable):
        return i, {x: x for x in i.base.objects}, True
    survivors = [j for j in range(n) if not removable[j]]
    m = len(survivors)
    new_base = make_circle_base(m)
    fibers = {}
    transitions = {}
    correspondence = {}
    for t, j in enumerate(survivors):
        fibers[f"p{t}"] = i.fiber(f"p{j}")
        correspondence[f"p{j}"] = f"p{t}"
    runs = []
    for t, j in enumerate(survivors):
        j_next = survivors[(t + 1) % m]
        # arcs s_j .. s_{j_next-1}; removed points are the interior ones
        run_arcs = []
        k = j
        while True:
            run_arcs.append(k % n)
            k += 1
            if k % n == j_next:
                break
        runs.append((t, j, j_next, run_arcs))
        fibers[f"s{t}"] = i.fiber(f"s{(j_next - 1) % n}")
        for a_idx in run_arcs:
            correspondence[f"s{a_idx}"] = f"s{t}"
        for p_idx in run_arcs[1:]:
            correspondence[f"p{p_idx}"] = f"s{t}"
    for t, j, j_next, run_arcs in runs:
        # ccw transition from the new point p_t: walk the run of isomorphisms
        walk = i.transition(f"p{j}+")
        k = (j + 1) % n
        while k != j_next:
            hop = i.transition(f"p{k}+").compose_after(i.transition(f"p{k}-").inverse())
            walk = hop.compose_after(walk)
            k = (k + 1) % n
        transitions[f"p{t}+"] = MonotoneMap(fibers[f"p{t}"], fibers[f"s{t}"], walk.assignment)
        # cw transition into the arc preceding the new point
        prev_t = (t - 1) % m
        cw = i.transition(f"p{j}-")
        transitions[f"p{t}-"] = MonotoneMap(fibers[f"p{t}"], fibers[f"s{prev_t}"], cw.assignment)
    out = StokesFibration(new_base, fibers, transitions)
    return out, correspondence, False

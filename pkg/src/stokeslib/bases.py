"""Finite combinatorial exit-path bases: stratified circles and posets.

A stratified circle with n point strata is presented by the zigzag quiver
with n points, n arcs and two arrows per point (counterclockwise and
clockwise into the adjacent arcs); since arcs are contractible this free
category is the exit category of the stratified circle.  Polyhedral bases
are posets, with morphisms the comparable pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .posets import FinPoset, validate_poset


@dataclass(frozen=True)
class BaseArrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class BaseMorphism:
    """A morphism of the base category with a generator decomposition."""

    source: str
    target: str
    gens: tuple[str, ...]  # generating arrow names, applied left to right

    @property
    def is_identity(self) -> bool:
        return not self.gens and self.source == self.target

    def key(self) -> tuple:
        return (self.source, self.target, self.gens)


@dataclass(frozen=True)
class BaseCategory:
    kind: str  # "circle" or "poset"
    objects: tuple[str, ...]
    arrows: tuple[BaseArrow, ...]
    poset: FinPoset | None = None
    n: int = 0

    def arrow(self, name: str) -> BaseArrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(f"unknown base arrow {name!r}")

    def morphisms(self) -> list[BaseMorphism]:
        """All morphisms: identities plus one representative per hom class.

        For a poset base parallel generator paths are equal, so each
        comparable pair carries a single morphism; for a circle base there
        are no composable generator pairs, so morphisms are the arrows.
        """
        out = [BaseMorphism(x, x, ()) for x in self.objects]
        if self.kind == "circle":
            out.extend(BaseMorphism(a.source, a.target, (a.name,)) for a in self.arrows)
            return out
        assert self.poset is not None
        for x in self.poset.elements:
            for y in self.poset.elements:
                if self.poset.lt(x, y):
                    out.append(BaseMorphism(x, y, tuple(self._hasse_path(x, y))))
        return out

    def _hasse_path(self, x: str, y: str) -> list[str]:
        # one cover path from x up to y (poset base)
        assert self.poset is not None
        if x == y:
            return []
        for a, b in self.poset.covers():
            if a == x and self.poset.le(b, y):
                return [f"{a}<{b}"] + self._hasse_path(b, y)
        raise ValueError(f"no cover path from {x} to {y}")

    def all_hasse_paths(self, x: str, y: str) -> list[list[str]]:
        """Every cover path from x to y (poset base); used for path independence."""
        assert self.poset is not None
        if x == y:
            return [[]]
        paths = []
        for a, b in self.poset.covers():
            if a == x and self.poset.le(b, y):
                paths.extend([f"{a}<{b}"] + rest for rest in self.all_hasse_paths(b, y))
        return paths

    def compose(self, first: BaseMorphism, second: BaseMorphism) -> BaseMorphism:
        """second o first, with the canonical generator decomposition."""
        if first.target != second.source:
            raise ValueError("morphisms not composable")
        if self.kind == "poset" and (first.gens or second.gens):
            # parallel cover paths are equal in a poset base; renormalize
            return BaseMorphism(first.source, second.target, tuple(self._hasse_path(first.source, second.target)))
        return BaseMorphism(first.source, second.target, first.gens + second.gens)

    def connected_components(self) -> list[list[str]]:
        adj: dict[str, set[str]] = {x: set() for x in self.objects}
        for a in self.arrows:
            adj[a.source].add(a.target)
            adj[a.target].add(a.source)
        seen: set[str] = set()
        comps = []
        for x in self.objects:
            if x in seen:
                continue
            stack, comp = [x], []
            while stack:
                v = stack.pop()
                if v in seen:
                    continue
                seen.add(v)
                comp.append(v)
                stack.extend(adj[v] - seen)
            comps.append(sorted(comp))
        return comps

    def point_name(self, i: int) -> str:
        return f"p{i % self.n}"

    def arc_name(self, i: int) -> str:
        return f"s{i % self.n}"


def make_circle_base(n: int) -> BaseCategory:
    """Zigzag base of a circle with n point strata and n open arcs.

    Arrow ``p{i}+`` exits the point counterclockwise into arc ``s{i}``;
    ``p{i}-`` exits clockwise into arc ``s{i-1}``.  For n = 1 both arrows
    target the unique arc but remain distinct.
    """
    if n < 1:
        raise ValueError("a circle base needs at least one point stratum")
    objects = tuple(f"p{i}" for i in range(n)) + tuple(f"s{i}" for i in range(n))
    arrows = []
    for i in range(n):
        arrows.append(BaseArrow(f"p{i}+", f"p{i}", f"s{i}"))
        arrows.append(BaseArrow(f"p{i}-", f"p{i}", f"s{(i - 1) % n}"))
    return BaseCategory("circle", objects, tuple(arrows), None, n)


def make_poset_base(p: FinPoset) -> BaseCategory:
    ok, why = validate_poset(p)
    if not ok:
        raise ValueError(f"invalid poset: {why}")
    arrows = tuple(BaseArrow(f"{a}<{b}", a, b) for a, b in p.covers())
    return BaseCategory("poset", tuple(p.elements), arrows, p, 0)


@dataclass(frozen=True)
class BaseFunctor:
    """A functor of bases sending generators to generators or identities."""

    source: BaseCategory
    target: BaseCategory
    object_map: dict  # source object -> target object
    arrow_map: dict  # source arrow name -> target arrow name, or None for identity

    def __post_init__(self):
        for a in self.source.arrows:
            img = self.arrow_map.get(a.name)
            if img is None:
                if self.object_map[a.source] != self.object_map[a.target]:
                    raise ValueError(f"arrow {a.name} collapsed between distinct objects")
            else:
                ta = self.target.arrow(img)
                if ta.source != self.object_map[a.source] or ta.target != self.object_map[a.target]:
                    raise ValueError(f"arrow {a.name} mapped incompatibly")

    def apply_morphism(self, m: BaseMorphism) -> BaseMorphism:
        gens = tuple(self.arrow_map[g] for g in m.gens if self.arrow_map.get(g) is not None)
        return BaseMorphism(self.object_map[m.source], self.object_map[m.target], gens)


def circle_cover_functor(d: int, n: int) -> BaseFunctor:
    """The degree-d covering CircleBase(d*n) -> CircleBase(n)."""
    if d < 1 or n < 1:
        raise ValueError("cover degree and point count must be positive")
    src = make_circle_base(d * n)
    tgt = make_circle_base(n)
    objs = {}
    arrs = {}
    for i in range(d * n):
        objs[f"p{i}"] = f"p{i % n}"
        objs[f"s{i}"] = f"s{i % n}"
        arrs[f"p{i}+"] = f"p{i % n}+"
        arrs[f"p{i}-"] = f"p{i % n}-"
    return BaseFunctor(src, tgt, objs, arrs)


def sub_interval_functor(base: BaseCategory, first_point: int, num_points: int) -> BaseFunctor:
    """Inclusion of a closed interval of the circle as a poset-base zigzag.

    The interval starts just before point ``first_point`` and contains
    ``num_points`` consecutive point strata; its exit category is the
    zigzag poset with points below their adjacent segments.
    """
    if base.kind != "circle":
        raise ValueError("intervals are cut out of circle bases")
    if num_points < 1 or num_points > base.n:
        raise ValueError("interval must contain between 1 and n points")
    elems: list[str] = ["t0"]
    pairs = []
    for j in range(num_points):
        elems.append(f"q{j}")
        elems.append(f"t{j + 1}")
        pairs.append((f"q{j}", f"t{j}"))
        pairs.append((f"q{j}", f"t{j + 1}"))
    zig = FinPoset.from_relation(elems, pairs)
    src = make_poset_base(zig)
    objs: dict[str, str] = {}
    arrs: dict[str, str | None] = {}
    for j in range(num_points):
        i = (first_point + j) % base.n
        objs[f"q{j}"] = f"p{i}"
        objs[f"t{j}"] = f"s{(i - 1) % base.n}"
        objs[f"t{j + 1}"] = f"s{i}"
        arrs[f"q{j}<t{j}"] = f"p{i}-"
        arrs[f"q{j}<t{j + 1}"] = f"p{i}+"
    return BaseFunctor(src, base, objs, arrs)

"""Finite posets, monotone maps, level morphisms and graded posets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class FinPoset:
    """A finite poset on opaque string identifiers.

    ``leq`` stores the full relation as a frozenset of (a, b) pairs with
    a <= b; the element tuple fixes the canonical enumeration order.
    """

    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]

    @staticmethod
    def from_relation(elements: Iterable[str], pairs: Iterable[tuple[str, str]]) -> "FinPoset":
        """Poset generated by ``pairs`` under reflexive-transitive closure."""
        elems = tuple(elements)
        rel = {(a, a) for a in elems}
        rel.update((a, b) for a, b in pairs)
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for b2, c in list(rel):
                    if b2 == b and (a, c) not in rel:
                        rel.add((a, c))
                        changed = True
        return FinPoset(elems, frozenset(rel))

    @staticmethod
    def chain(elements: Iterable[str]) -> "FinPoset":
        elems = tuple(elements)
        return FinPoset.from_relation(elems, [(elems[i], elems[i + 1]) for i in range(len(elems) - 1)])

    @staticmethod
    def antichain(elements: Iterable[str]) -> "FinPoset":
        return FinPoset.from_relation(elements, [])

    def le(self, a: str, b: str) -> bool:
        return (a, b) in self.leq

    def lt(self, a: str, b: str) -> bool:
        return a != b and (a, b) in self.leq

    def has(self, a: str) -> bool:
        return a in self.elements

    def covers(self) -> list[tuple[str, str]]:
        """Hasse edges, in element order."""
        out = []
        for a in self.elements:
            for b in self.elements:
                if self.lt(a, b) and not any(self.lt(a, c) and self.lt(c, b) for c in self.elements):
                    out.append((a, b))
        return out

    def linear_extension(self) -> tuple[str, ...]:
        """Stable topological order: minimal elements first, tie-broken by element order."""
        remaining = list(self.elements)
        out = []
        while remaining:
            for a in remaining:
                if not any(self.lt(b, a) for b in remaining):
                    out.append(a)
                    remaining.remove(a)
                    break
            else:
                raise ValueError("relation has a cycle; not a poset")
        return tuple(out)

    def height(self) -> int:
        """Length of a longest strictly increasing chain, counted in steps."""
        ext = self.linear_extension()
        depth = {a: 0 for a in ext}
        for b in ext:
            for a in ext:
                if self.lt(a, b):
                    depth[b] = max(depth[b], depth[a] + 1)
        return max(depth.values(), default=0)

    def restricted(self, subset: Iterable[str]) -> "FinPoset":
        keep = [a for a in self.elements if a in set(subset)]
        rel = frozenset((a, b) for (a, b) in self.leq if a in keep and b in keep)
        return FinPoset(tuple(keep), rel)

    def is_total(self) -> bool:
        return all(self.le(a, b) or self.le(b, a) for a in self.elements for b in self.elements)


@dataclass(frozen=True)
class MonotoneMap:
    source: FinPoset
    target: FinPoset
    assignment: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))

    def __call__(self, a: str) -> str:
        return self.assignment[a]

    @staticmethod
    def identity(p: FinPoset) -> "MonotoneMap":
        return MonotoneMap(p, p, {a: a for a in p.elements})

    def compose_after(self, first: "MonotoneMap") -> "MonotoneMap":
        """self o first."""
        return MonotoneMap(first.source, self.target, {a: self(first(a)) for a in first.source.elements})

    def is_valid(self) -> bool:
        if set(self.assignment) != set(self.source.elements):
            return False
        if any(v not in self.target.elements for v in self.assignment.values()):
            return False
        return all(
            self.target.le(self(a), self(b))
            for a in self.source.elements
            for b in self.source.elements
            if self.source.le(a, b)
        )

    def is_surjective(self) -> bool:
        return set(self.assignment.values()) == set(self.target.elements)

    def is_bijective(self) -> bool:
        return self.is_surjective() and len(set(self.assignment.values())) == len(self.source.elements)

    def is_poset_isomorphism(self) -> bool:
        if not self.is_bijective():
            return False
        inv = {v: k for k, v in self.assignment.items()}
        return all(self.source.le(inv[a], inv[b]) for (a, b) in self.target.leq)

    def inverse(self) -> "MonotoneMap":
        if not self.is_poset_isomorphism():
            raise ValueError("not an isomorphism")
        return MonotoneMap(self.target, self.source, {v: k for k, v in self.assignment.items()})


def validate_poset(p: FinPoset) -> tuple[bool, str]:
    """Check the order axioms; report the first violation and a witness."""
    elems = set(p.elements)
    if len(elems) != len(p.elements):
        return False, "duplicate element identifiers"
    for a, b in p.leq:
        if a not in elems or b not in elems:
            return False, f"relation mentions unknown element in ({a}, {b})"
    for a in p.elements:
        if (a, a) not in p.leq:
            return False, f"reflexivity fails at {a}"
    for a, b in p.leq:
        if a != b and (b, a) in p.leq:
            return False, f"antisymmetry fails at ({a}, {b})"
    for a, b in p.leq:
        for b2, c in p.leq:
            if b2 == b and (a, c) not in p.leq:
                return False, f"transitivity fails at ({a}, {b}, {c})"
    return True, "ok"


def down_set(p: FinPoset, a: str, strict: bool = False) -> set[str]:
    """{b : b <= a} (b < a when strict)."""
    if not p.has(a):
        raise KeyError(f"unknown element {a!r}")
    return {b for b in p.elements if (p.lt(b, a) if strict else p.le(b, a))}


def up_set(p: FinPoset, a: str, strict: bool = False) -> set[str]:
    if not p.has(a):
        raise KeyError(f"unknown element {a!r}")
    return {b for b in p.elements if (p.lt(a, b) if strict else p.le(a, b))}


def is_level_morphism(f: MonotoneMap) -> bool:
    """Surjective, and f(a) < f(b) forces a < b."""
    if not f.is_valid() or not f.is_surjective():
        return False
    return all(
        f.source.lt(a, b)
        for a in f.source.elements
        for b in f.source.elements
        if f.target.lt(f(a), f(b))
    )


def graded_poset(f: MonotoneMap) -> FinPoset:
    """Same elements as f.source; a <= a' iff f(a) = f(a') and a <= a'."""
    if not f.is_valid():
        raise ValueError("invalid monotone map")
    src = f.source
    rel = frozenset((a, b) for (a, b) in src.leq if f(a) == f(b))
    return FinPoset(src.elements, rel)


def underlying_set(p: FinPoset) -> FinPoset:
    """Same elements, trivial order."""
    return FinPoset(p.elements, frozenset((a, a) for a in p.elements))

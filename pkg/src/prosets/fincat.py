"""Finite categories, finite posets, and a concrete base category of finite sets.

Shapes are explicit: categories carry full composition tables and posets carry
their order relation, so every law (associativity, functoriality, universal
properties) is checkable by exhaustive scan.  The base category has objects
``0..n-1``, maps given by image tables, limits computed as sets of compatible
tuples in a canonical order, and an (injective, surjective) functorial
factorization built from the graph of a map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import (
    InternalInvariantError,
    NotInvertible,
    PreconditionViolated,
    ShapeNotStronglyLoopless,
)

# ---------------------------------------------------------------------------
# validation reports


@dataclass(frozen=True)
class Violation:
    kind: str
    details: tuple

    def __str__(self) -> str:
        return f"{self.kind}: {self.details}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, *details: Any) -> None:
        self.violations.append(Violation(kind, tuple(details)))

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]


# ---------------------------------------------------------------------------
# finite categories


@dataclass(frozen=True)
class Morphism:
    id: str
    dom: str
    cod: str


@dataclass(frozen=True, eq=True)
class FiniteCategory:
    """A finite category given by an explicit composition table.

    ``compose`` maps a composable pair ``(g, f)`` with ``cod(f) == dom(g)``
    to the id of ``g after f``.
    """

    objects: tuple[str, ...]
    morphisms: tuple[Morphism, ...]
    identities: Mapping[str, str]
    compose: Mapping[tuple[str, str], str]

    def morphism(self, mid: str) -> Morphism:
        for m in self.morphisms:
            if m.id == mid:
                return m
        raise KeyError(mid)

    def has_morphism(self, mid: str) -> bool:
        return any(m.id == mid for m in self.morphisms)

    def hom(self, a: str, b: str) -> list[Morphism]:
        return [m for m in self.morphisms if m.dom == a and m.cod == b]

    def identity(self, obj: str) -> str:
        return self.identities[obj]

    def is_identity(self, mid: str) -> bool:
        return mid in set(self.identities.values())

    def compose_ids(self, g: str, f: str) -> str:
        """Return ``g after f``, reading identities off directly."""
        mf, mg = self.morphism(f), self.morphism(g)
        if mf.cod != mg.dom:
            raise PreconditionViolated(f"morphisms not composable: {g} after {f}")
        if self.is_identity(f):
            return g
        if self.is_identity(g):
            return f
        return self.compose[(g, f)]


def make_category(
    objects: Sequence[str],
    arrows: Sequence[tuple[str, str, str]] = (),
    compose: Mapping[tuple[str, str], str] | None = None,
) -> FiniteCategory:
    """Build a category from non-identity arrows; identity laws are filled in."""
    objs = tuple(objects)
    morphisms = [Morphism(f"id_{o}", o, o) for o in objs]
    identities = {o: f"id_{o}" for o in objs}
    for mid, dom, cod in arrows:
        morphisms.append(Morphism(mid, dom, cod))
    table: dict[tuple[str, str], str] = {}
    by_id = {m.id: m for m in morphisms}
    for g, f_ in itertools.product(list(by_id), repeat=2):
        mf, mg = by_id[f_], by_id[g]
        if mf.cod != mg.dom:
            continue
        if f_ == identities[mf.dom]:
            table[(g, f_)] = g
        elif g == identities[mg.cod]:
            table[(g, f_)] = f_
        elif compose and (g, f_) in compose:
            table[(g, f_)] = compose[(g, f_)]
    if compose:
        for pair, res in compose.items():
            table[pair] = res
    return FiniteCategory(objs, tuple(morphisms), identities, table)


def check_category(c: FiniteCategory) -> ValidationReport:
    """Exhaustively check identity assignment, closure, and associativity."""
    report = ValidationReport()
    if len(set(c.objects)) != len(c.objects):
        report.add("object-duplicate", c.objects)
    ids = [m.id for m in c.morphisms]
    if len(set(ids)) != len(ids):
        report.add("morphism-duplicate", tuple(ids))
    by_id = {m.id: m for m in c.morphisms}
    for m in c.morphisms:
        if m.dom not in c.objects or m.cod not in c.objects:
            report.add("bad-endpoints", m.id, m.dom, m.cod)
    for o in c.objects:
        mid = c.identities.get(o)
        if mid is None or mid not in by_id:
            report.add("identity-missing", o)
        else:
            m = by_id[mid]
            if m.dom != o or m.cod != o:
                report.add("identity-invalid", o, mid)
    if not report.ok:
        return report
    # composition table: defined exactly on composable pairs, closed, lawful
    for g, f in itertools.product(ids, repeat=2):
        composable = by_id[f].cod == by_id[g].dom
        entry = c.compose.get((g, f))
        if composable and entry is None:
            report.add("compose-missing", g, f)
        elif not composable and entry is not None:
            report.add("compose-extraneous", g, f)
        elif entry is not None:
            if entry not in by_id:
                report.add("closure", g, f, entry)
            else:
                gf = by_id[entry]
                if gf.dom != by_id[f].dom or gf.cod != by_id[g].cod:
                    report.add("closure", g, f, entry)
    if not report.ok:
        return report
    for f in ids:
        m = by_id[f]
        if c.compose[(f, c.identities[m.dom])] != f:
            report.add("identity-law", f, "right")
        if c.compose[(c.identities[m.cod], f)] != f:
            report.add("identity-law", f, "left")
    for h, g, f in itertools.product(ids, repeat=3):
        if by_id[f].cod != by_id[g].dom or by_id[g].cod != by_id[h].dom:
            continue
        left = c.compose[(h, c.compose[(g, f)])]
        right = c.compose[(c.compose[(h, g)], f)]
        if left != right:
            report.add("associativity", h, g, f)
    return report


@dataclass(frozen=True)
class DirectednessVerdict:
    """Per-axiom result: nonempty, pairwise bounded, parallel pairs equalized."""

    nonempty: bool
    pairs_bounded: bool
    parallel_equalized: bool
    pair_witness: tuple[str, str] | None = None
    parallel_witness: tuple[str, str] | None = None

    @property
    def all_ok(self) -> bool:
        return self.nonempty and self.pairs_bounded and self.parallel_equalized


def is_directed(c: "FiniteCategory | FinitePoset") -> DirectednessVerdict:
    """Decide the three directedness axioms by exhaustive scan.

    For a poset the parallel-pair axiom is vacuous and pairwise bounds are
    the finite-section criterion, so only upper bounds are searched.
    """
    if isinstance(c, FinitePoset):
        nonempty = bool(c.elements)
        pair_witness = None
        for s, t in itertools.combinations_with_replacement(c.elements, 2):
            if not any(c.le(s, u) and c.le(t, u) for u in c.elements):
                pair_witness = (s, t)
                break
        return DirectednessVerdict(nonempty, pair_witness is None, True, pair_witness)

    nonempty = bool(c.objects)
    pair_witness = None
    for s, t in itertools.combinations_with_replacement(c.objects, 2):
        if not any(c.hom(u, s) and c.hom(u, t) for u in c.objects):
            pair_witness = (s, t)
            break
    parallel_witness = None
    for f, g in itertools.combinations(c.morphisms, 2):
        if f.dom != g.dom or f.cod != g.cod:
            continue
        equalized = False
        for h in c.morphisms:
            if h.cod != f.dom:
                continue
            if c.compose_ids(f.id, h.id) == c.compose_ids(g.id, h.id):
                equalized = True
                break
        if not equalized:
            parallel_witness = (f.id, g.id)
            break
    return DirectednessVerdict(
        nonempty, pair_witness is None, parallel_witness is None,
        pair_witness, parallel_witness,
    )


# ---------------------------------------------------------------------------
# finite posets


@dataclass(frozen=True, eq=True)
class FinitePoset:
    """A finite poset; ``leq`` holds all pairs (a, b) with a <= b, reflexive ones included."""

    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]

    @staticmethod
    def from_relation(elements: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "FinitePoset":
        """Close the given strict or mixed pairs reflexively and transitively."""
        els = tuple(elements)
        succ: dict[str, set[str]] = {a: {a} for a in els}
        for a, b in pairs:
            succ[a].add(b)
        for k in els:
            for a in els:
                if k in succ[a]:
                    succ[a] |= succ[k]
        return FinitePoset(els, frozenset((a, b) for a in els for b in succ[a]))

    def le(self, a: str, b: str) -> bool:
        return (a, b) in self.leq

    def lt(self, a: str, b: str) -> bool:
        return a != b and (a, b) in self.leq

    def strict_down(self, x: str) -> frozenset[str]:
        return frozenset(a for a in self.elements if self.lt(a, x))

    def strict_up(self, x: str) -> frozenset[str]:
        return frozenset(a for a in self.elements if self.lt(x, a))

    def maximal_elements(self) -> tuple[str, ...]:
        return tuple(x for x in self.elements if not self.strict_up(x))

    def upper_bounds(self, subset: Iterable[str]) -> tuple[str, ...]:
        keys = list(subset)
        return tuple(u for u in self.elements if all(self.le(a, u) for a in keys))

    def covers(self) -> tuple[tuple[str, str], ...]:
        """Covering pairs (upper, lower): u > v with nothing strictly between."""
        out = []
        for u in self.elements:
            for v in self.elements:
                if not self.lt(v, u):
                    continue
                if any(self.lt(v, w) and self.lt(w, u) for w in self.elements):
                    continue
                out.append((u, v))
        return tuple(out)

    def degrees(self) -> dict[str, int]:
        """Longest-strict-chain-ending-here degree for every element."""
        memo: dict[str, int] = {}

        def deg(x: str) -> int:
            if x not in memo:
                below = self.strict_down(x)
                memo[x] = 0 if not below else 1 + max(deg(a) for a in below)
            return memo[x]

        for x in self.elements:
            deg(x)
        return memo

    def restrict(self, keys: Iterable[str]) -> "FinitePoset":
        kept = tuple(e for e in self.elements if e in set(keys))
        return FinitePoset(kept, frozenset((a, b) for a, b in self.leq if a in kept and b in kept))


def check_poset(p: FinitePoset) -> ValidationReport:
    report = ValidationReport()
    els = set(p.elements)
    if len(els) != len(p.elements):
        report.add("element-duplicate", p.elements)
    for a, b in p.leq:
        if a not in els or b not in els:
            report.add("bad-pair", a, b)
    for a in p.elements:
        if (a, a) not in p.leq:
            report.add("not-reflexive", a)
    for a, b in p.leq:
        if a != b and (b, a) in p.leq:
            report.add("not-antisymmetric", a, b)
        for c in p.elements:
            if (b, c) in p.leq and (a, c) not in p.leq:
                report.add("not-transitive", a, b, c)
    return report


def poset_sections(p: FinitePoset, max_degree: int | None = None) -> list[frozenset[str]]:
    """All downward-closed subsets drawn from elements of degree <= max_degree.

    Canonical order: by size, then by the sorted tuple of member names.
    """
    degs = p.degrees()
    pool = [e for e in p.elements if max_degree is None or degs[e] <= max_degree]
    out: list[frozenset[str]] = []
    for r in range(len(pool) + 1):
        for combo in itertools.combinations(pool, r):
            s = set(combo)
            if all(p.strict_down(x) <= s for x in combo):
                out.append(frozenset(s))
    return sorted(out, key=lambda s: (len(s), tuple(sorted(s))))


def poset_as_category(p: FinitePoset) -> FiniteCategory:
    """View a poset as a category with one morphism u -> v whenever u >= v."""
    arrows = [(f"{u}>{v}", u, v) for u in p.elements for v in p.elements if p.lt(v, u)]
    compose = {}
    for u in p.elements:
        for v in p.elements:
            for w in p.elements:
                if p.lt(v, u) and p.lt(w, v):
                    compose[(f"{v}>{w}", f"{u}>{v}")] = f"{u}>{w}"
    return make_category(p.elements, arrows, compose)


def cone_extend(x: "FinitePoset | FiniteCategory", apex: str = "inf"):
    """Adjoin a fresh initial element/object mapping into everything."""
    if isinstance(x, FinitePoset):
        name = apex
        while name in x.elements:
            name += "_"
        rel = set(x.leq) | {(name, e) for e in x.elements} | {(name, name)}
        return FinitePoset((name,) + x.elements, frozenset(rel))
    name = apex
    while name in x.objects:
        name += "_"
    arrows = [(m.id, m.dom, m.cod) for m in x.morphisms if not x.is_identity(m.id)]
    arrows += [(f"{name}>{o}", name, o) for o in x.objects]
    compose = {pair: res for pair, res in x.compose.items()
               if not x.is_identity(pair[0]) and not x.is_identity(pair[1])}
    for m in x.morphisms:
        if not x.is_identity(m.id):
            compose[(m.id, f"{name}>{m.dom}")] = f"{name}>{m.cod}"
    return make_category((name,) + x.objects, arrows, compose)


# ---------------------------------------------------------------------------
# functors, over-categories, cofinality


@dataclass(frozen=True)
class Functor:
    source: FiniteCategory
    target: FiniteCategory
    on_objects: Mapping[str, str]
    on_morphisms: Mapping[str, str]

    def obj(self, o: str) -> str:
        return self.on_objects[o]

    def mor(self, mid: str) -> str:
        return self.on_morphisms[mid]


def check_functor(p: Functor) -> ValidationReport:
    report = ValidationReport()
    for o in p.source.objects:
        if p.on_objects.get(o) not in p.target.objects:
            report.add("object-image", o)
    for m in p.source.morphisms:
        img = p.on_morphisms.get(m.id)
        if img is None or not p.target.has_morphism(img):
            report.add("morphism-image", m.id)
            continue
        mi = p.target.morphism(img)
        if mi.dom != p.on_objects.get(m.dom) or mi.cod != p.on_objects.get(m.cod):
            report.add("morphism-endpoints", m.id)
    if not report.ok:
        return report
    for o in p.source.objects:
        if p.mor(p.source.identity(o)) != p.target.identity(p.obj(o)):
            report.add("identity-preservation", o)
    for (g, f), gf in p.source.compose.items():
        if p.target.compose_ids(p.mor(g), p.mor(f)) != p.mor(gf):
            report.add("composition-preservation", g, f)
    return report


def over_category(p: Functor, i: str) -> FiniteCategory:
    """The category of pairs (j, f: p(j) -> i) under morphisms of j."""
    objs = []
    data = {}
    for j in p.source.objects:
        for m in p.target.hom(p.obj(j), i):
            name = f"{j}|{m.id}"
            objs.append(name)
            data[name] = (j, m.id)
    arrows = []
    for a in objs:
        j, m = data[a]
        for b in objs:
            j2, m2 = data[b]
            for g in p.source.hom(j, j2):
                if p.source.is_identity(g.id) and a == b:
                    continue
                if p.target.compose_ids(m2, p.mor(g.id)) == m:
                    arrows.append((f"{g.id}:{a}=>{b}", a, b))
    compose = {}

    def find(g_src: str, a: str, b: str) -> str:
        if a == b and p.source.is_identity(g_src):
            return f"id_{a}"
        return f"{g_src}:{a}=>{b}"

    for mid, a, b in arrows:
        g_src = mid.split(":", 1)[0]
        for mid2, b2, c in arrows:
            if b2 != b:
                continue
            g2_src = mid2.split(":", 1)[0]
            comp = p.source.compose_ids(g2_src, g_src)
            compose[(mid2, mid)] = find(comp, a, c)
    return make_category(objs, arrows, compose)


def connected_components(c: FiniteCategory) -> list[frozenset[str]]:
    parent = {o: o for o in c.objects}

    def root(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in c.morphisms:
        parent[root(m.dom)] = root(m.cod)
    groups: dict[str, set[str]] = {}
    for o in c.objects:
        groups.setdefault(root(o), set()).add(o)
    return [frozenset(g) for g in groups.values()]


def cofinality_report(p: Functor) -> dict[str, tuple[bool, bool]]:
    """Per target object: (over-category nonempty, over-category connected)."""
    out = {}
    for i in p.target.objects:
        oc = over_category(p, i)
        nonempty = bool(oc.objects)
        connected = len(connected_components(oc)) == 1 if nonempty else False
        out[i] = (nonempty, connected)
    return out


def is_cofinal(p: Functor) -> bool:
    return all(ne and conn for ne, conn in cofinality_report(p).values())


def strongly_loopless_order(d: FiniteCategory) -> tuple[str, ...]:
    """Order objects so hom(d_i, d_j) is empty for i < j.

    Raises ShapeNotStronglyLoopless on endomorphisms beyond identities or on
    isomorphisms between distinct objects.
    """
    for o in d.objects:
        if any(m for m in d.hom(o, o) if not d.is_identity(m.id)):
            raise ShapeNotStronglyLoopless(f"non-identity endomorphism at {o}")
    for a, b in itertools.combinations(d.objects, 2):
        if d.hom(a, b) and d.hom(b, a):
            raise ShapeNotStronglyLoopless(f"morphisms both ways between {a} and {b}")
    remaining = list(d.objects)
    order: list[str] = []
    while remaining:
        # a sink has no non-identity morphism out of it within the remainder
        sinks = [o for o in remaining
                 if not any(m for m in d.morphisms
                            if m.dom == o and m.cod != o and m.cod in remaining)]
        if not sinks:
            raise ShapeNotStronglyLoopless("morphism digraph has a cycle")
        pick = sorted(sinks)[0]
        order.append(pick)
        remaining.remove(pick)
    return tuple(order)


# ---------------------------------------------------------------------------
# the base category: finite sets and maps


@dataclass(frozen=True, eq=True)
class FinSetMap:
    """A map between the finite sets 0..dom-1 and 0..cod-1, given by images."""

    dom: int
    cod: int
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.dom:
            raise PreconditionViolated(f"image table has {len(self.images)} entries for dom {self.dom}")
        if any(not (0 <= v < self.cod) for v in self.images):
            raise PreconditionViolated(f"image out of range for cod {self.cod}: {self.images}")

    def __call__(self, x: int) -> int:
        return self.images[x]

    @staticmethod
    def identity(n: int) -> "FinSetMap":
        return FinSetMap(n, n, tuple(range(n)))

    @staticmethod
    def constant(dom: int, cod: int, value: int) -> "FinSetMap":
        return FinSetMap(dom, cod, tuple(value for _ in range(dom)))

    def after(self, other: "FinSetMap") -> "FinSetMap":
        """self after other (apply ``other`` first)."""
        if other.cod != self.dom:
            raise PreconditionViolated(f"not composable: {self.dom}<-?-{other.cod}")
        return FinSetMap(other.dom, self.cod, tuple(self.images[v] for v in other.images))

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.dom

    def is_surjective(self) -> bool:
        return set(self.images) == set(range(self.cod))

    def is_bijective(self) -> bool:
        return self.dom == self.cod and self.is_injective()

    def inverse(self) -> "FinSetMap":
        if not self.is_bijective():
            raise NotInvertible(f"{self} is not a bijection")
        inv = [0] * self.cod
        for x, v in enumerate(self.images):
            inv[v] = x
        return FinSetMap(self.cod, self.dom, tuple(inv))


# ---------------------------------------------------------------------------
# diagrams of finite sets and their limits


@dataclass
class Diagram:
    """A functor into finite sets from a finite category or a finite poset.

    For a category shape, ``arrows`` is keyed by morphism id (identities may
    be omitted).  For a poset shape, arrows go downward: ``arrows[(u, v)]``
    with v < u is the transition ``value(u) -> value(v)``, and every strict
    pair must be present.
    """

    shape: FiniteCategory | FinitePoset
    values: dict[str, int]
    arrows: dict

    def value(self, o: str) -> int:
        return self.values[o]

    def arrow(self, key) -> FinSetMap:
        if isinstance(self.shape, FinitePoset):
            u, v = key
            if u == v:
                return FinSetMap.identity(self.values[u])
            return self.arrows[(u, v)]
        if self.shape.is_identity(key):
            return FinSetMap.identity(self.values[self.shape.morphism(key).dom])
        return self.arrows[key]


def check_diagram(d: Diagram) -> ValidationReport:
    report = ValidationReport()
    if isinstance(d.shape, FinitePoset):
        for e in d.shape.elements:
            if e not in d.values:
                report.add("value-missing", e)
        for u in d.shape.elements:
            for v in d.shape.elements:
                if d.shape.lt(v, u) and (u, v) not in d.arrows:
                    report.add("arrow-missing", u, v)
        if not report.ok:
            return report
        for (u, v), m in d.arrows.items():
            if not (d.shape.lt(v, u)):
                report.add("arrow-extraneous", u, v)
            elif m.dom != d.values[u] or m.cod != d.values[v]:
                report.add("arrow-endpoints", u, v)
        for u in d.shape.elements:
            for v in d.shape.elements:
                for w in d.shape.elements:
                    if d.shape.lt(v, u) and d.shape.lt(w, v):
                        if d.arrow((v, w)).after(d.arrow((u, v))) != d.arrow((u, w)):
                            report.add("not-functorial", u, v, w)
        return report
    for o in d.shape.objects:
        if o not in d.values:
            report.add("value-missing", o)
    for m in d.shape.morphisms:
        if d.shape.is_identity(m.id):
            if m.id in d.arrows and d.arrows[m.id] != FinSetMap.identity(d.values.get(m.dom, 0)):
                report.add("identity-arrow", m.id)
            continue
        if m.id not in d.arrows:
            report.add("arrow-missing", m.id)
    if not report.ok:
        return report
    for m in d.shape.morphisms:
        a = d.arrow(m.id)
        if a.dom != d.values[m.dom] or a.cod != d.values[m.cod]:
            report.add("arrow-endpoints", m.id)
    if not report.ok:
        return report
    for (g, f), gf in d.shape.compose.items():
        if d.arrow(g).after(d.arrow(f)) != d.arrow(gf):
            report.add("not-functorial", g, f)
    return report


@dataclass
class LimitResult:
    """The limit as the set of compatible tuples, canonically enumerated."""

    objects: tuple[str, ...]
    size: int
    tuples: tuple[tuple[int, ...], ...]
    projections: dict[str, FinSetMap]
    index: dict[tuple[int, ...], int]

    def mediate(self, apex: int, legs: Mapping[str, FinSetMap]) -> FinSetMap:
        """The unique map from a cone's apex into the limit."""
        images = []
        for x in range(apex):
            t = tuple(legs[o](x) for o in self.objects)
            if t not in self.index:
                raise PreconditionViolated(f"legs do not form a cone at apex element {x}")
            images.append(self.index[t])
        return FinSetMap(apex, self.size, tuple(images))


def _limit_poset(d: Diagram) -> LimitResult:
    shape: FinitePoset = d.shape
    objs = shape.elements
    pos = {o: k for k, o in enumerate(objs)}
    maxima = shape.maximal_elements()
    tuples = []
    for combo in itertools.product(*[range(d.values[m]) for m in maxima]):
        assign: dict[str, int] = {}
        ok = True
        for m, x in zip(maxima, combo):
            for v in objs:
                if not shape.le(v, m):
                    continue
                val = x if v == m else d.arrow((m, v))(x)
                if assign.setdefault(v, val) != val:
                    ok = False
                    break
            if not ok:
                break
        if not ok or len(assign) != len(objs):
            continue
        # non-maximal transitions must agree too; guards non-functorial input
        for u in objs:
            for v in objs:
                if shape.lt(v, u) and d.arrow((u, v))(assign[u]) != assign[v]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            tuples.append(tuple(assign[o] for o in objs))
    tuples.sort()
    index = {t: k for k, t in enumerate(tuples)}
    projections = {
        o: FinSetMap(len(tuples), d.values[o], tuple(t[pos[o]] for t in tuples))
        for o in objs
    }
    return LimitResult(objs, len(tuples), tuple(tuples), projections, index)


def _limit_category(d: Diagram) -> LimitResult:
    shape: FiniteCategory = d.shape
    objs = shape.objects
    pos = {o: k for k, o in enumerate(objs)}
    tuples = []
    for combo in itertools.product(*[range(d.values[o]) for o in objs]):
        if all(d.arrow(m.id)(combo[pos[m.dom]]) == combo[pos[m.cod]] for m in shape.morphisms):
            tuples.append(combo)
    tuples.sort()
    index = {t: k for k, t in enumerate(tuples)}
    projections = {
        o: FinSetMap(len(tuples), d.values[o], tuple(t[pos[o]] for t in tuples))
        for o in objs
    }
    return LimitResult(objs, len(tuples), tuple(tuples), projections, index)


def finset_limit(d: Diagram) -> LimitResult:
    """Compute the limit of a finite-set diagram as compatible tuples.

    Tuples are indexed by the shape's object order and enumerated in
    lexicographic order, so the result is canonical.
    """
    if isinstance(d.shape, FinitePoset):
        return _limit_poset(d)
    return _limit_category(d)


def check_universal_property(d: Diagram, lim: LimitResult, apex: int,
                             legs: Mapping[str, FinSetMap]) -> bool:
    """The mediating map is the unique map commuting with all projections."""
    med = lim.mediate(apex, legs)
    for o in lim.objects:
        if lim.projections[o].after(med) != legs[o]:
            return False
    for other in itertools.product(range(lim.size), repeat=apex):
        cand = FinSetMap(apex, lim.size, other)
        if cand == med:
            continue
        if all(lim.projections[o].after(cand) == legs[o] for o in lim.objects):
            return False
    return True


# ---------------------------------------------------------------------------
# the functorial (injective, surjective) factorization


@dataclass(frozen=True)
class FactorizationTriple:
    source: FinSetMap
    q: FinSetMap
    mid: int
    p: FinSetMap

    def __post_init__(self):
        if self.p.after(self.q) != self.source:
            raise InternalInvariantError("factorization does not compose to the source map")


@dataclass(frozen=True)
class Square:
    """A commuting square from f to t: t . left = right . f."""

    f: FinSetMap
    t: FinSetMap
    left: FinSetMap
    right: FinSetMap

    def __post_init__(self):
        if self.t.after(self.left) != self.right.after(self.f):
            raise PreconditionViolated("square does not commute")


@dataclass(frozen=True)
class FunctorialFactorization:
    """A factorization f = p . q plus an action on commuting squares.

    ``on_square`` sends a square (left, right): f -> t to the induced map
    between the middle objects, functorially.
    """

    name: str
    factor: Callable[[FinSetMap], FactorizationTriple]
    on_square: Callable[[Square], FinSetMap]


def graph_factorization(f: FinSetMap) -> FactorizationTriple:
    """Factor through dom + cod: the injection onto the graph, then project."""
    mid = f.dom + f.cod
    q = FinSetMap(f.dom, mid, tuple(range(f.dom)))
    p = FinSetMap(mid, f.cod, f.images + tuple(range(f.cod)))
    return FactorizationTriple(f, q, mid, p)


def _graph_on_square(sq: Square) -> FinSetMap:
    # middle objects are dom + cod blocks; map each block by the matching leg
    images = tuple(sq.left.images) + tuple(sq.t.dom + v for v in sq.right.images)
    return FinSetMap(sq.f.dom + sq.f.cod, sq.t.dom + sq.t.cod, images)


GRAPH = FunctorialFactorization("graph", graph_factorization, _graph_on_square)


# ---------------------------------------------------------------------------
# the lift solver for (injective, surjective) squares


def finset_lift(left: FinSetMap, right: FinSetMap, top: FinSetMap,
                bottom: FinSetMap) -> FinSetMap:
    """Solve a lifting square with injective left leg and surjective right leg.

    The lift is deterministic: forced on the image of the left leg, and the
    least-index preimage under the right leg elsewhere.
    """
    if not left.is_injective():
        raise PreconditionViolated("left leg is not injective")
    if not right.is_surjective():
        raise PreconditionViolated("right leg is not surjective")
    if top.dom != left.dom or bottom.dom != left.cod:
        raise PreconditionViolated("square endpoints do not line up")
    if right.after(top) != bottom.after(left):
        raise PreconditionViolated("square does not commute")
    forced = {left(a): top(a) for a in range(left.dom)}
    least_preimage: dict[int, int] = {}
    for x in range(right.dom):
        least_preimage.setdefault(right(x), x)
    images = tuple(
        forced[b] if b in forced else least_preimage[bottom(b)]
        for b in range(left.cod)
    )
    h = FinSetMap(left.cod, right.dom, images)
    if h.after(left) != top or right.after(h) != bottom:
        raise InternalInvariantError("constructed lift fails its triangles")
    return h

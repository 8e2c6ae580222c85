"""Finite additive categories: hom groups, bilinear composition tables,
functors, natural isomorphisms, isomorphism groupoids and the wreath-style
construction gluing a group-valued functor onto a groupoid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .abgrp import (
    FinAbGroup,
    GroupElement,
    GroupHom,
    IntMatrix,
    solve_hom_system,
)
from .errors import Budget, DimensionMismatch, Unsupported
from .report import CheckReport


@dataclass(frozen=True, eq=False)
class Morphism:
    cat: "AbCat"
    source: object
    target: object
    coords: tuple

    def group(self) -> FinAbGroup:
        return self.cat.homs[(self.source, self.target)]

    def element(self) -> GroupElement:
        return self.group().element(self.coords)

    def is_zero(self) -> bool:
        return self.group().contains_zero(self.coords)

    def __add__(self, other: "Morphism") -> "Morphism":
        self._parallel(other)
        return Morphism(self.cat, self.source, self.target, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Morphism") -> "Morphism":
        self._parallel(other)
        return Morphism(self.cat, self.source, self.target, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Morphism":
        return Morphism(self.cat, self.source, self.target, tuple(-a for a in self.coords))

    def _parallel(self, other: "Morphism") -> None:
        if (self.source, self.target) != (other.source, other.target):
            raise DimensionMismatch("morphisms are not parallel")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            return False
        return self.group().contains_zero(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __hash__(self):
        return hash((self.source, self.target, self.group().reduce(self.coords)))

    def __repr__(self):
        return f"Morphism({self.source}->{self.target}, {self.group().reduce(self.coords)})"


@dataclass(eq=False)
class AbCat:
    """Category enriched in abelian groups with finitely many objects.

    Composition is stored per object triple as a bilinear table on hom-group
    generators: column index i * gens(a,b) + j holds the coordinates of
    e_i . e_j where e_i generates hom(b,c) and e_j generates hom(a,b).
    """

    objects: tuple
    zero: object
    homs: dict
    compose_tables: dict
    identities: dict
    _sparse: dict = field(default_factory=dict, repr=False)

    # -- construction helpers ------------------------------------------------

    def morphism(self, source, target, coords: Sequence[int]) -> Morphism:
        group = self.homs[(source, target)]
        if len(coords) != group.generators:
            raise DimensionMismatch(
                f"hom({source},{target}) has {group.generators} generators, got {len(coords)}"
            )
        return Morphism(self, source, target, group.reduce(coords))

    def identity(self, obj) -> Morphism:
        return Morphism(self, obj, obj, self.identities[obj])

    def zero_morphism(self, source, target) -> Morphism:
        g = self.homs[(source, target)]
        return Morphism(self, source, target, (0,) * g.generators)

    # -- composition -----------------------------------------------------------

    def _sparse_table(self, key) -> list:
        tab = self._sparse.get(key)
        if tab is None:
            m = self.compose_tables[key]
            tab = []
            for j in range(m.cols):
                col = []
                for i in range(m.rows):
                    e = m.entries[i][j]
                    if e:
                        col.append((i, e))
                tab.append(tuple(col))
            self._sparse[key] = tab
        return tab

    def compose(self, f: Morphism, g: Morphism) -> Morphism:
        """f . g for g: a -> b and f: b -> c."""
        if g.target != f.source:
            raise DimensionMismatch(f"cannot compose {f.source}->{f.target} after {g.source}->{g.target}")
        key = (g.source, g.target, f.target)
        table = self._sparse_table(key)
        target_group = self.homs[(g.source, f.target)]
        out = [0] * target_group.generators
        g2 = len(g.coords)
        for i, fi in enumerate(f.coords):
            if fi:
                base = i * g2
                for j, gj in enumerate(g.coords):
                    if gj:
                        c = fi * gj
                        for row, w in table[base + j]:
                            out[row] += c * w
        return Morphism(self, g.source, f.target, target_group.reduce(out))

    def hom_elements(self, source, target, budget: Budget | None = None) -> list:
        g = self.homs[(source, target)]
        els = g.elements()
        if budget is not None:
            budget.spend(len(els))
        return [Morphism(self, source, target, e) for e in els]

    # -- derived homs ------------------------------------------------------------

    def left_compose_hom(self, f: Morphism, d) -> GroupHom:
        """hom(d, src f) -> hom(d, tgt f) given by g -> f . g."""
        src = self.homs[(d, f.source)]
        tgt = self.homs[(d, f.target)]
        cols = []
        for j in range(src.generators):
            gen = Morphism(self, d, f.source, tuple(int(t == j) for t in range(src.generators)))
            cols.append(self.compose(f, gen).coords)
        return GroupHom(src, tgt, IntMatrix.from_columns(cols, rows=tgt.generators))

    def right_compose_hom(self, f: Morphism, d) -> GroupHom:
        """hom(tgt f, d) -> hom(src f, d) given by g -> g . f."""
        src = self.homs[(f.target, d)]
        tgt = self.homs[(f.source, d)]
        cols = []
        for j in range(src.generators):
            gen = Morphism(self, f.target, d, tuple(int(t == j) for t in range(src.generators)))
            cols.append(self.compose(gen, f).coords)
        return GroupHom(src, tgt, IntMatrix.from_columns(cols, rows=tgt.generators))

    def inverse(self, f: Morphism) -> Morphism | None:
        """Two-sided inverse of f, found by solving f.g = id and g.f = id."""
        src, tgt = f.source, f.target
        g_group = self.homs[(tgt, src)]
        left = self.left_compose_hom(f, tgt)  # g -> f . g : hom(tgt, src) -> hom(tgt, tgt)
        right = self.right_compose_hom(f, src)  # g -> g . f : hom(tgt, src) -> hom(src, src)
        sol = solve_hom_system(
            [left, right],
            [self.identity(tgt).element(), self.identity(src).element()],
        )
        if sol is None:
            return None
        return Morphism(self, tgt, src, g_group.reduce(sol.coords))

    # -- opposite category --------------------------------------------------------

    def op(self) -> "AbCat":
        homs = {(a, b): self.homs[(b, a)] for (a, b) in self.homs}
        tables = {}
        for (a, b, c), m in self.compose_tables.items():
            # table for op triple (c, b, a): pairs (i in hom_op(b,a)=hom(a,b), j in hom_op(c,b)=hom(b,c))
            g_ab = self.homs[(a, b)].generators
            g_bc = self.homs[(b, c)].generators
            cols = []
            for i in range(g_ab):
                for j in range(g_bc):
                    cols.append(m.column_at(j * g_ab + i))
            tables[(c, b, a)] = IntMatrix.from_columns(cols, rows=self.homs[(a, c)].generators)
        return AbCat(self.objects, self.zero, homs, tables, dict(self.identities))


# ---------------------------------------------------------------------------
# axioms


def check_category_axioms(cat: AbCat, budget: Budget | None = None) -> CheckReport:
    """Associativity and unit laws on generators; bilinearity well-definedness;
    triviality of homs through the zero object."""
    budget = budget or Budget()
    rep = CheckReport("category axioms")
    objs = cat.objects
    for a in objs:
        g = cat.homs[(a, cat.zero)]
        if not g.is_trivial():
            rep.fail("hom_to_zero_nontrivial", object=str(a))
        g = cat.homs[(cat.zero, a)]
        if not g.is_trivial():
            rep.fail("hom_from_zero_nontrivial", object=str(a))
    # identity laws on generators
    for a, b in itertools.product(objs, repeat=2):
        group = cat.homs[(a, b)]
        for j in range(group.generators):
            budget.spend()
            gen = Morphism(cat, a, b, tuple(int(t == j) for t in range(group.generators)))
            if cat.compose(cat.identity(b), gen) != gen:
                rep.fail("left_identity", pair=(str(a), str(b)), generator=j)
            if cat.compose(gen, cat.identity(a)) != gen:
                rep.fail("right_identity", pair=(str(a), str(b)), generator=j)
            rep.count()
    # bilinearity well-definedness: relations compose to zero against generators
    for (a, b, c), table in cat.compose_tables.items():
        g_ab, g_bc, g_ac = cat.homs[(a, b)], cat.homs[(b, c)], cat.homs[(a, c)]
        rel_bc = g_bc.relations
        for rcol in range(rel_bc.cols):
            rel = rel_bc.column_at(rcol)
            for j in range(g_ab.generators):
                budget.spend()
                acc = [0] * g_ac.generators
                for i, coeff in enumerate(rel):
                    if coeff:
                        col = table.column_at(i * g_ab.generators + j)
                        acc = [x + coeff * y for x, y in zip(acc, col)]
                if not g_ac.contains_zero(acc):
                    rep.fail("relation_not_killed_left", triple=(str(a), str(b), str(c)))
                rep.count()
        rel_ab = g_ab.relations
        for rcol in range(rel_ab.cols):
            rel = rel_ab.column_at(rcol)
            for i in range(g_bc.generators):
                budget.spend()
                acc = [0] * g_ac.generators
                for j, coeff in enumerate(rel):
                    if coeff:
                        col = table.column_at(i * g_ab.generators + j)
                        acc = [x + coeff * y for x, y in zip(acc, col)]
                if not g_ac.contains_zero(acc):
                    rep.fail("relation_not_killed_right", triple=(str(a), str(b), str(c)))
                rep.count()
    # associativity on generator triples
    for a, b, c, d in itertools.product(objs, repeat=4):
        gab, gbc, gcd_ = cat.homs[(a, b)], cat.homs[(b, c)], cat.homs[(c, d)]
        if not (gab.generators and gbc.generators and gcd_.generators):
            continue
        for i in range(gcd_.generators):
            f = Morphism(cat, c, d, tuple(int(t == i) for t in range(gcd_.generators)))
            for j in range(gbc.generators):
                g = Morphism(cat, b, c, tuple(int(t == j) for t in range(gbc.generators)))
                fg = cat.compose(f, g)
                for k in range(gab.generators):
                    budget.spend()
                    h = Morphism(cat, a, b, tuple(int(t == k) for t in range(gab.generators)))
                    if cat.compose(fg, h) != cat.compose(f, cat.compose(g, h)):
                        rep.fail(
                            "associativity",
                            quadruple=(str(a), str(b), str(c), str(d)),
                            generators=(i, j, k),
                        )
                    rep.count()
    return rep


# ---------------------------------------------------------------------------
# functors and natural isomorphisms


@dataclass(eq=False)
class AddFunctor:
    source: AbCat
    target: AbCat
    object_map: dict
    hom_maps: dict  # (a, b) -> GroupHom from source hom to target hom

    def apply_obj(self, a):
        return self.object_map[a]

    def apply(self, m: Morphism) -> Morphism:
        h = self.hom_maps[(m.source, m.target)]
        out = h.matrix.mat_vec(m.coords)
        return self.target.morphism(self.object_map[m.source], self.object_map[m.target], out)

    def compose(self, other: "AddFunctor") -> "AddFunctor":
        """self . other."""
        if other.target is not self.source:
            raise DimensionMismatch("functors not composable")
        obj = {a: self.object_map[b] for a, b in other.object_map.items()}
        homs = {
            key: self.hom_maps[(other.object_map[key[0]], other.object_map[key[1]])].compose(h)
            for key, h in other.hom_maps.items()
        }
        return AddFunctor(other.source, self.target, obj, homs)

    def check(self, budget: Budget | None = None) -> CheckReport:
        budget = budget or Budget()
        rep = CheckReport("functor")
        cat, tgt = self.source, self.target
        for a in cat.objects:
            budget.spend()
            if self.apply(cat.identity(a)) != tgt.identity(self.object_map[a]):
                rep.fail("identity_not_preserved", object=str(a))
            rep.count()
        for (a, b), h in self.hom_maps.items():
            if not h.is_well_defined():
                rep.fail("hom_map_ill_defined", pair=(str(a), str(b)))
        for a, b, c in itertools.product(cat.objects, repeat=3):
            gab, gbc = cat.homs[(a, b)], cat.homs[(b, c)]
            for i in range(gbc.generators):
                f = Morphism(cat, b, c, tuple(int(t == i) for t in range(gbc.generators)))
                for j in range(gab.generators):
                    budget.spend()
                    g = Morphism(cat, a, b, tuple(int(t == j) for t in range(gab.generators)))
                    if self.apply(cat.compose(f, g)) != tgt.compose(self.apply(f), self.apply(g)):
                        rep.fail("composition_not_preserved", triple=(str(a), str(b), str(c)), generators=(i, j))
                    rep.count()
        return rep

    @staticmethod
    def identity(cat: AbCat) -> "AddFunctor":
        return AddFunctor(
            cat,
            cat,
            {a: a for a in cat.objects},
            {(a, b): GroupHom.identity(cat.homs[(a, b)]) for (a, b) in cat.homs},
        )


@dataclass(eq=False)
class NatIso:
    """Natural isomorphism between parallel additive functors."""

    f: AddFunctor
    g: AddFunctor
    components: dict  # object -> Morphism f(a) -> g(a) in the target category

    def component(self, a) -> Morphism:
        return self.components[a]

    def check(self, budget: Budget | None = None) -> CheckReport:
        budget = budget or Budget()
        rep = CheckReport("natural isomorphism")
        cat = self.f.source
        tgt = self.f.target
        for a in cat.objects:
            budget.spend()
            comp = self.components[a]
            if comp.source != self.f.object_map[a] or comp.target != self.g.object_map[a]:
                rep.fail("component_endpoints", object=str(a))
                continue
            if tgt.inverse(comp) is None:
                rep.fail("component_not_invertible", object=str(a))
            rep.count()
        for a, b in itertools.product(cat.objects, repeat=2):
            gab = cat.homs[(a, b)]
            for j in range(gab.generators):
                budget.spend()
                e = Morphism(cat, a, b, tuple(int(t == j) for t in range(gab.generators)))
                lhs = tgt.compose(self.components[b], self.f.apply(e))
                rhs = tgt.compose(self.g.apply(e), self.components[a])
                if lhs != rhs:
                    rep.fail("naturality", pair=(str(a), str(b)), generator=j)
                rep.count()
        return rep

    @staticmethod
    def identity(f: AddFunctor) -> "NatIso":
        return NatIso(
            f,
            f,
            {a: f.target.identity(f.object_map[a]) for a in f.source.objects},
        )


# ---------------------------------------------------------------------------
# exact structures


@dataclass(eq=False)
class ExactStructure:
    """An additive category with a declared class of short exact sequences.

    `is_exact_pair` decides whether a composable pair (i, q) is declared
    exact; `enumerate_sequences` lists all declared sequences of the finite
    model.  Optional constructor hooks provide canonical kernels, cokernels
    and base pullbacks where the model supports them.
    """

    cat: AbCat
    is_exact_pair: Callable
    enumerate_sequences: Callable  # (order: str, budget) -> list[(i, q)]
    kernel_of_epi: Callable | None = None
    cokernel_of_mono: Callable | None = None
    pullback_of_epi: Callable | None = None  # (f epi, g) -> (ExactStructure, obj, gbar, fbar)
    aut_generator_hook: Callable | None = None
    admissible_mono_hook: Callable | None = None  # (a, b) -> list[Morphism]
    admissible_epi_hook: Callable | None = None
    _seq_cache: dict = field(default_factory=dict, repr=False)

    def sequences(self, order: str = "mono_first", budget: Budget | None = None) -> list:
        if order not in self._seq_cache:
            self._seq_cache[order] = self.enumerate_sequences(order, budget or Budget())
        return self._seq_cache[order]

    def admissible_monos(self, a, b, budget: Budget | None = None) -> list:
        if self.admissible_mono_hook is not None:
            return self.admissible_mono_hook(a, b)
        return sorted(
            {i for (i, q) in self.sequences(budget=budget) if (i.source, i.target) == (a, b)},
            key=lambda m: m.coords,
        )

    def admissible_epis(self, a, b, budget: Budget | None = None) -> list:
        if self.admissible_epi_hook is not None:
            return self.admissible_epi_hook(a, b)
        return sorted(
            {q for (i, q) in self.sequences(budget=budget) if (q.source, q.target) == (a, b)},
            key=lambda m: m.coords,
        )

    def aut_generators(self, obj, budget: Budget | None = None) -> list:
        if self.aut_generator_hook is not None:
            return self.aut_generator_hook(obj)
        gens = automorphisms(self.cat, obj, budget)
        return shrink_generating_set(self.cat, obj, gens)


# ---------------------------------------------------------------------------
# isomorphism groupoids


@dataclass(eq=False)
class FiniteGroupoid:
    objects: tuple
    homs: dict  # (a, b) -> tuple of labels
    compose: Callable  # (f_label at (b,c), g_label at (a,b)) -> label
    identity: Callable  # obj -> label

    def check_closure(self, budget: Budget | None = None) -> CheckReport:
        budget = budget or Budget()
        rep = CheckReport("groupoid closure")
        for a, b in itertools.product(self.objects, repeat=2):
            for g in self.homs.get((a, b), ()):
                for c in self.objects:
                    for f in self.homs.get((b, c), ()):
                        budget.spend()
                        if self.compose(f, g) not in set(self.homs.get((a, c), ())):
                            rep.fail("not_closed", pair=(str(a), str(c)))
                        rep.count()
        return rep


def automorphisms(cat: AbCat, obj, budget: Budget | None = None) -> list:
    budget = budget or Budget()
    out = []
    for f in cat.hom_elements(obj, obj, budget):
        if cat.inverse(f) is not None:
            out.append(f)
    return out


def iso_groupoid(cat: AbCat, budget: Budget | None = None) -> FiniteGroupoid:
    """Per object pair, the invertible morphisms (enumeration + inverse search)."""
    budget = budget or Budget()
    homs = {}
    for a, b in itertools.product(cat.objects, repeat=2):
        group = cat.homs[(a, b)]
        if group.order() is None:
            raise Unsupported(f"hom({a},{b}) is infinite")
        isos = []
        for f in cat.hom_elements(a, b, budget):
            if cat.inverse(f) is not None:
                isos.append(f)
        homs[(a, b)] = tuple(isos)
    return FiniteGroupoid(cat.objects, homs, cat.compose, cat.identity)


def find_isomorphism(cat: AbCat, a, b, budget: Budget | None = None) -> Morphism | None:
    if a == b:
        return cat.identity(a)
    budget = budget or Budget()
    group = cat.homs[(a, b)]
    if group.order() is None:
        raise Unsupported(f"hom({a},{b}) is infinite")
    for f in cat.hom_elements(a, b, budget):
        if cat.inverse(f) is not None:
            return f
    return None


def shrink_generating_set(cat: AbCat, obj, elements: list) -> list:
    """Greedy small generating set for a finite automorphism group."""
    all_keys = {m.group().reduce(m.coords) for m in elements}
    chosen: list = []

    def closure(gens):
        seen = {cat.identity(obj).group().reduce(cat.identity(obj).coords)}
        frontier = [cat.identity(obj)]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = cat.compose(g, cur)
                key = nxt.group().reduce(nxt.coords)
                if key not in seen:
                    seen.add(key)
                    frontier.append(nxt)
        return seen

    reached = closure(chosen)
    for m in sorted(elements, key=lambda m: m.coords):
        key = m.group().reduce(m.coords)
        if key not in reached:
            chosen.append(m)
            reached = closure(chosen)
            if reached == all_keys:
                break
    return chosen


# ---------------------------------------------------------------------------
# groupoid-indexed modules and the wreath construction


@dataclass(eq=False)
class GroupoidModule:
    """Group-valued functor on a finite groupoid: per-object groups plus a
    group homomorphism for every groupoid morphism label."""

    groupoid: FiniteGroupoid
    value: dict  # object -> FinAbGroup
    on_morphism: Callable  # label (a -> b) -> GroupHom value(a) -> value(b)

    def check_functorial(self, budget: Budget | None = None) -> CheckReport:
        budget = budget or Budget()
        rep = CheckReport("groupoid module functoriality")
        gpd = self.groupoid
        for a in gpd.objects:
            budget.spend()
            if self.on_morphism(gpd.identity(a)) != GroupHom.identity(self.value[a]):
                rep.fail("identity", object=str(a))
            rep.count()
        for a, b in itertools.product(gpd.objects, repeat=2):
            for g in gpd.homs.get((a, b), ()):
                for c in gpd.objects:
                    for f in gpd.homs.get((b, c), ()):
                        budget.spend()
                        lhs = self.on_morphism(gpd.compose(f, g))
                        rhs = self.on_morphism(f).compose(self.on_morphism(g))
                        if lhs != rhs:
                            rep.fail("composition", objects=(str(a), str(b), str(c)))
                        rep.count()
        return rep


def grothendieck(gpd: FiniteGroupoid, module: GroupoidModule, budget: Budget | None = None) -> FiniteGroupoid:
    """Glue a group-valued functor onto a groupoid.

    The result has the same objects; a morphism c -> d is a pair (f, gamma)
    with f in the groupoid and gamma in the value group at d, composed as
    (g, delta) . (f, gamma) = (g . f, delta + g(gamma)).
    """
    budget = budget or Budget()
    rep = module.check_functorial(budget)
    if not rep.ok:
        raise DimensionMismatch(f"module is not functorial: {rep.failures[:3]}")
    homs = {}
    for a, b in itertools.product(gpd.objects, repeat=2):
        labels = []
        for f in gpd.homs.get((a, b), ()):
            vb = module.value[b]
            for gamma in vb.elements():
                budget.spend()
                labels.append((f, gamma))
        homs[(a, b)] = tuple(labels)

    def compose(later, earlier):
        f, gamma = later
        g, delta = earlier
        action = module.on_morphism(f)
        moved = action.matrix.mat_vec(delta)
        total = tuple(x + y for x, y in zip(gamma, moved))
        return (gpd.compose(f, g), action.target.reduce(total))

    def identity(obj):
        return (gpd.identity(obj), module.value[obj].reduce((0,) * module.value[obj].generators))

    return FiniteGroupoid(gpd.objects, homs, compose, identity)

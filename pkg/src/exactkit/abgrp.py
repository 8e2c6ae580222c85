"""Exact integer linear algebra and finitely generated abelian groups.

All arithmetic is over arbitrary-precision integers.  A group is presented
by a relation matrix whose columns are relations among its generators;
Smith normal form is the single decision procedure behind element
equality, solvability, kernels, exactness tests and pullbacks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

from .errors import DimensionMismatch, MediationError, Unsupported


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    @staticmethod
    def from_rows(data: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = len(data)
        if rows == 0:
            if cols is None:
                cols = 0
            return IntMatrix(0, cols, ())
        width = len(data[0])
        if cols is not None and cols != width:
            raise DimensionMismatch(f"expected {cols} columns, got {width}")
        ent = []
        for r in data:
            if len(r) != width:
                raise DimensionMismatch("ragged rows")
            ent.append(tuple(int(x) for x in r))
        return IntMatrix(rows, width, tuple(ent))

    @staticmethod
    def from_columns(cols_data: Sequence[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        n = len(cols_data)
        if n == 0:
            return IntMatrix(rows or 0, 0, tuple(() for _ in range(rows or 0)))
        height = len(cols_data[0])
        if rows is not None and rows != height:
            raise DimensionMismatch(f"expected {rows} rows, got {height}")
        return IntMatrix(
            height, n, tuple(tuple(int(c[i]) for c in cols_data) for i in range(height))
        )

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @staticmethod
    def diagonal(values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        k = len(values)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        return IntMatrix(
            rows,
            cols,
            tuple(
                tuple(int(values[i]) if i == j and i < k else 0 for j in range(cols))
                for i in range(rows)
            ),
        )

    def row_at(self, i: int) -> tuple:
        return self.entries[i]

    def column_at(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple]:
        return [self.column_at(j) for j in range(self.cols)]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = list(zip(*other.entries)) if other.rows else [()] * other.cols
        ent = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in ot) for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, ent)

    def mat_vec(self, vec: Sequence[int]) -> tuple:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"matrix has {self.cols} cols, vector has {len(vec)}")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.entries)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in addition")
        return IntMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.entries))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * a for a in r) for r in self.entries))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.entries for a in r)

    @staticmethod
    def hstack(*mats: "IntMatrix") -> "IntMatrix":
        if not mats:
            raise DimensionMismatch("hstack of nothing")
        rows = mats[0].rows
        if any(m.rows != rows for m in mats):
            raise DimensionMismatch("hstack row mismatch")
        ent = tuple(tuple(itertools.chain(*(m.entries[i] for m in mats))) for i in range(rows))
        return IntMatrix(rows, sum(m.cols for m in mats), ent)

    @staticmethod
    def vstack(*mats: "IntMatrix") -> "IntMatrix":
        if not mats:
            raise DimensionMismatch("vstack of nothing")
        cols = mats[0].cols
        if any(m.cols != cols for m in mats):
            raise DimensionMismatch("vstack col mismatch")
        return IntMatrix(sum(m.rows for m in mats), cols, tuple(itertools.chain(*(m.entries for m in mats))))

    @staticmethod
    def block_diag(*mats: "IntMatrix") -> "IntMatrix":
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        ent = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for m in mats:
            for i in range(m.rows):
                ent[r0 + i][c0 : c0 + m.cols] = list(m.entries[i])
            r0 += m.rows
            c0 += m.cols
        return IntMatrix(rows, cols, tuple(tuple(r) for r in ent))


def determinant(a: IntMatrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise DimensionMismatch("determinant of non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(r) for r in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


class SNFFactors(NamedTuple):
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix


class _FullSNF(NamedTuple):
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix


@lru_cache(maxsize=None)
def snf_with_inverses(a: IntMatrix) -> _FullSNF:
    """A = U @ D @ V with U, V unimodular and D = U_inv @ A @ V_inv diagonal.

    Diagonal entries are nonnegative and form a divisibility chain.  The
    pivot at each stage is the entry of least absolute value in the
    trailing block, which keeps intermediate coefficients small.
    """
    m, n = a.rows, a.cols
    d = [list(r) for r in a.entries]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    ui = [row[:] for row in u]
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    vi = [row[:] for row in v]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        ui[i], ui[j] = ui[j], ui[i]
        for r in u:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in vi:
            r[i], r[j] = r[j], r[i]
        v[i], v[j] = v[j], v[i]

    def row_add(i, j, q):
        # row i += q * row j
        d[i] = [x + q * y for x, y in zip(d[i], d[j])]
        ui[i] = [x + q * y for x, y in zip(ui[i], ui[j])]
        for r in u:
            r[j] -= q * r[i]

    def col_add(j, i, q):
        # col j += q * col i
        for r in d:
            r[j] += q * r[i]
        for r in vi:
            r[j] += q * r[i]
        v[i] = [x - q * y for x, y in zip(v[i], v[j])]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        ui[i] = [-x for x in ui[i]]
        for r in u:
            r[i] = -r[i]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                e = d[i][j]
                if e and (best is None or abs(e) < best[0]):
                    best = (abs(e), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        while True:
            if d[t][t] < 0:
                row_negate(t)
            p = d[t][t]
            i_bad = next((i for i in range(t + 1, m) if d[i][t]), None)
            if i_bad is not None:
                q = d[i_bad][t] // p
                row_add(i_bad, t, -q)
                if d[i_bad][t]:
                    row_swap(t, i_bad)
                continue
            j_bad = next((j for j in range(t + 1, n) if d[t][j]), None)
            if j_bad is not None:
                q = d[t][j_bad] // p
                col_add(j_bad, t, -q)
                if d[t][j_bad]:
                    col_swap(t, j_bad)
                continue
            pull = None
            for i in range(t + 1, m):
                if any(x % p for x in d[i][t + 1 :]):
                    pull = i
                    break
            if pull is None:
                break
            row_add(t, pull, 1)

    to_m = lambda rows_, r_, c_: IntMatrix(r_, c_, tuple(tuple(x) for x in rows_))
    return _FullSNF(
        to_m(u, m, m), to_m(d, m, n), to_m(v, n, n), to_m(ui, m, m), to_m(vi, n, n)
    )


def smith_normal_form(a: IntMatrix) -> SNFFactors:
    """Decompose A = U @ D @ V (U, V unimodular, D diagonal, d1 | d2 | ...)."""
    f = snf_with_inverses(a)
    return SNFFactors(f.U, f.D, f.V)


def solve(a: IntMatrix, b: Sequence[int]) -> tuple | None:
    """A particular integer solution x of A x = b, or None if unsolvable.

    The returned solution is canonical: free coordinates of the
    diagonalized system are set to zero.
    """
    if len(b) != a.rows:
        raise DimensionMismatch(f"A has {a.rows} rows, b has {len(b)}")
    f = snf_with_inverses(a)
    c = f.U_inv.mat_vec(tuple(b))
    y = [0] * a.cols
    bound = min(a.rows, a.cols)
    for i in range(a.rows):
        di = f.D.entries[i][i] if i < bound else 0
        ci = c[i]
        if di:
            if ci % di:
                return None
            y[i] = ci // di
        elif ci:
            return None
    return f.V_inv.mat_vec(y)


def kernel_generators(a: IntMatrix) -> IntMatrix:
    """A matrix whose columns generate the lattice { x : A x = 0 }."""
    f = snf_with_inverses(a)
    bound = min(a.rows, a.cols)
    free = [j for j in range(a.cols) if j >= bound or f.D.entries[j][j] == 0]
    return IntMatrix.from_columns([f.V_inv.column_at(j) for j in free], rows=a.cols)


def lattice_contains(gens: IntMatrix, vec: Sequence[int]) -> bool:
    return solve(gens, vec) is not None


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FinAbGroup:
    """Abelian group presented as Z^generators / (column span of relations)."""

    generators: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.generators:
            raise DimensionMismatch(
                f"relations have {self.relations.rows} rows for {self.generators} generators"
            )

    # -- elements ----------------------------------------------------------

    def element(self, coords: Sequence[int]) -> "GroupElement":
        if len(coords) != self.generators:
            raise DimensionMismatch(f"expected {self.generators} coordinates")
        return GroupElement(self, tuple(int(c) for c in coords))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.generators)

    def generator(self, i: int) -> "GroupElement":
        return GroupElement(self, tuple(int(j == i) for j in range(self.generators)))

    def contains_zero(self, coords: Sequence[int]) -> bool:
        mods = _diag_moduli(self)
        if mods is not None:
            return all(c % m == 0 if m else c == 0 for c, m in zip(coords, mods))
        return solve(self.relations, coords) is not None

    def reduce(self, coords: Sequence[int]) -> tuple:
        """Canonical representative of a coordinate vector (for hashing)."""
        mods = _diag_moduli(self)
        if mods is not None:
            return tuple(c % m if m else c for c, m in zip(coords, mods))
        f = snf_with_inverses(self.relations)
        y = list(f.U_inv.mat_vec(tuple(coords)))
        bound = min(self.relations.rows, self.relations.cols)
        for i in range(self.generators):
            di = f.D.entries[i][i] if i < bound else 0
            if di:
                y[i] %= di
        return f.U.mat_vec(y)

    # -- invariants ----------------------------------------------------------

    def invariant_factors(self) -> tuple:
        """Nontrivial invariant factors, divisibility-ordered, 0 meaning Z."""
        return _invariant_factors(self)

    def order(self) -> int | None:
        facs = self.invariant_factors()
        if any(f == 0 for f in facs):
            return None
        n = 1
        for f in facs:
            n *= f
        return n

    def is_trivial(self) -> bool:
        return self.order() == 1

    def elements(self) -> tuple:
        """All elements of a finite group, as canonical coordinate tuples."""
        return _elements_of(self)

    @staticmethod
    def free(rank: int) -> "FinAbGroup":
        return FinAbGroup(rank, IntMatrix.zeros(rank, 0))

    @staticmethod
    def of_moduli(moduli: Sequence[int]) -> "FinAbGroup":
        return FinAbGroup(len(moduli), IntMatrix.diagonal([int(m) for m in moduli]))

    @staticmethod
    def trivial() -> "FinAbGroup":
        return FinAbGroup(0, IntMatrix.zeros(0, 0))


@lru_cache(maxsize=None)
def _diag_moduli(g: FinAbGroup) -> tuple | None:
    r = g.relations
    if r.cols != g.generators:
        return None
    for i in range(r.rows):
        for j in range(r.cols):
            if i != j and r.entries[i][j]:
                return None
    diag = tuple(abs(r.entries[i][i]) for i in range(g.generators))
    return diag


@lru_cache(maxsize=None)
def _invariant_factors(g: FinAbGroup) -> tuple:
    f = snf_with_inverses(g.relations)
    bound = min(g.relations.rows, g.relations.cols)
    facs = []
    for i in range(g.generators):
        d = f.D.entries[i][i] if i < bound else 0
        if d != 1:
            facs.append(d)
    nonzero = [d for d in facs if d]
    zero = [d for d in facs if not d]
    return tuple(nonzero + zero)


@lru_cache(maxsize=None)
def _elements_of(g: FinAbGroup) -> tuple:
    if g.order() is None:
        raise Unsupported("cannot enumerate an infinite group")
    f = snf_with_inverses(g.relations)
    bound = min(g.relations.rows, g.relations.cols)
    moduli = []
    for i in range(g.generators):
        d = f.D.entries[i][i] if i < bound else 0
        moduli.append(d)
    out = []
    for y in itertools.product(*(range(d) for d in moduli)):
        out.append(g.reduce(f.U.mat_vec(y)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class GroupElement:
    group: FinAbGroup
    coords: tuple

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._same(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._same(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __rmul__(self, k: int) -> "GroupElement":
        return GroupElement(self.group, tuple(k * a for a in self.coords))

    def is_zero(self) -> bool:
        return self.group.contains_zero(self.coords)

    def canonical(self) -> tuple:
        return self.group.reduce(self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        if self.group != other.group:
            return False
        return self.group.contains_zero(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __hash__(self):
        return hash((self.group, self.canonical()))

    def _same(self, other: "GroupElement") -> None:
        if self.group != other.group:
            raise DimensionMismatch("elements of different groups")


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FinAbGroup
    target: FinAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.rows != self.target.generators or self.matrix.cols != self.source.generators:
            raise DimensionMismatch("hom matrix shape does not match source/target")

    def __call__(self, el: GroupElement) -> GroupElement:
        if el.group != self.source:
            raise DimensionMismatch("element not in the source group")
        return GroupElement(self.target, self.matrix.mat_vec(el.coords))

    def compose(self, other: "GroupHom") -> "GroupHom":
        if other.target != self.source:
            raise DimensionMismatch("non-composable homs")
        return GroupHom(other.source, self.target, self.matrix @ other.matrix)

    def is_well_defined(self) -> bool:
        return _hom_well_defined(self)

    def __add__(self, other: "GroupHom") -> "GroupHom":
        if self.source != other.source or self.target != other.target:
            raise DimensionMismatch("hom addition shape mismatch")
        return GroupHom(self.source, self.target, self.matrix + other.matrix)

    def __neg__(self) -> "GroupHom":
        return GroupHom(self.source, self.target, -self.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupHom):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        diff = self.matrix - other.matrix
        return all(self.target.contains_zero(diff.column_at(j)) for j in range(diff.cols))

    def __hash__(self):
        cols = tuple(self.target.reduce(self.matrix.column_at(j)) for j in range(self.matrix.cols))
        return hash((self.source, self.target, cols))

    @staticmethod
    def identity(g: FinAbGroup) -> "GroupHom":
        return GroupHom(g, g, IntMatrix.identity(g.generators))

    @staticmethod
    def zero(source: FinAbGroup, target: FinAbGroup) -> "GroupHom":
        return GroupHom(source, target, IntMatrix.zeros(target.generators, source.generators))


@lru_cache(maxsize=None)
def _hom_well_defined(f: GroupHom) -> bool:
    rel = f.source.relations
    for j in range(rel.cols):
        if not f.target.contains_zero(f.matrix.mat_vec(rel.column_at(j))):
            return False
    return True


@lru_cache(maxsize=None)
def _kernel_lattice(f: GroupHom) -> IntMatrix:
    """Columns generate { x in Z^src : f(x) = 0 in the target group }."""
    stacked = IntMatrix.hstack(f.matrix, f.target.relations)
    k = kernel_generators(stacked)
    return IntMatrix.from_rows(k.entries[: f.source.generators], cols=k.cols)


def hom_is_mono(f: GroupHom) -> bool:
    lat = _kernel_lattice(f)
    rel = f.source.relations
    return all(solve(rel, lat.column_at(j)) is not None for j in range(lat.cols))


def hom_is_epi(f: GroupHom) -> bool:
    stacked = IntMatrix.hstack(f.matrix, f.target.relations)
    n = f.target.generators
    return all(
        solve(stacked, tuple(int(i == j) for i in range(n))) is not None for j in range(n)
    )


def _same_span(m1: IntMatrix, m2: IntMatrix) -> bool:
    return all(lattice_contains(m1, m2.column_at(j)) for j in range(m2.cols)) and all(
        lattice_contains(m2, m1.column_at(j)) for j in range(m1.cols)
    )


def is_short_exact(f: GroupHom, g: GroupHom) -> bool:
    """True iff 0 -> src f -> src g -> tgt g -> 0 is short exact."""
    if f.target != g.source:
        raise DimensionMismatch("f.target must equal g.source")
    if not hom_is_mono(f):
        return False
    if not hom_is_epi(g):
        return False
    mid_rel = f.target.relations
    image = IntMatrix.hstack(f.matrix, mid_rel)
    kernel = IntMatrix.hstack(_kernel_lattice(g), mid_rel)
    return _same_span(image, kernel)


# ---------------------------------------------------------------------------
# subgroups, quotients, pullbacks


def subgroup(ambient: FinAbGroup, gens: IntMatrix) -> tuple[FinAbGroup, GroupHom]:
    """The subgroup generated by the given coordinate columns, with inclusion."""
    if gens.rows != ambient.generators:
        raise DimensionMismatch("generator columns do not live in the ambient group")
    stacked = IntMatrix.hstack(gens, ambient.relations)
    k = kernel_generators(stacked)
    rel = IntMatrix.from_rows(k.entries[: gens.cols], cols=k.cols)
    sub = FinAbGroup(gens.cols, rel)
    return sub, GroupHom(sub, ambient, gens)


def quotient(ambient: FinAbGroup, extra: IntMatrix) -> tuple[FinAbGroup, GroupHom]:
    """Quotient by the subgroup generated by extra relation columns, with projection."""
    if extra.rows != ambient.generators:
        raise DimensionMismatch("extra relations do not live in the ambient group")
    q = FinAbGroup(ambient.generators, IntMatrix.hstack(ambient.relations, extra))
    return q, GroupHom(ambient, q, IntMatrix.identity(ambient.generators))


def kernel_subgroup(f: GroupHom) -> tuple[FinAbGroup, GroupHom]:
    return subgroup(f.source, _kernel_lattice(f))


def image_subgroup(f: GroupHom) -> tuple[FinAbGroup, GroupHom]:
    return subgroup(f.target, f.matrix)


def factor_through_mono(incl: GroupHom, f: GroupHom) -> GroupHom:
    """The map g with incl . g = f, when f lands in the image of incl."""
    if incl.target != f.target:
        raise DimensionMismatch("targets differ")
    stacked = IntMatrix.hstack(incl.matrix, incl.target.relations)
    cols = []
    for j in range(f.matrix.cols):
        sol = solve(stacked, f.matrix.column_at(j))
        if sol is None:
            raise MediationError(f"column {j} is not in the image")
        cols.append(sol[: incl.source.generators])
    return GroupHom(f.source, incl.source, IntMatrix.from_columns(cols, rows=incl.source.generators))


class Pullback(NamedTuple):
    group: FinAbGroup
    to_f_source: GroupHom
    to_g_source: GroupHom
    lattice: IntMatrix
    ambient: FinAbGroup


def pullback(f: GroupHom, g: GroupHom) -> Pullback:
    """The fiber product { (a, b) : f(a) = g(b) } with its two projections."""
    if f.target != g.target:
        raise DimensionMismatch("pullback needs a common target")
    na, nb = f.source.generators, g.source.generators
    big = IntMatrix.hstack(f.matrix, g.matrix.scale(-1), f.target.relations)
    k = kernel_generators(big)
    lat_cols = [k.column_at(j)[: na + nb] for j in range(k.cols)]
    lattice = IntMatrix.from_columns(lat_cols, rows=na + nb)
    ambient = FinAbGroup(na + nb, IntMatrix.block_diag(f.source.relations, g.source.relations))
    p, incl = subgroup(ambient, lattice)
    pr_f = GroupHom(p, f.source, IntMatrix.from_rows(incl.matrix.entries[:na], cols=p.generators))
    pr_g = GroupHom(p, g.source, IntMatrix.from_rows(incl.matrix.entries[na:], cols=p.generators))
    return Pullback(p, pr_f, pr_g, lattice, ambient)


def pullback_mediator(pb: Pullback, u: GroupHom, v: GroupHom) -> GroupHom:
    """The unique map into the pullback for a commuting cone (u, v)."""
    if u.source != v.source:
        raise DimensionMismatch("cone legs have different sources")
    stacked = IntMatrix.hstack(pb.lattice, pb.ambient.relations)
    cols = []
    for j in range(u.source.generators):
        rhs = u.matrix.column_at(j) + v.matrix.column_at(j)
        sol = solve(stacked, rhs)
        if sol is None:
            raise MediationError("cone does not commute with the pullback")
        cols.append(sol[: pb.group.generators])
    return GroupHom(u.source, pb.group, IntMatrix.from_columns(cols, rows=pb.group.generators))


# ---------------------------------------------------------------------------
# linear systems of group homomorphisms


def solve_with_relations(a: IntMatrix, b: Sequence[int], rel: IntMatrix) -> tuple | None:
    """x with A x = b modulo the column span of rel; canonical solution or None."""
    sol = solve(IntMatrix.hstack(a, rel), b)
    return None if sol is None else sol[: a.cols]


def solve_hom_system(
    homs: Sequence[GroupHom], rhs: Sequence[GroupElement]
) -> GroupElement | None:
    """Solve h_k(x) = b_k simultaneously for one x in the common source group."""
    if not homs:
        raise DimensionMismatch("empty system")
    src = homs[0].source
    if any(h.source != src for h in homs):
        raise DimensionMismatch("system homs have different sources")
    if len(rhs) != len(homs):
        raise DimensionMismatch("one right-hand side per hom required")
    for h, b in zip(homs, rhs):
        if b.group != h.target:
            raise DimensionMismatch("right-hand side lives in the wrong group")
    stacked = IntMatrix.vstack(*(h.matrix for h in homs))
    slack = IntMatrix.block_diag(*(h.target.relations for h in homs))
    b_all = tuple(itertools.chain(*(b.coords for b in rhs)))
    sol = solve_with_relations(stacked, b_all, slack)
    return None if sol is None else src.element(sol)


def solve_block_hom_system(
    rows: Sequence[Sequence[GroupHom | None]],
    rhs: Sequence[GroupElement],
    sources: Sequence[FinAbGroup],
) -> list[GroupElement] | None:
    """Solve a block system: for each row k, sum_c rows[k][c](x_c) = rhs[k].

    Unknowns x_c range over the given source groups; None blocks are zero.
    Returns the canonical solution as one element per source, or None.
    """
    if len(rows) != len(rhs):
        raise DimensionMismatch("one right-hand side per row required")
    blocks = []
    for k, row in enumerate(rows):
        if len(row) != len(sources):
            raise DimensionMismatch("each row needs one block per unknown")
        tgt = rhs[k].group
        line = []
        for c, h in enumerate(row):
            if h is None:
                line.append(IntMatrix.zeros(tgt.generators, sources[c].generators))
            else:
                if h.source != sources[c] or h.target != tgt:
                    raise DimensionMismatch(f"block ({k},{c}) has wrong endpoints")
                line.append(h.matrix)
        blocks.append(IntMatrix.hstack(*line) if line else IntMatrix.zeros(tgt.generators, 0))
    stacked = IntMatrix.vstack(*blocks)
    slack = IntMatrix.block_diag(*(b.group.relations for b in rhs))
    b_all = tuple(itertools.chain(*(b.coords for b in rhs)))
    sol = solve_with_relations(stacked, b_all, slack)
    if sol is None:
        return None
    out = []
    off = 0
    for g in sources:
        out.append(g.element(sol[off : off + g.generators]))
        off += g.generators
    return out


def hom_system_is_injective(homs: Sequence[GroupHom]) -> bool:
    """Whether x -> (h_k(x))_k has trivial kernel as a map of groups."""
    src = homs[0].source
    stacked = IntMatrix.vstack(*(h.matrix for h in homs))
    slack = IntMatrix.block_diag(*(h.target.relations for h in homs))
    joint = GroupHom(
        src,
        FinAbGroup(stacked.rows, slack),
        stacked,
    )
    return hom_is_mono(joint)


def direct_sum(groups: Sequence[FinAbGroup]) -> tuple[FinAbGroup, list[GroupHom], list[GroupHom]]:
    """Direct sum with inclusion and projection homs for each summand."""
    total = FinAbGroup(
        sum(g.generators for g in groups),
        IntMatrix.block_diag(*(g.relations for g in groups)) if groups else IntMatrix.zeros(0, 0),
    )
    incs, projs = [], []
    offset = 0
    for g in groups:
        n = g.generators
        inc = IntMatrix.from_rows(
            [
                [int(offset <= i < offset + n and i - offset == j) for j in range(n)]
                for i in range(total.generators)
            ],
            cols=n,
        )
        prj = IntMatrix.from_rows(
            [
                [int(offset <= j < offset + n and j - offset == i) for j in range(total.generators)]
                for i in range(n)
            ],
            cols=total.generators,
        )
        incs.append(GroupHom(g, total, inc))
        projs.append(GroupHom(total, g, prj))
        offset += n
    return total, incs, projs

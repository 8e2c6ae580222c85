"""Linear-algebra layer: SNF, solve, kernels, exactness, pullbacks.

Every nontrivial expectation is checked against an independent oracle:
minor-gcd determinant divisors for SNF, exhaustive element enumeration for
group-level questions on groups of order <= 64.
"""

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactkit.abgrp import (
    FinAbGroup,
    GroupHom,
    IntMatrix,
    determinant,
    direct_sum,
    factor_through_mono,
    hom_is_epi,
    hom_is_mono,
    is_short_exact,
    kernel_generators,
    kernel_subgroup,
    pullback,
    pullback_mediator,
    quotient,
    smith_normal_form,
    snf_with_inverses,
    solve,
    solve_hom_system,
    subgroup,
)
from exactkit.errors import DimensionMismatch


# ---------------------------------------------------------------------------
# oracles


def minor_gcd_divisors(a: IntMatrix) -> list:
    """Diagonal of the Smith form via gcds of k-minors (independent oracle)."""
    r = min(a.rows, a.cols)
    out = []
    prev = 1
    for k in range(1, r + 1):
        g = 0
        for rows in itertools.combinations(range(a.rows), k):
            for cols in itertools.combinations(range(a.cols), k):
                sub = IntMatrix.from_rows([[a.entries[i][j] for j in cols] for i in rows])
                g = math.gcd(g, determinant(sub))
        if g == 0:
            out.extend([0] * (r - k + 1))
            break
        out.append(g // prev)
        prev = g
    return out


def hom_image_set(f: GroupHom) -> set:
    return {f.target.reduce(f.matrix.mat_vec(x)) for x in f.source.elements()}


def hom_kernel_set(f: GroupHom) -> set:
    zero = f.target.reduce((0,) * f.target.generators)
    return {
        f.source.reduce(x)
        for x in f.source.elements()
        if f.target.reduce(f.matrix.mat_vec(x)) == zero
    }


def random_matrix(rng, rows, cols, lo=-9, hi=9) -> IntMatrix:
    return IntMatrix.from_rows([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)])


def random_finite_group(rng, max_order=64) -> FinAbGroup:
    moduli = []
    order = 1
    while True:
        m = rng.choice([2, 2, 3, 4, 4, 5, 8])
        if order * m > max_order or (moduli and rng.random() < 0.4):
            break
        moduli.append(m)
        order *= m
    if not moduli:
        moduli = [rng.choice([2, 3, 4])]
    return FinAbGroup.of_moduli(moduli)


# ---------------------------------------------------------------------------
# IntMatrix basics


def test_matmul_and_vec():
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    b = IntMatrix.from_rows([[0, 1], [1, 0]])
    assert (a @ b).entries == ((2, 1), (4, 3))
    assert a.mat_vec((1, 1)) == (3, 7)


def test_empty_shapes():
    z = IntMatrix.zeros(0, 3)
    assert z.rows == 0 and z.cols == 3
    assert (IntMatrix.zeros(2, 0) @ IntMatrix.zeros(0, 2)).entries == ((0, 0), (0, 0))
    assert determinant(IntMatrix.identity(0)) == 1


def test_block_diag_and_stacks():
    a = IntMatrix.identity(2)
    b = IntMatrix.from_rows([[5]])
    bd = IntMatrix.block_diag(a, b)
    assert bd.entries == ((1, 0, 0), (0, 1, 0), (0, 0, 5))
    assert IntMatrix.hstack(a, a).cols == 4
    assert IntMatrix.vstack(a, a).rows == 4


# ---------------------------------------------------------------------------
# Smith normal form


def test_snf_identity():
    a = IntMatrix.identity(2)
    u, d, v = smith_normal_form(a)
    assert d == a and u == a and v == a


def test_snf_zero_1x1():
    u, d, v = smith_normal_form(IntMatrix.from_rows([[0]]))
    assert d.entries == ((0,),)


def test_snf_known_divisors():
    # gcd of entries is 2 and d1*d2 = |det| = 8, so the form is diag(2, 4)
    a = IntMatrix.from_rows([[2, 4], [6, 8]])
    u, d, v = smith_normal_form(a)
    assert (d.entries[0][0], d.entries[1][1]) == (2, 4)
    assert u @ d @ v == a
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1


def test_snf_random_roundtrip_and_minor_oracle():
    rng = random.Random(7)
    for _ in range(60):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        a = random_matrix(rng, rows, cols)
        f = snf_with_inverses(a)
        assert f.U @ f.D @ f.V == a
        assert abs(determinant(f.U)) == 1
        assert abs(determinant(f.V)) == 1
        assert (f.U @ f.U_inv) == IntMatrix.identity(rows)
        assert (f.V @ f.V_inv) == IntMatrix.identity(cols)
        diag = [f.D.entries[i][i] for i in range(min(rows, cols))]
        for i in range(len(diag) - 1):
            if diag[i]:
                assert diag[i + 1] % diag[i] == 0
            else:
                assert diag[i + 1] == 0
        assert all(d >= 0 for d in diag)
        # off-diagonal must vanish
        for i in range(rows):
            for j in range(cols):
                if i != j:
                    assert f.D.entries[i][j] == 0
        assert diag == minor_gcd_divisors(a)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(min_value=-30, max_value=30), min_size=1, max_size=3),
        min_size=1,
        max_size=3,
    ).filter(lambda rr: len({len(r) for r in rr}) == 1)
)
def test_snf_roundtrip_property(rows):
    a = IntMatrix.from_rows(rows)
    u, d, v = smith_normal_form(a)
    assert u @ d @ v == a
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1


# ---------------------------------------------------------------------------
# solve / kernel


def test_solve_identity():
    a = IntMatrix.identity(3)
    assert solve(a, (4, -1, 7)) == (4, -1, 7)


def test_solve_parity_obstruction():
    assert solve(IntMatrix.from_rows([[2]]), (3,)) is None


def test_solve_bezout():
    a = IntMatrix.from_rows([[2, 3]])
    x = solve(a, (1,))
    assert x is not None and 2 * x[0] + 3 * x[1] == 1


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve(IntMatrix.identity(2), (1, 2, 3))


def test_kernel_identity_empty():
    assert kernel_generators(IntMatrix.identity(3)).cols == 0


def test_kernel_zero_map_full_rank():
    k = kernel_generators(IntMatrix.zeros(1, 2))
    assert k.cols == 2
    assert abs(determinant(k)) == 1


def test_kernel_single_generator():
    a = IntMatrix.from_rows([[2, 4]])
    k = kernel_generators(a)
    assert k.cols == 1
    g = k.column_at(0)
    assert a.mat_vec(g) == (0,)
    # the kernel lattice {(x, y) : x = -2y} is generated by (-2, 1) up to sign
    assert g in ((-2, 1), (2, -1))


def test_solve_random_with_enumeration():
    rng = random.Random(21)
    for _ in range(80):
        g = random_finite_group(rng)
        rel = g.relations
        target = tuple(rng.randint(-6, 6) for _ in range(g.generators))
        got = solve(rel, target) is not None
        want = g.reduce(target) == g.reduce((0,) * g.generators)
        assert got == want


# ---------------------------------------------------------------------------
# groups and elements


def test_invariant_factors_drop_units():
    g = FinAbGroup.of_moduli([1, 2, 4])
    assert g.invariant_factors() == (2, 4)
    assert g.order() == 8


def test_free_group_factors():
    assert FinAbGroup.free(2).invariant_factors() == (0, 0)
    assert FinAbGroup.free(2).order() is None


def test_element_equality_modulo_relations():
    g = FinAbGroup.of_moduli([4])
    assert g.element((5,)) == g.element((1,))
    assert g.element((2,)) != g.element((1,))
    assert hash(g.element((5,))) == hash(g.element((1,)))


def test_element_arithmetic():
    g = FinAbGroup.of_moduli([2, 3])
    a = g.element((1, 2))
    b = g.element((1, 1))
    assert (a + b).is_zero()
    assert (a - a).is_zero()
    assert (3 * b) == g.element((1, 0))


def test_elements_enumeration_count():
    g = FinAbGroup.of_moduli([2, 3])
    assert len(set(g.elements())) == 6


def test_non_diagonal_presentation_reduce():
    # Z^2 / <(2, 2), (0, 4)>  ~  Z/2 + Z/4
    g = FinAbGroup(2, IntMatrix.from_columns([(2, 2), (0, 4)], rows=2))
    assert sorted(g.invariant_factors()) == [2, 4]
    assert g.order() == 8
    assert len(set(g.elements())) == 8
    assert g.element((2, 2)) == g.zero()


# ---------------------------------------------------------------------------
# homs and exactness


def test_hom_well_definedness():
    z2 = FinAbGroup.of_moduli([2])
    z4 = FinAbGroup.of_moduli([4])
    doubling = GroupHom(z2, z4, IntMatrix.from_rows([[2]]))
    assert doubling.is_well_defined()
    bad = GroupHom(z2, z4, IntMatrix.from_rows([[1]]))
    assert not bad.is_well_defined()


def test_short_exact_identity():
    g = FinAbGroup.of_moduli([6])
    zero = FinAbGroup.trivial()
    f = GroupHom(zero, g, IntMatrix.zeros(1, 0))
    ident = GroupHom.identity(g)
    assert hom_is_mono(f) and hom_is_epi(ident)
    assert is_short_exact(f, ident)  # 0 -> G -> G with identity in the middle
    assert is_short_exact(ident, GroupHom(g, zero, IntMatrix.zeros(0, 1)))
    # negative control: doubling into Z/6 is not epi onto Z/6
    dbl = GroupHom(g, g, IntMatrix.from_rows([[2]]))
    assert not is_short_exact(f, dbl)


def test_short_exact_biproduct():
    z2 = FinAbGroup.of_moduli([2])
    z2z2 = FinAbGroup.of_moduli([2, 2])
    inc = GroupHom(z2, z2z2, IntMatrix.from_columns([(1, 0)], rows=2))
    proj = GroupHom(z2z2, z2, IntMatrix.from_rows([[0, 1]]))
    assert is_short_exact(inc, proj)


def test_short_exact_z2_z4_z2():
    z2 = FinAbGroup.of_moduli([2])
    z4 = FinAbGroup.of_moduli([4])
    times2 = GroupHom(z2, z4, IntMatrix.from_rows([[2]]))
    mod2 = GroupHom(z4, z2, IntMatrix.from_rows([[1]]))
    assert is_short_exact(times2, mod2)
    # oracle: enumerate all 4*2 images
    assert hom_image_set(times2) == hom_kernel_set(mod2)


def test_short_exact_vs_enumeration_random():
    rng = random.Random(5)
    for _ in range(60):
        mid = random_finite_group(rng, max_order=32)
        sub_gens = IntMatrix.from_columns(
            [rng.choice(mid.elements()) for _ in range(rng.randint(1, 2))],
            rows=mid.generators,
        )
        s, incl = subgroup(mid, sub_gens)
        q, proj = quotient(mid, sub_gens)
        got = is_short_exact(incl, proj)
        img = hom_image_set(incl)
        ker = hom_kernel_set(proj)
        want = hom_is_mono(incl) and hom_is_epi(proj) and img == ker
        assert got == want
        # inclusion followed by projection is always exact in the middle here
        assert img == ker


# ---------------------------------------------------------------------------
# subgroup / quotient / kernel machinery


def test_subgroup_presentation_order():
    z8 = FinAbGroup.of_moduli([8])
    sub, incl = subgroup(z8, IntMatrix.from_columns([(2,)], rows=1))
    assert sub.order() == 4
    assert hom_is_mono(incl)


def test_quotient_presentation():
    z8 = FinAbGroup.of_moduli([8])
    q, proj = quotient(z8, IntMatrix.from_columns([(4,)], rows=1))
    assert q.invariant_factors() == (4,)
    assert hom_is_epi(proj)


def test_kernel_subgroup_of_hom():
    z4 = FinAbGroup.of_moduli([4])
    z2 = FinAbGroup.of_moduli([2])
    mod2 = GroupHom(z4, z2, IntMatrix.from_rows([[1]]))
    k, incl = kernel_subgroup(mod2)
    assert k.order() == 2
    assert hom_kernel_set(mod2) == hom_image_set(incl)


def test_factor_through_mono():
    z8 = FinAbGroup.of_moduli([8])
    sub, incl = subgroup(z8, IntMatrix.from_columns([(2,)], rows=1))
    dbl = GroupHom(z8, z8, IntMatrix.from_rows([[2]]))
    lifted = factor_through_mono(incl, dbl)
    assert incl.compose(lifted) == dbl


def test_solve_hom_system_two_constraints():
    z4 = FinAbGroup.of_moduli([4])
    z2 = FinAbGroup.of_moduli([2])
    mod2 = GroupHom(z4, z2, IntMatrix.from_rows([[1]]))
    ident = GroupHom.identity(z4)
    x = solve_hom_system([mod2, ident], [z2.element((1,)), z4.element((3,))])
    assert x == z4.element((3,))
    assert solve_hom_system([mod2, ident], [z2.element((0,)), z4.element((3,))]) is None


# ---------------------------------------------------------------------------
# pullbacks


def test_pullback_over_zero_is_direct_sum():
    a = FinAbGroup.of_moduli([2])
    b = FinAbGroup.of_moduli([3])
    zero = FinAbGroup.trivial()
    f = GroupHom(a, zero, IntMatrix.zeros(0, 1))
    g = GroupHom(b, zero, IntMatrix.zeros(0, 1))
    pb = pullback(f, g)
    assert pb.group.order() == 6
    assert sorted(pb.group.invariant_factors()) == [6] or sorted(
        pb.group.invariant_factors()
    ) == [2, 3]


def test_pullback_diagonal():
    g = FinAbGroup.of_moduli([4])
    ident = GroupHom.identity(g)
    pb = pullback(ident, ident)
    assert pb.group.order() == 4
    # projections agree on the diagonal
    for el in [pb.group.element(tuple(v)) for v in itertools.product(range(2), repeat=pb.group.generators)]:
        assert pb.to_f_source(el) == pb.to_g_source(el)


def test_pullback_parity():
    z = FinAbGroup.free(1)
    z2 = FinAbGroup.of_moduli([2])
    m = GroupHom(z, z2, IntMatrix.from_rows([[1]]))
    pb = pullback(m, m)
    assert pb.group.invariant_factors() == (0, 0)
    # brute force: the lattice contains exactly the pairs with equal parity
    amb = pb.ambient
    for a in range(-2, 3):
        for b in range(-2, 3):
            inside = (a - b) % 2 == 0
            from exactkit.abgrp import lattice_contains

            assert lattice_contains(pb.lattice, (a, b)) == inside


def test_pullback_order_formula_random():
    rng = random.Random(11)
    for _ in range(40):
        c = random_finite_group(rng, max_order=16)
        a = random_finite_group(rng, max_order=16)
        b = random_finite_group(rng, max_order=16)
        fm = IntMatrix.from_rows(
            [[rng.randint(0, 5) for _ in range(a.generators)] for _ in range(c.generators)]
        )
        gm = IntMatrix.from_rows(
            [[rng.randint(0, 5) for _ in range(b.generators)] for _ in range(c.generators)]
        )
        f = GroupHom(a, c, fm)
        g = GroupHom(b, c, gm)
        if not (f.is_well_defined() and g.is_well_defined()):
            continue
        pb = pullback(f, g)
        # |P| = |A| |B| / |im f + im g|
        span = {c.reduce(fm.mat_vec(x)) for x in a.elements()}
        total = set()
        for s in span:
            for y in b.elements():
                total.add(c.reduce(tuple(p + q for p, q in zip(s, gm.mat_vec(y)))))
        assert pb.group.order() == a.order() * b.order() // len(total)


def test_pullback_mediator_roundtrip():
    z4 = FinAbGroup.of_moduli([4])
    z2 = FinAbGroup.of_moduli([2])
    f = GroupHom(z4, z2, IntMatrix.from_rows([[1]]))
    pb = pullback(f, f)
    u = pb.to_f_source
    v = pb.to_g_source
    med = pullback_mediator(pb, u, v)
    assert pb.to_f_source.compose(med) == u
    assert pb.to_g_source.compose(med) == v


def test_direct_sum_homs():
    a = FinAbGroup.of_moduli([2])
    b = FinAbGroup.of_moduli([4])
    total, incs, projs = direct_sum([a, b])
    assert total.order() == 8
    assert projs[0].compose(incs[0]) == GroupHom.identity(a)
    assert projs[1].compose(incs[0]) == GroupHom.zero(a, b)

"""Retarded-set representations and expansions."""

import itertools

import pytest

from contourcalc.combinatorics import RangeError, orders_consistent_with
from contourcalc.engine import (
    component_representation,
    composition_representation,
    enumerate_pivots,
    expand_retarded,
    nested_expand,
    normalize_item,
    representation,
)
from contourcalc.ir import (
    ContourEquation,
    CoverError,
    Plain,
    Ret,
    SuperIndex,
    to_hacek,
)
from contourcalc.parser import parse_equation, parse_superindex
from contourcalc import catalog


def _keldysh(eq):
    return ContourEquation(eq.lhs_name, eq.external, eq.internal, eq.product, "keldysh")


def _hacek_strings(eq, terms):
    args = eq.product[0].args
    return [str(to_hacek(t.index, args)) for t in terms]


FOUR = catalog.four_point()
FOUR_K = _keldysh(FOUR)


def test_component_representation_greater_worked_example():
    terms = component_representation(FOUR_K, parse_superindex("12", FOUR_K))
    assert _hacek_strings(FOUR_K, terms) == [
        "R(1,23)4",
        "R(1,2)R(4,3)",
        "R(1,3)R(4,2)",
        "1R(4,23)",
    ]
    assert all(t.real_integrals == frozenset("bc") for t in terms)


def test_component_representation_lesser_worked_example():
    terms = component_representation(FOUR_K, parse_superindex("21", FOUR_K))
    assert sorted(_hacek_strings(FOUR_K, terms)) == sorted(
        ["4R(1,23)", "R(4,3)R(1,2)", "R(4,2)R(1,3)", "R(4,23)1"]
    )


def test_component_representation_extended_matsubara_head():
    terms = component_representation(FOUR, parse_superindex("M(a)d", FOUR))
    assert _hacek_strings(FOUR, terms) == [
        "M(123)4",
        "M(12)R(4,3)",
        "M(13)R(4,2)",
        "M(1)R(4,23)",
    ]
    assert [sorted(t.imag_integrals) for t in terms] == [["b", "c"], ["b"], ["c"], []]


def test_component_representation_zero_internals():
    eq = catalog.product_structure()
    terms = component_representation(eq, parse_superindex(">", eq))
    assert len(terms) == 1 and terms[0].index.items == (Plain("a"), Plain("b"))


def test_composition_representation_seven_point_worked_example():
    eq = _keldysh(catalog.seven_point())
    terms = composition_representation(eq, parse_superindex("R(a,b)R(c,de)", eq))
    assert _hacek_strings(eq, terms) == [
        "R(1,267)R(3,45)",
        "R(1,26)R(3,457)",
        "R(1,27)R(3,456)",
        "R(1,2)R(3,4567)",
    ]


def test_composition_single_internal_fully_retarded():
    eq = _keldysh(parse_equation("O[e] = int{i} : Obar[e,i]"))
    # R(e, empty set) is the plain top; the single internal joins the one slot
    terms = composition_representation(eq, SuperIndex((Ret(Plain("e"), ()),)))
    assert _hacek_strings(eq, terms) == ["R(1,2)"]


def test_composition_no_internals_identity():
    eq = parse_equation("D[a,b] = int{} : A[a,b]*B[b,a]")
    target = parse_superindex("R", eq)
    terms = composition_representation(eq, target)
    assert len(terms) == 1 and terms[0].index == target


def test_composition_reduces_to_component_representation():
    for target in ("12", "21"):
        si = parse_superindex(target, FOUR)
        assert representation(FOUR, si) == component_representation(FOUR, si)


def test_term_counts():
    # H slots to the power of internals on the Keldysh contour, (H+1)**I extended
    eq = catalog.double_triangle()
    eqk = _keldysh(eq)
    t = parse_superindex(">", eq)
    assert len(representation(eqk, t)) == 2 ** 2
    assert len(representation(eq, t)) == 3 ** 2
    tri = catalog.triangle_one()
    assert len(representation(tri, parse_superindex("1", tri))) == 2 ** 2
    assert len(representation(_keldysh(tri), parse_superindex("1", _keldysh(tri)))) == 1


def test_target_validation():
    with pytest.raises(CoverError):
        component_representation(FOUR, parse_superindex("R(a,d)", FOUR))
    with pytest.raises(CoverError):
        composition_representation(FOUR, SuperIndex((Plain("a"),)))
    # on the Keldysh contour the vertical slot is suppressed for internals;
    # external vertical placements stay legal and distribute over real slots
    terms = component_representation(FOUR_K, parse_superindex("M(a)d", FOUR))
    assert _hacek_strings(FOUR_K, terms) == ["M(1)R(4,23)"]
    # with every external vertical, the horizontal integral vanishes
    eq = _keldysh(parse_equation("D[a,b] = int{c} : A[a,c]*B[c,b]"))
    full_m = parse_superindex("M", eq)
    assert component_representation(eq, full_m) == []


# ---------------------------------------------------------------------------
# expansions


def _nf(terms):
    """Total-order normal form of (sign, chains, word) expansions."""
    out = {}
    for sign, chains, word in terms:
        labels = sorted(set(word))
        for omega in orders_consistent_with(chains, labels):
            key = (omega, word)
            out[key] = out.get(key, 0) + sign
    return {k: v for k, v in out.items() if v}


def test_expand_retarded_two_arguments():
    got = expand_retarded((Ret(Plain("e"), (Plain("i"),)),))
    assert sorted(got) == sorted(
        [(1, (("e", "i"),), ("e", "i")), (-1, (("e", "i"),), ("i", "e"))]
    )


def test_expand_retarded_three_arguments_two_chains():
    got = expand_retarded((Ret(Plain("e"), (Plain("i"), Plain("j"))),))
    chains = {c for _, cs, _ in got for c in cs}
    assert chains == {("e", "i", "j"), ("e", "j", "i")}
    assert len(got) == 2 * 4


def test_expand_retarded_nested_single_chain_pair():
    got = expand_retarded((Ret(Plain("a"), (Ret(Plain("c"), (Plain("d"),)),)),))
    assert all(set(cs) == {("a", "c"), ("c", "d")} for _, cs, _ in got)
    words = sorted((s, w) for s, _, w in got)
    assert words == sorted(
        [
            (1, ("a", "c", "d")),
            (-1, ("a", "d", "c")),
            (-1, ("c", "d", "a")),
            (1, ("d", "c", "a")),
        ]
    )


def test_retarded_symmetry_under_permuted_rest():
    # R(e, P(I)) has the same canonical step-weighted expansion for every P
    rest = (Plain("i"), Plain("j"), Plain("k"))
    base = _nf(expand_retarded((Ret(Plain("e"), rest),)))
    for perm in itertools.permutations(rest):
        assert _nf(expand_retarded((Ret(Plain("e"), perm),))) == base


def test_nested_expand_examples():
    # pivot 4 of R(1,234)
    items = (Ret(Plain("1"), (Plain("2"), Plain("3"), Plain("4"))),)
    got = nested_expand(items, (0, 3))
    rendered = [str(SuperIndex(ch)) for ch in got]
    assert rendered == ["R(R(1,4),23)", "R(1,R(2,4)3)", "R(1,2R(3,4))"]

    # pivot d, then pivot c, of R(a,cd)
    items = (Ret(Plain("a"), (Plain("c"), Plain("d"))),)
    assert [str(SuperIndex(ch)) for ch in nested_expand(items, (0, 2))] == [
        "R(R(a,d),c)",
        "R(a,R(c,d))",
    ]
    assert [str(SuperIndex(ch)) for ch in nested_expand(items, (0, 1))] == [
        "R(R(a,c),d)",
        "R(a,R(d,c))",
    ]


def test_nested_expand_pivot_errors():
    items = (Ret(Plain("a"), (Plain("c"), Plain("d"))),)
    with pytest.raises(RangeError):
        nested_expand(items, (0, 0))
    with pytest.raises(RangeError):
        nested_expand(items, (0, 5))
    with pytest.raises(RangeError):
        nested_expand(items, (2, 1))


def test_pivot_independence():
    # expanding w.r.t. any retarded entry preserves the step-weighted sum
    for n in (3, 4, 5):
        labels = [f"x{i}" for i in range(n)]
        items = (Ret(Plain(labels[0]), tuple(Plain(l) for l in labels[1:])),)
        base = _nf(expand_retarded(items))
        for pivot in range(1, n):
            combined = []
            for child in nested_expand(items, (0, pivot)):
                combined.extend(expand_retarded(child))
            assert _nf(combined) == base, (n, pivot)


def test_double_expansion_identity():
    # R(1,234) equals the fully nested four-term combination
    lhs = _nf(expand_retarded((Ret(Plain("1"), (Plain("2"), Plain("3"), Plain("4"))),)))
    one, two, three, four = "1", "2", "3", "4"
    rhs_items = [
        (Ret(Ret(Plain(one), (Plain(three), Plain(four))), (Plain(two),)),),
        (Ret(Ret(Plain(one), (Plain(four),)), (Ret(Plain(two), (Plain(three),)),)),),
        (Ret(Ret(Plain(one), (Plain(three),)), (Ret(Plain(two), (Plain(four),)),)),),
        (Ret(Plain(one), (Ret(Plain(two), (Plain(three), Plain(four))),)),),
    ]
    combined = []
    for items in rhs_items:
        combined.extend(expand_retarded(items))
    assert _nf(combined) == lhs


def test_enumerate_pivots_skips_binary_sets():
    items = (Ret(Plain("a"), (Plain("b"),)), Ret(Plain("c"), (Plain("d"), Plain("e"))))
    paths = enumerate_pivots(items)
    assert paths == [(1, 1), (1, 2)]


def test_normalize_item():
    assert normalize_item(Ret(Plain("a"), ())) == Plain("a")
    nested = Ret(Ret(Plain("a"), ()), (Ret(Plain("b"), ()),))
    assert normalize_item(nested) == Ret(Plain("a"), (Plain("b"),))

import math
import random
from collections import Counter
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from njexl.errors import NjexlError
from njexl.values import (
    BigInt,
    Pair,
    Range,
    XMap,
    XSet,
    arith,
    canonical_key,
    cardinality,
    classify_decimal_literal,
    enumerate_value,
    membership,
    order_compare,
    project,
    stringify,
    sub_collection,
    truthiness,
    values_equal,
)


def make_map(*pairs):
    m = XMap()
    for k, v in pairs:
        m.set(k, v)
    return m


# --- arithmetic ---------------------------------------------------------------


def test_fold_concat_identity():
    acc = ""
    for piece in ["a", "b"]:
        acc = arith("+", acc, piece)
    assert acc == "ab"


def test_additive_identity():
    for x in (0, 17, -3, 2.5, Decimal("1.25"), BigInt(9)):
        assert values_equal(arith("+", 0, x), x)


def test_int_overflow_promotes():
    result = arith("*", 2**62, 4)
    assert result == 18446744073709551616
    assert isinstance(result, BigInt) or not (-(2**63) <= result < 2**63)


def test_no_wraparound_near_boundary():
    top = 2**63 - 1
    assert arith("+", top, 1) == 2**63
    assert arith("-", -(2**63), 1) == -(2**63) - 1


def test_int_division_truncates_toward_zero():
    assert arith("/", 7, 2) == 3
    assert arith("/", -7, 2) == -3
    assert arith("%", 7, 2) == 1
    assert arith("%", -7, 2) == -1
    # the division identity holds with truncation
    for a in (-9, -1, 1, 14):
        for b in (-4, -2, 3, 5):
            assert arith("+", arith("*", arith("/", a, b), b), arith("%", a, b)) == a


def test_bigint_division_promotes_to_decimal():
    out = arith("/", BigInt(7), BigInt(2))
    assert isinstance(out, Decimal)
    assert out == Decimal("3.5")
    exact = arith("/", BigInt(8), BigInt(2))
    assert exact == 4 and isinstance(exact, BigInt)


def test_divide_by_zero():
    with pytest.raises(NjexlError) as err:
        arith("/", 1, 0)
    assert err.value.kind == "DivideByZero"
    with pytest.raises(NjexlError):
        arith("%", 1, 0)
    with pytest.raises(NjexlError):
        arith("/", Decimal(1), Decimal(0))


def test_string_concat_stringifies_other_side():
    assert arith("+", "n=", 42) == "n=42"
    assert arith("+", 1, "x") == "1x"
    assert arith("+", "", None) == "null"


def test_list_and_set_append():
    xs = [1, 2]
    assert arith("+", xs, 3) is xs and xs == [1, 2, 3]
    xs2 = arith("+", [1], [2, 3])
    assert xs2 == [1, [2, 3]]
    s = XSet([1])
    arith("+", s, 1)
    arith("+", s, 2)
    assert sorted(s) == [1, 2]


def test_type_error_for_non_numeric():
    with pytest.raises(NjexlError) as err:
        arith("-", "a", 1)
    assert err.value.kind == "TypeError"


def test_decimal_exact_addition_keeps_digits():
    a = Decimal("0.100101000017181881881888188981313873444111")
    out = arith("+", a, Decimal("1"))
    assert str(out) == "1.100101000017181881881888188981313873444111"


def test_mixed_float_decimal_uses_shortest_repr_bridge():
    out = arith("+", 0.1, Decimal("0.2"))
    assert out == Decimal("0.3")


# the independent oracle: plain host arithmetic per tier, exact via Fraction;
# inexact division verified as correct rounding against the exact quotient
def _tier(v):
    if isinstance(v, Decimal):
        return 3
    if isinstance(v, float):
        return 2
    if isinstance(v, BigInt) or not -(2**63) <= v <= 2**63 - 1:
        return 1
    return 0


def _as_fraction(v):
    return Fraction(Decimal(repr(v)) if isinstance(v, float) else v)


def _oracle(op, a, b):
    """Return ('exact', value) or ('rounded', exact quotient as Fraction)."""
    t = max(_tier(a), _tier(b))
    if t == 3:
        fa, fb = _as_fraction(a), _as_fraction(b)
        if op == "+":
            return "exact", fa + fb
        if op == "-":
            return "exact", fa - fb
        if op == "*":
            return "exact", fa * fb
        if op == "/":
            return "rounded", fa / fb
        return "rounded", None  # remainder bound-checked separately below
    if t == 2:
        fa, fb = float(a), float(b)
        if op in "+-*":
            return "exact", {"+": fa + fb, "-": fa - fb, "*": fa * fb}[op]
        return "exact", fa / fb if op == "/" else math.fmod(fa, fb)
    ia, ib = int(a), int(b)
    if op == "+":
        return "exact", ia + ib
    if op == "-":
        return "exact", ia - ib
    if op == "*":
        return "exact", ia * ib
    q = abs(ia) // abs(ib)
    q = -q if (ia < 0) != (ib < 0) else q
    if op == "/":
        if t == 1 and ia % ib != 0:
            return "rounded", Fraction(ia, ib)
        return "exact", q
    return "exact", ia - q * ib


def _ulp(decimal_value):
    return Fraction(1, 1) * Fraction(10) ** decimal_value.as_tuple().exponent


def _random_operand(rng):
    pick = rng.randrange(6)
    if pick == 0:
        return rng.randrange(-100, 100)
    if pick == 1:
        return rng.randrange(-(2**64), 2**64)
    if pick == 2:
        return BigInt(rng.randrange(-(10**30), 10**30))
    if pick == 3:
        return rng.uniform(-1e6, 1e6)
    if pick == 4:
        return Decimal(rng.randrange(-(10**20), 10**20)) / Decimal(10**6)
    return rng.randrange(-5, 5)


def check_arith_against_oracle(cases, seed):
    rng = random.Random(seed)
    checked = 0
    while checked < cases:
        a, b = _random_operand(rng), _random_operand(rng)
        op = rng.choice("+-*/%")
        if op in "/%":
            if b == 0 or (isinstance(b, float) and b == 0.0):
                continue
            if isinstance(b, Decimal) and b.is_zero():
                continue
        kind, expected = _oracle(op, a, b)
        got = arith(op, a, b)
        if kind == "exact":
            if isinstance(expected, float):
                assert (got == expected) or (math.isnan(expected) and math.isnan(got)), (op, a, b)
            else:
                assert Fraction(got) == Fraction(expected), (op, a, b)
        elif expected is not None:
            # correctly rounded decimal: within half an ulp of the true quotient
            assert isinstance(got, Decimal), (op, a, b)
            assert abs(Fraction(got) - expected) <= _ulp(got) / 2, (op, a, b)
        else:
            # decimal remainder: |r| < |b| and (a - r) divisible by b exactly
            assert isinstance(got, Decimal), (op, a, b)
            fa, fb, fr = _as_fraction(a), _as_fraction(b), Fraction(got)
            assert abs(fr) < abs(fb), (op, a, b)
            assert (fa - fr) / fb == (fa - fr) // fb or abs((fa - fr) / fb - round((fa - fr) / fb)) == 0
        checked += 1
    return checked


def test_arith_matches_oracle_bulk():
    assert check_arith_against_oracle(4000, seed=101) == 4000


def test_constructed_exact_division():
    rng = random.Random(103)
    for _ in range(300):
        q = Decimal(rng.randrange(-(10**12), 10**12)) / Decimal(10**4)
        b = Decimal(rng.randrange(1, 10**8))
        a = arith("*", q, b)
        assert values_equal(arith("/", a, b), q)


# --- equality ------------------------------------------------------------------


def test_permutation_equality():
    assert values_equal([1, 2], [2, 1])
    assert not values_equal([1, 1, 2], [1, 2, 2])
    assert values_equal([1, [2, 3]], [[3, 2], 1])


def test_numeric_equality_across_tags():
    assert values_equal(1, 1.0)
    assert values_equal(1, Decimal("1"))
    assert values_equal(0.5, Decimal("0.5"))
    assert values_equal(BigInt(7), 7)
    assert not values_equal(True, 1)
    assert not values_equal(False, 0)


def test_collection_tag_mismatch_is_unequal():
    assert not values_equal([1], XSet([1]))
    assert not values_equal(make_map((1, 2)), [Pair(1, 2)])


def test_null_equals_only_null():
    assert values_equal(None, None)
    for other in (0, False, "", [], XSet()):
        assert not values_equal(None, other)


def test_map_and_set_equality():
    assert values_equal(XSet([1, 2]), XSet([2, 1, 1]))
    assert values_equal(make_map((1, "a"), (2, "b")), make_map((2, "b"), (1, "a")))
    assert not values_equal(make_map((1, "a")), make_map((1, "b")))
    assert not values_equal(make_map((1, "a")), make_map((1, "a"), (2, "b")))


def _multiset_oracle(a, b):
    return sorted(a) == sorted(b)


def test_multiset_equality_matches_sort_oracle():
    rng = random.Random(5)
    for _ in range(1000):
        a = [rng.randrange(4) for _ in range(rng.randrange(6))]
        b = [rng.randrange(4) for _ in range(rng.randrange(6))]
        if rng.random() < 0.4:
            b = a[:]
            rng.shuffle(b)
        assert values_equal(a, b) == _multiset_oracle(a, b)


_scalar = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(-4, 4),
    st.sampled_from([0.5, 1.0, 2.0]),
    st.sampled_from([Decimal("0.5"), Decimal(2)]),
    st.sampled_from(["", "a", "b"]),
)
_value = st.recursive(
    _scalar,
    lambda inner: st.one_of(
        st.lists(inner, max_size=3),
        st.builds(Pair, inner, inner),
        st.builds(lambda xs: XSet(xs), st.lists(inner, max_size=3)),
    ),
    max_leaves=8,
)


@settings(max_examples=300, deadline=None)
@given(_value)
def test_equals_reflexive(v):
    assert values_equal(v, v)


@settings(max_examples=300, deadline=None)
@given(_value, _value)
def test_equals_symmetric(a, b):
    assert values_equal(a, b) == values_equal(b, a)


@settings(max_examples=300, deadline=None)
@given(_value, _value, _value)
def test_equals_transitive(a, b, c):
    if values_equal(a, b) and values_equal(b, c):
        assert values_equal(a, c)


def test_nan_is_self_equal_for_reflexivity():
    assert values_equal(float("nan"), float("nan"))
    assert not values_equal(float("nan"), 0.0)


def test_range_equality_by_progression():
    assert values_equal(Range(0, 3), Range(0, 3, 1))
    assert values_equal(Range(0, 0), Range(5, 5))  # both empty
    assert not values_equal(Range(0, 3), Range(0, 4))
    assert not values_equal(Range(0, 3), [0, 1, 2])  # mixed tags stay unequal


# --- sub-collection -------------------------------------------------------------


def test_filter_output_is_contained():
    full = [1, 2, 3, 4, 5, 6]
    evens = [x for x in full if x % 2 == 0]
    assert sub_collection(evens, full)


def test_sub_collection_reflexive():
    for xs in ([], [1], [1, 1, 2], ["a", "b"]):
        assert sub_collection(xs, xs)


def test_sub_multiset_counts():
    assert not sub_collection([2, 2], [1, 2])
    assert sub_collection([2, 2], [2, 1, 2])


def test_sub_collection_sets_and_maps():
    assert sub_collection(XSet([1]), XSet([1, 2]))
    assert not sub_collection(XSet([3]), XSet([1, 2]))
    assert sub_collection(make_map((1, "a")), make_map((1, "a"), (2, "b")))
    assert not sub_collection(make_map((1, "x")), make_map((1, "a"), (2, "b")))


def test_sub_collection_mismatched_tags():
    with pytest.raises(NjexlError):
        sub_collection([1], XSet([1]))


def test_sub_collection_partial_order_laws():
    rng = random.Random(13)
    for _ in range(500):
        a = [rng.randrange(4) for _ in range(rng.randrange(5))]
        b = a + [rng.randrange(4) for _ in range(rng.randrange(4))]
        c = b + [rng.randrange(4) for _ in range(rng.randrange(4))]
        rng.shuffle(b)
        rng.shuffle(c)
        assert sub_collection(a, a)
        assert sub_collection(a, b) and sub_collection(b, c)
        assert sub_collection(a, c)
    for _ in range(300):
        a = [rng.randrange(3) for _ in range(rng.randrange(5))]
        b = [rng.randrange(3) for _ in range(rng.randrange(5))]
        if sub_collection(a, b) and sub_collection(b, a):
            assert values_equal(a, b)


# --- membership ------------------------------------------------------------------


def test_membership_examples():
    fb = make_map((0, "FizzBuzz"), (3, "Fizz"), (5, "Buzz"))
    assert membership(3, fb)
    assert not membership(4, fb)
    assert not membership("anything", [])
    assert not membership(7, Range(0, 10, 2))
    assert membership(6, Range(0, 10, 2))
    assert membership("ord", "word")
    assert membership(2.0, [1, 2, 3])


def test_membership_scan_oracle():
    rng = random.Random(17)
    for _ in range(1000):
        c = [rng.randrange(6) for _ in range(rng.randrange(8))]
        x = rng.randrange(8)
        assert membership(x, c) == any(values_equal(x, e) for e in c)


def test_membership_non_container():
    with pytest.raises(NjexlError):
        membership(1, 5)


# --- cardinality / projection -----------------------------------------------------


def test_cardinality_examples():
    assert cardinality("word") == 4
    assert cardinality([]) == 0
    assert cardinality(Range(0, 7, 2)) == 4
    assert cardinality(Pair(1, 2)) == 2
    assert cardinality(make_map((1, 2))) == 1
    with pytest.raises(NjexlError):
        cardinality(None)
    with pytest.raises(NjexlError):
        cardinality(12)


def test_cardinality_matches_enumeration_oracle():
    rng = random.Random(19)
    for _ in range(300):
        kind = rng.randrange(4)
        if kind == 0:
            v = [rng.randrange(5) for _ in range(rng.randrange(7))]
        elif kind == 1:
            v = XSet(rng.randrange(5) for _ in range(rng.randrange(7)))
        elif kind == 2:
            v = Range(rng.randrange(-5, 5), rng.randrange(-5, 15), rng.choice([1, 2, 3, -1]))
        else:
            v = "".join(rng.choice("ab") for _ in range(rng.randrange(7)))
        assert cardinality(v) == sum(1 for _ in enumerate_value(v))


def test_projection():
    assert project(Pair("a", "bb"), 1) == "bb"
    assert project([5], 0) == 5
    assert project("word", 2) == "r"
    with pytest.raises(NjexlError) as err:
        project([1], 1)
    assert err.value.kind == "IndexError"
    with pytest.raises(NjexlError):
        project(5, 0)


# --- truthiness / ordering ----------------------------------------------------------


def test_truthiness_table():
    falsy = [None, False, 0, 0.0, Decimal("0"), Decimal("0.00")]
    truthy = [True, 1, -1, 0.5, "", "x", [], [0], XSet(), make_map(), Range(0, 0)]
    assert not any(truthiness(v) for v in falsy)
    assert all(truthiness(v) for v in truthy)


def test_order_compare():
    assert order_compare(1, 2) < 0
    assert order_compare(2.5, Decimal("2.5")) == 0
    assert order_compare("b", "a") > 0
    assert order_compare(False, True) < 0
    with pytest.raises(NjexlError):
        order_compare(1, "1")


# --- literals, promotion, text forms --------------------------------------------------


def test_decimal_literal_classification():
    assert isinstance(classify_decimal_literal("0.1"), float)
    assert isinstance(classify_decimal_literal("1e5"), float)
    long_literal = "0.100101000017181881881888188981313873444111"
    d = classify_decimal_literal(long_literal)
    assert isinstance(d, Decimal)
    assert str(d) == long_literal


def test_promotion_round_trips():
    big = BigInt(10**30)
    assert BigInt(int(str(big))) == big
    d = Decimal("1.3000")
    assert Decimal(str(d)) == d and str(Decimal(str(d))) == str(d)


def test_stringify_forms():
    cases = [
        (None, "null"),
        (True, "true"),
        (False, "false"),
        (42, "42"),
        (3.5, "3.5"),
        (Decimal("0.10"), "0.10"),
        ("text", "text"),
        ([1, "a"], "[1, a]"),
        (XSet([1, 2]), "{1, 2}"),
        (make_map((0, False), (1, True)), "{0 : false, 1 : true}"),
        (Pair(1, "b"), "(1, b)"),
        (Range(0, 5), "[0:5]"),
        (Range(0, 5, 2), "[0:5:2]"),
    ]
    for value, want in cases:
        assert stringify(value) == want


def test_canonical_key_rejects_cycles():
    xs = []
    xs.append(xs)
    with pytest.raises(NjexlError):
        canonical_key(xs)


def test_stringify_marks_cycles_instead_of_recursing():
    xs = [1]
    xs.append(xs)
    assert stringify(xs) == "[1, [...]]"


def test_set_dedup_counts_equivalence_classes():
    rng = random.Random(23)
    for _ in range(200):
        raw = [rng.choice([0, 1, 1.0, Decimal(1), "a", None, True]) for _ in range(rng.randrange(9))]
        classes = Counter(canonical_key(v) for v in raw)
        assert len(XSet(raw)) == len(classes)

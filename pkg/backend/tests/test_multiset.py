import pytest
from hypothesis import given, settings, strategies

from multiset import EMPTY, Multiset, combine, image, msum, restrict, scale
from net_errors import MultisetOverflowError

ELEMENTS = strategies.sampled_from(["x", "y", "z", "w"])
multisets = strategies.dictionaries(ELEMENTS, strategies.integers(min_value=0, max_value=4)).map(Multiset)


# Construction and rendering
def test_zero_counts_are_dropped():
    """Extensionally equal multisets compare equal whatever their declared domain"""
    assert Multiset({"x": 1, "y": 0}) == Multiset({"x": 1})
    assert Multiset({"x": 0}) == EMPTY
    assert len(Multiset({"x": 2, "y": 0})) == 1


def test_from_iterable_counts_repetitions():
    ms = Multiset(["a", "b", "a"])
    assert ms["a"] == 2
    assert ms["b"] == 1
    assert ms["c"] == 0
    assert ms.cardinality == 3


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        Multiset({"x": -1})


def test_non_integer_count_rejected():
    with pytest.raises(TypeError):
        Multiset({"x": 1.5})


def test_overflow_rejected():
    with pytest.raises(MultisetOverflowError):
        Multiset({"x": 2 ** 63})


def test_rendering_is_sorted():
    assert str(Multiset({"y": 1, "x": 2})) == "{x:2, y:1}"
    assert str(EMPTY) == "∅"
    assert str(Multiset({10: 1, 2: 1})) == "{2:1, 10:1}"


def test_elements_repeat_by_count():
    assert list(Multiset({"b": 1, "a": 2}).elements()) == ["a", "a", "b"]


def test_hashable_and_usable_as_key():
    seen = {Multiset({"x": 1}): "first"}
    assert seen[Multiset(["x"])] == "first"


# Operations
def test_union_intersection_sum():
    a = Multiset({"x": 2, "y": 1})
    b = Multiset({"x": 1, "z": 3})
    assert a | b == Multiset({"x": 2, "y": 1, "z": 3})
    assert a & b == Multiset({"x": 1})
    assert a + b == Multiset({"x": 3, "y": 1, "z": 3})
    assert combine(a, b, "sum") == a + b
    with pytest.raises(ValueError):
        combine(a, b, "xor")


def test_truncated_difference():
    assert Multiset({"x": 1}) - Multiset({"x": 3, "y": 1}) == EMPTY
    assert Multiset({"x": 3}) - Multiset({"x": 1}) == Multiset({"x": 2})


def test_scale_and_image():
    a = Multiset({"x": 2, "y": 1})
    assert scale(3, a) == Multiset({"x": 6, "y": 3})
    assert 0 * a == EMPTY
    assert image(lambda e: "same", a) == Multiset({"same": 3})
    with pytest.raises(ValueError):
        a.scale(-1)


def test_restrict_keeps_multiplicity():
    g = Multiset({"t": 2, "u": 1})
    assert restrict(g, ["t"]) == Multiset({"t": 2})
    assert g.restrict([]) == EMPTY


def test_msum_of_parts():
    assert msum([Multiset("ab"), Multiset("b"), EMPTY]) == Multiset({"a": 1, "b": 2})
    assert msum([]) == EMPTY


# Algebraic laws
@given(multisets, multisets)
def test_sum_and_union_commute(a, b):
    assert a + b == b + a
    assert a | b == b | a
    assert a & b == b & a


@given(multisets, multisets, multisets)
def test_associativity(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a | b) | c == a | (b | c)
    assert (a & b) & c == a & (b & c)


@given(multisets, multisets)
def test_difference_undoes_sum(a, b):
    assert (a + b) - b == a
    assert b <= a + b


@given(multisets, multisets)
def test_leq_matches_union_and_intersection(a, b):
    assert (a <= b) == (a | b == b)
    assert (a <= b) == (a & b == a)
    assert a & b <= a <= a | b


@given(multisets, multisets)
def test_cardinality_is_additive(a, b):
    assert (a + b).cardinality == a.cardinality + b.cardinality


@settings(max_examples=50)
@given(multisets, strategies.integers(min_value=0, max_value=3))
def test_scale_is_repeated_sum(a, k):
    assert k * a == msum([a] * k)


@given(multisets, multisets)
def test_leq_is_antisymmetric(a, b):
    if a <= b and b <= a:
        assert a == b


@given(multisets)
def test_union_and_intersection_are_idempotent(a):
    assert a | a == a
    assert a & a == a


@given(multisets)
def test_empty_is_unit_of_sum(a):
    assert a + EMPTY == a
    assert EMPTY + a == a
    assert a | EMPTY == a
    assert a & EMPTY == EMPTY


RELABEL = {"x": "p", "y": "p", "z": "q", "w": "r"}


@given(multisets)
def test_image_preserves_cardinality(a):
    assert image(RELABEL.get, a).cardinality == a.cardinality
    assert image(lambda e: e, a) == a


@given(multisets, multisets)
def test_image_distributes_over_sum(a, b):
    """Holds for any map, including ones that merge elements"""
    assert image(RELABEL.get, a + b) == image(RELABEL.get, a) + image(RELABEL.get, b)
    assert image(str.upper, a + b) == image(str.upper, a) + image(str.upper, b)

# Multiset algebra used for markings, steps, pre/postsets and label counting
from collections import Counter
from collections.abc import Mapping
from typing import Any, Callable, Dict, Generic, Hashable, Iterable, Iterator, Optional, Tuple, TypeVar

from net_errors import MultisetOverflowError

X = TypeVar("X", bound=Hashable)
Y = TypeVar("Y", bound=Hashable)

# Counts above this bound are rejected instead of growing silently
MAX_COUNT = 2 ** 63 - 1


def _sort_key(element: Any) -> Tuple[int, int, str]:
    # integers numerically first, everything else lexicographically
    if isinstance(element, int) and not isinstance(element, bool):
        return (0, element, "")
    return (1, 0, str(element))


def _checked(count: int) -> int:
    if count > MAX_COUNT:
        raise MultisetOverflowError(f"multiset count {count} exceeds {MAX_COUNT}")
    return count


class Multiset(Mapping, Generic[X]):
    """Immutable sparse multiset: absent elements have count 0.

    Extensionally equivalent multisets over different domains compare equal,
    since only positive counts are stored.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, entries: Optional[Any] = None):
        counts: Dict[X, int] = {}
        if entries is None:
            pass
        elif isinstance(entries, Multiset):
            counts = dict(entries._counts)
        elif isinstance(entries, Mapping):
            for element, count in entries.items():
                if not isinstance(count, int) or isinstance(count, bool):
                    raise TypeError(f"count of {element!r} must be an integer, got {count!r}")
                if count < 0:
                    raise ValueError(f"count of {element!r} is negative: {count}")
                if count:
                    counts[element] = _checked(count)
        else:
            counts = {element: _checked(count) for element, count in Counter(entries).items()}
        self._counts = counts
        self._hash = None

    @classmethod
    def _raw(cls, counts: Dict[X, int]) -> "Multiset[X]":
        ms = cls.__new__(cls)
        ms._counts = {element: _checked(count) for element, count in counts.items() if count > 0}
        ms._hash = None
        return ms

    # Mapping protocol: iteration over distinct elements, lookup of counts
    def __getitem__(self, element: X) -> int:
        return self._counts.get(element, 0)

    def __iter__(self) -> Iterator[X]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, element: object) -> bool:
        return element in self._counts

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self == Multiset(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._counts)

    @property
    def cardinality(self) -> int:
        """|A|, the sum of all counts"""
        return sum(self._counts.values())

    def elements(self) -> Iterator[X]:
        """Each element repeated by its count, in sorted order"""
        for element in self.sorted_keys():
            for _ in range(self._counts[element]):
                yield element

    def sorted_keys(self):
        return sorted(self._counts, key=_sort_key)

    def items_sorted(self) -> Iterable[Tuple[X, int]]:
        return [(element, self._counts[element]) for element in self.sorted_keys()]

    # multiset algebra
    def union(self, other: "Multiset[X]") -> "Multiset[X]":
        keys = set(self._counts) | set(other)
        return Multiset._raw({k: max(self[k], other[k]) for k in keys})

    def intersection(self, other: "Multiset[X]") -> "Multiset[X]":
        keys = set(self._counts) & set(other)
        return Multiset._raw({k: min(self[k], other[k]) for k in keys})

    def sum(self, other: "Multiset[X]") -> "Multiset[X]":
        counts = dict(self._counts)
        for k in other:
            counts[k] = counts.get(k, 0) + other[k]
        return Multiset._raw(counts)

    def difference(self, other: "Multiset[X]") -> "Multiset[X]":
        return Multiset._raw({k: c - other[k] for k, c in self._counts.items()})

    def scale(self, k: int) -> "Multiset[X]":
        if k < 0:
            raise ValueError("scale factor must be nonnegative")
        return Multiset._raw({e: k * c for e, c in self._counts.items()})

    def image(self, pi: Callable[[X], Y]) -> "Multiset[Y]":
        counts: Dict[Y, int] = {}
        for element, count in self._counts.items():
            target = pi(element)
            counts[target] = counts.get(target, 0) + count
        return Multiset._raw(counts)

    def leq(self, other: "Multiset[X]") -> bool:
        return all(count <= other[element] for element, count in self._counts.items())

    def restrict(self, subset: Iterable[X]) -> "Multiset[X]":
        keep = set(subset)
        return Multiset._raw({e: c for e, c in self._counts.items() if e in keep})

    # operator sugar
    __or__ = union
    __and__ = intersection
    __add__ = sum
    __sub__ = difference
    __le__ = leq

    def __rmul__(self, k: int) -> "Multiset[X]":
        return self.scale(k)

    def __ge__(self, other: "Multiset[X]") -> bool:
        return other.leq(self)

    def to_dict(self) -> Dict[str, int]:
        return {str(e): c for e, c in self.items_sorted()}

    def __str__(self) -> str:
        body = ", ".join(f"{e}:{c}" for e, c in self.items_sorted())
        return "{" + body + "}" if body else "∅"

    def __repr__(self) -> str:
        return f"Multiset({self})"


EMPTY: Multiset = Multiset()


def combine(a: Multiset, b: Multiset, kind: str) -> Multiset:
    """Pointwise union (max), intersection (min) or sum"""
    if kind == "union":
        return a.union(b)
    if kind == "intersection":
        return a.intersection(b)
    if kind == "sum":
        return a.sum(b)
    raise ValueError(f"unknown combine kind: {kind!r}")


def difference(a: Multiset, b: Multiset) -> Multiset:
    return a.difference(b)


def scale(k: int, a: Multiset) -> Multiset:
    return a.scale(k)


def image(pi: Callable, a: Multiset) -> Multiset:
    return a.image(pi)


def leq(a: Multiset, b: Multiset) -> bool:
    return a.leq(b)


def restrict(a: Multiset, subset: Iterable) -> Multiset:
    return a.restrict(subset)


def msum(parts: Iterable[Multiset]) -> Multiset:
    total: Dict[Any, int] = {}
    for part in parts:
        for element in part:
            total[element] = total.get(element, 0) + part[element]
    return Multiset._raw(total)

"""Feature algebra: attribute/value pairs, consistent feature sets and clashes.

Attributes and values are plain string tokens.  The token ``"?"`` is the
reserved unknown marker; it is an ordinary value as far as equality goes, so
``[a,?]`` clashes with ``[a,v]`` for every known ``v``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from typing import NamedTuple, Union

UNKNOWN = "?"

_BAD_TOKEN = re.compile(r"[\s={}:#]")


class FeatureError(ValueError):
    """Raised for malformed tokens or internally inconsistent feature sets."""


def check_token(token: str, what: str = "token") -> str:
    if not isinstance(token, str) or not token:
        raise FeatureError(f"{what} must be a nonempty string, got {token!r}")
    if _BAD_TOKEN.search(token):
        raise FeatureError(f"{what} {token!r} contains whitespace or one of '=', '{{', '}}', ':', '#'")
    return token


class Feature(NamedTuple):
    attribute: str
    value: str

    @property
    def known(self) -> bool:
        return self.value != UNKNOWN

    def clashes_with(self, other: Feature) -> bool:
        return self.attribute == other.attribute and self.value != other.value

    def __str__(self) -> str:
        return f"[{self.attribute},{self.value}]"


class FeatureSet:
    """An immutable, internally consistent set of features.

    Iteration yields :class:`Feature` objects in insertion order; equality and
    hashing ignore order.
    """

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Iterable[Feature | tuple[str, str]] = ()):
        table: dict[str, str] = {}
        for attribute, value in entries:
            check_token(attribute, "attribute")
            check_token(value, "value")
            seen = table.get(attribute)
            if seen is not None and seen != value:
                raise FeatureError(
                    f"attribute {attribute!r} has conflicting values {seen!r} and {value!r}"
                )
            table[attribute] = value
        self._entries = table
        self._hash: int | None = None

    @classmethod
    def _trusted(cls, table: dict[str, str]) -> FeatureSet:
        fs = cls.__new__(cls)
        fs._entries = table
        fs._hash = None
        return fs

    def __iter__(self) -> Iterator[Feature]:
        return (Feature(a, v) for a, v in self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, feature: object) -> bool:
        if not isinstance(feature, tuple) or len(feature) != 2:
            return False
        return self._entries.get(feature[0]) == feature[1]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FeatureSet):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    def __repr__(self) -> str:
        return "FeatureSet({" + "".join(str(f) for f in self) + "})"

    def __str__(self) -> str:
        return "{" + "".join(str(f) for f in self) + "}"

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def value(self, attribute: str) -> str | None:
        """The value for ``attribute``, or None when the attribute is absent."""
        return self._entries.get(attribute)

    def as_dict(self) -> dict[str, str]:
        return dict(self._entries)

    def known(self) -> FeatureSet:
        return FeatureSet._trusted({a: v for a, v in self._entries.items() if v != UNKNOWN})


class ObjectSpec:
    """The complete feature set F of an object being inserted.

    Only the explicit features are stored; every other attribute has the
    value ``"?"``.  ``universe`` records the attributes over which F is
    considered when it is listed in full.
    """

    __slots__ = ("name", "explicit", "universe")

    def __init__(self, name: str, explicit: FeatureSet, universe: Iterable[str]):
        self.name = check_token(name, "object name")
        self.explicit = explicit
        self.universe = frozenset(universe)
        outside = [a for a in explicit.attributes if a not in self.universe]
        if outside:
            raise FeatureError(f"attribute {outside[0]!r} of {name!r} is outside the attribute universe")

    def value(self, attribute: str) -> str:
        v = self.explicit.value(attribute)
        return UNKNOWN if v is None else v

    def feature(self, attribute: str) -> Feature:
        return Feature(attribute, self.value(attribute))

    def known(self) -> FeatureSet:
        """F_non-?: the features with a value other than ``"?"``."""
        return self.explicit.known()

    def complete(self) -> FeatureSet:
        """F listed in full over the universe (sorted attributes after the explicit ones)."""
        table = self.explicit.as_dict()
        for attribute in sorted(self.universe):
            table.setdefault(attribute, UNKNOWN)
        return FeatureSet._trusted(table)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ObjectSpec):
            return (self.name, self.explicit, self.universe) == (other.name, other.explicit, other.universe)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.name, self.explicit, self.universe))

    def __repr__(self) -> str:
        return f"ObjectSpec({self.name!r}, {self.explicit!r}, |universe|={len(self.universe)})"


def validate_consistent(entries: Iterable[Feature | tuple[str, str]]) -> FeatureSet:
    """Build a FeatureSet, merging identical duplicates.

    Raises FeatureError naming the attribute and both values when the same
    attribute is given two different values.
    """
    return FeatureSet(entries)


def complete(explicit: FeatureSet, universe: Iterable[str], name: str = "object") -> ObjectSpec:
    return ObjectSpec(name, explicit, universe)


FeatureSource = Union[FeatureSet, ObjectSpec]


def clash(a: FeatureSource, b: Iterable[Feature]) -> FeatureSet:
    """The features of ``a`` whose attribute occurs in ``b`` with a different value.

    ``b`` may be any iterable of features, including the union of several
    feature sets that disagree among themselves; a feature of ``a`` clashes
    as soon as one of ``b``'s values for its attribute differs.  When ``a`` is
    an :class:`ObjectSpec` its implicit ``?``-features take part.
    """
    offered: dict[str, set[str]] = {}
    for attribute, value in b:
        offered.setdefault(attribute, set()).add(value)
    if not offered:
        return FeatureSet()
    out: dict[str, str] = {}
    if isinstance(a, ObjectSpec):
        for attribute, value in a.explicit._entries.items():
            values = offered.get(attribute)
            if values and (len(values) > 1 or value not in values):
                out[attribute] = value
        for attribute, values in offered.items():
            if attribute not in a.explicit._entries and values != {UNKNOWN}:
                out[attribute] = UNKNOWN
    else:
        for attribute, value in a._entries.items():
            values = offered.get(attribute)
            if values and (len(values) > 1 or value not in values):
                out[attribute] = value
    return FeatureSet._trusted(out)


def union(sets: Iterable[Iterable[Feature]]) -> list[Feature]:
    """Flatten feature sets into one list; the result may be inconsistent."""
    return [f for s in sets for f in s]

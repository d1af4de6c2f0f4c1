"""Default multiple-inheritance hierarchies and their compiled-out form.

Compiling out pushes every feature down the inheritance links so that each
class is just the set of features an object could inherit from it.  The
insertion engines only ever see that compiled form (a :class:`CompiledSet`).
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .features import UNKNOWN, Feature, FeatureError, FeatureSet, ObjectSpec, check_token


class HierarchyError(ValueError):
    """Compilation was asked of an invalid hierarchy; carries the report."""

    def __init__(self, report: ValidationReport):
        super().__init__("invalid hierarchy:\n  " + "\n  ".join(report.messages()))
        self.report = report


@dataclass(frozen=True)
class ClassDecl:
    name: str
    parents: tuple[str, ...] = ()
    local: FeatureSet = field(default_factory=FeatureSet)

    def __post_init__(self) -> None:
        check_token(self.name, "class name")
        object.__setattr__(self, "parents", tuple(self.parents))
        for f in self.local:
            if f.value == UNKNOWN:
                raise FeatureError(f"class {self.name!r} declares [{f.attribute},?]; only objects may use '?'")


@dataclass(frozen=True)
class Hierarchy:
    """Classes in declaration order, which is also the canonical tie-break order."""

    classes: tuple[ClassDecl, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))
        seen: set[str] = set()
        for c in self.classes:
            if c.name in seen:
                raise FeatureError(f"duplicate class name {c.name!r}")
            seen.add(c.name)

    def __iter__(self) -> Iterator[ClassDecl]:
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def get(self, name: str) -> ClassDecl | None:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def attributes(self) -> set[str]:
        return {f.attribute for c in self.classes for f in c.local}


@dataclass(frozen=True)
class Ambiguity:
    cls: str
    attribute: str
    offers: tuple[tuple[str, str], ...]  # (parent, value)

    def __str__(self) -> str:
        offers = ", ".join(f"{p} gives {v}" for p, v in self.offers)
        return f"ambiguous inheritance at {self.cls} on attribute {self.attribute}: {offers}"


@dataclass(frozen=True)
class ValidationReport:
    cycles: tuple[tuple[str, ...], ...] = ()
    unresolved: tuple[tuple[str, str], ...] = ()  # (class, missing parent)
    ambiguities: tuple[Ambiguity, ...] = ()

    @property
    def ok(self) -> bool:
        return not (self.cycles or self.unresolved or self.ambiguities)

    def messages(self) -> list[str]:
        out = [f"inheritance cycle: {' -> '.join(c + (c[0],))}" for c in self.cycles]
        out += [f"class {c} has undeclared parent {p}" for c, p in self.unresolved]
        out += [str(a) for a in self.ambiguities]
        return out


class Origin(enum.Enum):
    REGULAR = "regular"
    SINGLETON = "singleton"


@dataclass(frozen=True, eq=True)
class CompiledClass:
    name: str
    features: FeatureSet
    weights: Mapping[str, Fraction] | None = None
    origin: Origin = Origin.REGULAR

    def __post_init__(self) -> None:
        if self.origin is Origin.SINGLETON:
            if len(self.features) != 1 or not next(iter(self.features)).known:
                raise FeatureError(f"singleton {self.name!r} must offer exactly one known feature")
        if self.weights is not None and set(self.weights) != set(self.features.attributes):
            raise FeatureError(f"weights of {self.name!r} do not match its features")

    @property
    def singleton(self) -> bool:
        return self.origin is Origin.SINGLETON

    def weight(self, attribute: str) -> Fraction:
        if self.weights is None:
            return Fraction(1)
        return self.weights[attribute]


@dataclass(frozen=True)
class CompiledSet:
    """The set of sets N, in a fixed order: regular classes then singletons."""

    classes: tuple[CompiledClass, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))

    def __iter__(self) -> Iterator[CompiledClass]:
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, name: str) -> CompiledClass:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(c.name == name for c in self.classes)

    @property
    def weighted(self) -> bool:
        return any(c.weights is not None for c in self.classes)

    def regular(self) -> list[CompiledClass]:
        return [c for c in self.classes if not c.singleton]

    def singletons(self) -> list[CompiledClass]:
        return [c for c in self.classes if c.singleton]


def _topological(h: Hierarchy) -> tuple[list[str], list[tuple[str, ...]]]:
    """Parents-first order of the classes that are not on or under a cycle, plus the cycles."""
    names = {c.name for c in h}
    order: list[str] = []
    cycles: list[tuple[str, ...]] = []
    state: dict[str, int] = {}  # 1 = on stack, 2 = done, 3 = tainted by a cycle

    def visit(name: str, stack: list[str]) -> bool:
        st = state.get(name)
        if st == 2:
            return True
        if st == 3:
            return False
        if st == 1:
            cycle = tuple(stack[stack.index(name):])
            if cycle not in cycles:
                cycles.append(cycle)
            return False
        state[name] = 1
        stack.append(name)
        good = True
        for p in h.get(name).parents:
            if p in names and not visit(p, stack):
                good = False
        stack.pop()
        state[name] = 2 if good else 3
        if good:
            order.append(name)
        return good

    for c in h:
        visit(c.name, [])
    return order, cycles


@dataclass
class _Compiled:
    features: dict[str, str]
    distance: dict[str, int]  # links traversed from the declaring class


def _compile(h: Hierarchy) -> tuple[dict[str, _Compiled], ValidationReport]:
    order, cycles = _topological(h)
    names = {c.name for c in h}
    unresolved = tuple((c.name, p) for c in h for p in c.parents if p not in names)
    ambiguities: list[Ambiguity] = []
    done: dict[str, _Compiled] = {}
    for name in order:
        decl = h.get(name)
        local = decl.local.as_dict()
        offers: dict[str, list[tuple[str, str, int]]] = {}
        for p in decl.parents:
            if p not in done:
                continue
            pc = done[p]
            for a, v in pc.features.items():
                offers.setdefault(a, []).append((p, v, pc.distance[a] + 1))
        features: dict[str, str] = {}
        distance: dict[str, int] = {}
        for a, offered in offers.items():
            if a in local:
                continue
            values = {v for _, v, _ in offered}
            if len(values) > 1:
                ambiguities.append(Ambiguity(name, a, tuple((p, v) for p, v, _ in offered)))
            # first parent wins for the provisional compile used by validation
            features[a] = offered[0][1]
            distance[a] = min(d for _, v, d in offered if v == offered[0][1])
        for a, v in local.items():
            features[a] = v
            distance[a] = 0
        done[name] = _Compiled(features, distance)
    report = ValidationReport(tuple(cycles), unresolved, tuple(ambiguities))
    return done, report


def validate(h: Hierarchy) -> ValidationReport:
    return _compile(h)[1]


def max_depth(h: Hierarchy) -> int:
    """Length in links of the longest upward inheritance chain."""
    order, _ = _topological(h)
    depth: dict[str, int] = {}
    for name in order:
        parents = [depth[p] + 1 for p in h.get(name).parents if p in depth]
        depth[name] = max(parents, default=0)
    return max(depth.values(), default=0)


def default_epsilon(h: Hierarchy) -> Fraction:
    return Fraction(1, 16 * (1 + max_depth(h)))


def compile_out(h: Hierarchy) -> CompiledSet:
    """Compile ``h`` into N; raises HierarchyError unless ``validate(h)`` is empty."""
    done, report = _compile(h)
    if not report.ok:
        raise HierarchyError(report)
    return CompiledSet(
        CompiledClass(c.name, FeatureSet._trusted(done[c.name].features)) for c in h
    )


def compile_out_weighted(h: Hierarchy, epsilon: Fraction | None = None) -> CompiledSet:
    """Compile with per-feature weights 1 + epsilon * (links the feature travelled).

    When a feature reaches a class along several paths, the shortest one
    counts.  ``epsilon`` defaults to ``1 / (16 * (1 + max depth))`` and must
    satisfy ``max_depth * epsilon < 1``.
    """
    done, report = _compile(h)
    if not report.ok:
        raise HierarchyError(report)
    depth = max_depth(h)
    if epsilon is None:
        epsilon = default_epsilon(h)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if depth * epsilon >= 1:
        raise ValueError(
            f"epsilon {epsilon} too large for inheritance depth {depth}: need epsilon < {Fraction(1, depth)}"
        )
    out = []
    for c in h:
        comp = done[c.name]
        weights = {a: 1 + epsilon * comp.distance[a] for a in comp.features}
        out.append(CompiledClass(c.name, FeatureSet._trusted(comp.features), weights))
    return CompiledSet(out)


def singleton_name(attribute: str) -> str:
    return f"$single({attribute})"


def augment_singletons(n: CompiledSet, f: ObjectSpec) -> CompiledSet:
    """Append one singleton class per known feature of ``f`` (attribute order).

    Singletons already present for the same feature are reused.  A singleton
    of the same name offering a different value is an error.
    """
    present = {next(iter(c.features)) for c in n.singletons()}
    names = {c.name for c in n}
    weighted = n.weighted
    extra = []
    for attribute in sorted(f.known().attributes):
        feat = Feature(attribute, f.value(attribute))
        if feat in present:
            continue
        name = singleton_name(attribute)
        if name in names:
            raise FeatureError(f"{name} already exists with a different value than {feat}")
        weights = {attribute: Fraction(1)} if weighted else None
        extra.append(CompiledClass(name, FeatureSet([feat]), weights, Origin.SINGLETON))
    if not extra:
        return n
    return CompiledSet(n.classes + tuple(extra))


def build(decls: Iterable[tuple[str, Iterable[str], Iterable[tuple[str, str]]]]) -> Hierarchy:
    """Convenience constructor from ``(name, parents, features)`` triples."""
    return Hierarchy(tuple(ClassDecl(name, tuple(parents), FeatureSet(feats)) for name, parents, feats in decls))

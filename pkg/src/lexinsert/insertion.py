"""Insertion engines: Greedy-IN, an exhaustive optimum, pruning and checks.

An insertion of object F into compiled classes N picks parents P and lists
locally the blockers ``clash(F, U P)``.  Its cost is ``|P| + |clash(F, U P)|``.
Singleton classes stand in for features that are simply listed, so every
valid result is complete: each known feature of F is inherited or blocked.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .features import UNKNOWN, Feature, FeatureSet, ObjectSpec, clash, union
from .hierarchy import CompiledClass, CompiledSet

Payoff = Union[int, Fraction]

RUNNERS_UP = 5


class GuardError(ValueError):
    """The exhaustive solver refused an instance that is too large."""

    def __init__(self, count: int, limit: int):
        super().__init__(f"{count} regular classes exceed the exhaustive-search limit of {limit}")
        self.count = count
        self.limit = limit


class NixonDiamond(ValueError):
    """An entry inherits conflicting values for one attribute without blocking it."""

    def __init__(self, attribute: str, values: Sequence[str], parents: Sequence[str]):
        super().__init__(
            f"Nixon diamond on {attribute}: parents {', '.join(parents)} offer values {', '.join(values)}"
        )
        self.attribute = attribute
        self.values = tuple(values)
        self.parents = tuple(parents)


@dataclass(frozen=True)
class IterationRecord:
    chosen: str
    payoff: Payoff
    covered_now: FeatureSet
    new_clashes: FeatureSet
    runners_up: tuple[tuple[str, Payoff], ...] = ()


@dataclass(frozen=True)
class InsertionResult:
    object: str
    parents: tuple[str, ...]
    local: FeatureSet
    trace: tuple[IterationRecord, ...] = field(default=(), compare=True)

    @property
    def cost(self) -> int:
        return len(self.parents) + len(self.local)


def _classes(n: CompiledSet, names: Iterable[str]) -> list[CompiledClass]:
    return [n[name] for name in names]


def cost(parents: Iterable[CompiledClass], f: ObjectSpec) -> int:
    """``|P| + |clash(F, U P)|``; the parents may disagree among themselves."""
    parents = list(parents)
    return len(parents) + len(clash(f, union(p.features for p in parents)))


def payoff(s: CompiledClass, f: ObjectSpec, f_temp: FeatureSet, f_clash: FeatureSet) -> Payoff:
    """Score of adding ``s``: coverage of ``f_temp`` minus newly created clashes.

    Coverage is weighted when ``s`` carries weights; the clash penalty is
    always a plain count.
    """
    covered = [x for x in s.features if x in f_temp]
    new = [x for x in clash(f, s.features) if x not in f_clash]
    if s.weights is None:
        return len(covered) - len(new)
    return sum((s.weight(a) for a, _ in covered), Fraction(0)) - len(new)


@dataclass
class _Candidate:
    index: int
    cls: CompiledClass
    cover: frozenset[Feature]
    clashes: frozenset[Feature]
    clash_order: tuple[Feature, ...]


def greedy_insert(f: ObjectSpec, n: CompiledSet) -> InsertionResult:
    """Greedy-IN.

    Each round picks the class maximising coverage of the still-uncovered
    known features minus new clashes.  Ties go to larger coverage, then fewer
    new clashes, then regular classes over singletons, then N's order.
    ``n`` must already hold singletons for F's known features.
    """
    known = f.known()
    f_temp = set(known)
    f_clash: dict[Feature, None] = {}
    candidates = []
    for i, s in enumerate(n):
        clashes = tuple(clash(f, s.features))
        candidates.append(_Candidate(i, s, frozenset(x for x in s.features if x in known), frozenset(clashes), clashes))
    parents: list[str] = []
    trace: list[IterationRecord] = []
    while f_temp:
        scored = []
        for c in candidates:
            covered = c.cover & f_temp
            new = c.clashes.difference(f_clash)
            if c.cls.weights is None:
                gain: Payoff = len(covered)
            else:
                gain = sum((c.cls.weight(a) for a, _ in covered), Fraction(0))
            score = gain - len(new)
            key = (-score, -len(covered), len(new), c.cls.singleton, c.index)
            scored.append((key, c, covered, new, score))
        if not scored:
            raise ValueError("no candidate classes left; augment N with singletons first")
        top = heapq.nsmallest(RUNNERS_UP + 1, scored, key=lambda t: t[0])
        _, best, covered, new, score = top[0]
        removed = covered | (best.clashes & f_temp)
        if not removed:
            raise ValueError(f"no class makes progress on {sorted(f_temp)}; augment N with singletons first")
        f_temp -= removed
        new_ordered = [x for x in best.clash_order if x in new]
        for x in new_ordered:
            f_clash[x] = None
        parents.append(best.cls.name)
        candidates.remove(best)
        trace.append(
            IterationRecord(
                chosen=best.cls.name,
                payoff=score,
                covered_now=FeatureSet(x for x in best.cls.features if x in covered),
                new_clashes=FeatureSet(new_ordered),
                runners_up=tuple((t[1].cls.name, t[4]) for t in top[1:]),
            )
        )
    return InsertionResult(f.name, tuple(parents), FeatureSet(f_clash), tuple(trace))


def exact_insert(f: ObjectSpec, n: CompiledSet, max_regular: int = 20) -> InsertionResult:
    """Minimum-cost insertion by exhaustive search over the regular classes.

    Each subset Q of regular classes is closed with singletons for the known
    features it neither covers nor clashes with.  Ties prefer fewer parents,
    then the lexicographically smaller parent-name list.
    """
    regular = n.regular()
    if len(regular) > max_regular:
        raise GuardError(len(regular), max_regular)
    known = list(f.known())
    singleton_for: dict[Feature, str] = {next(iter(s.features)): s.name for s in n.singletons()}
    missing = [x for x in known if x not in singleton_for]
    if missing:
        raise ValueError(f"N lacks singletons for {', '.join(map(str, missing))}; augment N first")

    bit: dict[Feature, int] = {x: 1 << i for i, x in enumerate(known)}
    known_mask = (1 << len(known)) - 1
    cover_masks: list[int] = []
    clash_masks: list[int] = []
    for s in regular:
        cover_masks.append(sum(bit[x] for x in s.features if x in bit))
        m = 0
        for x in clash(f, s.features):
            if x not in bit:
                bit[x] = 1 << len(bit)
            m |= bit[x]
        clash_masks.append(m)
    singles_by_bit = [singleton_for[x] for x in known]
    order_of = {c.name: i for i, c in enumerate(n)}

    best_cost = len(known)  # the all-singleton solution
    best_key: tuple | None = None
    best_q: tuple[int, ...] = ()
    chosen: list[int] = []
    m = len(regular)

    def visit(i: int, cover: int, clashed: int) -> None:
        nonlocal best_cost, best_key, best_q
        residual = known_mask & ~cover & ~clashed
        lower = len(chosen) + clashed.bit_count() + (1 if residual else 0)
        if lower > best_cost:
            return
        if i == m:
            total = len(chosen) + clashed.bit_count() + residual.bit_count()
            if total > best_cost:
                return
            names = [regular[j].name for j in chosen]
            names += [singles_by_bit[b] for b in range(len(known)) if residual >> b & 1]
            names.sort(key=order_of.__getitem__)
            key = (total, len(names), tuple(names))
            if best_key is None or key < best_key:
                best_cost, best_key, best_q = total, key, tuple(chosen)
            return
        chosen.append(i)
        visit(i + 1, cover | cover_masks[i], clashed | clash_masks[i])
        chosen.pop()
        visit(i + 1, cover, clashed)

    visit(0, 0, 0)
    assert best_key is not None
    parents = best_key[2]
    local = clash(f, union(regular[j].features for j in best_q))
    return InsertionResult(f.name, parents, local)


def is_complete(f: ObjectSpec, parents: Iterable[CompiledClass], local: FeatureSet) -> bool:
    inherited = {x for p in parents for x in p.features}
    return all(x in inherited or x in local for x in f.known())


def prune_redundant(r: InsertionResult, f: ObjectSpec, n: CompiledSet) -> InsertionResult:
    """Drop parents whose removal keeps the entry complete without raising its cost."""
    parents = list(r.parents)
    local = r.local
    changed = True
    while changed:
        changed = False
        for name in parents:
            rest = [p for p in parents if p != name]
            classes = _classes(n, rest)
            rest_local = clash(f, union(c.features for c in classes))
            if is_complete(f, classes, rest_local) and len(rest) + len(rest_local) <= len(parents) + len(local):
                parents, local = rest, rest_local
                changed = True
                break
    if parents == list(r.parents):
        return r
    return InsertionResult(r.object, tuple(parents), local, r.trace)


def effective_features(r: InsertionResult, f: ObjectSpec, n: CompiledSet) -> FeatureSet:
    """What the entry actually ends up with after inheritance and blocking.

    Local blockers win; otherwise an attribute takes the single value its
    parents offer.  Conflicting unblocked offers raise :class:`NixonDiamond`.
    Attributes that appear nowhere are Unknown and are left out.
    """
    out = r.local.as_dict()
    offers: dict[str, dict[str, list[str]]] = {}
    for name in r.parents:
        for a, v in n[name].features:
            offers.setdefault(a, {}).setdefault(v, []).append(name)
    for a, by_value in offers.items():
        if a in out:
            continue
        if len(by_value) > 1:
            parents = [p for ps in by_value.values() for p in ps]
            raise NixonDiamond(a, list(by_value), parents)
        out[a] = next(iter(by_value))
    return FeatureSet(out.items())


def check_result(r: InsertionResult, f: ObjectSpec, n: CompiledSet) -> list[str]:
    """Invariant violations of ``r`` as an entry for ``f``; empty when sound and cautious."""
    problems = []
    classes = _classes(n, r.parents)
    expected_local = clash(f, union(c.features for c in classes))
    if r.local != expected_local:
        problems.append(f"local {r.local} differs from clash(F, U P) = {expected_local}")
    if not is_complete(f, classes, r.local):
        problems.append("some known feature of F is neither inherited nor listed")
    if r.cost != cost(classes, f):
        problems.append(f"cost {r.cost} differs from recomputed {cost(classes, f)}")
    try:
        eff = effective_features(r, f, n)
    except NixonDiamond as exc:
        problems.append(str(exc))
        return problems
    for x in f.known():
        if eff.value(x.attribute) != x.value:
            problems.append(f"known feature {x} ends up as {eff.value(x.attribute)!r}")
    for x in eff:
        if x.known and f.value(x.attribute) == UNKNOWN:
            problems.append(f"unknown attribute {x.attribute} is effectively {x.value}")
    return problems

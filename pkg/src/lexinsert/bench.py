"""Random instances and the greedy-vs-optimal ratio harness."""

from __future__ import annotations

import csv
import math
import random
import statistics
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO

from .features import FeatureSet, ObjectSpec
from .hierarchy import CompiledClass, CompiledSet, augment_singletons
from .insertion import GuardError, exact_insert, greedy_insert, prune_redundant

PRESETS = ("uniform", "clashfree", "staircase")

CSV_COLUMNS = (
    "instance_id",
    "seed",
    "n_attrs",
    "n_regular",
    "f_known",
    "greedy_cost",
    "pruned_cost",
    "exact_cost",
    "ratio",
    "iterations",
    "greedy_micros",
    "exact_micros",
    "bound",
    "violation",
)


@dataclass(frozen=True)
class InstanceParams:
    n_attributes: int = 20
    n_values_per_attribute: int = 3
    n_regular_classes: int = 10
    class_size_range: tuple[int, int] = (2, 6)
    object_known_count: int = 12
    clash_density: float = 0.0
    seed: int = 0
    preset: str = "uniform"
    # staircase: number of blocks (sizes 2, 4, ..., 2**blocks)
    blocks: int = 4
    # extra class pairs that disagree on one attribute, Nixon style
    nixon_pairs: int = 0

    @property
    def clash_free(self) -> bool:
        return self.preset in ("clashfree", "staircase") or (self.clash_density == 0 and self.nixon_pairs == 0)


def _check(p: InstanceParams) -> None:
    if p.preset not in PRESETS:
        raise ValueError(f"unknown preset {p.preset!r}; expected one of {', '.join(PRESETS)}")
    if p.preset == "staircase":
        if p.blocks < 1:
            raise ValueError("staircase needs at least one block")
        return
    lo, hi = p.class_size_range
    if p.n_attributes < 1 or p.n_values_per_attribute < 1 or p.n_regular_classes < 0:
        raise ValueError("n_attributes and n_values_per_attribute must be >= 1, n_regular_classes >= 0")
    if not 0 <= lo <= hi:
        raise ValueError(f"bad class_size_range {p.class_size_range}")
    if not 0 <= p.object_known_count <= p.n_attributes:
        raise ValueError(f"object_known_count {p.object_known_count} outside [0, {p.n_attributes}]")
    if not 0 <= p.clash_density <= 1:
        raise ValueError(f"clash_density {p.clash_density} outside [0, 1]")
    pool = p.object_known_count if p.preset == "clashfree" or p.clash_density == 0 else p.n_attributes
    if hi > pool:
        raise ValueError(f"class size up to {hi} but only {pool} attributes are available to classes")
    if (p.clash_density > 0 or p.nixon_pairs) and p.n_values_per_attribute < 2:
        raise ValueError("clashes need at least two values per attribute")


def _staircase(p: InstanceParams, rng: random.Random) -> tuple[ObjectSpec, CompiledSet]:
    half = 2**p.blocks - 1
    attrs = [f"s{i}" for i in range(2 * half)]
    values = {a: f"v{rng.randrange(max(p.n_values_per_attribute, 1))}" for a in attrs}
    top, bottom = attrs[:half], attrs[half:]
    classes = [("ROW1", top), ("ROW2", bottom)]
    start = 0
    for b in range(1, p.blocks + 1):
        width = 2 ** (b - 1)
        classes.append((f"BLOCK{b}", top[start:start + width] + bottom[start:start + width]))
        start += width
    rng.shuffle(classes)
    n = CompiledSet(CompiledClass(name, FeatureSet((a, values[a]) for a in members)) for name, members in classes)
    f = ObjectSpec("obj", FeatureSet((a, values[a]) for a in attrs), attrs)
    return f, augment_singletons(n, f)


def generate_instance(p: InstanceParams) -> tuple[ObjectSpec, CompiledSet]:
    """A seeded random instance ``(F, N)``; N already carries F's singletons.

    With no clash density (or the ``clashfree`` preset) classes draw only from
    F's known attributes with F's values, which makes the instance a plain
    set-cover problem.
    """
    _check(p)
    rng = random.Random(p.seed)
    if p.preset == "staircase":
        return _staircase(p, rng)
    attrs = [f"a{i}" for i in range(p.n_attributes)]
    known_attrs = rng.sample(attrs, p.object_known_count)
    f_values = {a: f"v{rng.randrange(p.n_values_per_attribute)}" for a in known_attrs}
    density = 0.0 if p.preset == "clashfree" else p.clash_density
    pool = known_attrs if density == 0 else attrs

    def other_value(a: str) -> str:
        choices = [f"v{i}" for i in range(p.n_values_per_attribute) if f"v{i}" != f_values.get(a)]
        return rng.choice(choices)

    classes = []
    lo, hi = p.class_size_range
    for i in range(p.n_regular_classes):
        feats = []
        for a in rng.sample(pool, rng.randint(lo, hi)):
            if a in f_values and rng.random() >= density:
                feats.append((a, f_values[a]))
            elif a in f_values:
                feats.append((a, other_value(a)))
            else:
                feats.append((a, f"v{rng.randrange(p.n_values_per_attribute)}"))
        classes.append(CompiledClass(f"C{i}", FeatureSet(feats)))
    for j in range(p.nixon_pairs):
        a = rng.choice(attrs)
        v1, v2 = rng.sample([f"v{i}" for i in range(p.n_values_per_attribute)], 2)
        shared = rng.sample(known_attrs, min(len(known_attrs), max(lo, 1)))
        for name, v in ((f"REP{j}", v1), (f"QUA{j}", v2)):
            feats = {x: f_values[x] for x in rng.sample(shared, rng.randint(0, len(shared)))}
            feats[a] = v
            classes.append(CompiledClass(name, FeatureSet(feats.items())))
    n = CompiledSet(classes)
    universe = {x for c in classes for x in c.features.attributes} | set(known_attrs)
    f = ObjectSpec("obj", FeatureSet(f_values.items()), universe)
    return f, augment_singletons(n, f)


@dataclass(frozen=True)
class RatioRow:
    instance_id: int
    seed: int
    n_attrs: int
    n_regular: int
    f_known: int
    greedy_cost: int
    pruned_cost: int
    exact_cost: int | None
    iterations: int
    greedy_micros: float
    exact_micros: float | None
    clash_free: bool

    @property
    def ratio(self) -> float | None:
        if self.exact_cost is None:
            return None
        if self.exact_cost == 0:
            return 1.0
        return self.greedy_cost / self.exact_cost

    @property
    def bound(self) -> float:
        return math.log(self.f_known) + 1 if self.f_known else 1.0

    @property
    def violation(self) -> bool:
        return self.clash_free and self.ratio is not None and self.ratio > self.bound


@dataclass(frozen=True)
class ScalingRow:
    f_known: int
    n_size: int
    median_micros: float
    max_iterations: int


@dataclass
class RatioReport:
    rows: list[RatioRow] = field(default_factory=list)
    scaling: list[ScalingRow] = field(default_factory=list)

    @property
    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows if r.ratio is not None]

    @property
    def max_ratio(self) -> float | None:
        return max(self.ratios, default=None)

    @property
    def mean_ratio(self) -> float | None:
        return statistics.fmean(self.ratios) if self.ratios else None

    @property
    def violations(self) -> int:
        return sum(r.violation for r in self.rows)


def run_instance(instance_id: int, p: InstanceParams, exact: bool = True, max_regular: int = 20) -> RatioRow:
    f, n = generate_instance(p)
    t0 = time.perf_counter()
    g = greedy_insert(f, n)
    greedy_micros = (time.perf_counter() - t0) * 1e6
    pruned = prune_redundant(g, f, n)
    exact_cost = exact_micros = None
    if exact:
        t0 = time.perf_counter()
        try:
            exact_cost = exact_insert(f, n, max_regular).cost
            exact_micros = (time.perf_counter() - t0) * 1e6
        except GuardError:
            pass
    return RatioRow(
        instance_id=instance_id,
        seed=p.seed,
        n_attrs=len(f.universe),
        n_regular=len(n.regular()),
        f_known=len(f.known()),
        greedy_cost=g.cost,
        pruned_cost=pruned.cost,
        exact_cost=exact_cost,
        iterations=len(g.trace),
        greedy_micros=greedy_micros,
        exact_micros=exact_micros,
        clash_free=p.clash_free,
    )


def scaling_table(
    f_sizes: list[int], n_sizes: list[int], instances: int = 5, repeats: int = 5, seed: int = 0
) -> list[ScalingRow]:
    """Median greedy wall time for each (|F_non-?|, |N|) pair.

    |N| counts singletons too, so each instance gets ``n_size - f_known``
    regular classes.  The median is taken over ``instances`` seeds times
    ``repeats`` runs each.
    """
    rows = []
    for fk in f_sizes:
        for size in n_sizes:
            times, iters, total = [], 0, 0
            for k in range(instances):
                p = InstanceParams(
                    n_attributes=2 * fk,
                    n_values_per_attribute=3,
                    n_regular_classes=max(size - fk, 0),
                    class_size_range=(1, min(fk, 8)),
                    object_known_count=fk,
                    clash_density=0.2,
                    seed=seed + k,
                )
                f, n = generate_instance(p)
                total = len(n)
                for _ in range(repeats):
                    t0 = time.perf_counter()
                    r = greedy_insert(f, n)
                    times.append((time.perf_counter() - t0) * 1e6)
                    iters = max(iters, len(r.trace))
            rows.append(ScalingRow(fk, total, statistics.median(times), iters))
    return rows


def measure(
    params_sweep: list[InstanceParams],
    trials: int,
    exact: bool = True,
    max_regular: int = 20,
    scaling: bool = False,
) -> RatioReport:
    """Run greedy, pruning and (when allowed) the exhaustive solver on each trial.

    Trial ``t`` of a parameter set uses seed ``params.seed + t``.
    """
    report = RatioReport()
    instance_id = 0
    for params in params_sweep:
        for t in range(trials):
            report.rows.append(run_instance(instance_id, replace(params, seed=params.seed + t), exact, max_regular))
            instance_id += 1
    if scaling:
        base = params_sweep[0].seed if params_sweep else 0
        report.scaling = scaling_table([16], [200, 400, 800], seed=base) + scaling_table([8, 16, 32], [400], seed=base)
    return report


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def write_csv(report: RatioReport, out: IO[str] | str | Path, timing: bool = True) -> None:
    """Write the per-instance rows; timing cells are left blank when ``timing`` is off."""
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write_csv(report, fh, timing)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow(
            [
                r.instance_id,
                r.seed,
                r.n_attrs,
                r.n_regular,
                r.f_known,
                r.greedy_cost,
                r.pruned_cost,
                "" if r.exact_cost is None else r.exact_cost,
                _fmt(r.ratio),
                r.iterations,
                f"{r.greedy_micros:.0f}" if timing else "",
                f"{r.exact_micros:.0f}" if timing and r.exact_micros is not None else "",
                _fmt(r.bound),
                int(r.violation),
            ]
        )

from __future__ import annotations

import io
import math

import pytest

from lexinsert.bench import CSV_COLUMNS, InstanceParams, generate_instance, measure, run_instance, write_csv
from lexinsert.features import clash, union
from lexinsert.insertion import exact_insert, greedy_insert


def test_no_regular_classes_means_all_singletons():
    f, n = generate_instance(InstanceParams(n_regular_classes=0, object_known_count=7, seed=3))
    assert n.regular() == []
    assert greedy_insert(f, n).cost == len(f.known()) == 7


def test_same_seed_same_instance():
    p = InstanceParams(clash_density=0.3, seed=42)
    assert generate_instance(p) == generate_instance(p)
    assert generate_instance(p) != generate_instance(InstanceParams(clash_density=0.3, seed=43))


def test_clash_free_optimum_has_no_blockers():
    for seed in range(100):
        f, n = generate_instance(InstanceParams(preset="clashfree", n_regular_classes=8, seed=seed))
        r = exact_insert(f, n)
        assert len(r.local) == 0
        regs = [n[p] for p in r.parents]
        assert len(clash(f, union(c.features for c in regs))) == 0


@pytest.mark.parametrize(
    "params",
    [
        InstanceParams(class_size_range=(2, 30), n_attributes=20, clash_density=0.5),
        InstanceParams(class_size_range=(2, 13), object_known_count=12),
        InstanceParams(object_known_count=30, n_attributes=20),
        InstanceParams(clash_density=0.5, n_values_per_attribute=1),
        InstanceParams(preset="nope"),
    ],
)
def test_unsatisfiable_params_rejected(params):
    with pytest.raises(ValueError):
        generate_instance(params)


def test_perfect_cover_ratio_one():
    p = InstanceParams(
        preset="clashfree", n_regular_classes=1, class_size_range=(5, 5), object_known_count=5, n_attributes=5
    )
    row = run_instance(0, p)
    assert row.greedy_cost == row.exact_cost == 1
    assert row.ratio == 1.0


def test_clash_free_sweep_has_no_violations():
    p = InstanceParams(preset="clashfree", n_regular_classes=10, object_known_count=12, class_size_range=(2, 6))
    report = measure([p], 200)
    assert len(report.rows) == 200
    assert report.violations == 0
    for r in report.rows:
        assert 1 <= r.ratio <= r.bound
        assert r.greedy_cost >= r.pruned_cost >= r.exact_cost
        assert r.iterations <= r.f_known


@pytest.mark.parametrize("blocks,ratio", [(2, 1.0), (3, 1.5), (4, 2.0), (5, 2.5)])
def test_staircase(blocks, ratio):
    p = InstanceParams(preset="staircase", blocks=blocks, seed=blocks)
    f, n = generate_instance(p)
    assert len(f.known()) == 2 * (2**blocks - 1)
    row = run_instance(0, p)
    assert row.exact_cost == 2
    assert row.greedy_cost == blocks
    assert row.ratio == ratio
    assert row.ratio <= math.log(row.f_known) + 1


def test_staircase_greedy_takes_blocks_largest_first():
    f, n = generate_instance(InstanceParams(preset="staircase", blocks=4, seed=0))
    r = greedy_insert(f, n)
    assert r.parents == ("BLOCK4", "BLOCK3", "BLOCK2", "BLOCK1")
    assert sorted(exact_insert(f, n).parents) == ["ROW1", "ROW2"]


def test_guard_marks_exact_skipped():
    row = run_instance(0, InstanceParams(n_regular_classes=6, clash_density=0.2), max_regular=5)
    assert row.exact_cost is None and row.ratio is None


def test_csv_columns_and_determinism():
    sweep = [InstanceParams(clash_density=0.2, seed=7), InstanceParams(preset="staircase")]
    out1, out2 = io.StringIO(), io.StringIO()
    write_csv(measure(sweep, 3), out1, timing=False)
    write_csv(measure(sweep, 3), out2, timing=False)
    assert out1.getvalue() == out2.getvalue()
    lines = out1.getvalue().splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 7


def test_nixon_pairs_generated():
    f, n = generate_instance(InstanceParams(nixon_pairs=2, clash_density=0.1, seed=1))
    names = [c.name for c in n.regular()]
    assert {"REP0", "QUA0", "REP1", "QUA1"} <= set(names)
    a = [x.attribute for x in n["REP0"].features if n["QUA0"].features.value(x.attribute) not in (None, x.value)]
    assert len(a) == 1


def test_scaling_rows():
    report = measure([InstanceParams(seed=1)], 1, scaling=True)
    sizes = [(r.f_known, r.n_size) for r in report.scaling]
    assert (16, 200) in sizes and (16, 800) in sizes and (32, 400) in sizes
    assert all(r.max_iterations <= r.f_known for r in report.scaling)

#!/usr/bin/env python3
"""Scale stress over seeded random systems, larger than the test battery.

Generates layered DAG systems of up to six models, solves every final
output under all three criteria, and reports how much work reachability
pruning saves plus solver/oracle agreement where the oracle bounds allow.

Usage: python scripts/stress_random_systems.py [n_seeds]
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from holex import (
    Model,
    MultiModelSystem,
    OracleScaleError,
    ProbEntry,
    build_constraints,
    check_feasible,
    compile_system,
    enumerate_vertices,
    final_outputs,
    reachable_set,
    solve_extremal,
    solve_maxent,
    validate_system,
)


def make_system(seed: int) -> MultiModelSystem:
    """Layered DAG of up to 6 single-output models, up to ~10 entries."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 7))
    models = []
    entries_left = 10
    for i in range(n):
        parents = []
        if i:
            k = int(rng.integers(0, min(3, i) + 1))
            if k:
                parents = sorted(rng.choice(i, size=k, replace=False).tolist())
        internal = tuple(f"S{j}" for j in parents)
        table = []
        if entries_left and rng.random() < 0.8:
            table.append(ProbEntry(f"S{i}", (f"E{i}",),
                                   round(float(rng.uniform(0.05, 0.95)), 2)))
            entries_left -= 1
        if entries_left and internal and rng.random() < 0.9:
            table.append(ProbEntry(f"S{i}", internal,
                                   round(float(rng.uniform(0.05, 0.95)), 2)))
            entries_left -= 1
        models.append(Model(id=f"m{i}", external_inputs=(f"E{i}",),
                            internal_inputs=internal, outputs=(f"S{i}",),
                            table=tuple(table)))
    return MultiModelSystem(tuple(models))


def main() -> None:
    n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    stats = {"queries": 0, "infeasible": 0, "oracle_checked": 0, "oracle_skipped": 0}
    pruned_sizes, full_sizes, worst_gap = [], [], 0.0
    start = time.time()

    for seed in range(n_seeds):
        system = make_system(seed)
        assert validate_system(system) == []
        rb = compile_system(system)
        for target in sorted(final_outputs(system)):
            stats["queries"] += 1
            pruned = reachable_set(target, rb)
            pruned_sizes.append(len(pruned.language))
            full_sizes.append(len(rb.language))
            cs = build_constraints(pruned)
            if not check_feasible(cs):
                stats["infeasible"] += 1
                continue
            vmax, _ = solve_extremal(cs, target, "max")
            vmin, _ = solve_extremal(cs, target, "min")
            maxent = solve_maxent(cs)
            assert vmin - 1e-6 <= maxent.marginal(target) <= vmax + 1e-6
            if cs.num_worlds > 32:
                stats["oracle_skipped"] += 1
                continue
            try:
                values = [v.marginal(target) for v in enumerate_vertices(cs)]
                gap = max(abs(vmax - max(values)), abs(vmin - min(values)))
                worst_gap = max(worst_gap, gap)
                stats["oracle_checked"] += 1
            except OracleScaleError:
                stats["oracle_skipped"] += 1

    elapsed = time.time() - start
    mean_pruned = sum(pruned_sizes) / len(pruned_sizes)
    mean_full = sum(full_sizes) / len(full_sizes)
    print(f"seeds: {n_seeds}  queries: {stats['queries']}  "
          f"infeasible: {stats['infeasible']}")
    print(f"mean language size: full {mean_full:.2f} -> pruned {mean_pruned:.2f} "
          f"(mean world count {2 ** mean_full:.0f} -> {2 ** mean_pruned:.0f})")
    print(f"oracle agreement: {stats['oracle_checked']} checked "
          f"({stats['oracle_skipped']} beyond oracle scale), "
          f"worst gap {worst_gap:.2e}")
    print(f"elapsed: {elapsed:.1f} s")


if __name__ == "__main__":
    main()

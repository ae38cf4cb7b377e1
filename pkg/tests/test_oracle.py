import numpy as np
import pytest

from holex import (
    InfeasibleSystemError,
    OracleScaleError,
    PRule,
    RuleBase,
    build_constraints,
    enumerate_vertices,
    oracle_extremal,
    sample_feasible,
)


def cs_of(*rules):
    atoms = []
    for r in rules:
        for a in (*r.body, r.head):
            if a not in atoms:
                atoms.append(a)
    return build_constraints(RuleBase(tuple(atoms), rules))


class TestEnumerateVertices:
    def test_fully_determined_single_vertex(self):
        cs = cs_of(PRule("X", (), 0.3))
        vertices = enumerate_vertices(cs)
        assert len(vertices) == 1
        assert np.allclose(vertices.vertices[0].probs, [0.7, 0.3])

    def test_brain_extrema(self, brain_ad_cs):
        vertices = enumerate_vertices(brain_ad_cs)
        values = [v.marginal("AD") for v in vertices]
        assert max(values) == pytest.approx(0.70, abs=1e-9)
        assert min(values) == pytest.approx(0.42, abs=1e-9)

    def test_infeasible_gives_empty_set(self):
        cs = cs_of(PRule("X", (), 0.7), PRule("X", (), 0.6))
        assert len(enumerate_vertices(cs)) == 0

    def test_vertices_are_feasible_and_distinct(self, brain_ad_cs):
        vertices = list(enumerate_vertices(brain_ad_cs))
        for v in vertices:
            assert brain_ad_cs.residuals(v.probs).max() <= 1e-9
        for i, a in enumerate(vertices):
            for b in vertices[i + 1:]:
                assert np.abs(a.probs - b.probs).max() > 1e-9

    def test_world_scale_bound(self):
        cs = build_constraints(RuleBase(tuple(f"A{i}" for i in range(7)), ()))
        with pytest.raises(OracleScaleError, match="64 worlds"):
            enumerate_vertices(cs)

    def test_constraint_scale_bound(self):
        rules = tuple(PRule("X", (), i / 40.0) for i in range(16))
        cs = build_constraints(RuleBase(("X",), rules))
        with pytest.raises(OracleScaleError, match="16 constraints"):
            enumerate_vertices(cs)

    def test_canonical_order_is_stable(self, brain_ad_cs):
        a = enumerate_vertices(brain_ad_cs)
        b = enumerate_vertices(brain_ad_cs)
        assert len(a) == len(b)
        for va, vb in zip(a, b):
            assert np.array_equal(va.probs, vb.probs)


class TestOracleExtremal:
    def test_brain_values(self, brain_ad_cs):
        assert oracle_extremal(brain_ad_cs, "AD", "max") == pytest.approx(0.70, abs=1e-9)
        assert oracle_extremal(brain_ad_cs, "AD", "min") == pytest.approx(0.42, abs=1e-9)

    def test_pinned_fact(self):
        cs = cs_of(PRule("X", (), 0.3))
        assert oracle_extremal(cs, "X", "max") == pytest.approx(0.3)
        assert oracle_extremal(cs, "X", "min") == pytest.approx(0.3)

    def test_infeasible_signal(self):
        cs = cs_of(PRule("X", (), 0.7), PRule("X", (), 0.6))
        with pytest.raises(InfeasibleSystemError):
            oracle_extremal(cs, "X", "max")


class TestSampleFeasible:
    def test_zero_count(self, brain_ad_cs):
        assert sample_feasible(brain_ad_cs, 0, seed=1) == []

    def test_samples_are_feasible(self, brain_ad_cs):
        samples = sample_feasible(brain_ad_cs, 1000, seed=42)
        assert len(samples) == 1000
        stacked = np.stack([s.probs for s in samples])
        residuals = np.abs(brain_ad_cs.matrix @ stacked.T - brain_ad_cs.rhs[:, None])
        assert residuals.max() <= 1e-9

    def test_deterministic_per_seed(self, brain_ad_cs):
        a = sample_feasible(brain_ad_cs, 5, seed=7)
        b = sample_feasible(brain_ad_cs, 5, seed=7)
        c = sample_feasible(brain_ad_cs, 5, seed=8)
        assert all(np.array_equal(x.probs, y.probs) for x, y in zip(a, b))
        assert any(not np.array_equal(x.probs, y.probs) for x, y in zip(a, c))

    def test_single_vertex_collapses_samples(self):
        cs = cs_of(PRule("X", (), 0.3))
        samples = sample_feasible(cs, 10, seed=3)
        for s in samples:
            assert np.allclose(s.probs, [0.7, 0.3], atol=1e-12)

    def test_infeasible_signal(self):
        cs = cs_of(PRule("X", (), 0.7), PRule("X", (), 0.6))
        with pytest.raises(InfeasibleSystemError):
            sample_feasible(cs, 3, seed=0)

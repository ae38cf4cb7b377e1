import numpy as np
import pytest

from holex import (
    PRule,
    ResourceLimitError,
    RuleBase,
    UnknownAtomError,
    World,
    build_constraints,
    cc_set,
    entails,
    world_of,
)
from holex.worlds import NORMALIZATION

from helpers import REF_LAPLACE, REF_OPTIMISTIC, REF_PESSIMISTIC, table_as_probs


class TestCcSet:
    def test_three_atoms_give_eight_worlds(self):
        worlds = cc_set(("AD", "BA", "CA"))
        assert len(worlds) == 8
        assert [w.bits for w in worlds] == list(range(8))

    def test_one_atom(self):
        assert len(cc_set(("X",))) == 2

    def test_sixteen_distinct_worlds(self):
        worlds = cc_set(tuple("ABCD"))
        assert len({w.bits for w in worlds}) == 16

    def test_cap(self):
        atoms = tuple(f"A{i}" for i in range(25))
        with pytest.raises(ResourceLimitError, match="cap of 24"):
            cc_set(atoms)
        with pytest.raises(ResourceLimitError, match="prune"):
            cc_set(atoms)

    def test_empty_language_rejected(self):
        with pytest.raises(ValueError):
            cc_set(())


class TestEntails:
    ATOMS = ("AD", "BA", "CA")

    def test_positive(self):
        w = world_of({"AD": True, "BA": True, "CA": False}, self.ATOMS)
        assert entails(w, {"AD", "BA"}, self.ATOMS)

    def test_empty_conjunction(self):
        for w in cc_set(self.ATOMS):
            assert entails(w, set(), self.ATOMS)

    def test_negative(self):
        w = world_of({"AD": False, "BA": True, "CA": True}, self.ATOMS)
        assert not entails(w, {"AD", "CA"}, self.ATOMS)

    def test_unknown_atom(self):
        with pytest.raises(UnknownAtomError):
            entails(World(0, 3), {"nope"}, self.ATOMS)

    def test_assignment_roundtrip(self):
        assignment = {"AD": True, "BA": False, "CA": True}
        assert world_of(assignment, self.ATOMS).assignment(self.ATOMS) == assignment


class TestBuildConstraints:
    def test_counts(self, brain_ad_cs):
        assert brain_ad_cs.num_constraints == 5
        assert brain_ad_cs.num_worlds == 8
        assert sum(o == NORMALIZATION for o in brain_ad_cs.origins) == 1

    def test_normalization_row(self, brain_ad_cs):
        i = brain_ad_cs.origins.index(NORMALIZATION)
        assert np.all(brain_ad_cs.matrix[i] == 1.0)
        assert brain_ad_cs.rhs[i] == 1.0

    def test_fact_row(self, brain_ad_cs):
        i = next(k for k, o in enumerate(brain_ad_cs.origins)
                 if o != NORMALIZATION and o.head == "BA")
        row = brain_ad_cs.matrix[i]
        mask = brain_ad_cs.entailing_mask(["BA"])
        assert np.all(row[mask] == 1.0) and np.all(row[~mask] == 0.0)
        assert brain_ad_cs.rhs[i] == 0.7

    def test_conditional_row_is_homogeneous(self, brain_ad_cs):
        i = next(k for k, o in enumerate(brain_ad_cs.origins)
                 if o != NORMALIZATION and o.head == "AD" and o.body == ("BA",))
        row = brain_ad_cs.matrix[i]
        both = brain_ad_cs.entailing_mask(["AD", "BA"])
        body_only = brain_ad_cs.entailing_mask(["BA"]) & ~both
        assert np.allclose(row[both], 0.6 - 1.0)
        assert np.allclose(row[body_only], 0.6)
        assert np.all(row[~(both | body_only)] == 0.0)
        assert brain_ad_cs.rhs[i] == 0.0

    @pytest.mark.parametrize("table", [REF_OPTIMISTIC, REF_PESSIMISTIC, REF_LAPLACE],
                             ids=["optimistic", "pessimistic", "laplace"])
    def test_reference_solutions_satisfy_all_equations(self, brain_ad_cs, table):
        probs = table_as_probs(table, brain_ad_cs.atoms)
        assert brain_ad_cs.residuals(probs).max() <= 1e-9
        assert brain_ad_cs.residuals_direct(probs).max() <= 1e-9

    def test_no_rules_gives_only_normalization(self):
        cs = build_constraints(RuleBase(("X",), ()))
        assert cs.num_constraints == 1
        assert cs.origins == (NORMALIZATION,)

    def test_direct_and_stored_residuals_agree_anywhere(self, brain_ad_cs):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = rng.dirichlet(np.ones(brain_ad_cs.num_worlds))
            stored = brain_ad_cs.residuals(p)
            direct = brain_ad_cs.residuals_direct(p)
            assert np.abs(stored - direct).max() <= 1e-12

    def test_cap(self):
        rb = RuleBase(tuple(f"A{i}" for i in range(4)), ())
        with pytest.raises(ResourceLimitError):
            build_constraints(rb, atom_cap=3)


class TestForcedCertainty:
    def test_certain_fact_pins_the_distribution(self):
        from holex import enumerate_vertices, solve_extremal

        cs = build_constraints(RuleBase(("X",), (PRule("X", (), 1.0),)))
        vertices = enumerate_vertices(cs)
        assert len(vertices) == 1
        assert np.allclose(vertices.vertices[0].probs, [0.0, 1.0])
        for direction in ("max", "min"):
            value, _ = solve_extremal(cs, "X", direction)
            assert value == pytest.approx(1.0, abs=1e-9)

    def test_zero_probability_body_makes_conditional_vacuous(self):
        from holex import solve_maxent

        rb = RuleBase(("X", "Y"), (PRule("X", (), 0.0), PRule("Y", ("X",), 0.3)))
        cs = build_constraints(rb)
        dist = solve_maxent(cs)
        assert cs.residuals_direct(dist.probs).max() <= 1e-9
        assert dist.marginal("X") == pytest.approx(0.0, abs=1e-9)
        # Y is unconstrained once X cannot happen
        assert dist.marginal("Y") == pytest.approx(0.5, abs=1e-6)

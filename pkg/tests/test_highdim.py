import itertools

import numpy as np
import pytest

from ediscovery.core import Instance, LinearModel, OneDimInstance, recall
from ediscovery.datagen import random_threshold_instance
from ediscovery.highdim import (
    OracleRegimeError,
    check_consistency,
    enumerate_optimal_classifiers,
    highdim_probabilities,
    plan_walk,
    projected_probabilities,
    run_highdim_sampling,
    simulate_highdim_sampling,
    tangent_threshold,
)
from ediscovery.parties import AliceOracle
from ediscovery.protocols import LabelReportConfig, run_label_report
from ediscovery.seeding import uniform_rows

CFG = LabelReportConfig(1, 0.3)


def brute_1d(pos, y):
    """Minimum error and optimal labellings over thresholds in both orientations."""
    cands = np.append(np.unique(pos), np.inf)
    labs = set()
    for t, o in itertools.product(cands, (1, -1)):
        lab = np.where(pos >= t, o, -o)
        labs.add(tuple(lab))
    labs = np.array(sorted(labs))
    errs = (labs != y).sum(axis=1)
    return errs.min(), {tuple(r) for r in labs[errs == errs.min()]}


class TestEnumeration:
    @pytest.mark.parametrize("seed", range(12))
    def test_one_dim_matches_brute_force(self, seed):
        inst = random_threshold_instance(int(np.random.default_rng(seed).integers(2, 30)), seed)
        full = inst.to_instance()
        opt = enumerate_optimal_classifiers(full)
        e, labs = brute_1d(inst.positions, inst.labels)
        assert opt.err_star == e
        assert {tuple(r) for r in opt.labelings} == labs

    def test_three_points(self):
        inst = Instance(range(3), [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [1, 1, -1])
        opt = enumerate_optimal_classifiers(inst)
        assert opt.err_star == 0
        assert any((h.predict(inst.X) == inst.y).all() for h in opt.classifiers)

    def test_all_labels_equal(self):
        inst = Instance(range(4), np.random.default_rng(0).normal(size=(4, 2)), [1] * 4)
        opt = enumerate_optimal_classifiers(inst)
        assert opt.err_star == 0 and all((h.predict(inst.X) == 1).all() for h in opt.classifiers)

    def test_every_member_optimal_and_distinct(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(15, 2))
        y = np.where(X[:, 0] > 0, 1, -1)
        y[:3] *= -1
        opt = enumerate_optimal_classifiers(Instance(range(15), X, y))
        preds = [tuple(h.predict(X)) for h in opt.classifiers]
        assert len(set(preds)) == len(preds)
        assert all(sum(a != b for a, b in zip(p, y)) == opt.err_star for p in preds)

    def test_regime(self):
        with pytest.raises(OracleRegimeError):
            enumerate_optimal_classifiers(Instance(range(5), np.zeros((5, 4)), [1] * 5))
        with pytest.raises(OracleRegimeError):
            enumerate_optimal_classifiers(Instance(range(41), np.zeros((41, 1)), [1] * 41))


class TestConsistency:
    inst = Instance(range(4), [[0, 0], [1, 0], [0, 1], [1, 1]], [1, -1, -1, -1])

    def test_self(self):
        opt = enumerate_optimal_classifiers(self.inst)
        assert check_consistency(opt.classifiers[0], opt, self.inst)

    def test_empty_intersection(self):
        from ediscovery.highdim import OptimalClassifierSet

        opt = OptimalClassifierSet((LinearModel([1.0, 0.0], -1.0), LinearModel([-1.0, 0.0], -1.0)),
                                   np.zeros((2, 4), dtype=int), 0)
        assert check_consistency(LinearModel([0.0, 1.0], -100.0), opt, self.inst)

    def test_rotated_optimum_is_inconsistent(self):
        from ediscovery.highdim import OptimalClassifierSet

        # the optimum is the quadrant x <= 0.5, y <= 0.5 read as two halfspaces
        opt = OptimalClassifierSet((LinearModel([-1.0, 0.0], 0.5), LinearModel([0.0, -1.0], 0.5)),
                                   np.zeros((2, 4), dtype=int), 0)
        h_star = LinearModel([-1.0, -1.0], 0.2)  # rotated; cuts the quadrant corner off
        assert not check_consistency(h_star, opt, self.inst)


class TestSampling:
    def test_truthful_realizable(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(20, 2))
        inst = Instance(range(20), X, np.where(X @ [1.0, 1.0] > 0.5, 1, -1))
        out = run_highdim_sampling(inst, AliceOracle.truthful(), cfg=CFG, rng=0)
        assert recall(out, inst) == 1.0 and not out.full_reveal_triggered

    @pytest.mark.parametrize("seed", range(10))
    def test_one_dim_reveals_match(self, seed):
        line = random_threshold_instance(25, seed)
        inst = line.to_instance()
        for alice in (AliceOracle.truthful(), AliceOracle.hide_near_threshold(2)):
            rep = alice.report_labels(line)
            plan = plan_walk(inst, rep, CFG)
            if len(plan.optima) != 1 or plan.optima.classifiers[0].w[0] < 0:
                continue
            for r in range(5):
                a = run_highdim_sampling(inst, alice, cfg=CFG, rng=r)
                b = run_label_report(line, alice, cfg=CFG, rng=r)
                assert a.revealed == b.revealed

    @pytest.mark.parametrize("seed", range(5))
    def test_simulation_matches_run(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(18, 2))
        y = np.where(X[:, 0] > 0.2, 1, -1)
        rep = y.copy()
        rep[np.flatnonzero(y == 1)[:2]] = -1
        inst = Instance(range(18), X, y)
        alice = AliceOracle.scripted(dict(enumerate(rep.tolist())))
        sim = simulate_highdim_sampling(inst, rep, CFG, uniform_rows(range(5), 18))
        for r in range(5):
            out = run_highdim_sampling(inst, alice, cfg=CFG, rng=r)
            assert bool(sim["detected"][r]) == out.full_reveal_triggered

    def test_zero_direction(self):
        inst = Instance(range(3), [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [1, 1, -1])
        with pytest.raises(ValueError):
            run_highdim_sampling(inst, AliceOracle.truthful(), direction=[0.0, 0.0])

    def test_dominates_projection(self):
        compared = 0
        for s in range(150):
            rng = np.random.default_rng(s)
            n = int(rng.integers(8, 22))
            X = rng.normal(size=(n, 2))
            y = np.where(X @ [1.0, 0.4] + 0.3 > 0, 1, -1)
            if rng.random() < 0.5:
                y[rng.integers(n)] *= -1
            pos = np.flatnonzero(y == 1)
            if len(pos) < 2:
                continue
            rep = y.copy()
            rep[rng.choice(pos, size=int(rng.integers(1, min(3, len(pos)) + 1)), replace=False)] = -1
            inst = Instance(range(n), X, y)
            plan = plan_walk(inst, rep, CFG)
            hd = highdim_probabilities(plan, inst)
            for h in enumerate_optimal_classifiers(inst).classifiers:
                if not check_consistency(h, plan.optima, inst):
                    continue
                v = h.w / np.linalg.norm(h.w)
                t, lo = tangent_threshold(plan.optima, v), -h.b / np.linalg.norm(h.w)
                pj = projected_probabilities(inst, rep, CFG, v, t)
                # hidden positives between the true optimum and the tangent plane
                for i in np.flatnonzero((y == 1) & (rep == -1)):
                    if lo < X[i] @ v < t and i in pj and i in hd:
                        compared += 1
                        assert hd[i] >= pj[i] - 1e-12
        assert compared >= 10

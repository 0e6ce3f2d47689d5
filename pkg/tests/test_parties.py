import numpy as np
import pytest

from conftest import line
from ediscovery.core import ProtocolOutcome, optimal_threshold_report, optimal_threshold_true, threshold_error
from ediscovery.harness import best_response_instances
from ediscovery.parties import (
    AliceLoss,
    AliceOracle,
    CourtOracle,
    alice_loss,
    best_response_precondition,
    best_response_search,
)
from ediscovery.protocols import LabelReportConfig

INST = line(np.arange(14.0), [1] * 4 + [-1] * 10)


def outcome(revealed):
    return ProtocolOutcome(frozenset(revealed), {}, {})


class TestLoss:
    def test_full_reveal(self):
        assert alice_loss(outcome(range(14)), INST, AliceLoss(3.0)) == 10

    def test_empty(self):
        assert alice_loss(outcome([]), INST, AliceLoss(1.0)) == -4

    def test_partial(self):
        assert alice_loss(outcome([0, 1, 2, *range(4, 11)]), INST, AliceLoss(2.0)) == pytest.approx(5.0)

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            AliceLoss(-1.0)


class TestAlice:
    inst = line([9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0], [1, 1, 1, 1, -1, 1, -1, -1])

    def test_hide_near_threshold_flips_exactly_j(self):
        rep = AliceOracle.hide_near_threshold(2).report_labels(self.inst)
        assert (rep != self.inst.labels).sum() == 2
        # the two lowest positives on the positive side of t* = 6
        assert rep.tolist()[2:4] == [-1, -1]

    def test_hiding_at_least_k_inflates_error(self):
        _, e = optimal_threshold_true(self.inst)
        for j in (1, 2, 3):
            t_A, _ = optimal_threshold_report(self.inst, AliceOracle.hide_near_threshold(j).report_labels(self.inst))
            assert threshold_error(self.inst, t_A) >= e + 1

    def test_outlier_strategy(self):
        rep = AliceOracle.hide_outlier_false_positives().report_labels(self.inst)
        assert rep[5] == -1 and (rep != self.inst.labels).sum() == 1

    def test_parse_round_trip(self):
        for s in ("truthful", "hide-near-threshold:3", "hide-outlier-fp", "report-threshold:2.5"):
            assert str(AliceOracle.parse(s)) == s

    def test_parse_unknown(self):
        with pytest.raises(ValueError):
            AliceOracle.parse("bribe")

    def test_court_has_no_error_knob(self):
        with pytest.raises(TypeError):
            CourtOracle(error_rate=0.1)


class TestBestResponse:
    cfg = LabelReportConfig(1, 0.3)

    def test_truthful_under_precondition(self):
        inst = best_response_instances(count=1)[0]
        _, e = optimal_threshold_true(inst)
        assert best_response_precondition(inst, e, 1, 0.3, 1.0)
        br = best_response_search(inst, self.cfg, AliceLoss(1.0), trials=200, rng=0)
        assert br.is_truthful and br.err_at_t_star_A < e + 1

    def test_minimiser_property_without_recall_weight(self):
        inst = line(np.arange(12.0, 0.0, -1.0), [1, 1, 1] + [-1] * 9)
        br = best_response_search(inst, self.cfg, AliceLoss(0.0), trials=100, rng=1)
        assert br.expected_loss <= br.losses[()]

    def test_far_outlier_is_reported_only(self):
        inst = line(np.arange(20.0, 0.0, -1.0), [1, 1, 1] + [-1] * 15 + [1, -1])
        br = best_response_search(inst, self.cfg, AliceLoss(1.0), trials=100, rng=2)
        assert (18,) in br.losses

    def test_too_large(self):
        with pytest.raises(ValueError):
            best_response_search(line(np.arange(31.0), [1] * 31), self.cfg, AliceLoss())

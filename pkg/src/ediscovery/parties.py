"""Alice strategies, Bob and court oracles, Alice's loss and best-response search."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .core import (
    OneDimInstance,
    ProtocolOutcome,
    nrd,
    optimal_threshold_report,
    optimal_threshold_true,
    recall,
    report_array,
    threshold_error,
)
from .seeding import make_rng, split_seed, uniform_rows

BEHAVIORS = ("truthful", "hide-near-threshold", "hide-outlier-fp", "report-threshold", "scripted")


@dataclass(frozen=True)
class AliceOracle:
    """A (possibly strategic) defendant.

    Behaviours:

    * ``truthful`` reports the true labels; as a classifier report it names the
      optimal threshold ``t*`` on the true labels.
    * ``hide-near-threshold`` flips the ``j`` lowest true positives at or above
      ``t*`` to -1, the documents whose removal pushes the reported optimum up.
    * ``hide-outlier-fp`` flips every true positive strictly below ``t*`` to -1.
      These are the points the optimal classifier already gets wrong, far from
      its boundary, so a sampling walk reaches them late.
    * ``report-threshold`` reports threshold ``t`` with true labels above it.
    * ``scripted`` reports the given id -> label map (and ``t`` if set).

    Strategies are stateless: each sub-instance is answered on its own.
    """

    behavior: str = "truthful"
    j: int = 0
    t: float | None = None
    script: Mapping[int, int] | None = field(default=None, hash=False, compare=False)

    def __post_init__(self):
        if self.behavior not in BEHAVIORS:
            raise ValueError(f"unknown Alice behaviour {self.behavior!r}")
        if self.behavior == "report-threshold" and self.t is None:
            raise ValueError("report-threshold needs a threshold")
        if self.behavior == "scripted" and self.script is None:
            raise ValueError("scripted Alice needs a report")

    @classmethod
    def truthful(cls):
        return cls("truthful")

    @classmethod
    def hide_near_threshold(cls, j: int):
        return cls("hide-near-threshold", j=int(j))

    @classmethod
    def hide_outlier_false_positives(cls):
        return cls("hide-outlier-fp")

    @classmethod
    def report_threshold(cls, t: float):
        return cls("report-threshold", t=float(t))

    @classmethod
    def scripted(cls, report: Mapping[int, int], threshold: float | None = None):
        return cls("scripted", t=threshold, script=dict(report))

    @classmethod
    def parse(cls, text: str) -> "AliceOracle":
        """Parse CLI strings: ``truthful``, ``hide-near-threshold:2``,
        ``hide-outlier-fp``, ``report-threshold:3.5``."""
        name, _, arg = text.partition(":")
        if name == "truthful":
            return cls.truthful()
        if name == "hide-near-threshold":
            return cls.hide_near_threshold(int(arg or 1))
        if name == "hide-outlier-fp":
            return cls.hide_outlier_false_positives()
        if name == "report-threshold":
            return cls.report_threshold(float(arg))
        raise ValueError(f"unknown Alice strategy {text!r}")

    def __str__(self):
        if self.behavior == "hide-near-threshold":
            return f"hide-near-threshold:{self.j}"
        if self.behavior == "report-threshold":
            return f"report-threshold:{self.t!r}"
        return self.behavior

    def report_labels(self, inst: OneDimInstance) -> np.ndarray:
        """Reported labels aligned with ``inst.ids``."""
        y = inst.labels.copy()
        if self.behavior == "scripted":
            return report_array(inst, self.script)
        if self.behavior in ("truthful", "report-threshold") or inst.N == 0:
            return y
        t_star, _ = optimal_threshold_true(inst)
        pos = inst.positions
        if self.behavior == "hide-outlier-fp":
            y[(inst.labels == 1) & (pos < t_star)] = -1
            return y
        # hide-near-threshold: lowest positives on the positive side of t*
        cand = np.flatnonzero((inst.labels == 1) & (pos >= t_star))
        order = cand[np.lexsort((-inst.ids[cand], pos[cand]))]
        y[order[: self.j]] = -1
        return y

    def report_classifier(self, inst: OneDimInstance) -> tuple[float, np.ndarray]:
        """(threshold, labels); only labels at or above the threshold are used."""
        if self.behavior == "truthful":
            t, _ = optimal_threshold_true(inst)
            return t, inst.labels.copy()
        if self.behavior == "report-threshold":
            return float(self.t), inst.labels.copy()
        y = self.report_labels(inst)
        if self.behavior == "scripted" and self.t is not None:
            return float(self.t), y
        t, _ = optimal_threshold_report(inst, y)
        return t, y


@dataclass(frozen=True)
class BobOracle:
    """Plaintiff labeller; perfect unless ``error_rate`` > 0.

    Noise is a deterministic function of ``(seed, document id)`` so Bob never
    touches the protocol's generator.
    """

    error_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.error_rate < 1.0:
            raise ValueError("error_rate must lie in [0, 1)")

    def label(self, inst: OneDimInstance, idx) -> np.ndarray:
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        y = inst.labels[idx].copy()
        if self.error_rate > 0:
            for a, i in enumerate(idx):
                u = np.random.default_rng([self.seed, int(inst.ids[i])]).random()
                if u < self.error_rate:
                    y[a] = -y[a]
        return y


@dataclass(frozen=True)
class CourtOracle:
    """Settles disputes with the true label."""

    error_rate: float = field(default=0.0, init=False)

    def decide(self, inst: OneDimInstance, i: int) -> int:
        return int(inst.labels[i])


@dataclass(frozen=True)
class AliceLoss:
    lam: float = 1.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("loss weight must be non-negative")


def alice_loss(outcome: ProtocolOutcome, instance, loss: AliceLoss) -> float:
    """NRD(B) + lam * N+ * (REC(B) - 1)."""
    n_plus = sum(1 for v in instance.truth.values() if v == 1)
    return nrd(outcome, instance) + loss.lam * n_plus * (recall(outcome, instance) - 1.0)


@dataclass(frozen=True)
class BestResponse:
    hidden: tuple  # ids flipped from +1 to -1
    expected_loss: float
    losses: Mapping[tuple, float]
    t_star_A: float
    err_at_t_star_A: int

    @property
    def is_truthful(self) -> bool:
        return not self.hidden


def best_response_search(inst: OneDimInstance, cfg, loss: AliceLoss, trials: int = 200,
                         rng=None, max_hidden: int = 4, max_n: int = 30) -> BestResponse:
    """Exhaustive best response of Alice against the label-report protocol.

    Enumerates every report obtained by flipping at most ``max_hidden`` true
    positives to -1 (reporting negatives as positives is dominated: those
    documents are always shown to Bob).  Each report's expected loss is the
    mean over ``trials`` runs; all reports share the same trial seeds.
    """
    from .protocols import simulate_label_report  # protocols imports this module

    if inst.N > max_n or max_hidden > 4:
        raise ValueError(f"exhaustive search limited to N <= {max_n} and at most 4 flips")
    if inst.N_plus == 0:
        raise ValueError("best response needs at least one positive document")
    root = int(make_rng(rng).integers(2**32))
    seeds = [split_seed(root, i) for i in range(trials)]
    U = uniform_rows(seeds, inst.N)
    positives = np.flatnonzero(inst.labels == 1)
    losses = {}
    for m in range(0, min(max_hidden, len(positives)) + 1):
        for combo in itertools.combinations(positives.tolist(), m):
            report = inst.labels.copy()
            report[list(combo)] = -1
            sim = simulate_label_report(inst, report, cfg, U)
            exp_loss = float(np.mean(sim["nrd"] + loss.lam * inst.N_plus * (sim["recall"] - 1.0)))
            losses[tuple(int(inst.ids[i]) for i in combo)] = exp_loss
    # ties go to the smaller (first enumerated) report, truthful first
    best = min(losses, key=lambda h: (losses[h], len(h)))
    report = inst.labels.copy()
    id_pos = {int(i): a for a, i in enumerate(inst.ids)}
    report[[id_pos[i] for i in best]] = -1
    t_A, _ = optimal_threshold_report(inst, report)
    return BestResponse(best, losses[best], losses, t_A, threshold_error(inst, t_A))


def best_response_precondition(inst: OneDimInstance, err_star: int, k: int, delta: float,
                               lam: float) -> bool:
    """N- > max{3(2+2err*/k) ln(1/delta) ln N- + 3err*, lam N+} and delta < 1/3."""
    Nm = inst.N_minus
    if Nm < 1 or not 0 < delta < 1 / 3:
        return False
    bound = 3 * (2 + 2 * err_star / k) * math.log(1 / delta) * math.log(Nm) + 3 * err_star
    return Nm > max(bound, lam * inst.N_plus)

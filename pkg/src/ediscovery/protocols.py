"""Single-dimensional Label-Verification protocols.

Trent runs each protocol against Alice/Bob/court oracles on a
:class:`~ediscovery.core.OneDimInstance`.  Every Bernoulli draw consumes one
uniform from the run's generator, in walk order (position descending, ties by
ascending id), so a seed fixes the transcript.

``simulate_*`` are vectorised Monte Carlo engines for perfect Bob/court.  They
take a matrix of pre-drawn uniforms whose row ``r`` is the stream a single run
would consume, and reproduce those runs exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    EmptyInstanceError,
    EpochReset,
    FullReveal,
    OneDimInstance,
    ProtocolOutcome,
    ReportReceived,
    Revealed,
    Sampled,
    SentToCourt,
    Stopped,
    optimal_threshold_report,
)
from .parties import AliceOracle, BobOracle, CourtOracle
from .seeding import make_rng


@dataclass(frozen=True)
class LabelReportConfig:
    k: int = 1
    delta: float = 0.01

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("error tolerance k must be an integer >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class ClassifierReportConfig:
    delta: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")


@dataclass
class ClassifierEpochState:
    M_plus: int = 0
    M_minus: int = 0
    W: int = 1

    def miss(self):
        self.M_minus += 1
        self.W += 1

    def confirm(self):
        self.M_plus += 1
        self.W = 1


def sampling_constant_label(err_A: int, k: int, delta: float) -> float:
    if k < 1 or not 0.0 < delta < 1.0 or err_A < 0:
        raise ValueError("need err_A >= 0, k >= 1 and 0 < delta < 1")
    return (2.0 + 2.0 * err_A / k) * math.log(1.0 / delta)


def sampling_constant_classifier(N: int, delta: float) -> float:
    if N < 1 or not 0.0 < delta < 1.0:
        raise ValueError("need N >= 1 and 0 < delta < 1")
    return 2.0 * math.log(N / delta)


class _Session:
    """Book-keeping shared by the protocols: reveals, court, transcript."""

    def __init__(self, inst: OneDimInstance, bob: BobOracle, court: CourtOracle):
        self.inst = inst
        self.bob = bob
        self.court = court
        self.revealed: dict[int, int] = {}  # index -> Bob's label
        self.settled: dict[int, int] = {}  # index -> court label
        self.events: list = []
        self.full_reveal = False

    def reveal(self, i: int) -> int:
        if i not in self.revealed:
            self.revealed[i] = int(self.bob.label(self.inst, i)[0])
            self.events.append(Revealed(int(self.inst.ids[i])))
        return self.revealed[i]

    def to_court(self, i: int) -> int:
        d = self.court.decide(self.inst, i)
        self.settled[i] = d
        self.events.append(SentToCourt(int(self.inst.ids[i]), d))
        return d

    def outcome(self, alice_labels: np.ndarray, **extras) -> ProtocolOutcome:
        ids = self.inst.ids
        self.events.append(Stopped())
        out = {int(ids[i]): int(self.settled.get(i, alice_labels[i])) for i in range(self.inst.N)}
        return ProtocolOutcome(
            revealed=frozenset(int(ids[i]) for i in self.revealed),
            court_settled={int(ids[i]): d for i, d in self.settled.items()},
            output_labels=out,
            transcript=tuple(self.events),
            full_reveal_triggered=self.full_reveal,
            extras=extras,
        )


def _defaults(bob, court):
    return bob or BobOracle(), court or CourtOracle()


def run_label_report(inst: OneDimInstance, alice: AliceOracle, bob: BobOracle | None = None,
                     court: CourtOracle | None = None, cfg: LabelReportConfig = LabelReportConfig(),
                     rng=None) -> ProtocolOutcome:
    """Label-verification for a full label report.

    Bob sees every Alice-positive and every document at or above ``t*_A``
    (the smallest optimal threshold of the report).  Alice-negatives below it
    are walked top-down and the ``i``-th is shown with probability
    ``min(1, c/i)``.  A court-confirmed hidden positive reveals everything.
    """
    if inst.N == 0:
        raise EmptyInstanceError("protocol needs a non-empty instance")
    bob, court = _defaults(bob, court)
    rng = make_rng(rng)
    s = _Session(inst, bob, court)
    f_A = np.asarray(alice.report_labels(inst))
    s.events.append(ReportReceived(inst.N))
    t_A, err_A = optimal_threshold_report(inst, f_A)
    c = sampling_constant_label(err_A, cfg.k, cfg.delta)
    order = inst.walk_order()
    pos = inst.positions

    def check(i) -> bool:
        """Reveal ``i``; True when the court confirms a hidden positive."""
        if s.reveal(i) != f_A[i]:
            return s.to_court(i) == 1 and f_A[i] == -1
        return False

    detected = any([check(i) for i in order if f_A[i] == 1 or pos[i] >= t_A])
    reason = "hidden positive above threshold"
    if not detected:
        walk = [i for i in order if f_A[i] == -1 and pos[i] < t_A]
        for rank, i in enumerate(walk, start=1):
            p = min(1.0, c / rank)
            if rng.random() < p:
                s.events.append(Sampled(int(inst.ids[i]), p))
                if check(i):
                    detected, reason = True, "sampled hidden positive"
                    break
    if detected:
        s.full_reveal = True
        s.events.append(FullReveal(reason))
        for i in order:
            if i not in s.revealed:
                check(i)
    return s.outcome(f_A, t_star_A=t_A, err_A=err_A, c=c, detected=detected)


def run_classifier_report(inst: OneDimInstance, alice: AliceOracle, bob: BobOracle | None = None,
                          court: CourtOracle | None = None,
                          cfg: ClassifierReportConfig = ClassifierReportConfig(),
                          rng=None) -> ProtocolOutcome:
    """Label-verification for a threshold report.

    Everything at or above Alice's threshold ``t_A`` goes to Bob.  Below it the
    walk samples with ``min(1, c/W)``; ``W`` counts documents since the last
    court-confirmed positive.  Once confirmed positives outnumber the rest
    (``M+ > M-``) all of ``(-inf, t_A)`` is shown to Bob.
    """
    if inst.N == 0:
        raise EmptyInstanceError("protocol needs a non-empty instance")
    bob, court = _defaults(bob, court)
    rng = make_rng(rng)
    s = _Session(inst, bob, court)
    t_A, reported = alice.report_classifier(inst)
    pos = inst.positions
    above = pos >= t_A
    f_A = np.where(above, np.asarray(reported), -1)
    s.events.append(ReportReceived(int(above.sum()), float(t_A)))
    c = sampling_constant_classifier(inst.N, cfg.delta)
    order = inst.walk_order()
    for i in order:
        if above[i] and s.reveal(i) != f_A[i]:
            s.to_court(i)
    st = ClassifierEpochState()
    resets = 0
    walk = [i for i in order if not above[i]]
    for i in walk:
        p = min(1.0, c / st.W)
        if rng.random() < p:
            s.events.append(Sampled(int(inst.ids[i]), p))
            if s.reveal(i) == 1 and s.to_court(i) == 1:
                st.confirm()
                resets += 1
                s.events.append(EpochReset())
            else:
                # Bob-negative, or Bob-positive overruled by the court
                st.miss()
        else:
            st.miss()
        if st.M_plus > st.M_minus:
            s.full_reveal = True
            s.events.append(FullReveal("confirmed positives outnumber negatives"))
            for j in walk:
                if j not in s.revealed and s.reveal(j) == 1:
                    s.to_court(j)
            break
    return s.outcome(f_A, t_A=t_A, c=c, M_plus=st.M_plus, M_minus=st.M_minus,
                     epoch_resets=resets, detected=s.full_reveal)


def run_reveal_all(inst: OneDimInstance, bob: BobOracle | None = None) -> ProtocolOutcome:
    """Baseline: Bob sees and labels every document."""
    if inst.N == 0:
        return ProtocolOutcome.empty()
    bob = bob or BobOracle()
    s = _Session(inst, bob, CourtOracle())
    labels = np.array([s.reveal(i) for i in range(inst.N)])
    return s.outcome(labels)


# -- vectorised Monte Carlo engines (perfect Bob and court) --------------------

def simulate_label_report(inst: OneDimInstance, report, cfg: LabelReportConfig,
                          U: np.ndarray) -> dict[str, np.ndarray]:
    """Recall, NRD and detection of ``run_label_report`` for each row of ``U``."""
    f_A = np.asarray(report)
    y = inst.labels
    t_A, err_A = optimal_threshold_report(inst, f_A)
    c = sampling_constant_label(err_A, cfg.k, cfg.delta)
    order = inst.walk_order()
    pos = inst.positions
    initial = (f_A == 1) | (pos >= t_A)
    T = len(U)
    Np, Nm = inst.N_plus, inst.N_minus
    full = {"recall": np.ones(T), "nrd": np.full(T, Nm), "detected": np.ones(T, dtype=bool)}
    if np.any(initial & (f_A == -1) & (y == 1)):
        return full
    walk = order[(f_A[order] == -1) & (pos[order] < t_A)]
    m = len(walk)
    p = np.minimum(1.0, c / np.arange(1, m + 1))
    S = U[:, :m] < p
    hidden = y[walk] == 1
    detected = (S & hidden).any(axis=1)
    base_pos = int((initial & (y == 1)).sum())
    base_neg = int((initial & (y == -1)).sum())
    rec = np.where(detected, 1.0, base_pos / Np if Np else np.nan)
    nrd_ = np.where(detected, Nm, base_neg + (S & ~hidden).sum(axis=1))
    return {"recall": rec, "nrd": nrd_, "detected": detected}


def simulate_classifier_report(inst: OneDimInstance, t_A: float, cfg: ClassifierReportConfig,
                               U: np.ndarray) -> dict[str, np.ndarray]:
    """Vectorised ``run_classifier_report`` with truthful labels above ``t_A``."""
    y = inst.labels
    pos = inst.positions
    c = sampling_constant_classifier(inst.N, cfg.delta)
    order = inst.walk_order()
    above = pos >= t_A
    walk = order[~above[order]]
    T = len(U)
    Np, Nm = inst.N_plus, inst.N_minus
    W = np.ones(T)
    Mp = np.zeros(T, dtype=np.int64)
    Mm = np.zeros(T, dtype=np.int64)
    active = np.ones(T, dtype=bool)
    got_pos = np.zeros(T, dtype=np.int64)
    got_neg = np.zeros(T, dtype=np.int64)
    resets = np.zeros(T, dtype=np.int64)
    for a, i in enumerate(walk):
        if not active.any():
            break
        s = active & (U[:, a] < np.minimum(1.0, c / W))
        if y[i] == 1:
            got_pos += s
            resets += s
            Mp += s
            miss = active & ~s
            W = np.where(s, 1.0, np.where(miss, W + 1, W))
            Mm += miss
        else:
            got_neg += s
            Mm += active
            W = np.where(active, W + 1, W)
        active &= ~(Mp > Mm)
    detected = Mp > Mm
    base_pos = int((above & (y == 1)).sum())
    base_neg = int((above & (y == -1)).sum())
    rec = np.where(detected, 1.0, (base_pos + got_pos) / Np if Np else np.nan)
    nrd_ = np.where(detected, Nm, base_neg + got_neg)
    return {"recall": rec, "nrd": nrd_, "detected": detected, "epoch_resets": resets}

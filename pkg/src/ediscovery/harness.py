"""Monte Carlo bound checks, figure campaigns and the result CSV format.

Trial ``i`` of a campaign with root seed ``s`` draws from
``split_seed(s, i)``; every campaign is a pure function of its config, so a
rerun reproduces the CSV byte for byte (the ``ms`` column stays empty unless
timing is requested).
"""
from __future__ import annotations

import configparser
import csv
import itertools
import math
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .cal import CalConfig, run_cal
from .core import (
    Instance,
    OneDimInstance,
    candidate_thresholds,
    optimal_threshold_report,
    optimal_threshold_true,
    threshold_errors,
)
from .critical import critical_points_fast, nrd_ratio
from .datagen import (
    GaussianConfig,
    enforce_realizable,
    gaussian_mixture,
    lower_bound_family,
    random_threshold_instance,
)
from .highdim import (
    check_consistency,
    enumerate_optimal_classifiers,
    plan_walk,
    simulate_highdim_sampling,
)
from .parties import AliceLoss, AliceOracle, best_response_precondition, best_response_search
from .protocols import (
    ClassifierReportConfig,
    LabelReportConfig,
    sampling_constant_label,
    simulate_classifier_report,
    simulate_label_report,
)
from .seeding import split_seed, uniform_rows

CSV_HEADER = ["experiment", "protocol", "iteration", "seed", "recall", "nrd", "full_reveal", "ms"]


def fmt(x) -> str:
    return f"{x:.6g}"


@dataclass(frozen=True, order=True)
class ResultRow:
    experiment: str
    protocol: str
    iteration: int
    seed: int
    recall: float
    nrd: int
    full_reveal: bool
    ms: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.recall <= 1.0) and not math.isnan(self.recall):
            raise ValueError("recall must lie in [0, 1]")
        if self.nrd < 0:
            raise ValueError("nrd must be non-negative")

    def cells(self) -> list[str]:
        return [self.experiment, self.protocol, str(self.iteration), str(self.seed),
                fmt(self.recall), str(int(self.nrd)), str(int(bool(self.full_reveal))),
                "" if self.ms is None else fmt(self.ms)]


def write_csv(rows, path) -> None:
    """Rows sorted by (experiment, protocol, iteration, seed), one writer."""
    rows = sorted(rows, key=lambda r: (r.experiment, r.protocol, r.iteration, r.seed))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(r.cells())


def read_csv(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {rd.fieldnames}")
        return [ResultRow(r["experiment"], r["protocol"], int(r["iteration"]), int(r["seed"]),
                          float(r["recall"]), int(r["nrd"]), r["full_reveal"] == "1",
                          float(r["ms"]) if r["ms"] else None) for r in rd]


@dataclass(frozen=True)
class Aggregate:
    experiment: str
    protocol: str
    iteration: int
    metric: str
    mean: float
    min: float
    max: float
    se: float
    count: int


def aggregate(rows) -> list[Aggregate]:
    """Mean, min, max and standard error of recall and NRD per series point."""
    groups: dict[tuple, list[ResultRow]] = {}
    for r in rows:
        groups.setdefault((r.experiment, r.protocol, r.iteration), []).append(r)
    out = []
    for key in sorted(groups):
        g = groups[key]
        for metric in ("recall", "nrd"):
            v = np.array([getattr(r, metric) for r in g], dtype=float)
            se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
            out.append(Aggregate(*key, metric, float(v.mean()), float(v.min()), float(v.max()), se, len(v)))
    return out


# -- configuration ---------------------------------------------------------------

@dataclass
class ExperimentConfig:
    protocol: str = "label-report"
    alice: str = "truthful"
    k: int = 1
    delta: float = 0.01
    iterations: int = 10
    batch: int = 100
    instance: str | None = None
    n: int = 5000
    d: int = 20
    positive_ratio: float = 0.05
    mean_separation: float = 2.0
    trials: int = 10
    seed: int = 0
    out: str | None = None
    timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trial count must be >= 1")

    def merged(self, **overrides) -> "ExperimentConfig":
        """CLI values override the config; ``None`` means not given."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def corpus_config(self) -> GaussianConfig:
        return GaussianConfig(self.n, self.d, self.positive_ratio, self.mean_separation, self.seed)


def load_config(path) -> ExperimentConfig:
    """Flat INI file; keys may sit in any section (later sections win)."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(itertools.chain(["[DEFAULT]\n"], fh))
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    values = {}
    for section in [cp.default_section, *cp.sections()]:
        for key, raw in cp[section].items():
            key = key.replace("-", "_")
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _coerce(raw, types[key])
    return ExperimentConfig(**values)


def _coerce(raw: str, typ):
    typ = str(typ)
    if "bool" in typ:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if typ.startswith("int"):
        return int(raw)
    if typ.startswith("float"):
        return float(raw)
    return raw.strip()


# -- verdicts --------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    campaign: str
    claim: str
    instance: str
    empirical: float
    bound: float
    slack: float
    verdict: str  # pass | fail | skipped
    note: str = ""

    def line(self) -> str:
        return (f"{self.verdict.upper():7s} {self.campaign} [{self.instance}] {self.claim}: "
                f"empirical={fmt(self.empirical)} bound={fmt(self.bound)} slack={fmt(self.slack)}"
                + (f" ({self.note})" if self.note else ""))


def binomial_se(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


def rate_at_most(campaign, claim, inst, hits, trials, bound) -> Verdict:
    slack = 3 * binomial_se(bound, trials)
    emp = hits / trials
    return Verdict(campaign, claim, inst, emp, bound, slack,
                   "pass" if emp <= bound + slack else "fail", "slack = 3 binomial SE")


def rate_at_least(campaign, claim, inst, hits, trials, bound) -> Verdict:
    slack = 3 * binomial_se(bound, trials)
    emp = hits / trials
    return Verdict(campaign, claim, inst, emp, bound, slack,
                   "pass" if emp >= bound - slack else "fail", "slack = 3 binomial SE")


def mean_at_most(campaign, claim, inst, values, bound) -> Verdict:
    v = np.asarray(values, dtype=float)
    slack = 2 * float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    emp = float(v.mean())
    return Verdict(campaign, claim, inst, emp, bound, slack,
                   "pass" if emp <= bound + slack else "fail", "slack = 2 SEM")


def skipped(campaign, claim, inst, why) -> Verdict:
    return Verdict(campaign, claim, inst, math.nan, math.nan, math.nan, "skipped", why)


# -- instance grids --------------------------------------------------------------

def err_star(inst: OneDimInstance) -> int:
    return optimal_threshold_true(inst)[1]


def threshold_grid(count: int = 20, N: int = 200, seed: int = 0, err_range=(0, 10),
                   max_flips: int = 10) -> list[OneDimInstance]:
    """Random 1-D instances whose optimal error lies in ``err_range``."""
    out, a = [], 0
    lo, hi = err_range
    while len(out) < count:
        inst = _random_instance(N, split_seed(seed, a), max_flips)
        a += 1
        if inst.N_plus and lo <= err_star(inst) <= hi:
            out.append(inst)
    return out


def _random_instance(N, seed, max_flips):
    return random_threshold_instance(N, seed, max_flips=max_flips)


def adversarial_reports(inst: OneDimInstance, seed: int = 0) -> dict[str, np.ndarray]:
    """Alice's reports used to probe the recall floor."""
    reps = {}
    for al in [AliceOracle.truthful(), *(AliceOracle.hide_near_threshold(j) for j in (1, 2, 3, 5)),
               AliceOracle.hide_outlier_false_positives()]:
        reps[str(al)] = al.report_labels(inst)
    rng = np.random.default_rng(seed)
    pos = np.flatnonzero(inst.labels == 1)
    for m in (1, 3):
        if len(pos) >= m:
            rep = inst.labels.copy()
            rep[rng.choice(pos, size=m, replace=False)] = -1
            reps[f"hide-random:{m}"] = rep
    return reps


def hidden_block_instance(top: int, m: int, h: int, tail: int) -> OneDimInstance:
    """Positions descend: ``top`` positives, ``m`` negatives, ``h`` positives,
    ``tail`` negatives.  With ``h > m`` the optimum keeps the lower positives
    (err* = m); hiding them makes Alice's optimum drop all ``h``."""
    labels = np.r_[np.ones(top), -np.ones(m), np.ones(h), -np.ones(tail)].astype(np.int64)
    N = len(labels)
    return OneDimInstance(np.arange(N), np.arange(N, 0, -1, dtype=float), labels)


def _uniforms(seed: int, trials: int, width: int) -> np.ndarray:
    return uniform_rows([split_seed(seed, t) for t in range(trials)], width)


# -- campaigns -------------------------------------------------------------------

def campaign_recall_label(trials=10_000, seed=0, delta=0.1, k=1, grid=None) -> list[Verdict]:
    """Recall floor of the label-report protocol under adversarial reports."""
    cfg = LabelReportConfig(k, delta)
    grid = threshold_grid(seed=seed) if grid is None else grid
    out = []
    for a, inst in enumerate(grid):
        e = err_star(inst)
        floor = 1 - (e + k - 1) / inst.N_plus
        U = _uniforms(split_seed(seed, 1, a), trials, inst.N)
        for name, rep in adversarial_reports(inst, split_seed(seed, 2, a)).items():
            sim = simulate_label_report(inst, rep, cfg, U)
            hits = int((sim["recall"] < floor - 1e-12).sum())
            out.append(rate_at_most("recall-label", f"P(recall < {fmt(floor)}) <= delta",
                                    f"#{a} err*={e} {name}", hits, trials, delta))
    return out


def campaign_nrd_label(trials=10_000, seed=0, delta=0.1, k=1, grid=None) -> list[Verdict]:
    """Mean NRD of the label-report protocol with a truthful report."""
    cfg = LabelReportConfig(k, delta)
    grid = threshold_grid(seed=seed) if grid is None else grid
    out = []
    for a, inst in enumerate(grid):
        e = err_star(inst)
        bound = (2 + 2 * e / k) * math.log(inst.N_minus) * math.log(1 / delta) + e
        sim = simulate_label_report(inst, inst.labels, cfg, _uniforms(split_seed(seed, 1, a), trials, inst.N))
        out.append(mean_at_most("nrd-label", "E[NRD] <= (2+2err*/k) ln N- ln(1/delta) + err*",
                                f"#{a} err*={e}", sim["nrd"], bound))
    return out


def detection_instances(delta: float, k: int = 1) -> list[tuple[OneDimInstance, np.ndarray]]:
    """Hidden-block instances where every hidden positive has p_i < 1."""
    c = sampling_constant_label(0, k, delta)
    m0 = int(math.floor(c)) + 1  # negatives ahead of the hidden block
    out = []
    for m, extra, tail in [(m0, k, 60), (m0 + 3, k, 100), (m0 + 8, k + 1, 150), (2 * m0, k + 2, 200)]:
        inst = hidden_block_instance(5, m, m + extra, tail)
        rep = inst.labels.copy()
        rep[5 + m: 5 + m + m + extra] = -1
        out.append((inst, rep))
    return out


def campaign_detect_label(trials=10_000, seed=0, delta=0.1, k=1, cases=None) -> list[Verdict]:
    cfg = LabelReportConfig(k, delta)
    cases = detection_instances(delta, k) if cases is None else cases
    out = []
    for a, (inst, rep) in enumerate(cases):
        e = err_star(inst)
        t_A, err_A = optimal_threshold_report(inst, rep)
        err_true = int(threshold_errors(inst.positions, inst.labels, [t_A])[0])
        name = f"#{a} N={inst.N} err*={e} err(t*_A)={err_true}"
        c = sampling_constant_label(err_A, k, delta)
        walk = inst.walk_order()
        walk = walk[(rep[walk] == -1) & (inst.positions[walk] < t_A)]
        hidden_rank = np.flatnonzero(inst.labels[walk] == 1) + 1
        if err_true < e + k:
            out.append(skipped("detect-label", "detection >= 1-delta", name, "err(t*_A) < err*+k"))
            continue
        if len(hidden_rank) == 0 or (c / hidden_rank).max() >= 1:
            out.append(skipped("detect-label", "detection >= 1-delta", name, "some p_i = 1"))
            continue
        sim = simulate_label_report(inst, rep, cfg, _uniforms(split_seed(seed, 3, a), trials, inst.N))
        out.append(rate_at_least("detect-label", "detection >= 1-delta", name,
                                 int(sim["detected"].sum()), trials, 1 - delta))
    return out


def inflated_threshold(inst: OneDimInstance) -> float | None:
    """Smallest threshold above t* whose true error exceeds 3 err*."""
    t_star, e = optimal_threshold_true(inst)
    cands = candidate_thresholds(inst)
    cands = cands[cands > t_star]
    errs = threshold_errors(inst.positions, inst.labels, cands)
    ok = np.flatnonzero(errs > 3 * e)
    return float(cands[ok[0]]) if len(ok) else None


def campaign_detect_classifier(trials=10_000, seed=0, delta=0.1, grid=None) -> list[Verdict]:
    cfg = ClassifierReportConfig(delta)
    grid = threshold_grid(seed=seed) if grid is None else grid
    out = []
    for a, inst in enumerate(grid):
        e = err_star(inst)
        t_A = inflated_threshold(inst)
        if t_A is None:
            out.append(skipped("detect-classifier", "detection >= 1-delta", f"#{a} err*={e}",
                               "no threshold with err > 3 err*"))
            continue
        err_A = int(threshold_errors(inst.positions, inst.labels, [t_A])[0])
        sim = simulate_classifier_report(inst, t_A, cfg, _uniforms(split_seed(seed, 4, a), trials, inst.N))
        out.append(rate_at_least("detect-classifier", "detection >= 1-delta",
                                 f"#{a} err*={e} err(t_A)={err_A}", int(sim["detected"].sum()), trials, 1 - delta))
    return out


def campaign_nrd_classifier(trials=10_000, seed=0, delta=0.01, grid=None) -> list[Verdict]:
    cfg = ClassifierReportConfig(delta)
    grid = threshold_grid(seed=seed, err_range=(1, 10)) if grid is None else grid
    out = []
    for a, inst in enumerate(grid):
        t_star, e = optimal_threshold_true(inst)
        name = f"#{a} err*={e}"
        claim = "E[NRD] <= 2err* ln N ln(N/delta) + err*"
        if e == 0:
            out.append(skipped("nrd-classifier", claim, name, "err* = 0 outside the tested regime"))
            continue
        bound = 2 * e * math.log(inst.N) * math.log(inst.N / delta) + e
        sim = simulate_classifier_report(inst, t_star, cfg, _uniforms(split_seed(seed, 5, a), trials, inst.N))
        out.append(mean_at_most("nrd-classifier", claim, name, sim["nrd"], bound))
    return out


def best_response_instances(count=5, N=30, seed=0, delta=0.3, k=1, lam=1.0) -> list[OneDimInstance]:
    """Realizable N=30 instances that meet the best-response precondition."""
    out, a = [], 0
    while len(out) < count:
        rng = np.random.default_rng(split_seed(seed, a))
        a += 1
        pos = np.round(rng.random(N), 6)
        if len(np.unique(pos)) < N:
            continue
        n_plus = int(rng.integers(2, 6))
        y = -np.ones(N, dtype=np.int64)
        y[np.argsort(-pos)[:n_plus]] = 1
        inst = OneDimInstance(np.arange(N), pos, y)
        if best_response_precondition(inst, err_star(inst), k, delta, lam):
            out.append(inst)
    return out


def campaign_best_response(trials=200, seed=0, delta=0.3, k=1, lam=1.0, count=5) -> list[Verdict]:
    cfg = LabelReportConfig(k, delta)
    out = []
    for a, inst in enumerate(best_response_instances(count, seed=seed, delta=delta, k=k, lam=lam)):
        e = err_star(inst)
        br = best_response_search(inst, cfg, AliceLoss(lam), trials=trials, rng=split_seed(seed, 6, a))
        ok = br.err_at_t_star_A < e + k
        out.append(Verdict("best-response", "err(t*_A) < err*+k for the best response",
                           f"#{a} N+={inst.N_plus} err*={e} hidden={list(br.hidden)}",
                           br.err_at_t_star_A, e + k, 0.0, "pass" if ok else "fail",
                           f"expected loss {fmt(br.expected_loss)}"))
    return out


def lower_bound_check(N: int) -> tuple[bool, int]:
    """Exhaustively: every revealed set meeting REC* on all family members hits
    every bucket.  Returns (holds, number of qualifying sets)."""
    fam = lower_bound_family(N)
    masks = ((np.arange(2 ** N)[:, None] >> np.arange(N)) & 1).astype(bool)
    ok = np.ones(len(masks), dtype=bool)
    for inst, (t, _) in zip(fam.instances, fam.optima):
        pos = inst.labels == 1
        rec_star = (pos & (inst.positions >= t)).sum() / pos.sum()
        ok &= (masks[:, pos].sum(axis=1) / pos.sum()) >= rec_star - 1e-12
    hits = np.stack([masks[:, b].any(axis=1) for b in fam.buckets], axis=1)
    return bool(hits[ok].all()), int(ok.sum())


def campaign_lower_bound(sizes=(4, 8, 16)) -> list[Verdict]:
    out = []
    for N in sizes:
        holds, count = lower_bound_check(N)
        L = N.bit_length() - 1
        out.append(Verdict("lower-bound", "recall >= REC* on every member => all buckets hit",
                           f"N={N}", float(holds), 1.0, 0.0, "pass" if holds and count else "fail",
                           f"{count} qualifying sets, {L} buckets + B0"))
    return out


def hidden_band_instance():
    """2-D instance for the high-dimensional detection check.

    Positives on rows y=2,3 and a hidden band of five positives at y=-0.5;
    two negatives at y=0 sit between them and negatives fill rows y=-2,-3.
    The true optimum keeps the band (err* = 2); Alice reports the band as
    negative, so her optimum misses all five.
    """
    xs = np.arange(-3, 4, dtype=float)
    pts, lab = [], []
    for yy in (2.0, 3.0):
        pts += [(x, yy) for x in xs]
        lab += [1] * len(xs)
    band = [(x, -0.5) for x in (-2.0, -1.0, 0.0, 1.0, 2.0)]
    pts += band
    lab += [1] * len(band)
    pts += [(-3.0, 0.0), (3.0, 0.0)]
    lab += [-1, -1]
    for yy in (-2.0, -3.0):
        pts += [(x, yy) for x in xs]
        lab += [-1] * len(xs)
    inst = Instance(np.arange(len(pts)), np.array(pts), lab)
    rep = inst.y.copy()
    rep[14:19] = -1
    return inst, rep


def _consistent_optimum(inst, optima_true, optima_report):
    return any(check_consistency(h, optima_report, inst) for h in optima_true.classifiers)


def campaign_detect_highdim(trials=10_000, seed=0, delta=0.3, k=1) -> list[Verdict]:
    cfg = LabelReportConfig(k, delta)
    inst, rep = hidden_band_instance()
    opt_true = enumerate_optimal_classifiers(inst)
    plan = plan_walk(inst, rep, cfg)
    err_A_true = min(int((h.predict(inst.X) != inst.y).sum()) for h in plan.optima.classifiers)
    name = f"band n={inst.n} err*={opt_true.err_star} err(h*_A)={err_A_true}"
    claim = "detection >= 1-delta"
    if err_A_true < opt_true.err_star + k:
        return [skipped("detect-highdim", claim, name, "err(h*_A) < err*+k")]
    if not _consistent_optimum(inst, opt_true, plan.optima):
        return [skipped("detect-highdim", claim, name, "no consistent true optimum")]
    sim = simulate_highdim_sampling(inst, rep, cfg, _uniforms(split_seed(seed, 7), trials, inst.n))
    return [rate_at_least("detect-highdim", claim, name, int(sim["detected"].sum()), trials, 1 - delta)]


def campaign_recall_highdim(trials=10_000, seed=0, delta=0.1, k=1, count=8) -> list[Verdict]:
    """Recall floor 1-(err*+k)/n+ on small 2-D instances with random hides."""
    cfg = LabelReportConfig(k, delta)
    out, a = [], 0
    while len(out) < count and a < 20 * count:
        rng = np.random.default_rng(split_seed(seed, 8, a))
        a += 1
        n = int(rng.integers(12, 21))
        X = rng.normal(size=(n, 2))
        y = np.where(X @ rng.normal(size=2) > rng.normal(0, 0.3), 1, -1)
        y[rng.integers(n)] *= -1  # usually makes the instance non-realizable
        if (y == 1).sum() < 3:
            continue
        inst = Instance(np.arange(n), X, y)
        opt_true = enumerate_optimal_classifiers(inst)
        rep = y.copy()
        rep[rng.choice(np.flatnonzero(y == 1), size=2, replace=False)] = -1
        plan = plan_walk(inst, rep, cfg)
        if not _consistent_optimum(inst, opt_true, plan.optima):
            continue
        floor = 1 - (opt_true.err_star + k) / inst.n_plus
        sim = simulate_highdim_sampling(inst, rep, cfg, _uniforms(split_seed(seed, 9, a), trials, n))
        out.append(rate_at_most("recall-highdim", f"P(recall < {fmt(floor)}) <= delta",
                                f"#{a - 1} n={n} err*={opt_true.err_star}",
                                int((sim["recall"] < floor - 1e-12).sum()), trials, delta))
    return out


CAMPAIGNS = {
    "recall-label": campaign_recall_label,
    "nrd-label": campaign_nrd_label,
    "detect-label": campaign_detect_label,
    "detect-classifier": campaign_detect_classifier,
    "nrd-classifier": campaign_nrd_classifier,
    "best-response": campaign_best_response,
    "lower-bound": campaign_lower_bound,
}

HIGHDIM_CAMPAIGNS = {
    "detect-highdim": campaign_detect_highdim,
    "recall-highdim": campaign_recall_highdim,
}


def verify_bounds(campaign: str = "all", trials: int | None = None, seed: int = 0,
                  delta: float | None = None, k: int | None = None,
                  highdim: bool = False) -> list[Verdict]:
    """Run one campaign (or all) and return one verdict per checked claim.

    ``highdim`` adds the low-dimensional campaigns of the all-optima
    sampling protocol to ``all``.
    """
    table = {**CAMPAIGNS, **HIGHDIM_CAMPAIGNS}
    if campaign == "all":
        names = list(CAMPAIGNS) + (list(HIGHDIM_CAMPAIGNS) if highdim else [])
    else:
        names = [campaign]
    out = []
    for name in names:
        if name not in table:
            raise ValueError(f"unknown campaign {name!r}; choose from {sorted(table)} or 'all'")
        fn = table[name]
        kw = {"seed": seed} if name != "lower-bound" else {}
        params = fn.__code__.co_varnames[: fn.__code__.co_argcount]
        if trials is not None and "trials" in params:
            kw["trials"] = trials
        if delta is not None and "delta" in params:
            kw["delta"] = delta
        if k is not None and "k" in params:
            kw["k"] = k
        out.extend(fn(**kw))
    return out


# -- figure campaigns ------------------------------------------------------------

CAL_PROTOCOLS = ("reveal-all", "label-report", "classifier-report")


@dataclass
class FigureResult:
    name: str
    rows: list
    ratios: dict = field(default_factory=dict)  # protocol -> list of NRD ratios


def _cal_rows(exp, corpus, cfg: ExperimentConfig, protocols=CAL_PROTOCOLS):
    rows, ratios = [], {}
    for proto in protocols:
        cc = CalConfig(T=cfg.iterations, N_batch=cfg.batch, subprotocol=proto,
                       label_cfg=LabelReportConfig(cfg.k, cfg.delta),
                       classifier_cfg=ClassifierReportConfig(cfg.delta))
        for r in range(cfg.trials):
            s = split_seed(cfg.seed, r)
            t0 = time.perf_counter()
            rec = run_cal(corpus, cc, seed=s)
            ms = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
            for it in rec.iterations:
                rows.append(ResultRow(exp, proto, it.iteration, s, it.recall, it.nrd, it.full_reveal, ms))
            last = rec.iterations[-1]
            truth = corpus.truth
            neg_reviewed = sum(1 for i in last.labels if truth[i] == -1)
            ratios.setdefault(proto, []).append(last.nrd / neg_reviewed if neg_reviewed else 0.0)
    return rows, ratios


def run_figure_campaign(name: str, cfg: ExperimentConfig = ExperimentConfig()) -> FigureResult:
    """Desk-scale series for the figure analogues.

    fig1 / fig2: CAL recall and NRD per iteration for the three protocols
    (same runs, different experiment id).  fig3: mean NRD of both 1-D
    protocols with truthful reports as N grows (iteration column = N).
    fig4: NRD ratio of the critical-points protocol against CAL with the
    classifier-report protocol on the same realizable corpus.
    """
    if name in ("fig1", "fig2"):
        corpus = gaussian_mixture(cfg.corpus_config())
        rows, ratios = _cal_rows(name, corpus, cfg)
        return FigureResult(name, rows, ratios)
    if name == "fig3":
        rows = []
        lcfg, ccfg = LabelReportConfig(cfg.k, cfg.delta), ClassifierReportConfig(cfg.delta)
        for N in (64, 128, 256, 512, 1024):
            for r in range(cfg.trials):
                s = split_seed(cfg.seed, N, r)
                inst = _random_instance(N, s, 3)
                U = uniform_rows([s], N)
                t0 = time.perf_counter()
                a = simulate_label_report(inst, inst.labels, lcfg, U)
                t1 = time.perf_counter()
                b = simulate_classifier_report(inst, optimal_threshold_true(inst)[0], ccfg, U)
                t2 = time.perf_counter()
                ma, mb = ((t1 - t0) * 1e3, (t2 - t1) * 1e3) if cfg.timing else (None, None)
                rows.append(ResultRow(name, "label-report", N, s, float(a["recall"][0]), int(a["nrd"][0]),
                                      bool(a["detected"][0]), ma))
                rows.append(ResultRow(name, "classifier-report", N, s, float(b["recall"][0]),
                                      int(b["nrd"][0]), bool(b["detected"][0]), mb))
        return FigureResult(name, rows)
    if name == "fig4":
        corpus = enforce_realizable(gaussian_mixture(cfg.corpus_config()))
        t0 = time.perf_counter()
        crit = critical_points_fast(corpus)
        ms = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
        rows = [ResultRow(name, "critical-points", 0, cfg.seed, 1.0, len(crit), False, ms)]
        cal_rows, ratios = _cal_rows(name, corpus, cfg, ("classifier-report",))
        ratios["critical-points"] = [nrd_ratio(corpus, crit)]
        return FigureResult(name, rows + cal_rows, ratios)
    raise ValueError(f"unknown figure {name!r}")

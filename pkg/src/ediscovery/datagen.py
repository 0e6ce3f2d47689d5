"""Synthetic instances, realizability enforcement, the lower-bound family and
the plain-text instance file format.

File format::

    dim=<d> count=<n>
    <id>\t<label>\t<v1> <v2> ... <vd>

Labels are ``1``/``-1`` (``+1`` accepted).  Floats are written with ``repr``
so a save/load round trip is bit-exact.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import EmptyInstanceError, Instance, OneDimInstance, optimal_threshold_true
from .seeding import make_rng


class InstanceParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


@dataclass(frozen=True)
class GaussianConfig:
    n: int = 1000
    d: int = 20
    positive_ratio: float = 0.05
    mean_separation: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.positive_ratio < 1.0:
            raise ValueError("positive_ratio must lie in (0, 1)")
        if round(self.n * self.positive_ratio) < 1:
            raise ValueError("configuration yields no positive documents")
        if self.d < 1 or self.mean_separation < 0:
            raise ValueError("need d >= 1 and mean_separation >= 0")

    @property
    def n_plus(self) -> int:
        return int(round(self.n * self.positive_ratio))


def gaussian_mixture(cfg: GaussianConfig) -> Instance:
    """Positives ~ N(+mu e1, I), negatives ~ N(-mu e1, I), mu = separation / 2."""
    rng = np.random.default_rng(cfg.seed)
    n_plus = cfg.n_plus
    mu = np.zeros(cfg.d)
    mu[0] = cfg.mean_separation / 2.0
    X = rng.standard_normal((cfg.n, cfg.d))
    y = -np.ones(cfg.n, dtype=np.int64)
    y[rng.permutation(cfg.n)[:n_plus]] = 1
    X += np.where(y[:, None] == 1, mu, -mu)
    return Instance(np.arange(cfg.n), X, y)


def bisector(instance: Instance) -> tuple[np.ndarray, float]:
    """Unit normal and offset of the perpendicular bisector of the class means.

    The normal points from the negative mean to the positive mean.
    """
    mp = instance.X[instance.y == 1].mean(axis=0)
    mm = instance.X[instance.y == -1].mean(axis=0)
    u = mp - mm
    norm = np.linalg.norm(u)
    if norm == 0 or not np.isfinite(norm):
        raise ValueError("class means coincide; bisector undefined")
    u = u / norm
    return u, -float(u @ (mp + mm) / 2.0)


def enforce_realizable(instance: Instance, epsilon: float = 1e-3) -> Instance:
    """Reflect points on the wrong side of the mean bisector.

    A misclassified point is mirrored across the bisector and pushed a further
    ``epsilon`` towards its own side, so the result is strictly separated by
    the bisector.  Correctly placed points do not move.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if instance.n_plus == 0 or instance.n_minus == 0:
        return instance
    u, c = bisector(instance)
    s = instance.X @ u + c
    y = instance.y
    wrong = ((y == 1) & (s < 0)) | ((y == -1) & (s >= 0))
    X = instance.X.copy()
    shift = -2.0 * s[wrong] + y[wrong] * epsilon
    X[wrong] += shift[:, None] * u
    return Instance(instance.ids, X, y)


@dataclass(frozen=True)
class LowerBoundFamily:
    positions: np.ndarray
    buckets: tuple  # bucket j -> 0-based indices into positions
    instances: tuple  # instance j (1-based j) stored at j-1
    optima: tuple  # (t*_j, err*_j)

    @property
    def N(self) -> int:
        return len(self.positions)


def lower_bound_family(N: int) -> LowerBoundFamily:
    """log2 N labelings sharing positions x1 > ... > xN (xi = N - i + 1).

    Bucket B0 = {x1}, Bj = {xi : 2^(j-1) < i <= 2^j}; instance j labels
    B0 and Bj positive and everything else negative.
    """
    if N < 2 or N & (N - 1):
        raise ValueError("N must be a power of two >= 2")
    L = N.bit_length() - 1
    positions = np.arange(N, 0, -1, dtype=float)
    buckets = [np.array([0])]
    for j in range(1, L + 1):
        buckets.append(np.arange(2 ** (j - 1), 2 ** j))
    ids = np.arange(1, N + 1)
    insts, optima = [], []
    for j in range(1, L + 1):
        y = -np.ones(N, dtype=np.int64)
        y[buckets[0]] = 1
        y[buckets[j]] = 1
        inst = OneDimInstance(ids, positions, y)
        insts.append(inst)
        optima.append(optimal_threshold_true(inst))
    return LowerBoundFamily(positions, tuple(buckets), tuple(insts), tuple(optima))


def random_threshold_instance(N: int, rng=None, max_flips: int = 10, boundary_window: int = 40,
                              ids_offset: int = 0) -> OneDimInstance:
    """A 1-D instance that is a threshold labelling with a few flips near the cut."""
    rng = make_rng(rng)
    pos = rng.random(N)
    cut = rng.uniform(0.55, 0.95)
    y = np.where(pos >= cut, 1, -1)
    nflip = int(rng.integers(0, max_flips + 1))
    near = np.argsort(np.abs(pos - cut))[:boundary_window]
    y[rng.choice(near, size=min(nflip, len(near)), replace=False)] *= -1
    if not (y == 1).any():
        y[np.argmax(pos)] = 1
    return OneDimInstance(np.arange(N) + ids_offset, pos, y)


# -- file format ---------------------------------------------------------------

_HEADER = re.compile(r"^dim=(\d+)\s+count=(\d+)\s*$")


def dump_instance(instance: Instance | OneDimInstance) -> str:
    if isinstance(instance, OneDimInstance):
        instance = instance.to_instance()
    lines = [f"dim={instance.d} count={instance.n}"]
    for i, y, x in zip(instance.ids.tolist(), instance.y.tolist(), instance.X):
        lines.append(f"{i}\t{y}\t" + " ".join(repr(float(v)) for v in x))
    return "\n".join(lines) + "\n"


def save_instance(instance: Instance | OneDimInstance, path) -> None:
    Path(path).write_text(dump_instance(instance))


def load_instance(path) -> Instance:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EmptyInstanceError(f"{path}: empty instance file")
    m = _HEADER.match(lines[0])
    if not m:
        raise InstanceParseError("expected header 'dim=<d> count=<n>'", 1)
    d, n = int(m.group(1)), int(m.group(2))
    if n == 0:
        raise EmptyInstanceError(f"{path}: instance has no documents")
    ids, ys, X = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InstanceParseError("expected '<id>\\t<label>\\t<features>'", lineno)
        try:
            ids.append(int(parts[0]))
        except ValueError:
            raise InstanceParseError(f"bad id {parts[0]!r}", lineno) from None
        if parts[1] not in ("1", "+1", "-1"):
            raise InstanceParseError(f"bad label {parts[1]!r}", lineno)
        ys.append(int(parts[1]))
        try:
            v = [float(t) for t in parts[2].split()]
        except ValueError:
            raise InstanceParseError("bad feature value", lineno) from None
        if len(v) != d:
            raise InstanceParseError(f"expected {d} features, found {len(v)}", lineno)
        X.append(v)
    if len(ids) != n:
        raise InstanceParseError(f"header announces {n} documents, found {len(ids)}")
    try:
        return Instance(ids, np.array(X, dtype=float).reshape(n, d), ys)
    except ValueError as e:
        raise InstanceParseError(str(e)) from None


def load_one_dim(path) -> OneDimInstance:
    return OneDimInstance.from_instance(load_instance(path))


__all__ = [
    "GaussianConfig",
    "dump_instance",
    "InstanceParseError",
    "LowerBoundFamily",
    "bisector",
    "enforce_realizable",
    "gaussian_mixture",
    "load_instance",
    "load_one_dim",
    "lower_bound_family",
    "random_threshold_instance",
    "save_instance",
]

"""
Plug-in entropy and mutual information between BS-side occupancy patterns
and user-side AoD indicators.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .beamspace import angle_to_bin
from .errors import EmptyDataset, EmptyDistribution
from .features import FeatureKind, FeatureNorms, aod_indicator, compute_norms, input_vector
from .scene import ChannelSample

CAVEAT_DISTINCT_FRACTION = 0.1


def discretize(values, kind="rss") -> bytes:
    """Binary occupancy pattern of a feature vector.

    A bin is occupied when its RSS feature is above 0 or its delay feature
    is below 1. Returned as bytes (one 0/1 byte per bin) so it can key a dict.
    """
    v = np.asarray(values, dtype=float)
    bits = v > 0 if FeatureKind(kind) is FeatureKind.RSS else v < 1
    return bits.astype(np.uint8).tobytes()


def indicator_pattern(y) -> bytes:
    return (np.asarray(y) > 0.5).astype(np.uint8).tobytes()


@dataclass
class PatternDistribution:
    joint_counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.joint_counts.values())

    def add(self, x_pattern: Hashable, y_pattern: Hashable, count: int = 1) -> None:
        self.joint_counts[(x_pattern, y_pattern)] += count

    def merge(self, other: "PatternDistribution") -> "PatternDistribution":
        return PatternDistribution(self.joint_counts + other.joint_counts)

    def x_counts(self) -> Counter:
        c = Counter()
        for (x, _), n in self.joint_counts.items():
            c[x] += n
        return c

    def y_counts(self) -> Counter:
        c = Counter()
        for (_, y), n in self.joint_counts.items():
            c[y] += n
        return c

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Hashable, Hashable]]) -> "PatternDistribution":
        return cls(Counter(pairs))

    @classmethod
    def from_table(cls, table) -> "PatternDistribution":
        """Distribution from a 2-D count array indexed [x, y]."""
        t = np.asarray(table)
        return cls(Counter({(i, j): int(t[i, j]) for i in range(t.shape[0])
                            for j in range(t.shape[1]) if t[i, j] > 0}))


def entropy(counts) -> float:
    """Plug-in Shannon entropy in bits of a count vector or mapping."""
    if isinstance(counts, Mapping):
        counts = list(counts.values())
    # sorted so the result does not depend on insertion order
    c = np.sort(np.asarray(counts, dtype=float))
    c = c[c > 0]
    total = c.sum()
    if total <= 0:
        raise EmptyDistribution("entropy of an empty distribution")
    p = c / total
    return float(-np.sum(p * np.log2(p)))


@dataclass(frozen=True)
class MutualInformation:
    h_y: float
    h_y_given_x: float
    i_xy: float
    ratio: float

    @property
    def constant_output(self) -> bool:
        """True when H(Y)=0 and the ratio was set to 1 by convention."""
        return self.h_y == 0.0


def mutual_information(dist: PatternDistribution) -> MutualInformation:
    """H(Y), H(Y|X) = sum_x p(x) H(Y|X=x), I = H(Y) - H(Y|X), and I/H(Y)."""
    total = dist.total
    if total <= 0:
        raise EmptyDistribution("mutual information of an empty distribution")
    h_y = entropy(dist.y_counts())
    by_x: Dict[Hashable, List[int]] = {}
    for (x, _), n in dist.joint_counts.items():
        if n > 0:
            by_x.setdefault(x, []).append(n)
    h_cond = float(np.sum(np.sort([sum(ns) / total * entropy(ns) for ns in by_x.values()])))
    i_xy = min(max(h_y - h_cond, 0.0), h_y)
    ratio = 1.0 if h_y == 0 else min(i_xy / h_y, 1.0)
    return MutualInformation(h_y, h_cond, i_xy, ratio)


def aoa_occupancy(sample: ChannelSample, n_bs: int) -> bytes:
    bits = np.zeros(n_bs, dtype=np.uint8)
    bits[angle_to_bin(n_bs, np.array([p.aoa_rad for p in sample.paths]))] = 1
    return bits.tobytes()


def pattern_distribution(dataset: Sequence[ChannelSample], n_bs: int, n_ms: int, kind="rss",
                         norms: Optional[FeatureNorms] = None) -> PatternDistribution:
    """Joint counts of (discretized input, output indicator) over the dataset.

    With degenerate norms (e.g. a single path in total) the input pattern
    falls back to raw AoA occupancy.
    """
    norms = compute_norms(dataset) if norms is None else norms
    dist = PatternDistribution()
    for s in dataset:
        if norms.degenerate:
            x = aoa_occupancy(s, n_bs)
        else:
            x = discretize(input_vector(s, norms, n_bs, kind), kind)
        dist.add(x, indicator_pattern(aod_indicator(s, n_ms)))
    return dist


@dataclass(frozen=True)
class SweepRow:
    n_bs: int
    h_y: float
    h_y_given_x: float
    i_xy: float
    ratio: float
    n_samples: int
    n_distinct_x: int

    @property
    def sparse(self) -> bool:
        """Plug-in estimate is unreliable: too many distinct input patterns."""
        return self.n_distinct_x > CAVEAT_DISTINCT_FRACTION * self.n_samples


def mi_sweep(dataset: Sequence[ChannelSample], n_bs_list: Sequence[int], n_ms: int = 10,
             kind="rss") -> List[SweepRow]:
    """Information measures at each BS codebook size, ascending in n_bs."""
    if not dataset:
        raise EmptyDataset("mi sweep needs at least one sample")
    norms = compute_norms(dataset)
    rows = []
    for n_bs in sorted(set(int(n) for n in n_bs_list)):
        dist = pattern_distribution(dataset, n_bs, n_ms, kind, norms)
        mi = mutual_information(dist)
        rows.append(SweepRow(n_bs, mi.h_y, mi.h_y_given_x, mi.i_xy, mi.ratio,
                             dist.total, len(dist.x_counts())))
    return rows


SWEEP_COLUMNS = ("n_bs", "h_y", "h_y_given_x", "i_xy", "ratio", "n_samples", "n_distinct_x")


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r.n_bs, repr(r.h_y), repr(r.h_y_given_x), repr(r.i_xy), repr(r.ratio),
                    r.n_samples, r.n_distinct_x])
    return buf.getvalue()


def sweep_from_csv(text: str) -> List[SweepRow]:
    out = []
    for d in csv.DictReader(io.StringIO(text)):
        out.append(SweepRow(int(d["n_bs"]), float(d["h_y"]), float(d["h_y_given_x"]),
                            float(d["i_xy"]), float(d["ratio"]), int(d["n_samples"]),
                            int(d["n_distinct_x"])))
    return out

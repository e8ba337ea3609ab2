"""
Input/output vectors for AoD-bin prediction.

Inputs live on the BS angular grid (one entry per DFT column) and hold a
normalized RSS or delay of the path landing in that bin. Outputs are
0/1 indicators over the user's angular grid.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .beamspace import angle_to_bin
from .errors import DegenerateNorms, EmptyDataset, EmptyPathList
from .scene import ChannelSample


class FeatureKind(str, Enum):
    RSS = "rss"
    DELAY = "delay"


@dataclass(frozen=True)
class FeatureNorms:
    r_min: float
    r_max: float
    tau_min: float
    tau_max: float

    @property
    def degenerate(self) -> bool:
        return not (self.r_min < self.r_max and 0 < self.tau_min < self.tau_max)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> "FeatureNorms":
        return cls(float(d["r_min"]), float(d["r_max"]), float(d["tau_min"]), float(d["tau_max"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "FeatureNorms":
        return cls.from_dict(json.loads(Path(path).read_text()))


def compute_norms(dataset: Sequence[ChannelSample]) -> FeatureNorms:
    """RSS and delay extrema over every path in the dataset."""
    rss = [p.rss_db for s in dataset for p in s.paths]
    tau = [p.delay_s for s in dataset for p in s.paths]
    if not rss:
        raise EmptyDataset("cannot compute norms without any path")
    return FeatureNorms(min(rss), max(rss), min(tau), max(tau))


def _columns(sample: ChannelSample):
    if not sample.paths:
        raise EmptyPathList(f"sample (bs {sample.bs_id}, user {sample.user_id}) has no paths")
    p = sample.paths
    return (
        np.array([x.rss_db for x in p]),
        np.array([x.delay_s for x in p]),
        np.array([x.aoa_rad for x in p]),
        np.array([x.aod_rad for x in p]),
    )


def rss_input(sample: ChannelSample, norms: FeatureNorms, n_bs: int) -> np.ndarray:
    """Per AoA bin, (r - r_min)/(r_max - r_min) of the strongest path; 0 when empty.

    A path at exactly ``r_min`` maps to 0 and is indistinguishable from an
    empty bin. Values from samples outside the norms' range (test data
    normalized with training extrema) are clipped to [0, 1].
    """
    if not norms.r_max > norms.r_min:
        raise DegenerateNorms(f"r_max ({norms.r_max}) must exceed r_min ({norms.r_min})")
    rss, _, aoa, _ = _columns(sample)
    values = np.clip((rss - norms.r_min) / (norms.r_max - norms.r_min), 0.0, 1.0)
    x = np.zeros(n_bs)
    np.maximum.at(x, angle_to_bin(n_bs, aoa), values)
    return x


def delay_input(sample: ChannelSample, norms: FeatureNorms, n_bs: int) -> np.ndarray:
    """Per AoA bin, (tau - tau_min)/(2 tau_max - tau_min) of the earliest path; 1 when empty."""
    if not (0 < norms.tau_min < norms.tau_max):
        raise DegenerateNorms(f"need 0 < tau_min < tau_max, got {norms.tau_min}, {norms.tau_max}")
    _, tau, aoa, _ = _columns(sample)
    values = np.clip((tau - norms.tau_min) / (2 * norms.tau_max - norms.tau_min), 0.0, 1.0)
    x = np.ones(n_bs)
    np.minimum.at(x, angle_to_bin(n_bs, aoa), values)
    return x


def aod_indicator(sample: ChannelSample, n_ms: int) -> np.ndarray:
    """1 for every user-side bin that at least one path departs through."""
    _, _, _, aod = _columns(sample)
    y = np.zeros(n_ms)
    y[angle_to_bin(n_ms, aod)] = 1.0
    return y


def input_vector(sample: ChannelSample, norms: FeatureNorms, n_bs: int, kind) -> np.ndarray:
    kind = FeatureKind(kind)
    if kind is FeatureKind.RSS:
        return rss_input(sample, norms, n_bs)
    return delay_input(sample, norms, n_bs)


def featurize_dataset(
    dataset: Sequence[ChannelSample], norms: FeatureNorms, n_bs: int, n_ms: int, kind
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """(input, output) pairs in dataset order."""
    return [(input_vector(s, norms, n_bs, kind), aod_indicator(s, n_ms)) for s in dataset]


def feature_matrix(dataset: Sequence[ChannelSample], norms: FeatureNorms, n_bs: int, kind) -> np.ndarray:
    """Stacked inputs, shape (len(dataset), n_bs)."""
    if not dataset:
        return np.zeros((0, n_bs))
    return np.stack([input_vector(s, norms, n_bs, kind) for s in dataset])


def indicator_matrix(dataset: Sequence[ChannelSample], n_ms: int) -> np.ndarray:
    if not dataset:
        return np.zeros((0, n_ms))
    return np.stack([aod_indicator(s, n_ms) for s in dataset])


def save_pairs(pairs, path, kind, n_bs: int, n_ms: int) -> None:
    kind = FeatureKind(kind).value
    lines = []
    for x, y in pairs:
        rec = {"input": [float(v) for v in x], "output": [int(v) for v in y],
               "kind": kind, "n_bs": n_bs, "n_ms": n_ms}
        lines.append(json.dumps(rec, separators=(",", ":")) + "\n")
    Path(path).write_text("".join(lines))


def load_pairs(path) -> List[Tuple[np.ndarray, np.ndarray]]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                out.append((np.array(rec["input"], dtype=float), np.array(rec["output"], dtype=float)))
    return out

"""
The four AoD-bin estimators and the sample-average benchmark.

``rss`` and ``delay`` feed one BS-side feature vector to a two-hidden-layer
network; ``joint`` concatenates both vectors; ``seq`` trains the ``rss`` and
``delay`` networks first and then a small network on their stacked outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import mlp
from .errors import EmptyBatch, InsufficientData
from .evaluation import EvalReport, RocCurve, evaluate_predictions, roc_curve
from .features import FeatureNorms, compute_norms, feature_matrix, indicator_matrix
from .scene import ChannelSample
from .seeding import derive_seed

STAGE1_HIDDEN = (50, 20)
STAGE2_HIDDEN = (20,)


class SchemeKind(str, Enum):
    RSS = "rss"
    DELAY = "delay"
    SEQUENTIAL = "seq"
    JOINT = "joint"


SCHEME_LABELS = {
    SchemeKind.RSS: "RSS",
    SchemeKind.DELAY: "Delay",
    SchemeKind.SEQUENTIAL: "Seq",
    SchemeKind.JOINT: "both",
}


@dataclass(frozen=True)
class SplitManifest:
    """Which samples went to training and testing, by (bs_id, user_id)."""

    train_ids: Tuple[Tuple[int, int], ...]
    test_ids: Tuple[Tuple[int, int], ...]
    train_fraction: float
    seed: int
    stage2_inputs: str = "training-split stage-1 outputs"

    def to_dict(self) -> dict:
        return {
            "train_ids": [list(i) for i in self.train_ids],
            "test_ids": [list(i) for i in self.test_ids],
            "train_fraction": self.train_fraction,
            "seed": self.seed,
            "stage2_inputs": self.stage2_inputs,
        }

    @classmethod
    def from_dict(cls, d) -> "SplitManifest":
        return cls(tuple(tuple(i) for i in d["train_ids"]), tuple(tuple(i) for i in d["test_ids"]),
                   float(d["train_fraction"]), int(d["seed"]),
                   d.get("stage2_inputs", "training-split stage-1 outputs"))

    def select(self, dataset: Sequence[ChannelSample]):
        """(train, test) sample lists drawn from ``dataset`` in manifest order."""
        by_id = {(s.bs_id, s.user_id): s for s in dataset}
        try:
            return [by_id[i] for i in self.train_ids], [by_id[i] for i in self.test_ids]
        except KeyError as e:
            raise InsufficientData(f"sample {e.args[0]} from the manifest is not in the dataset") from None


def split_dataset(dataset: Sequence[ChannelSample], train_fraction: float = 0.95,
                  seed: int = 0) -> SplitManifest:
    """Random partition with ``round(fraction * n)`` training samples."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    n = len(dataset)
    n_train = int(round(train_fraction * n))
    if n_train < 2 or n - n_train < 1:
        raise InsufficientData(f"{n} samples cannot fill both splits at fraction {train_fraction}")
    ids = sorted((s.bs_id, s.user_id) for s in dataset)
    if len(set(ids)) != n:
        raise InsufficientData("dataset contains duplicate (bs_id, user_id) links")
    perm = np.random.default_rng(derive_seed(seed, "split")).permutation(n)
    train = tuple(ids[i] for i in sorted(perm[:n_train]))
    test = tuple(ids[i] for i in sorted(perm[n_train:]))
    return SplitManifest(train, test, float(train_fraction), int(seed))


@dataclass
class TrainedModel:
    arch: mlp.MlpArchitecture
    params: mlp.MlpParams
    cost_history: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    config: Optional[mlp.TrainConfig] = None
    # cost increases after warm-up; nonzero means the step size was too large
    step_size_warnings: int = 0

    def __call__(self, x) -> np.ndarray:
        return mlp.forward(self.params, x)


@dataclass
class TrainedScheme:
    kind: SchemeKind
    models: Dict[str, TrainedModel]
    norms: FeatureNorms
    n_bs: int
    n_ms: int

    @property
    def stage1_models(self) -> List[TrainedModel]:
        if self.kind is SchemeKind.SEQUENTIAL:
            return [self.models["rss"], self.models["delay"]]
        return [self.models[self.kind.value]]

    @property
    def stage2_model(self) -> Optional[TrainedModel]:
        return self.models.get("stage2")

    def inputs(self, samples: Sequence[ChannelSample]) -> Dict[str, np.ndarray]:
        """Stage-1 network inputs keyed by model name."""
        rss = lambda: feature_matrix(samples, self.norms, self.n_bs, "rss")
        delay = lambda: feature_matrix(samples, self.norms, self.n_bs, "delay")
        if self.kind is SchemeKind.RSS:
            return {"rss": rss()}
        if self.kind is SchemeKind.DELAY:
            return {"delay": delay()}
        if self.kind is SchemeKind.JOINT:
            return {"joint": np.hstack([rss(), delay()])}
        return {"rss": rss(), "delay": delay()}

    def predict_batch(self, samples: Sequence[ChannelSample]) -> np.ndarray:
        """Raw linear scores, shape (len(samples), n_ms)."""
        if not samples:
            return np.zeros((0, self.n_ms))
        xs = self.inputs(samples)
        if self.kind is SchemeKind.SEQUENTIAL:
            stacked = np.hstack([mlp.forward_activations(self.models[k].params, xs[k])[-1]
                                 for k in ("rss", "delay")])
            return mlp.forward_activations(self.models["stage2"].params, stacked)[-1]
        (name, x), = xs.items()
        return mlp.forward_activations(self.models[name].params, x)[-1]


def predict(scheme: TrainedScheme, sample: ChannelSample) -> np.ndarray:
    return scheme.predict_batch([sample])[0]


def sample_average_baseline(train_outputs) -> np.ndarray:
    """Mean training indicator, used as a constant score for every test sample."""
    y = np.asarray(train_outputs, dtype=float)
    if y.ndim != 2 or len(y) == 0:
        raise EmptyBatch("baseline needs at least one training output")
    return y.mean(axis=0)


def _fit(name: str, kind: SchemeKind, sizes, x, y, config: mlp.TrainConfig) -> TrainedModel:
    arch = mlp.MlpArchitecture(tuple(sizes))
    seeded = mlp.TrainConfig(**{**config.to_dict(),
                                "init_seed": derive_seed(config.init_seed, kind.value, name)})
    res = mlp.train(arch, x, y, seeded)
    return TrainedModel(arch, res.params, res.cost_history, res.iterations, res.converged, config,
                        res.increases_after_warmup)


def train_scheme(kind, dataset: Sequence[ChannelSample], n_bs: int = 100, n_ms: int = 10,
                 split=(0.95, 0), config: mlp.TrainConfig = mlp.TrainConfig(),
                 stage2_config: Optional[mlp.TrainConfig] = None,
                 manifest: Optional[SplitManifest] = None) -> Tuple[TrainedScheme, SplitManifest]:
    """Split, normalize on the training split, and train the scheme's networks.

    Args:
        kind: one of ``SchemeKind`` (or its string value).
        dataset: channel samples for a single BS.
        split: (train fraction, seed), ignored when ``manifest`` is given.
        config: training settings for the first-stage networks.
        stage2_config: settings for the ``seq`` combiner (defaults to ``config``).
        manifest: a fixed split to share across schemes.
    """
    kind = SchemeKind(kind)
    if manifest is None:
        manifest = split_dataset(dataset, *split)
    train, _ = manifest.select(dataset)
    norms = compute_norms(train)
    scheme = TrainedScheme(kind, {}, norms, n_bs, n_ms)
    y = indicator_matrix(train, n_ms)
    xs = scheme.inputs(train)
    for name, x in xs.items():
        sizes = (x.shape[1],) + STAGE1_HIDDEN + (n_ms,)
        scheme.models[name] = _fit(name, kind, sizes, x, y, config)
    if kind is SchemeKind.SEQUENTIAL:
        stacked = np.hstack([scheme.models[k](xs[k]) for k in ("rss", "delay")])
        sizes = (2 * n_ms,) + STAGE2_HIDDEN + (n_ms,)
        scheme.models["stage2"] = _fit("stage2", kind, sizes, stacked, y, stage2_config or config)
    return scheme, manifest


@dataclass
class SchemeEvaluation:
    report: EvalReport
    roc: RocCurve
    baseline_roc: RocCurve
    test_scores: np.ndarray
    baseline: np.ndarray


def evaluate_scheme(scheme: TrainedScheme, dataset: Sequence[ChannelSample],
                    manifest: SplitManifest) -> SchemeEvaluation:
    train, test = manifest.select(dataset)
    y_t = indicator_matrix(train, scheme.n_ms)
    y_v = indicator_matrix(test, scheme.n_ms)
    scores = scheme.predict_batch(test)
    ybar = sample_average_baseline(y_t)
    report = evaluate_predictions(y_t, y_v, scores)
    return SchemeEvaluation(
        report,
        roc_curve(y_v, scores),
        roc_curve(y_v, np.broadcast_to(ybar, y_v.shape)),
        scores,
        ybar,
    )


# --------------------------------------------------------------------------
# bundle persistence
# --------------------------------------------------------------------------

def save_bundle(scheme: TrainedScheme, manifest: SplitManifest, directory) -> Path:
    """Write the scheme as a directory of JSON files."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = {}
    for name, m in scheme.models.items():
        fname = f"model_{name}.json"
        meta = {
            "config": m.config.to_dict() if m.config else None,
            "final_cost": m.cost_history[-1] if m.cost_history else None,
            "iterations": m.iterations,
            "converged": m.converged,
            "step_size_warnings": m.step_size_warnings,
        }
        mlp.save_model(d / fname, m.arch, m.params, meta)
        files[name] = fname
    scheme_doc = {"kind": scheme.kind.value, "n_bs": scheme.n_bs, "n_ms": scheme.n_ms, "models": files}
    (d / "scheme.json").write_text(json.dumps(scheme_doc, indent=2, sort_keys=True) + "\n")
    scheme.norms.save(d / "norms.json")
    (d / "split.json").write_text(json.dumps(manifest.to_dict(), sort_keys=True) + "\n")
    return d


def load_bundle(directory) -> Tuple[TrainedScheme, SplitManifest]:
    d = Path(directory)
    doc = json.loads((d / "scheme.json").read_text())
    models = {}
    for name, fname in doc["models"].items():
        arch, params, meta = mlp.load_model(d / fname)
        cfg = mlp.TrainConfig.from_dict(meta["config"]) if meta.get("config") else None
        models[name] = TrainedModel(arch, params, [], meta.get("iterations", 0),
                                    meta.get("converged", False), cfg, meta.get("step_size_warnings", 0))
    scheme = TrainedScheme(SchemeKind(doc["kind"]), models, FeatureNorms.load(d / "norms.json"),
                           int(doc["n_bs"]), int(doc["n_ms"]))
    manifest = SplitManifest.from_dict(json.loads((d / "split.json").read_text()))
    return scheme, manifest

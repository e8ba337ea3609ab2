"""
Command-line pipeline: generate -> featurize -> train -> evaluate -> mi -> report.

Every command is deterministic given ``--seed``. Failures exit non-zero and
print a one-line JSON error document to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import infometrics, mlp
from .errors import BeamPredictError, ConfigError
from .evaluation import (combined_roc_csv, compare_at_pf, roc_curve, roc_to_csv, save_report)
from .features import FeatureNorms, compute_norms, featurize_dataset, indicator_matrix, save_pairs
from .scene import default_scene, generate_dataset, load_dataset, load_scene, save_dataset, save_scene
from .schemes import (SCHEME_LABELS, SchemeKind, evaluate_scheme, load_bundle, sample_average_baseline,
                      save_bundle, split_dataset, train_scheme)
from .seeding import derive_seed

logger = logging.getLogger("beampredict")


def _select_bs(samples, bs_id):
    if bs_id is None:
        return samples
    chosen = [s for s in samples if s.bs_id == bs_id]
    if not chosen:
        raise ConfigError("--bs-id", f"no samples for BS {bs_id}")
    return chosen


def _train_config(path, seed) -> tuple:
    doc = {}
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError("--config", f"not valid JSON ({e.msg})") from None
        if not isinstance(doc, dict):
            raise ConfigError("--config", "expected a JSON object")
    doc = dict(doc)
    stage2 = doc.pop("stage2", None)
    doc.setdefault("init_seed", derive_seed(seed, "init"))
    try:
        cfg = mlp.TrainConfig.from_dict(doc)
        cfg2 = mlp.TrainConfig.from_dict({**cfg.to_dict(), **stage2}) if stage2 else None
    except (TypeError, ValueError) as e:
        raise ConfigError("--config", str(e)) from None
    return cfg, cfg2


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_generate(args) -> None:
    scene = load_scene(args.config) if args.config else default_scene()
    samples = generate_dataset(scene, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(samples, out)
    if args.write_scene:
        save_scene(scene, args.write_scene)
    logger.info("wrote %d samples to %s", len(samples), out)


def cmd_featurize(args) -> None:
    samples = _select_bs(load_dataset(args.data), args.bs_id)
    norms = FeatureNorms.load(args.norms) if args.norms else compute_norms(samples)
    pairs = featurize_dataset(samples, norms, args.nbs, args.nms, args.kind)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_pairs(pairs, out, args.kind, args.nbs, args.nms)
    norms.save(out.with_suffix(".norms.json"))


def _history_csv(scheme) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "iteration", "cost"])
    for name, m in scheme.models.items():
        for i, c in enumerate(m.cost_history):
            w.writerow([name, i, repr(float(c))])
    return buf.getvalue()


def _evaluate_into(scheme, samples, manifest, out: Path):
    ev = evaluate_scheme(scheme, samples, manifest)
    out.mkdir(parents=True, exist_ok=True)
    save_report(ev.report, out / "report.json")
    _write(out / "roc.csv", roc_to_csv(ev.roc))
    return ev


def cmd_train(args) -> None:
    samples = _select_bs(load_dataset(args.data), args.bs_id)
    cfg, cfg2 = _train_config(args.config, args.seed)
    if args.nbs < args.nms or args.nms < 1:
        raise ConfigError("--nbs", "need nbs >= nms >= 1")
    manifest = split_dataset(samples, args.split, args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", mlp.StepSizeWarning)
        scheme, manifest = train_scheme(args.scheme, samples, args.nbs, args.nms,
                                        config=cfg, stage2_config=cfg2, manifest=manifest)
    for name, m in scheme.models.items():
        if m.step_size_warnings:
            logger.warning("%s/%s: cost rose on %d iterations after warm-up; learning rate %g may be too large",
                           args.scheme, name, m.step_size_warnings, m.config.learning_rate)
    out = Path(args.out)
    save_bundle(scheme, manifest, out)
    _write(out / "cost_history.csv", _history_csv(scheme))
    ev = _evaluate_into(scheme, samples, manifest, out)
    logger.info("%s: rho_v=%.4f rho_nn=%.4f", args.scheme, ev.report.rho_v, ev.report.rho_nn)


def cmd_evaluate(args) -> None:
    scheme, manifest = load_bundle(args.bundle)
    samples = load_dataset(args.data)
    _evaluate_into(scheme, samples, manifest, Path(args.out or args.bundle))


def cmd_mi(args) -> None:
    samples = _select_bs(load_dataset(args.data), args.bs_id)
    rows = infometrics.mi_sweep(samples, args.nbs, args.nms, args.kind)
    out = Path(args.out)
    _write(out, infometrics.sweep_to_csv(rows))
    meta = {
        "kind": args.kind,
        "n_ms": args.nms,
        "estimator": "plug-in, no bias correction",
        "sparse_pattern_caveat": [r.n_bs for r in rows if r.sparse],
    }
    _write(out.with_suffix(".meta.json"), json.dumps(meta, indent=2, sort_keys=True) + "\n")


def cmd_report(args) -> None:
    samples = load_dataset(args.data)
    curves, reference, sa_curve = {}, None, None
    for bundle in args.bundle:
        scheme, manifest = load_bundle(bundle)
        if reference is None:
            reference = manifest
            train, test = manifest.select(samples)
            y_v = indicator_matrix(test, scheme.n_ms)
            ybar = sample_average_baseline(indicator_matrix(train, scheme.n_ms))
            sa_curve = roc_curve(y_v, np.broadcast_to(ybar, y_v.shape))
        elif manifest.to_dict() != reference.to_dict():
            raise ConfigError("--bundle", f"{bundle} was trained on a different split")
        label = SCHEME_LABELS[scheme.kind]
        if label in curves:
            raise ConfigError("--bundle", f"two bundles for scheme {label}")
        curves[label] = roc_curve(y_v, scheme.predict_batch(test))
    curves["SA"] = sa_curve
    out = Path(args.out)
    _write(out / "roc_combined.csv", combined_roc_csv(curves))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "p_f", "p_d_scheme", "p_d_sa", "winner"])
    for label, c in curves.items():
        if label == "SA":
            continue
        cmp = compare_at_pf(c, sa_curve, args.pf)
        winner = {"a": label, "b": "SA", "tie": "tie"}[cmp.winner]
        w.writerow([label, repr(cmp.p_f), repr(cmp.p_d_a), repr(cmp.p_d_b), winner])
    _write(out / "comparison.csv", buf.getvalue())


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beampredict", description=__doc__.strip().splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="trace a scene into a JSONL dataset")
    g.add_argument("--config", help="scene JSON (default: built-in desk-scale scene)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--write-scene", help="also save the scene description used")
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("featurize", help="write (input, output) vector pairs")
    f.add_argument("--data", required=True)
    f.add_argument("--kind", choices=["rss", "delay"], default="rss")
    f.add_argument("--nbs", type=int, default=100)
    f.add_argument("--nms", type=int, default=10)
    f.add_argument("--norms", help="reuse FeatureNorms from this JSON file")
    f.add_argument("--bs-id", type=int, default=None)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_featurize)

    t = sub.add_parser("train", help="train one scheme and evaluate it on its test split")
    t.add_argument("--data", required=True)
    t.add_argument("--scheme", choices=[k.value for k in SchemeKind], default="rss")
    t.add_argument("--nbs", type=int, default=100)
    t.add_argument("--nms", type=int, default=10)
    t.add_argument("--split", type=float, default=0.95, help="training fraction")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--bs-id", type=int, default=0)
    t.add_argument("--config", help="training config JSON (TrainConfig fields, optional 'stage2')")
    t.add_argument("--out", required=True, help="bundle directory")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="re-evaluate a bundle on its test split")
    e.add_argument("--bundle", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--out", help="output directory (default: the bundle)")
    e.set_defaults(func=cmd_evaluate)

    m = sub.add_parser("mi", help="entropy / mutual-information sweep over BS codebook sizes")
    m.add_argument("--data", required=True)
    m.add_argument("--nbs", type=_int_list, default=[25, 50, 100])
    m.add_argument("--nms", type=int, default=10)
    m.add_argument("--kind", choices=["rss", "delay"], default="rss")
    m.add_argument("--bs-id", type=int, default=0)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mi)

    r = sub.add_parser("report", help="combined ROC curves and P_D comparison against SA")
    r.add_argument("--bundle", nargs="+", required=True)
    r.add_argument("--data", required=True)
    r.add_argument("--pf", type=float, default=0.1)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as e:
        print(json.dumps({"error": type(e).__name__, "field": e.field, "message": str(e)}), file=sys.stderr)
        return 2
    except (BeamPredictError, OSError, KeyError, json.JSONDecodeError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: synth, train, eval, importance, score.

Exit codes: 0 success, 2 input/configuration error, 3 model/schema error,
4 training divergence. A flat key=value config file can pre-set any flag
of the invoked subcommand; FLOWSIFT_SEED provides the default seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import rng
from .errors import (
    ConfigError,
    FitError,
    MetricError,
    ModelFormatError,
    SchemaError,
    StratificationError,
    TrainingDivergedError,
)
from .features import FeatureStandardizer, FlowArrays, FlowFeaturizer
from .forest import RandomForestClassifier
from .importance import permutation_importance
from .ingest import read_flows
from .linear import LogisticRegression
from .metrics import evaluate_scores, pr_curve, roc_curve, threshold_sweep
from .pipeline import FlowPipeline
from .split import SplitSpec, read_split_csv, stratified_split, write_split_csv
from .synth import SynthConfig, write_csv
from .tree import DecisionTreeClassifier
from .viz import svg_line_chart

log = logging.getLogger("flowsift")

_SCORE_CHUNK = 32768


def _default_seed() -> int:
    try:
        return int(os.environ.get("FLOWSIFT_SEED", "0"))
    except ValueError:
        return 0


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _load_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, value = line.split("=", 1)
                cfg[key.strip().replace("-", "_")] = value.strip()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return cfg


def _apply_config(parser: argparse.ArgumentParser, cfg: dict[str, str]) -> None:
    """Use config entries as defaults, honoring each option's type."""
    overrides = {}
    for action in parser._actions:
        if action.dest in cfg:
            raw = cfg[action.dest]
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                overrides[action.dest] = _parse_bool(raw)
            elif action.type is not None:
                try:
                    overrides[action.dest] = action.type(raw)
                except ValueError as exc:
                    raise ConfigError(f"config key {action.dest}: {exc}") from exc
            else:
                overrides[action.dest] = raw
    parser.set_defaults(**overrides)


def _build_parser(config: dict[str, str]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowsift",
        description="Lightweight botnet detection over NetFlow-style records.",
    )
    parser.add_argument("--config", help="flat key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic binetflow CSV")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--prevalence", type=float, default=0.0248)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=_default_seed())
    _apply_config(p, config)

    p = sub.add_parser("train", help="ingest, split, featurize and train")
    p.add_argument("--in", dest="input", required=True, help="labeled flow CSV")
    p.add_argument("--model", required=True, choices=["lr", "dt", "rf"])
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--tune-on", choices=["test", "validation"], default="test",
                   help="'validation' carves a slice of train to pick the "
                        "alert threshold; default reproduces the test-set "
                        "tuning protocol")
    p.add_argument("--val-fraction", type=float, default=0.15)
    p.add_argument("--trees", type=int, default=300)
    p.add_argument("--max-depth", type=int, default=20)
    p.add_argument("--min-samples-split", type=int, default=20)
    p.add_argument("--min-samples-leaf", type=int, default=10)
    p.add_argument("--feature-subsample", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None,
                   help="threads for forest training (default: all cores)")
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--batch-size", type=int, default=4096)
    p.add_argument("--class-weighting", action="store_true")
    _apply_config(p, config)

    p = sub.add_parser("eval", help="score labeled flows and emit reports")
    p.add_argument("--model", required=True, help="model.json path")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--split", help="split.csv from train, to filter rows")
    p.add_argument("--subset", choices=["train", "test", "validation"])
    p.add_argument("--threshold", type=float, default=0.5,
                   help="threshold for the default-operating-point row")
    p.add_argument("--plots", action="store_true", help="also write SVG curves")
    _apply_config(p, config)

    p = sub.add_parser("importance", help="permutation importance (PR-AUC drop)")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split", help="split.csv from train, to filter rows")
    p.add_argument("--subset", choices=["train", "test", "validation"])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=_default_seed())
    _apply_config(p, config)

    p = sub.add_parser("score", help="stream flows, appending score and label")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--threshold", type=float, default=None,
                   help="decision threshold (default: model's tuned "
                        "threshold if stored, else 0.5)")
    _apply_config(p, config)
    return parser


def _check_input(path: str) -> str:
    if not Path(path).exists():
        raise ConfigError(f"input file not found: {path}")
    return path


def _read_dataset(path: str):
    reader = read_flows(_check_input(path))
    arrays, y = FlowArrays.from_pairs(reader)
    log.info("ingest %s: %s", path, reader.stats.summary())
    return arrays, y, reader.stats


def _subset_indices(args, n: int) -> np.ndarray | None:
    if args.subset is None and args.split is None:
        return None
    if args.subset is None or args.split is None:
        raise ConfigError("--split and --subset must be given together")
    groups = read_split_csv(_check_input(args.split))
    if args.subset not in groups:
        raise ConfigError(f"split file has no '{args.subset}' rows")
    chosen = groups[args.subset]
    if chosen.size and chosen.max() >= n:
        raise SchemaError(
            f"split index {int(chosen.max())} out of range for {n} rows"
        )
    return chosen


def _json_dump(obj: dict, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def cmd_synth(args) -> int:
    cfg = SynthConfig(n=args.n, prevalence=args.prevalence,
                      seed=args.seed, separation=args.separation)
    rows = write_csv(cfg, args.out)
    log.info("wrote %d synthetic flows to %s", rows, args.out)
    return 0


def _make_model(args):
    if args.model == "lr":
        return LogisticRegression(
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            l2=args.l2,
            batch_size=args.batch_size,
            class_weighting=args.class_weighting,
            random_state=args.seed,
        )
    if args.model == "dt":
        return DecisionTreeClassifier(
            max_depth=args.max_depth,
            min_samples_split=args.min_samples_split,
            min_samples_leaf=args.min_samples_leaf,
            random_state=args.seed,
        )
    return RandomForestClassifier(
        n_estimators=args.trees,
        max_depth=args.max_depth,
        min_samples_split=args.min_samples_split,
        min_samples_leaf=args.min_samples_leaf,
        feature_subsample=args.feature_subsample,
        bootstrap=True,
        n_jobs=args.jobs,
        random_state=args.seed,
    )


def cmd_train(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    arrays, y, stats = _read_dataset(args.input)
    train_idx, test_idx = stratified_split(
        y, SplitSpec(train_fraction=args.train_fraction, seed=args.seed)
    )
    val_idx = np.empty(0, np.int64)
    fit_idx = train_idx
    if args.tune_on == "validation":
        sub_seed = int(rng.derive(args.seed, rng.STREAM_VALIDATION))
        inner_train, inner_val = stratified_split(
            y[train_idx],
            SplitSpec(train_fraction=1.0 - args.val_fraction, seed=sub_seed),
        )
        fit_idx = train_idx[inner_train]
        val_idx = train_idx[inner_val]

    featurizer = FlowFeaturizer().fit(arrays.subset(fit_idx))
    X = featurizer.transform(arrays)
    standardizer = None
    if args.model == "lr":
        standardizer = FeatureStandardizer().fit(X[fit_idx])
        X = standardizer.transform(X)

    model = _make_model(args)
    t0 = time.perf_counter()
    model.fit(X[fit_idx], y[fit_idx])
    wall = time.perf_counter() - t0
    log.info("trained %s on %d rows in %.2f s", args.model, fit_idx.size, wall)

    tuned_threshold = None
    if args.tune_on == "validation":
        sweep = threshold_sweep(model.predict_proba(X[val_idx])[:, 1], y[val_idx])
        tuned_threshold = sweep.best.threshold
        log.info("validation-tuned threshold: %.6g", tuned_threshold)

    meta = {"seed": args.seed, "model": args.model}
    if tuned_threshold is not None:
        meta["tuned_threshold"] = tuned_threshold
    bundle = FlowPipeline(
        schema=featurizer.schema_,
        standardizer=standardizer,
        model=model,
        meta=meta,
    )
    bundle.save_to(out_dir / "model.json")

    write_split_csv(out_dir / "split.csv", train_idx, test_idx,
                    validation=val_idx if val_idx.size else None)

    hyper = {
        k: getattr(args, k)
        for k in (
            "trees", "max_depth", "min_samples_split", "min_samples_leaf",
            "feature_subsample", "learning_rate", "epochs", "l2",
            "batch_size", "class_weighting",
        )
    }
    summary = {
        "command": "train",
        "input": str(args.input),
        "model": args.model,
        "seed": args.seed,
        "train_fraction": args.train_fraction,
        "tune_on": args.tune_on,
        "ingest": stats.as_dict(),
        "rows": {
            "total": int(y.size),
            "train": int(fit_idx.size),
            "validation": int(val_idx.size),
            "test": int(test_idx.size),
        },
        "prevalence": {
            "overall": float(np.mean(y == 1)),
            "train": float(np.mean(y[train_idx] == 1)),
            "test": float(np.mean(y[test_idx] == 1)),
        },
        "hyperparameters": hyper,
        "tuned_threshold": tuned_threshold,
        "feature_names": list(featurizer.schema_.feature_names),
        "wall_time_s": wall,
    }
    _json_dump(summary, out_dir / "summary.json")
    return 0


def cmd_eval(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = FlowPipeline.load_from(_check_input(args.model))
    arrays, y, _stats = _read_dataset(args.input)
    keep = _subset_indices(args, len(arrays))
    if keep is not None:
        arrays = arrays.subset(keep)
        y = y[keep]
    scores = bundle.score_arrays(arrays)
    report = evaluate_scores(scores, y, default_threshold=args.threshold)
    pr = pr_curve(scores, y)
    roc = roc_curve(scores, y)
    sweep = threshold_sweep(scores, y)
    doc = {"model_kind": bundle.kind, "n_rows": int(y.size)}
    doc.update(report.as_dict())
    _json_dump(doc, out_dir / "report.json")
    pr.to_csv(out_dir / "pr.csv")
    roc.to_csv(out_dir / "roc.csv")
    sweep.to_csv(out_dir / "sweep.csv")
    if args.plots:
        svg_line_chart(out_dir / "pr.svg", pr.x, pr.y, "recall", "precision",
                       f"PR curve (AP={pr.area:.3f})")
        svg_line_chart(out_dir / "roc.svg", roc.x, roc.y, "false positive rate",
                       "true positive rate", f"ROC curve (AUC={roc.area:.3f})")
    log.info("eval: pr_auc=%.4f roc_auc=%.4f tuned_T=%.4g",
             report.pr_auc, report.roc_auc, report.at_tuned.threshold)
    return 0


def cmd_importance(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = FlowPipeline.load_from(_check_input(args.model))
    arrays, y, _stats = _read_dataset(args.input)
    keep = _subset_indices(args, len(arrays))
    if keep is not None:
        arrays = arrays.subset(keep)
        y = y[keep]
    X = bundle.matrix(arrays)
    report = permutation_importance(
        bundle.model, X, y,
        feature_names=list(bundle.schema.feature_names),
        repeats=args.repeats,
        seed=args.seed,
    )
    _json_dump(report.as_dict(), out_dir / "importance.json")
    report.to_csv(out_dir / "importance.csv")
    top = ", ".join(e.name for e in report.entries[:3])
    log.info("importance: top features %s", top)
    return 0


def cmd_score(args) -> int:
    bundle = FlowPipeline.load_from(_check_input(args.model))
    threshold = args.threshold
    if threshold is None:
        threshold = float(bundle.meta.get("tuned_threshold", 0.5))
    reader = read_flows(_check_input(args.input), require_label=False,
                        with_rows=True)
    out_path = Path(args.out)
    pairs: list = []
    rows: list = []
    wrote_header = False
    with open(out_path, "w", encoding="utf-8", newline="") as fh:

        def flush():
            nonlocal wrote_header
            if not wrote_header:
                fh.write(",".join(reader.header + ["score", "predicted"]) + "\n")
                wrote_header = True
            if not pairs:
                return
            arrays = FlowArrays.from_flows([f for f, _ in pairs])
            scores = bundle.score_arrays(arrays)
            for (flow, _), raw, s in zip(pairs, rows, scores):
                label = "Botnet" if s >= threshold else "Benign"
                fh.write(",".join(raw + [repr(float(s)), label]) + "\n")
            pairs.clear()
            rows.clear()

        for flow, label, raw in reader:
            pairs.append((flow, label))
            rows.append(raw)
            if len(pairs) >= _SCORE_CHUNK:
                flush()
        flush()
    log.info("score %s: %s", args.input, reader.stats.summary())
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "eval": cmd_eval,
    "importance": cmd_importance,
    "score": cmd_score,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    argv = sys.argv[1:] if argv is None else list(argv)
    config: dict[str, str] = {}
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            config = _load_config(argv[i + 1])
            break
        if token.startswith("--config="):
            config = _load_config(token.split("=", 1)[1])
            break
    try:
        parser = _build_parser(config)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"flowsift: error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, ModelFormatError) as exc:
        print(f"flowsift: error: {exc}", file=sys.stderr)
        return 3
    except TrainingDivergedError as exc:
        print(f"flowsift: error: {exc}", file=sys.stderr)
        return 4
    except (FitError, StratificationError, MetricError) as exc:
        print(f"flowsift: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"flowsift: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

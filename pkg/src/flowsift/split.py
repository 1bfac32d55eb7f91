"""Seeded stratified train/test partition preserving class prevalence.

No resampling anywhere: the natural imbalance is kept in both splits.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import StratificationError


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


def stratified_split(
    labels: np.ndarray, spec: SplitSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Partition indices so each class appears in train/test at its prevalence.

    Within each class the examples are shuffled by a class-specific
    sub-stream of the split seed and the first floor(n_c * train_fraction)
    go to train. Both splits must end up non-empty for every class.
    """
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if classes.size < 2:
        raise StratificationError("need at least one example of each class")
    train_parts: list[np.ndarray] = []
    test_parts: list[np.ndarray] = []
    for c in classes:
        idx_c = np.flatnonzero(labels == c)
        n_c = idx_c.size
        # tiny bias shields floor() from float error in n_c * fraction
        n_train = math.floor(n_c * spec.train_fraction + 1e-9)
        if n_train < 1 or n_train >= n_c:
            raise StratificationError(
                f"class {c}: {n_c} example(s) cannot stratify at "
                f"fraction {spec.train_fraction}"
            )
        perm = rng.stream(spec.seed, rng.STREAM_SPLIT, int(c)).permutation(n_c)
        shuffled = idx_c[perm]
        train_parts.append(shuffled[:n_train])
        test_parts.append(shuffled[n_train:])
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    return train, test


def write_split_csv(
    path: str | os.PathLike,
    train: np.ndarray,
    test: np.ndarray,
    validation: np.ndarray | None = None,
) -> None:
    """Audit export: one row per example index with its split tag.

    Validation indices (a carve-out of train used for threshold tuning)
    are tagged "validation" and excluded from the "train" tag.
    """
    tags = {}
    for i in train:
        tags[int(i)] = "train"
    for i in test:
        tags[int(i)] = "test"
    if validation is not None:
        for i in validation:
            tags[int(i)] = "validation"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "split"])
        for i in sorted(tags):
            writer.writerow([i, tags[i]])


def read_split_csv(path: str | os.PathLike) -> dict[str, np.ndarray]:
    """Split tags back to index arrays, keyed by tag."""
    groups: dict[str, list[int]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            groups.setdefault(row[1], []).append(int(row[0]))
    return {tag: np.asarray(idx, np.int64) for tag, idx in groups.items()}

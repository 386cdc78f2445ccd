"""Cross-validation, train/test splits, and accuracy reporting.

Splits are stratified (both classes spread evenly) and driven by an
explicit seed, so every report is replayable. Scalers and models are
always fit on the training side only; the held-out fold never leaks into
fold models.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSplitError,
    LengthMismatchError,
    TooFewItemsError,
)
from .svm import DEFAULT_TOL, LabeledDataset, decision_value, fit_svm

DEFAULT_A = 93.36
DEFAULT_R = 0.9618


@dataclass
class FoldAssignment:
    """Fold index per dataset item for stratified k-fold CV."""

    fold_index: np.ndarray
    k: int
    seed: int

    def train_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.fold_index != fold)[0]

    def test_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.fold_index == fold)[0]


@dataclass
class ConfusionMatrix:
    """2x2 counts, predicted class by actual class (positive = Fado)."""

    tp: int  # predicted +1, actual +1
    fp: int  # predicted +1, actual -1
    fn: int  # predicted -1, actual +1
    tn: int  # predicted -1, actual -1

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return 100.0 * (self.tp + self.tn) / self.total

    def as_flat(self) -> list:
        """Row-major predicted x actual: [tp, fp, fn, tn]."""
        return [self.tp, self.fp, self.fn, self.tn]


@dataclass
class ItemResult:
    id: str
    actual: int
    predicted: int
    decision_value: float


@dataclass
class EvalReport:
    """Outcome of one CV or train/test run."""

    accuracy: float
    confusion: ConfusionMatrix
    per_item: list
    params: dict


def _fisher_yates(items: list, rng: random.Random) -> None:
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]


def kfold_split(dataset: LabeledDataset, k: int, seed: int) -> FoldAssignment:
    """Stratified fold assignment, deterministic for a given seed.

    Each class is shuffled and dealt round-robin; the deal continues from
    one class to the next, so total fold sizes also differ by at most one.
    A class with at least two members always spans at least two folds,
    which keeps every fold's training complement two-class.

    Raises:
        TooFewItemsError: fewer items than folds, or a class with fewer
            than two members.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if len(dataset) < k:
        raise TooFewItemsError(f"{len(dataset)} items cannot fill {k} folds")
    rng = random.Random(seed)
    fold_index = np.empty(len(dataset), dtype=np.int64)
    ptr = 0
    for label in (1, -1):
        idx = [i for i in range(len(dataset)) if dataset.labels[i] == label]
        if len(idx) < 2:
            raise TooFewItemsError(
                f"class {label:+d} has {len(idx)} items, needs >= 2"
            )
        _fisher_yates(idx, rng)
        for pos, i in enumerate(idx):
            fold_index[i] = (ptr + pos) % k
        ptr = (ptr + len(idx)) % k
    return FoldAssignment(fold_index, k, seed)


def train_test_split(dataset: LabeledDataset, train_fraction: float,
                     seed: int):
    """Stratified random split; per-class train size is the rounded share.

    Raises:
        DegenerateSplitError: one side ends up empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = random.Random(seed)
    train_idx: list = []
    test_idx: list = []
    for label in (1, -1):
        idx = [i for i in range(len(dataset)) if dataset.labels[i] == label]
        _fisher_yates(idx, rng)
        n_train = int(train_fraction * len(idx) + 0.5)
        train_idx.extend(idx[:n_train])
        test_idx.extend(idx[n_train:])
    if not train_idx or not test_idx:
        raise DegenerateSplitError(
            f"fraction {train_fraction} left an empty side"
        )
    return dataset.subset(sorted(train_idx)), dataset.subset(sorted(test_idx))


def confusion_matrix(actual, predicted) -> ConfusionMatrix:
    """Tally predicted vs actual labels (+1/-1).

    Raises:
        LengthMismatchError: sequences differ in length.
    """
    actual = list(actual)
    predicted = list(predicted)
    if len(actual) != len(predicted):
        raise LengthMismatchError(
            f"{len(actual)} actual vs {len(predicted)} predicted"
        )
    cm = ConfusionMatrix(0, 0, 0, 0)
    for a, p in zip(actual, predicted):
        if p > 0:
            if a > 0:
                cm.tp += 1
            else:
                cm.fp += 1
        else:
            if a > 0:
                cm.fn += 1
            else:
                cm.tn += 1
    return cm


def evaluate_model(model, test: LabeledDataset) -> list:
    """Per-item predictions of a trained model on a dataset."""
    results = []
    for vec, label, item_id in zip(test.vectors, test.labels, test.ids):
        dv = decision_value(model, vec)
        results.append(ItemResult(item_id, int(label),
                                  1 if dv >= 0 else -1, dv))
    return results


def cross_validate(dataset: LabeledDataset, C: float, gamma: float,
                   k: int, seed: int, tol: float = DEFAULT_TOL,
                   cache_mb: float = 256.0) -> EvalReport:
    """k-fold CV: per fold, fit scaler + model on the other folds and
    predict the held-out fold. Every item is predicted exactly once.

    The fold-j model is exactly fit_svm(complement of fold j, C, gamma),
    so any fold's predictions can be reproduced independently.
    """
    assign = kfold_split(dataset, k, seed)
    per_item: list = [None] * len(dataset)
    for fold in range(k):
        model = fit_svm(dataset.subset(assign.train_indices(fold)),
                        C, gamma, tol=tol, cache_mb=cache_mb)
        for i in assign.test_indices(fold):
            dv = decision_value(model, dataset.vectors[i])
            per_item[i] = ItemResult(dataset.ids[i], int(dataset.labels[i]),
                                     1 if dv >= 0 else -1, dv)
    cm = confusion_matrix([r.actual for r in per_item],
                          [r.predicted for r in per_item])
    params = {"C": C, "gamma": gamma, "k": k, "seed": seed}
    return EvalReport(cm.accuracy, cm, per_item, params)


def evaluate_split(dataset: LabeledDataset, C: float, gamma: float,
                   train_fraction: float, seed: int,
                   tol: float = DEFAULT_TOL) -> EvalReport:
    """Train on a stratified share of the data, report on the rest."""
    train, test = train_test_split(dataset, train_fraction, seed)
    model = fit_svm(train, C, gamma, tol=tol)
    per_item = evaluate_model(model, test)
    cm = confusion_matrix([r.actual for r in per_item],
                          [r.predicted for r in per_item])
    params = {"C": C, "gamma": gamma, "train_fraction": train_fraction,
              "seed": seed, "n_train": len(train), "n_test": len(test)}
    return EvalReport(cm.accuracy, cm, per_item, params)


def expected_accuracy(n_genres: int, A: float = DEFAULT_A,
                      r: float = DEFAULT_R) -> float:
    """Accuracy in percent expected of an n-genre classifier: A * r**n."""
    if n_genres < 0:
        raise ValueError("n_genres must be >= 0")
    return A * r ** n_genres


def write_report(report: EvalReport, path, strategy: str | None = None,
                 extra_params: dict | None = None) -> None:
    """Serialize a report as JSON with the frozen key set."""
    params = dict(report.params)
    params["strategy"] = strategy
    if extra_params:
        params.update(extra_params)
    doc = {
        "accuracy": report.accuracy,
        "confusion": report.confusion.as_flat(),
        "params": params,
        "items": [
            {
                "id": r.id,
                "actual": r.actual,
                "predicted": r.predicted,
                "decision_value": r.decision_value,
            }
            for r in report.per_item
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)

"""Accuracy-rejection curves, threshold abstention, and OoD AUROC."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import BadGrid, EmptyInput, MissingTruth, OneCohortOnly

# slack for f * N landing just below an integer in floating point
_FLOOR_SLACK = 1e-9

DEFAULT_GRID = tuple(round(0.05 * i, 2) for i in range(20))


class Cohort(str, enum.Enum):
    InDistribution = "id"
    OutOfDistribution = "ood"


@dataclass(frozen=True)
class ScoredInstance:
    instance_id: str
    score: float
    predicted: int
    truth: int | None = None
    cohort: Cohort | None = None

    @property
    def correct(self) -> bool:
        return self.truth is not None and self.predicted == self.truth


@dataclass(frozen=True)
class EvalCurve:
    points: tuple  # ((fraction, accuracy), ...)
    score_name: str = ""

    @property
    def fractions(self):
        return [f for f, _ in self.points]

    @property
    def accuracies(self):
        return [a for _, a in self.points]


class Abstention(NamedTuple):
    coverage: float
    accuracy: float
    empty: bool


def _require_truth(items):
    for it in items:
        if it.truth is None:
            raise MissingTruth(f"instance {it.instance_id!r} has no true label")


def rejection_order(items: Sequence[ScoredInstance]) -> list[int]:
    """Indices from most to least uncertain; ties by instance_id, then input order."""
    return sorted(range(len(items)), key=lambda i: (-items[i].score, items[i].instance_id, i))


def n_rejected(fraction: float, n: int) -> int:
    return min(math.floor(fraction * n + _FLOOR_SLACK), n - 1)


def parse_grid(spec: str) -> list[float]:
    """Parse ``start:stop:step`` (stop inclusive) into a list of fractions."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise BadGrid(f"grid must look like f0:f1:step, got {spec!r}") from None
    if step <= 0 or stop < start:
        raise BadGrid(f"bad grid {spec!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = [round(start + i * step, 12) for i in range(n)]
    validate_grid(grid)
    return grid


def validate_grid(grid: Sequence[float]) -> None:
    if not grid:
        raise BadGrid("empty rejection grid")
    for i, f in enumerate(grid):
        if not 0.0 <= f < 1.0:
            raise BadGrid(f"rejection fraction {f!r} outside [0, 1)")
        if i and f <= grid[i - 1]:
            raise BadGrid("rejection grid must be strictly increasing")


def accuracy_rejection_curve(items: Sequence[ScoredInstance], grid: Sequence[float] = DEFAULT_GRID,
                             score_name: str = "") -> EvalCurve:
    """Accuracy on the retained set after rejecting the floor(f*N) highest scores."""
    if not items:
        raise EmptyInput("no instances")
    _require_truth(items)
    validate_grid(grid)
    n = len(items)
    order = rejection_order(items)
    correct = np.array([items[i].correct for i in order], dtype=np.int64)
    # correct_from[r] = number correct among order[r:]
    correct_from = np.concatenate([np.cumsum(correct[::-1])[::-1], [0]])
    points = []
    for f in grid:
        r = n_rejected(f, n)
        points.append((float(f), float(correct_from[r]) / (n - r)))
    return EvalCurve(tuple(points), score_name)


def abstention_accuracy(items: Sequence[ScoredInstance], threshold: float) -> Abstention:
    """Keep instances with score <= threshold; report coverage and accuracy.

    With nothing retained the accuracy is 1.0 and ``empty`` is set.
    """
    if not items:
        raise EmptyInput("no instances")
    _require_truth(items)
    kept = [it for it in items if it.score <= threshold]
    if not kept:
        return Abstention(0.0, 1.0, True)
    acc = sum(it.correct for it in kept) / len(kept)
    return Abstention(len(kept) / len(items), acc, False)


def auroc(items: Sequence[ScoredInstance]) -> float:
    """Mann-Whitney AUROC with OoD as the positive class; ties count one half."""
    pos = [it.score for it in items if it.cohort is Cohort.OutOfDistribution]
    neg = [it.score for it in items if it.cohort is Cohort.InDistribution]
    if len(items) != len(pos) + len(neg):
        raise OneCohortOnly("every instance needs a cohort")
    return auroc_from_scores(neg, pos)


def auroc_from_scores(negatives, positives) -> float:
    n_neg, n_pos = len(negatives), len(positives)
    if n_neg == 0 or n_pos == 0:
        raise OneCohortOnly("need at least one in-distribution and one out-of-distribution score")
    ranks = rankdata(np.concatenate([np.asarray(positives, float), np.asarray(negatives, float)]))
    u = ranks[:n_pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))

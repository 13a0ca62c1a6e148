"""Total / aleatoric / epistemic uncertainty of a second-order distribution.

Three families are provided:

* ``GlobalEntropy`` -- entropy of the mean prediction, expected entropy,
  and their difference (mutual information).
* ``LabelEntropy`` -- the same construction applied per class to the binary
  marginal of each label, then summed.
* ``Variance`` -- per-class law of total variance: Var(Y_k) splits into
  E[Theta_k (1 - Theta_k)] and Var(Theta_k), then summed.

The two label-wise families are the log-loss and squared-error instances of
a generic loss-based construction (``loss_based_measures``).  All entropies
are in bits.
"""
from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NotProper, NumericalError, OutOfRange, UnknownFamily
from .simplex import (
    BinaryMarginal,
    DirichletSecondOrder,
    EmpiricalSecondOrder,
    ProbVector,
    marginal,
    second_order_mean,
    weighted_mean,
)

log = logging.getLogger(__name__)

CLAMP_TOL = 1e-9
HARD_NEGATIVE = 1e-6


class MeasureFamily(str, enum.Enum):
    GlobalEntropy = "ent"
    LabelEntropy = "lent"
    Variance = "var"

    @classmethod
    def parse(cls, value) -> "MeasureFamily":
        if isinstance(value, cls):
            return value
        for fam in cls:
            if value in (fam.value, fam.name):
                return fam
        raise UnknownFamily(f"unknown measure family {value!r} (expected ent, lent or var)")

    @property
    def label_wise(self) -> bool:
        return self is not MeasureFamily.GlobalEntropy


@dataclass(frozen=True)
class UncertaintyTriple:
    total: float
    aleatoric: float
    epistemic: float

    def as_tuple(self):
        return (self.total, self.aleatoric, self.epistemic)

    def __add__(self, other: "UncertaintyTriple") -> "UncertaintyTriple":
        return UncertaintyTriple(
            self.total + other.total,
            self.aleatoric + other.aleatoric,
            self.epistemic + other.epistemic,
        )


@dataclass(frozen=True)
class LabelWiseReport:
    """Per-label triples plus their sum.  ``per_label`` is empty for GlobalEntropy."""

    per_label: tuple
    global_: UncertaintyTriple
    family: MeasureFamily

    @property
    def total(self) -> float:
        return self.global_.total

    @property
    def aleatoric(self) -> float:
        return self.global_.aleatoric

    @property
    def epistemic(self) -> float:
        return self.global_.epistemic


def _clamped_difference(total: float, aleatoric: float) -> float:
    diff = total - aleatoric
    if diff >= 0:
        return diff + 0.0  # no -0.0 in reports
    if diff < -HARD_NEGATIVE:
        raise NumericalError(f"epistemic uncertainty {diff!r} is negative beyond float noise")
    if diff < -CLAMP_TOL:
        log.warning("clamping epistemic uncertainty %r to 0", diff)
    return 0.0


def sum_triples(triples: Sequence[UncertaintyTriple]) -> UncertaintyTriple:
    return UncertaintyTriple(
        math.fsum(t.total for t in triples),
        math.fsum(t.aleatoric for t in triples),
        math.fsum(t.epistemic for t in triples),
    )


# ---------------------------------------------------------------- entropies

def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(p, dtype=np.float64), 0.0, 1.0)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def _h2(theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    return 0.0 - (_xlog2x(theta) + _xlog2x(1.0 - theta))


def binary_entropy(theta: float) -> float:
    """Entropy in bits of a Bernoulli(theta) variable, with 0 log 0 = 0."""
    if not 0.0 <= theta <= 1.0:
        raise OutOfRange(f"theta={theta!r} outside [0, 1]")
    return float(_h2(np.array([theta]))[0])


def shannon_entropy(theta: ProbVector | np.ndarray) -> float:
    p = theta.probs if isinstance(theta, ProbVector) else np.asarray(theta, dtype=np.float64)
    return 0.0 - float(np.sum(_xlog2x(p)))


def _row_entropies(atoms: np.ndarray) -> np.ndarray:
    return 0.0 - np.sum(_xlog2x(atoms), axis=1)


# ---------------------------------------------------------------- scoring rules

class ScoringRule(str, enum.Enum):
    """Binary proper scoring rules.  Log-loss is measured in bits."""

    LogLoss = "log"
    SquaredError = "squared"

    def pointwise(self, pred, y):
        pred = np.asarray(pred, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self is ScoringRule.SquaredError:
            return (pred - y) ** 2
        return self.expected(pred, y)

    def expected(self, pred, theta):
        """Expected loss of predicting ``pred`` when Y ~ Bernoulli(theta)."""
        pred = np.asarray(pred, dtype=np.float64)
        theta = np.asarray(theta, dtype=np.float64)
        if self is ScoringRule.SquaredError:
            return theta * (1.0 - pred) ** 2 + (1.0 - theta) * pred**2
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.where(theta > 0, theta * np.log2(np.where(theta > 0, pred, 1.0)), 0.0)
            b = np.where(theta < 1, (1.0 - theta) * np.log2(np.where(theta < 1, 1.0 - pred, 1.0)), 0.0)
        return -(a + b)


@functools.cache
def check_proper(phi: ScoringRule, grid_size: int = 19, tol: float = 1e-6) -> None:
    """Numerically confirm the expected loss is minimized at the true probability."""
    for theta in np.linspace(0.05, 0.95, grid_size):
        res = minimize_scalar(
            lambda p: float(phi.expected(p, theta)),
            bounds=(1e-12, 1 - 1e-12),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if abs(res.x - theta) > tol:
            raise NotProper(f"{phi.name}: minimizer {res.x!r} != theta {theta!r}")


def loss_based_measures(q_k: BinaryMarginal, phi: ScoringRule) -> UncertaintyTriple:
    """Per-label triple induced by a strictly proper scoring rule.

    TU is the expected loss of the best constant prediction (the mean),
    AU the expected loss when the true probability is revealed.
    """
    phi = ScoringRule(phi)
    check_proper(phi)
    m = q_k.mean()
    total = float(phi.expected(m, m))
    aleatoric = weighted_mean(phi.expected(q_k.values, q_k.values), q_k.weights)
    return UncertaintyTriple(total, aleatoric, _clamped_difference(total, aleatoric))


# ---------------------------------------------------------------- families

def global_entropy_measures(q: EmpiricalSecondOrder) -> UncertaintyTriple:
    total = shannon_entropy(second_order_mean(q))
    aleatoric = weighted_mean(_row_entropies(q.atoms), q.weights)
    return UncertaintyTriple(total, aleatoric, _clamped_difference(total, aleatoric))


def label_entropy_triple(m: BinaryMarginal) -> UncertaintyTriple:
    mean = m.mean()
    if mean in (0.0, 1.0):
        # a boundary mean forces every atom onto that boundary
        if np.any(np.abs(m.values[m.weights > 0] - mean) > 1e-12):
            raise NumericalError("marginal mean on the boundary but atoms are interior")
    total = binary_entropy(min(max(mean, 0.0), 1.0))
    aleatoric = weighted_mean(_h2(m.values), m.weights)
    return UncertaintyTriple(total, aleatoric, _clamped_difference(total, aleatoric))


def variance_triple(m: BinaryMarginal) -> UncertaintyTriple:
    mean = m.mean()
    v = m.values
    aleatoric = weighted_mean(v * (1.0 - v), m.weights)
    epistemic = m.variance()
    total = mean * (1.0 - mean)
    if abs(total - (aleatoric + epistemic)) > 1e-9:
        raise NumericalError(f"total variance {total!r} != {aleatoric!r} + {epistemic!r}")
    return UncertaintyTriple(total, aleatoric, epistemic)


_LABEL_TRIPLE = {
    MeasureFamily.LabelEntropy: label_entropy_triple,
    MeasureFamily.Variance: variance_triple,
}


def labelwise_report(marginals: Sequence[BinaryMarginal], family) -> LabelWiseReport:
    """Label-wise report from an explicit list of marginals (e.g. a restriction)."""
    family = MeasureFamily.parse(family)
    if not family.label_wise:
        raise UnknownFamily("global entropy has no label-wise decomposition")
    per = tuple(_LABEL_TRIPLE[family](m) for m in marginals)
    return LabelWiseReport(per, sum_triples(per), family)


def label_entropy_measures(q: EmpiricalSecondOrder) -> LabelWiseReport:
    return labelwise_report([marginal(q, k) for k in range(q.K)], MeasureFamily.LabelEntropy)


def variance_measures(q: EmpiricalSecondOrder) -> LabelWiseReport:
    return labelwise_report([marginal(q, k) for k in range(q.K)], MeasureFamily.Variance)


def measure(q: EmpiricalSecondOrder, family) -> LabelWiseReport:
    """Dispatch on family; GlobalEntropy is wrapped in a report with no per-label part."""
    family = MeasureFamily.parse(family)
    if family is MeasureFamily.GlobalEntropy:
        return LabelWiseReport((), global_entropy_measures(q), family)
    if family is MeasureFamily.LabelEntropy:
        return label_entropy_measures(q)
    return variance_measures(q)


def max_total_uncertainty(K: int, family) -> float:
    """Largest attainable TU for K classes (reached when the mean is uniform)."""
    family = MeasureFamily.parse(family)
    if family is MeasureFamily.GlobalEntropy:
        return math.log2(K)
    if family is MeasureFamily.LabelEntropy:
        return math.log2(K) + (K - 1) * math.log2(K / (K - 1))
    return (K - 1) / K


def dirichlet_variance_oracle(d: DirichletSecondOrder) -> LabelWiseReport:
    """Closed-form variance-family report for a Dirichlet second-order distribution."""
    a = d.alpha
    a0 = d.alpha0
    per = []
    for ak in a:
        mean = ak / a0
        epistemic = ak * (a0 - ak) / (a0 * a0 * (a0 + 1.0))
        aleatoric = mean - ak * (ak + 1.0) / (a0 * (a0 + 1.0))
        per.append(UncertaintyTriple(mean * (1.0 - mean), aleatoric, epistemic))
    per = tuple(per)
    return LabelWiseReport(per, sum_triples(per), MeasureFamily.Variance)

"""Points on the probability simplex and second-order distributions over them.

A second-order distribution is stored as a finite weighted set of atoms
(an ensemble of first-order predictions).  Dirichlet distributions are kept
as a parametric form, mainly so tests have closed-form moments to compare
against.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadAlpha,
    BadSum,
    BadWeights,
    EmptySubset,
    IndexOutOfRange,
    NegativeEntry,
    TooFewClasses,
    ValidationError,
)

# validity tolerance for entries / sums of stored simplex points
PROB_TOL = 1e-9
# tolerance on raw input sums accepted by make_prob_vector
INPUT_SUM_TOL = 1e-6

# Pinned generator family for sampling; change only with a version bump.
RNG_NAME = "numpy.PCG64"


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    """Weighted mean of a 1-d array.

    Single arithmetic path used by both the full mean vector and the
    marginal means, so the two agree bit for bit.
    """
    return float(np.sum(np.ascontiguousarray(weights) * np.ascontiguousarray(values)))


def _check_simplex_rows(atoms: np.ndarray, tol: float = PROB_TOL) -> None:
    if atoms.ndim != 2:
        raise ValidationError(f"atoms must be 2-d, got shape {atoms.shape}")
    if atoms.shape[1] < 2:
        raise TooFewClasses(f"need K >= 2 classes, got {atoms.shape[1]}")
    if not np.all(np.isfinite(atoms)):
        raise ValidationError("atoms contain non-finite values")
    if atoms.min() < -tol or atoms.max() > 1 + tol:
        raise ValidationError("atom entries outside [0, 1]")
    sums = atoms.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        raise BadSum(f"atom {bad[0]} sums to {sums[bad[0]]!r}")


def _check_weights(weights: np.ndarray, m: int) -> None:
    if weights.shape != (m,):
        raise BadWeights(f"expected {m} weights, got shape {weights.shape}")
    if not np.all(np.isfinite(weights)) or weights.min() < 0:
        raise BadWeights("weights must be finite and nonnegative")
    if abs(weights.sum() - 1.0) > PROB_TOL:
        raise BadWeights(f"weights sum to {weights.sum()!r}, expected 1")


@dataclass(frozen=True)
class ProbVector:
    """A categorical distribution over K >= 2 classes."""

    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1:
            raise ValidationError("probs must be 1-d")
        _check_simplex_rows(p[None, :])
        object.__setattr__(self, "probs", p)

    @property
    def K(self) -> int:
        return self.probs.shape[0]

    def __len__(self):
        return self.K

    def __getitem__(self, k):
        return self.probs[k]

    def __eq__(self, other):
        if not isinstance(other, ProbVector):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())


def make_prob_vector(raw: Iterable[float]) -> ProbVector:
    """Validate raw class probabilities, clamp to [0, 1] and renormalize.

    Raises NegativeEntry, BadSum or TooFewClasses.
    """
    p = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] < 2:
        raise TooFewClasses(f"need K >= 2 classes, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise BadSum("non-finite probability")
    if p.min() < -PROB_TOL:
        raise NegativeEntry(f"entry {int(np.argmin(p))} is {p.min()!r}")
    total = p.sum()
    if abs(total - 1.0) > INPUT_SUM_TOL:
        raise BadSum(f"probabilities sum to {total!r}")
    p = np.clip(p, 0.0, 1.0)
    return ProbVector(p / p.sum())


@dataclass(frozen=True)
class BinaryMarginal:
    """Distribution of a single coordinate Theta_k of a second-order distribution."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        w = _frozen(self.weights)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("marginal needs at least one value")
        if v.min() < -PROB_TOL or v.max() > 1 + PROB_TOL:
            raise ValidationError("marginal values outside [0, 1]")
        _check_weights(w, v.shape[0])
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    def mean(self) -> float:
        return weighted_mean(self.values, self.weights)

    def variance(self) -> float:
        # population variance, two-pass
        d = self.values - self.mean()
        return weighted_mean(d * d, self.weights)


@dataclass(frozen=True)
class EmpiricalSecondOrder:
    """Finite weighted atom set over the simplex (e.g. an ensemble's predictions).

    ``atoms`` has shape (M, K); ``weights`` defaults to uniform 1/M.
    Atoms are validated but never renormalized, so transforms built on top
    of this type keep their exact arithmetic.
    """

    atoms: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        raw = self.atoms
        if isinstance(raw, (list, tuple)) and raw and isinstance(raw[0], ProbVector):
            raw = np.stack([a.probs for a in raw])
        a = _frozen(raw)
        if a.ndim == 1:
            a = _frozen(a[None, :])
        if a.ndim != 2 or a.shape[0] < 1:
            raise ValidationError("need at least one atom")
        _check_simplex_rows(a)
        if self.weights is None:
            w = _frozen(np.full(a.shape[0], 1.0 / a.shape[0]))
        else:
            w = _frozen(self.weights)
        _check_weights(w, a.shape[0])
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "weights", w)

    @property
    def M(self) -> int:
        return self.atoms.shape[0]

    @property
    def K(self) -> int:
        return self.atoms.shape[1]

    def mean(self) -> ProbVector:
        return second_order_mean(self)

    def is_dirac(self) -> bool:
        """True when all positive-weight atoms coincide."""
        live = self.atoms[self.weights > 0]
        return bool(np.all(live == live[0]))

    def to_dict(self) -> dict:
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True)
class DirichletSecondOrder:
    alpha: np.ndarray

    def __post_init__(self):
        a = _frozen(self.alpha)
        if a.ndim != 1 or a.shape[0] < 2:
            raise BadAlpha("alpha needs K >= 2 entries")
        if not np.all(np.isfinite(a)) or a.min() <= 0:
            raise BadAlpha("alpha entries must be finite and > 0")
        object.__setattr__(self, "alpha", a)

    @property
    def K(self) -> int:
        return self.alpha.shape[0]

    @property
    def alpha0(self) -> float:
        return float(self.alpha.sum())

    def mean(self) -> np.ndarray:
        return self.alpha / self.alpha0

    def variance(self) -> np.ndarray:
        a0 = self.alpha0
        return self.alpha * (a0 - self.alpha) / (a0 * a0 * (a0 + 1.0))


def second_order_mean(q: EmpiricalSecondOrder) -> ProbVector:
    """Coordinate-wise weighted mean of the atoms."""
    return ProbVector(np.array([weighted_mean(q.atoms[:, k], q.weights) for k in range(q.K)]))


def marginal(q: EmpiricalSecondOrder, k: int) -> BinaryMarginal:
    if not 0 <= k < q.K:
        raise IndexOutOfRange(f"class index {k} outside [0, {q.K})")
    return BinaryMarginal(q.atoms[:, k], q.weights)


def restrict(q: EmpiricalSecondOrder, labels: Sequence[int]) -> list[BinaryMarginal]:
    """Marginals of the requested labels, in the requested order."""
    labels = list(labels)
    if not labels:
        raise EmptySubset("label subset is empty")
    return [marginal(q, k) for k in labels]


def dirichlet_draws(alpha: np.ndarray, n: int, gen: np.random.Generator) -> np.ndarray:
    """n Dirichlet(alpha) draws via normalized Gamma variates, shape (n, K)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    g = gen.standard_gamma(alpha, size=(n, alpha.shape[0]))
    s = g.sum(axis=1)
    # tiny alpha can underflow every coordinate to 0; redraw those rows
    bad = np.flatnonzero(s == 0)
    while bad.size:
        g[bad] = gen.standard_gamma(alpha, size=(bad.size, alpha.shape[0]))
        s[bad] = g[bad].sum(axis=1)
        bad = bad[s[bad] == 0]
    return g / s[:, None]


def sample_dirichlet(d: DirichletSecondOrder, n: int, seed: int) -> EmpiricalSecondOrder:
    if n < 1:
        raise ValidationError("n must be >= 1")
    return EmpiricalSecondOrder(dirichlet_draws(d.alpha, n, rng(seed)))

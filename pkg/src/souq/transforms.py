"""Distribution transforms used to state and test the uncertainty axioms.

* mean-preserving spread: every atom is split into two atoms theta +- z that
  share its weight, with z in the zero-sum hyperplane, so E[Z | Theta] = 0.
* location shift: all atoms translated by a constant zero-sum vector.
* center shift: a location shift that moves the mean a fraction of the way
  to the barycenter.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlreadyCentered,
    BadWeights,
    LeavesSimplex,
    NoRoom,
    NotZeroSum,
    ValidationError,
    ZeroShift,
)
from .simplex import PROB_TOL, EmpiricalSecondOrder, rng, second_order_mean

# coordinates closer than this to 0 or 1 are not moved by a spread
ROOM_EPS = 1e-3
ZERO_SUM_TOL = 1e-12
# shifted atoms may overshoot [0, 1] by at most this much
SHIFT_TOL = 1e-12


class TransformKind(str, enum.Enum):
    MeanPreservingSpread = "spread"
    LocationShift = "location"
    CenterShift = "center"


@dataclass(frozen=True)
class TransformSpec:
    kind: TransformKind
    magnitude: float = 0.0
    lam: float | None = None
    seed: int = 0

    def apply(self, q: EmpiricalSecondOrder, z=None) -> EmpiricalSecondOrder:
        if self.kind is TransformKind.MeanPreservingSpread:
            return mean_preserving_spread(q, self.magnitude, self.seed)
        if self.kind is TransformKind.CenterShift:
            return center_shift(q, self.lam)
        if z is None:
            raise ValidationError("location shift needs an explicit vector")
        return location_shift(q, z)


def _direction(free: np.ndarray, K: int, gen: np.random.Generator) -> np.ndarray:
    """Random zero-sum direction supported on ``free``, max |d_k| = 1, first nonzero > 0."""
    d = np.zeros(K)
    g = gen.standard_normal(free.size)
    g -= g.mean()
    d[free] = g / np.abs(g).max()
    # absorb centering round-off so the row sums to zero exactly
    d[free[-1]] = -np.sum(d[free[:-1]])
    if d[free[0]] < 0:
        d = -d
    return d


def spread_offsets(q: EmpiricalSecondOrder, magnitude: float, seed: int) -> np.ndarray:
    """Per-atom offsets z^(m) (shape (M, K)) used by ``mean_preserving_spread``.

    Rows are zero for atoms that have no room to move.  Each atom's offset is
    ``min(magnitude, t_max) * d`` where d is a random zero-sum direction over
    the atom's interior coordinates and t_max keeps both offspring on the
    simplex.
    """
    if not magnitude > 0:
        raise ValidationError("magnitude must be > 0")
    gen = rng(seed)
    offsets = np.zeros_like(q.atoms)
    for m, theta in enumerate(q.atoms):
        room = np.minimum(theta, 1.0 - theta)
        free = np.flatnonzero(room >= ROOM_EPS)
        if free.size < 2 or q.weights[m] == 0:
            continue
        d = _direction(free, q.K, gen)
        nz = d != 0
        t_max = float(np.min(room[nz] / np.abs(d[nz])))
        offsets[m] = min(magnitude, t_max) * d
    if not np.any(offsets != 0):
        raise NoRoom("no atom has room for a mean-preserving spread")
    return offsets


def mean_preserving_spread(q: EmpiricalSecondOrder, magnitude: float, seed: int) -> EmpiricalSecondOrder:
    offsets = spread_offsets(q, magnitude, seed)
    atoms, weights = [], []
    for theta, w, z in zip(q.atoms, q.weights, offsets):
        if np.any(z != 0):
            atoms += [np.clip(theta + z, 0.0, 1.0), np.clip(theta - z, 0.0, 1.0)]
            weights += [w / 2.0, w / 2.0]
        else:
            atoms.append(theta)
            weights.append(w)
    return EmpiricalSecondOrder(np.array(atoms), np.array(weights))


def spread_variance(q: EmpiricalSecondOrder, offsets: np.ndarray) -> np.ndarray:
    """Var(Z_k) per class for the spread described by ``offsets``."""
    # Z = +-z^(m) with probability w_m / 2 each, so E[Z] = 0
    return np.sum(q.weights[:, None] * offsets**2, axis=0)


def location_shift(q: EmpiricalSecondOrder, z) -> EmpiricalSecondOrder:
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (q.K,):
        raise ValidationError(f"shift must have {q.K} entries")
    if abs(z.sum()) > ZERO_SUM_TOL:
        raise NotZeroSum(f"shift sums to {z.sum()!r}")
    if not np.any(z != 0):
        raise ZeroShift("shift vector is zero")
    shifted = q.atoms + z
    if shifted.min() < -SHIFT_TOL or shifted.max() > 1 + SHIFT_TOL:
        raise LeavesSimplex("shift moves an atom off the simplex")
    if np.any(np.abs(shifted.sum(axis=1) - 1) > PROB_TOL):
        raise LeavesSimplex("shifted atom does not sum to 1")
    return EmpiricalSecondOrder(shifted, q.weights)


def max_center_step(q: EmpiricalSecondOrder) -> float:
    """Largest s = 1 - lambda in [0, 1] for which the center shift stays on the simplex."""
    beta = np.full(q.K, 1.0 / q.K)
    u = beta - second_order_mean(q).probs
    s = 1.0
    for k in range(q.K):
        if u[k] > 0:
            s = min(s, float((1.0 - q.atoms[:, k].max()) / u[k]))
        elif u[k] < 0:
            s = min(s, float(q.atoms[:, k].min() / -u[k]))
    return max(s, 0.0)


def center_shift(q: EmpiricalSecondOrder, lam: float) -> EmpiricalSecondOrder:
    if not 0.0 < lam < 1.0:
        raise ValidationError("lambda must lie in (0, 1)")
    beta = np.full(q.K, 1.0 / q.K)
    mean = second_order_mean(q).probs
    if np.max(np.abs(mean - beta)) <= ZERO_SUM_TOL:
        raise AlreadyCentered("mean is already the barycenter")
    z = (1.0 - lam) * (beta - mean)
    # remove float drift so the shift passes the zero-sum check
    z -= z.mean()
    return location_shift(q, z)


def dirac_mixture(weights) -> EmpiricalSecondOrder:
    """Mixture of point masses on the K simplex vertices."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size < 2:
        raise BadWeights("need weights for K >= 2 vertices")
    if not np.all(np.isfinite(w)) or w.min() < 0 or abs(w.sum() - 1) > PROB_TOL:
        raise BadWeights("vertex weights must be nonnegative and sum to 1")
    return EmpiricalSecondOrder(np.eye(w.size), w)

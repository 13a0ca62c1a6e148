"""Randomized checks of the uncertainty axioms A0-A7 for each measure family.

Each axiom is checked on ``n_cases`` random second-order distributions.
A verdict is ``Holds`` only if every applicable case passes; the first
failing case is kept as the witness.  Cases are seeded individually from
``(seed, axiom, case)`` so they are independent of evaluation order.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NoRoom, ValidationError
from .measures import MeasureFamily, UncertaintyTriple, labelwise_report, max_total_uncertainty, measure
from .simplex import EmpiricalSecondOrder, dirichlet_draws, restrict, second_order_mean
from .transforms import (
    center_shift,
    dirac_mixture,
    location_shift,
    max_center_step,
    mean_preserving_spread,
    spread_offsets,
    spread_variance,
)

STRICT_MARGIN = 1e-12
EQUAL_TOL = 1e-9
DIRAC_TOL = 1e-12
A2_TOL = {MeasureFamily.GlobalEntropy: 1e-9, MeasureFamily.LabelEntropy: 1e-9, MeasureFamily.Variance: 1e-12}
# minimum |delta EU| for an A5 counterexample
A5_WITNESS_GAP = 1e-6
# coordinates within this of 0 / 1 are not used to build location shifts
SHIFT_EPS = 1e-3


class Axiom(str, enum.Enum):
    A0 = "A0"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"


class Verdict(str, enum.Enum):
    Holds = "Holds"
    Violated = "Violated"
    NotApplicable = "NotApplicable"


CLAIMS = {
    MeasureFamily.Variance: frozenset(Axiom),
    MeasureFamily.LabelEntropy: frozenset(Axiom) - {Axiom.A5},
    MeasureFamily.GlobalEntropy: frozenset(),
}
EXPECTED_VIOLATIONS = {(MeasureFamily.GlobalEntropy, Axiom.A5)}


@dataclass
class AxiomResult:
    axiom: Axiom
    family: MeasureFamily
    verdict: Verdict
    witness: dict | None = None
    cases: int = 0
    note: str = ""
    claimed: bool = False
    expected: bool = False

    def __post_init__(self):
        if self.verdict is Verdict.Violated and self.witness is None:
            raise ValueError("a violated axiom needs a witness")

    @property
    def unexpected_violation(self) -> bool:
        return self.verdict is Verdict.Violated and self.claimed and not self.expected

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom.value,
            "family": self.family.value,
            "verdict": self.verdict.value,
            "claimed": self.claimed,
            "expected": self.expected,
            "cases": self.cases,
            "note": self.note,
            "witness": self.witness,
        }


# ---------------------------------------------------------------- case generation

def case_rng(seed: int, axiom: Axiom, case: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed, int(axiom.value[1:]), case])
    return np.random.Generator(np.random.PCG64(ss))


def random_second_order(gen: np.random.Generator) -> EmpiricalSecondOrder:
    """Random empirical Q with K in [2, 10], M in [1, 64].

    Degenerate shapes (single atom, vertex atoms, K = 2) are drawn on purpose.
    """
    K = 2 if gen.random() < 0.15 else int(gen.integers(2, 11))
    M = 1 if gen.random() < 0.15 else int(gen.integers(1, 65))
    alpha = np.exp(gen.uniform(np.log(0.1), np.log(10.0), size=K))
    atoms = dirichlet_draws(alpha, M, gen)
    if gen.random() < 0.2:
        n_vertex = int(gen.integers(1, M + 1))
        rows = gen.choice(M, size=n_vertex, replace=False)
        atoms[rows] = np.eye(K)[gen.integers(0, K, size=n_vertex)]
    if gen.random() < 0.5:
        weights = None
    else:
        weights = dirichlet_draws(np.ones(M), 1, gen)[0] if M > 1 else None
    return EmpiricalSecondOrder(atoms, weights)


def barycentered(q: EmpiricalSecondOrder) -> EmpiricalSecondOrder:
    """Mixture of all cyclic class permutations of q; its mean is the barycenter."""
    K = q.K
    atoms = np.concatenate([np.roll(q.atoms, s, axis=1) for s in range(K)])
    weights = np.concatenate([q.weights / K] * K)
    return EmpiricalSecondOrder(atoms, weights / weights.sum())


def random_location_shift(q: EmpiricalSecondOrder, gen: np.random.Generator) -> np.ndarray | None:
    """Random nonzero zero-sum shift that keeps every atom on the simplex, or None."""
    lo = q.atoms.min(axis=0)
    hi = q.atoms.max(axis=0)
    donors = np.flatnonzero(lo > SHIFT_EPS)
    receivers = np.flatnonzero(hi < 1.0 - SHIFT_EPS)
    if donors.size == 0 or receivers.size == 0:
        return None
    if np.setdiff1d(receivers, donors).size == 0 and donors.size < 2:
        return None
    for _ in range(20):
        ds = donors[gen.random(donors.size) < 0.5]
        if ds.size == 0:
            ds = gen.choice(donors, size=1)
        rs = np.setdiff1d(receivers, ds)
        rs = rs[gen.random(rs.size) < 0.5] if rs.size > 1 else rs
        if rs.size:
            break
    else:
        return None
    a = gen.uniform(0.1, 1.0, size=ds.size)
    b = gen.uniform(0.1, 1.0, size=rs.size)
    u = np.zeros(q.K)
    u[ds] = -a / a.sum()
    u[rs] = b / b.sum()
    s_max = min(
        float(np.min(lo[ds] / -u[ds])),
        float(np.min((1.0 - hi[rs]) / u[rs])),
    )
    return gen.uniform(0.1, 0.9) * s_max * u


def _triple_dict(t: UncertaintyTriple) -> dict:
    return {"tu": t.total, "au": t.aleatoric, "eu": t.epistemic}


def _g(q, family) -> UncertaintyTriple:
    return measure(q, family).global_


# ---------------------------------------------------------------- per-axiom checks
# Each check returns (passed, applicable, witness) for one case.

def _check_a0(q, family, gen):
    t = _g(q, family)
    ok = min(t.as_tuple()) >= 0
    return ok, True, {"q": q.to_dict(), "values": _triple_dict(t)}


def _check_a1(q, family, gen):
    # (a) any Dirac, possibly repeated with random weights, has zero EU
    theta = q.atoms[int(gen.integers(0, q.M))]
    reps = int(gen.integers(1, 4))
    dirac = EmpiricalSecondOrder(np.tile(theta, (reps, 1)), dirichlet_draws(np.ones(reps), 1, gen)[0] if reps > 1 else None)
    eu_dirac = _g(dirac, family).epistemic
    witness = {"q": dirac.to_dict(), "values": {"eu": eu_dirac}}
    if eu_dirac > DIRAC_TOL:
        return False, True, witness
    # (b) two or more distinct atoms of positive weight give EU > 0
    live = q.atoms[q.weights > 0]
    if np.unique(live, axis=0).shape[0] >= 2:
        eu = _g(q, family).epistemic
        witness = {"q": q.to_dict(), "values": {"eu": eu}}
        if not eu > 0:
            return False, True, witness
    return True, True, witness


def _check_a2(q, family, gen):
    bound = max_total_uncertainty(q.K, family)
    tu = _g(q, family).total
    qb = barycentered(q)
    tu_b = _g(qb, family).total
    witness = {"q": q.to_dict(), "values": {"tu": tu, "tu_barycenter_mean": tu_b, "closed_form": bound}}
    tol = A2_TOL[family]
    ok = tu <= bound + tol and abs(tu_b - bound) <= tol
    return ok, True, witness


def _check_a3(q, family, gen):
    magnitude = float(gen.uniform(0.01, 0.3))
    spread_seed = int(gen.integers(0, 2**31))
    try:
        offsets = spread_offsets(q, magnitude, spread_seed)
    except NoRoom:
        return True, False, None
    q2 = mean_preserving_spread(q, magnitude, spread_seed)
    t1, t2 = _g(q, family), _g(q2, family)
    values = {"before": _triple_dict(t1), "after": _triple_dict(t2), "magnitude": magnitude, "seed": spread_seed}
    ok = t2.epistemic - t1.epistemic > STRICT_MARGIN and abs(t2.total - t1.total) <= EQUAL_TOL
    if family is MeasureFamily.Variance:
        increment = float(spread_variance(q, offsets).sum())
        values["sum_var_z"] = increment
        ok = ok and abs((t2.epistemic - t1.epistemic) - increment) <= EQUAL_TOL
    return ok, True, {"q": q.to_dict(), "q_prime": q2.to_dict(), "values": values}


def _check_a4(q, family, gen):
    mean = second_order_mean(q).probs
    if np.max(np.abs(mean - 1.0 / q.K)) < 1e-3:
        return True, False, None
    s_max = min(max_center_step(q), 1.0)
    if s_max < 1e-3:
        return True, False, None
    lam = 1.0 - float(gen.uniform(0.1, 0.9)) * s_max
    q2 = center_shift(q, lam)
    t1, t2 = _g(q, family), _g(q2, family)
    witness = {"q": q.to_dict(), "q_prime": q2.to_dict(), "lambda": lam,
               "values": {"before": _triple_dict(t1), "after": _triple_dict(t2)}}
    ok = t2.total - t1.total > STRICT_MARGIN
    if family is MeasureFamily.Variance:
        ok = ok and t2.aleatoric - t1.aleatoric > STRICT_MARGIN
        ok = ok and abs(t2.epistemic - t1.epistemic) <= EQUAL_TOL
    witness["au_increased"] = bool(t2.aleatoric > t1.aleatoric)
    return ok, True, witness


def _check_a5(q, family, gen):
    z = random_location_shift(q, gen)
    if z is None:
        return True, False, None
    q2 = location_shift(q, z)
    t1, t2 = _g(q, family), _g(q2, family)
    witness = {"q": q.to_dict(), "z": z.tolist(), "q_prime": q2.to_dict(),
               "values": {"eu_before": t1.epistemic, "eu_after": t2.epistemic}}
    if family is MeasureFamily.GlobalEntropy:
        # looking for a counterexample: a case "fails" when EU moves visibly
        return abs(t2.epistemic - t1.epistemic) <= A5_WITNESS_GAP, True, witness
    return abs(t2.epistemic - t1.epistemic) <= EQUAL_TOL, True, witness


def _check_a6(q, family, gen):
    K = q.K
    w = dirichlet_draws(np.ones(K), 1, gen)[0]
    if gen.random() < 0.3:
        w[gen.integers(0, K)] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
        w = w / w.sum()
    dm = dirac_mixture(w)
    au = _g(dm, family).aleatoric
    return au <= DIRAC_TOL, True, {"q": dm.to_dict(), "values": {"au": au}}


def _check_a7(q, family, gen):
    perm = gen.permutation(q.K)
    cut = int(gen.integers(1, q.K))
    y1, y2 = sorted(perm[:cut].tolist()), sorted(perm[cut:].tolist())
    full = _g(q, family)
    parts = labelwise_report(restrict(q, y1), family).global_ + labelwise_report(restrict(q, y2), family).global_
    witness = {"q": q.to_dict(), "partition": [y1, y2],
               "values": {"full": _triple_dict(full), "parts": _triple_dict(parts)}}
    ok = all(abs(a - b) <= DIRAC_TOL for a, b in zip(full.as_tuple(), parts.as_tuple()))
    return ok, True, witness


_CHECKS = {
    Axiom.A0: _check_a0,
    Axiom.A1: _check_a1,
    Axiom.A2: _check_a2,
    Axiom.A3: _check_a3,
    Axiom.A4: _check_a4,
    Axiom.A5: _check_a5,
    Axiom.A6: _check_a6,
    Axiom.A7: _check_a7,
}

_SCOPE = {
    Axiom.A0: "TU, AU, EU >= 0",
    Axiom.A1: "EU = 0 iff Dirac",
    Axiom.A2: "TU maximal at barycenter mean (TU only)",
    Axiom.A3: "strict EU increase under mean-preserving spread; TU unchanged",
    Axiom.A4: "strict TU increase under center shift",
    Axiom.A5: "EU invariant under location shift",
    Axiom.A6: "AU = 0 on vertex mixtures",
    Axiom.A7: "additive over label partitions",
}


def check_axiom(axiom: Axiom, family, n_cases: int, seed: int) -> AxiomResult:
    family = MeasureFamily.parse(family)
    axiom = Axiom(axiom)
    claimed = axiom in CLAIMS[family]
    expected = (family, axiom) in EXPECTED_VIOLATIONS
    scope = _SCOPE[axiom]
    if family is MeasureFamily.Variance and axiom is Axiom.A4:
        scope += " and strict AU increase"

    if axiom is Axiom.A7 and not family.label_wise:
        return AxiomResult(axiom, family, Verdict.NotApplicable, note="no label-wise decomposition")

    check = _CHECKS[axiom]
    applied = 0
    first_ok = None
    observed_fail = None
    au_decreases = 0
    for i in range(n_cases):
        gen = case_rng(seed, axiom, i)
        q = random_second_order(gen)
        ok, applicable, witness = check(q, family, gen)
        if not applicable:
            continue
        applied += 1
        if axiom is Axiom.A4 and witness and not witness["au_increased"]:
            au_decreases += 1
        if ok and first_ok is None:
            first_ok = witness
        if not ok:
            observed_fail = witness
            if axiom is Axiom.A5 and family is MeasureFamily.GlobalEntropy:
                break
            if claimed:
                break

    if axiom is Axiom.A5 and family is MeasureFamily.LabelEntropy:
        seen = "EU changed in some cases" if observed_fail else "EU unchanged in all cases"
        return AxiomResult(axiom, family, Verdict.NotApplicable, witness=observed_fail or first_ok,
                           cases=applied, note=f"not claimed; observed: {seen}", claimed=False)

    note = scope
    if axiom is Axiom.A4 and family is not MeasureFamily.Variance:
        note += f"; AU not claimed, observed AU decrease in {au_decreases}/{applied} cases"
    if applied == 0:
        return AxiomResult(axiom, family, Verdict.NotApplicable, cases=0, note="no applicable cases",
                           claimed=claimed, expected=expected)
    if observed_fail is not None:
        if expected:
            note += "; violation expected per theory"
        return AxiomResult(axiom, family, Verdict.Violated, witness=observed_fail, cases=applied,
                           note=note, claimed=claimed, expected=expected)
    return AxiomResult(axiom, family, Verdict.Holds, witness=first_ok, cases=applied,
                       note=note, claimed=claimed, expected=expected)


def run_axiom_suite(family, n_cases: int, seed: int) -> list[AxiomResult]:
    if n_cases < 1:
        raise ValidationError("n_cases must be >= 1")
    return [check_axiom(ax, family, n_cases, seed) for ax in Axiom]


def unexpected_violations(results) -> list[AxiomResult]:
    return [r for r in results if r.unexpected_violation]


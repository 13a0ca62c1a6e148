"""End-to-end acceptance checks; each prints one PASS/FAIL line."""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from souq import cli
from souq.axioms import Axiom, Verdict, barycentered, random_second_order
from souq.commands import RunConfig, cmd_axioms, cmd_ood, cmd_simulate
from souq.errors import NoRoom
from souq.evaluation import DEFAULT_GRID, ScoredInstance, accuracy_rejection_curve
from souq.measures import (
    ScoringRule,
    dirichlet_variance_oracle,
    label_entropy_measures,
    label_entropy_triple,
    loss_based_measures,
    max_total_uncertainty,
    variance_measures,
    variance_triple,
)
from souq.simplex import BinaryMarginal, DirichletSecondOrder, EmpiricalSecondOrder
from souq.transforms import location_shift, mean_preserving_spread, spread_offsets, spread_variance


@pytest.fixture
def verdict(capsys):
    def report(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
        assert ok, f"{name}: {detail}"
    return report


def _suite(tmp_path, family):
    t0 = time.perf_counter()
    out, results = cmd_axioms(RunConfig("axioms", str(tmp_path / f"{family}.json"), family=family,
                                        n_cases=500, seed=0, format="json"))
    return {r.axiom: r for r in results}, time.perf_counter() - t0


def test_ac1_variance_suite(tmp_path, verdict):
    res, secs = _suite(tmp_path, "var")
    bad = [a.value for a, r in res.items() if r.verdict is not Verdict.Holds]
    verdict("AC1 variance axiom suite", not bad and secs < 30, f"non-Holds={bad} runtime={secs:.1f}s")


def test_ac2_label_entropy_suite(tmp_path, verdict):
    res, secs = _suite(tmp_path, "lent")
    claimed = [Axiom.A0, Axiom.A1, Axiom.A2, Axiom.A3, Axiom.A4, Axiom.A6, Axiom.A7]
    bad = [a.value for a in claimed if res[a].verdict is not Verdict.Holds]
    verdict("AC2 label-entropy axiom suite", not bad and secs < 30, f"non-Holds={bad} runtime={secs:.1f}s")


def test_ac3_entropy_a5_counterexample(tmp_path, verdict):
    res, _ = _suite(tmp_path, "ent")
    r = res[Axiom.A5]
    w = r.witness or {}
    gap = abs(w["values"]["eu_after"] - w["values"]["eu_before"]) if w else 0.0
    q = EmpiricalSecondOrder(np.array(w["q"]["atoms"]), np.array(w["q"]["weights"]))
    var_gap = abs(variance_measures(location_shift(q, w["z"])).epistemic - variance_measures(q).epistemic)
    ok = r.verdict is Verdict.Violated and r.expected and gap > 1e-6 and var_gap < 1e-9
    verdict("AC3 entropy A5 witness", ok, f"|dEU_ent|={gap:.3g} |dEU_var|={var_gap:.3g}")


def test_ac4_spread_increment(verdict):
    gen = np.random.default_rng(4)
    worst, done = 0.0, 0
    while done < 100:
        q = random_second_order(gen)
        mag, seed = float(gen.uniform(0.01, 0.3)), int(gen.integers(0, 2**31))
        try:
            offsets = spread_offsets(q, mag, seed)
        except NoRoom:
            continue
        q2 = mean_preserving_spread(q, mag, seed)
        inc = variance_measures(q2).epistemic - variance_measures(q).epistemic
        worst = max(worst, abs(inc - spread_variance(q, offsets).sum()))
        done += 1
    verdict("AC4 spread increment identity", worst <= 1e-9, f"max error={worst:.3g}")


def test_ac5_closed_form_maxima(verdict):
    gen = np.random.default_rng(5)
    errs = []
    for K in (2, 3, 10):
        q = barycentered(EmpiricalSecondOrder(gen.dirichlet(np.ones(K), size=4)))
        errs.append((abs(label_entropy_measures(q).total - max_total_uncertainty(K, "lent")), 1e-9))
        errs.append((abs(variance_measures(q).total - max_total_uncertainty(K, "var")), 1e-12))
    attained = all(e <= tol for e, tol in errs)
    exceed = 0
    for _ in range(10_000):
        K = int(gen.integers(2, 11))
        q = EmpiricalSecondOrder(gen.dirichlet(np.full(K, gen.uniform(0.2, 5)), size=int(gen.integers(1, 9))))
        exceed += label_entropy_measures(q).total > max_total_uncertainty(K, "lent") + 1e-9
        exceed += variance_measures(q).total > max_total_uncertainty(K, "var") + 1e-12
    verdict("AC5 closed-form maxima", attained and exceed == 0,
            f"max attain error={max(e for e, _ in errs):.3g} exceedances={exceed}")


def test_ac6_scoring_rule_reduction(verdict):
    gen = np.random.default_rng(6)
    worst = 0.0
    for i in range(1000):
        M = int(gen.integers(1, 20))
        v = gen.uniform(size=M)
        if i % 10 == 0:
            v[gen.integers(0, M)] = float(gen.integers(0, 2))
        w = gen.dirichlet(np.ones(M))
        m = BinaryMarginal(v, w)
        for phi, oracle in ((ScoringRule.LogLoss, label_entropy_triple), (ScoringRule.SquaredError, variance_triple)):
            a, b = loss_based_measures(m, phi).as_tuple(), oracle(m).as_tuple()
            worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    verdict("AC6 scoring-rule reduction", worst <= 1e-9, f"max error={worst:.3g}")


def _influence_se(atoms):
    mu = atoms.mean(axis=0)
    dev = atoms - mu
    n = atoms.shape[0]
    psi_tu = dev @ (1.0 - 2.0 * mu)
    psi_au = (atoms * (1.0 - atoms)).sum(axis=1)
    psi_eu = (dev**2).sum(axis=1)
    return [float(np.std(p) / math.sqrt(n)) for p in (psi_tu, psi_au, psi_eu)]


def test_ac7_dirichlet_oracle(verdict):
    t0 = time.perf_counter()
    gen = np.random.default_rng(7)
    worst_z = 0.0
    for _ in range(20):
        K = int(gen.integers(2, 6))
        d = DirichletSecondOrder(np.exp(gen.uniform(np.log(0.3), np.log(20.0), size=K)))
        atoms = gen.dirichlet(d.alpha, size=100_000)
        got = variance_measures(EmpiricalSecondOrder(atoms)).global_.as_tuple()
        want = dirichlet_variance_oracle(d).global_.as_tuple()
        for g, w, se in zip(got, want, _influence_se(atoms)):
            worst_z = max(worst_z, abs(g - w) / se)
    secs = time.perf_counter() - t0
    verdict("AC7 Dirichlet variance oracle", worst_z <= 3 and secs < 60, f"max |z|={worst_z:.2f} runtime={secs:.1f}s")


def _aurocs(path):
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")][1:]
    return {l.split(",")[0]: float(l.split(",")[1]) for l in lines}


def test_ac8_synthetic_ood(tmp_path, verdict):
    iid, ood = str(tmp_path / "id.csv"), str(tmp_path / "ood.csv")
    cmd_simulate(RunConfig("simulate", iid, alpha0=1e3, instances=1000, members=5, seed=1, prefix="id"))
    cmd_simulate(RunConfig("simulate", ood, alpha0=3.0, instances=1000, members=5, seed=2, prefix="ood"))
    sep = _aurocs(cmd_ood(RunConfig("ood", str(tmp_path / "a.csv"), input=iid, ood=ood)))
    same = _aurocs(cmd_ood(RunConfig("ood", str(tmp_path / "b.csv"), input=iid, ood=iid)))
    ok = min(sep.values()) >= 0.95 and all(0.45 <= v <= 0.55 for v in same.values()) and len(sep) == 3
    verdict("AC8 synthetic OoD", ok, f"separated={sep} same-file={same}")


def test_ac9_arc_mechanics(verdict):
    shift = math.sqrt(2.0) * 1.2815515655446004  # P(wrong scores above right) = 0.9
    curves, f0_exact = [], True
    for seed in range(100):
        gen = np.random.default_rng(seed)
        correct = gen.random(200) < 0.7
        scores = gen.normal(size=200) + np.where(correct, 0.0, shift)
        items = [ScoredInstance(f"i{j:03d}", float(s), 0, 0 if c else 1) for j, (s, c) in enumerate(zip(scores, correct))]
        curve = accuracy_rejection_curve(items, DEFAULT_GRID)
        f0_exact &= curve.accuracies[0] == correct.sum() / 200
        curves.append(curve.accuracies)
    acc = np.array(curves)
    diffs = np.diff(acc, axis=1)
    slack = diffs.mean(axis=0) + 3 * diffs.std(axis=0, ddof=1) / math.sqrt(len(acc))
    monotone = bool(np.all(slack >= 0))
    golden = accuracy_rejection_curve(
        [ScoredInstance(f"i{j}", s, 0, 0 if c else 1) for j, (s, c) in
         enumerate(zip([3, 2, 1, 0], [False, False, True, True]))], [0.0, 0.25, 0.5]).accuracies
    ok = monotone and f0_exact and golden == [0.5, 2 / 3, 1.0]
    verdict("AC9 ARC mechanics", ok, f"monotone={monotone} f0_exact={f0_exact} golden={golden}")


def test_ac10_determinism(tmp_path, verdict):
    def run(tag):
        d = tmp_path / tag
        d.mkdir()
        p = lambda n: str(d / n)
        codes = [
            cli.main(["simulate", "--alpha0", "50", "--instances", "40", "--classes", "4", "--seed", "3",
                      "--out", p("id.csv"), "--labels-out", p("labels.csv")]),
            cli.main(["simulate", "--alpha0", "2", "--instances", "40", "--classes", "4", "--seed", "4",
                      "--prefix", "o", "--out", p("ood.csv")]),
            cli.main(["measure", "--family", "lent", "--input", p("id.csv"), "--out", p("measure.csv")]),
            cli.main(["measure", "--input", p("id.csv"), "--out", p("measure.json"), "--format", "json"]),
            cli.main(["arc", "--input", p("id.csv"), "--labels", p("labels.csv"), "--out", p("arc.csv")]),
            cli.main(["ood", "--input", p("id.csv"), "--ood", p("ood.csv"), "--out", p("ood.json"), "--format", "json"]),
            cli.main(["axioms", "--family", "ent", "--cases", "25", "--seed", "9", "--out", p("axioms.csv")]),
        ]
        return codes, {f.name: f.read_bytes() for f in sorted(d.iterdir())}

    codes_a, a = run("a")
    codes_b, b = run("b")
    differ = [n for n in a if a[n] != b.get(n)]
    ok = codes_a == codes_b == [0] * 7 and not differ and len(a) == 8
    verdict("AC10 determinism", ok, f"files={len(a)} differing={differ} exit codes={codes_a}")

"""Task runners behind the ``souq`` subcommands.

Each ``cmd_*`` takes a validated :class:`RunConfig`, reads its inputs,
writes one output file and returns the output path (``cmd_axioms`` also
returns the results so callers can pick an exit status).
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from . import __version__
from .axioms import run_axiom_suite, unexpected_violations
from .errors import BadAlpha, ConfigError, MissingLabel
from .evaluation import DEFAULT_GRID, Cohort, ScoredInstance, accuracy_rejection_curve, auroc, validate_grid
from .io import atomic_write, labels_text, load_labels, predictions_text, read_predictions, write_report
from .measures import MeasureFamily, measure
from .simplex import dirichlet_draws, rng, second_order_mean

ALL_FAMILIES = (MeasureFamily.Variance, MeasureFamily.LabelEntropy, MeasureFamily.GlobalEntropy)


class Task(str, enum.Enum):
    measure = "measure"
    arc = "arc"
    ood = "ood"
    axioms = "axioms"
    simulate = "simulate"


@dataclass
class RunConfig:
    task: Task
    out: str
    family: MeasureFamily | None = None
    input: str | None = None
    labels: str | None = None
    ood: str | None = None
    grid: tuple = DEFAULT_GRID
    seed: int = 0
    format: str = "csv"
    n_cases: int = 500
    # simulate
    alpha0: float | None = None
    alpha: tuple | None = None
    instances: int = 100
    members: int = 5
    classes: int = 10
    prefix: str = "x"
    labels_out: str | None = None

    def __post_init__(self):
        self.task = Task(self.task)
        if self.family is not None:
            self.family = MeasureFamily.parse(self.family)

    def validate(self) -> "RunConfig":
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if not self.out:
            raise ConfigError("an output path is required")
        t = self.task
        if t in (Task.measure, Task.arc, Task.ood) and not self.input:
            raise ConfigError(f"{t.value} needs --input")
        if t is Task.arc:
            if not self.labels:
                raise ConfigError("arc needs --labels")
            validate_grid(self.grid)
        if t is Task.ood and not self.ood:
            raise ConfigError("ood needs --ood (the out-of-distribution predictions file)")
        if t is Task.axioms and self.n_cases < 1:
            raise ConfigError("--cases must be >= 1")
        if t is Task.simulate:
            if self.alpha is None and self.alpha0 is None:
                raise ConfigError("simulate needs --alpha0 or --alpha")
            if self.instances < 1 or self.members < 1:
                raise ConfigError("--instances and --members must be >= 1")
        return self


def _predicted(q) -> int:
    return int(np.argmax(second_order_mean(q).probs))


def _family_or(config, default):
    return config.family if config.family is not None else default


def cmd_measure(config: RunConfig) -> str:
    config.validate()
    family = _family_or(config, MeasureFamily.Variance)
    classes, dists = read_predictions(config.input)
    columns = ["instance_id", "predicted", "tu", "au", "eu"]
    if family.label_wise:
        for c in classes:
            columns += [f"tu_{c}", f"au_{c}", f"eu_{c}"]
    rows = []
    for iid, q in dists.items():
        rep = measure(q, family)
        row = {"instance_id": iid, "predicted": _predicted(q),
               "tu": rep.total, "au": rep.aleatoric, "eu": rep.epistemic}
        for c, t in zip(classes, rep.per_label):
            row[f"tu_{c}"], row[f"au_{c}"], row[f"eu_{c}"] = t.as_tuple()
        rows.append(row)
    meta = {"task": "measure", "family": family.value, "n": len(rows), "classes": classes, "version": __version__}
    write_report(config.out, rows, meta, config.format, columns)
    return config.out


def cmd_arc(config: RunConfig) -> str:
    config.validate()
    families = [config.family] if config.family is not None else list(ALL_FAMILIES)
    _, dists = read_predictions(config.input)
    labels = load_labels(config.labels)
    for iid in dists:
        if iid not in labels:
            raise MissingLabel(iid)
    rows = []
    for family in families:
        reports = {iid: measure(q, family).global_ for iid, q in dists.items()}
        for part in ("tu", "au", "eu"):
            attr = {"tu": "total", "au": "aleatoric", "eu": "epistemic"}[part]
            name = f"{part}_{family.value}"
            items = [ScoredInstance(iid, getattr(reports[iid], attr), _predicted(q), labels[iid])
                     for iid, q in dists.items()]
            curve = accuracy_rejection_curve(items, config.grid, name)
            rows += [{"score": name, "fraction": f, "accuracy": a} for f, a in curve.points]
    meta = {
        "task": "arc",
        "n": len(dists),
        "families": [f.value for f in families],
        "seed": config.seed,
        "note": "single run; no run-to-run spread without repeated simulated ensembles",
        "version": __version__,
    }
    write_report(config.out, rows, meta, config.format, ["score", "fraction", "accuracy"])
    return config.out


def cmd_ood(config: RunConfig) -> str:
    config.validate()
    _, id_dists = read_predictions(config.input)
    _, ood_dists = read_predictions(config.ood)
    families = [config.family] if config.family is not None else list(ALL_FAMILIES)
    rows = []
    for family in families:
        items = [ScoredInstance(iid, measure(q, family).epistemic, _predicted(q), cohort=Cohort.InDistribution)
                 for iid, q in id_dists.items()]
        items += [ScoredInstance(iid, measure(q, family).epistemic, _predicted(q), cohort=Cohort.OutOfDistribution)
                  for iid, q in ood_dists.items()]
        rows.append({"score": f"eu_{family.value}", "auroc": auroc(items)})
    meta = {"task": "ood", "n_id": len(id_dists), "n_ood": len(ood_dists), "seed": config.seed,
            "version": __version__}
    write_report(config.out, rows, meta, config.format, ["score", "auroc"])
    return config.out


def cmd_axioms(config: RunConfig):
    config.validate()
    family = _family_or(config, MeasureFamily.Variance)
    results = run_axiom_suite(family, config.n_cases, config.seed)
    rows = [r.to_dict() for r in results]
    meta = {
        "task": "axioms",
        "family": family.value,
        "cases": config.n_cases,
        "seed": config.seed,
        "unexpected_violations": [r.axiom.value for r in unexpected_violations(results)],
        "version": __version__,
    }
    if config.format == "csv":
        for row in rows:
            row["witness"] = json.dumps(row["witness"], separators=(",", ":"))
    write_report(config.out, rows, meta, config.format,
                 ["axiom", "family", "verdict", "claimed", "expected", "cases", "note", "witness"])
    return config.out, results


def simulate_ensembles(config: RunConfig):
    """Draw per-instance ensembles; returns (classes, [(id, member_ids, atoms)], labels)."""
    gen = rng(config.seed)
    if config.alpha is not None:
        alpha = np.asarray(config.alpha, dtype=np.float64)
        if alpha.ndim != 1 or alpha.size < 2 or not np.all(np.isfinite(alpha)) or alpha.min() <= 0:
            raise BadAlpha("--alpha needs >= 2 positive entries")
        K = alpha.size
    else:
        if not (config.alpha0 and np.isfinite(config.alpha0) and config.alpha0 > 0):
            raise BadAlpha("--alpha0 must be > 0")
        K = config.classes
        if K < 2:
            raise BadAlpha("need at least 2 classes")
    width = len(str(config.instances - 1))
    member_ids = [f"m{j}" for j in range(config.members)]
    instances, labels = [], {}
    for i in range(config.instances):
        if config.alpha is not None:
            center, a = alpha / alpha.sum(), alpha
        else:
            center = dirichlet_draws(np.ones(K), 1, gen)[0]
            a = np.maximum(config.alpha0 * center, np.finfo(float).tiny)
        atoms = dirichlet_draws(a, config.members, gen)
        iid = f"{config.prefix}{i:0{width}d}"
        instances.append((iid, member_ids, atoms))
        labels[iid] = int(gen.choice(K, p=center))
    return [str(k) for k in range(K)], instances, labels


def cmd_simulate(config: RunConfig) -> str:
    config.validate()
    classes, instances, labels = simulate_ensembles(config)
    atomic_write(config.out, predictions_text(classes, instances))
    if config.labels_out:
        atomic_write(config.labels_out, labels_text(labels))
    return config.out


RUNNERS = {
    Task.measure: cmd_measure,
    Task.arc: cmd_arc,
    Task.ood: cmd_ood,
    Task.axioms: cmd_axioms,
    Task.simulate: cmd_simulate,
}

__all__ = ["RunConfig", "Task", "cmd_measure", "cmd_arc", "cmd_ood", "cmd_axioms", "cmd_simulate"]

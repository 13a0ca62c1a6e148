"""Reading prediction / label files and writing reports.

Predictions CSV::

    instance_id,member_id,p_0,...,p_{K-1}

one row per (instance, ensemble member).  Labels CSV::

    instance_id,label

Reports are CSV (with ``# key: value`` metadata lines on top) or JSON
(``{"meta": ..., "rows": [...]}``).  Every write goes to a temporary file
that is renamed into place.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BadProbabilityRow, InconsistentMembers, ParseError, SouqError
from .simplex import EmpiricalSecondOrder, make_prob_vector


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def atomic_write(path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def class_name(column: str) -> str:
    return column[2:] if column.startswith("p_") else column


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc.reason})") from None


def read_predictions(path) -> tuple[list[str], dict[str, EmpiricalSecondOrder]]:
    """Parse a predictions file into (class names, instance_id -> distribution).

    Instances come back sorted by id; members keep their file order.
    """
    rows = _read_rows(path)
    if not rows or not any(rows):
        raise ParseError(f"{path}: empty predictions file", line=1)
    header = [h.strip() for h in rows[0]]
    if len(header) < 4 or header[0] != "instance_id" or header[1] != "member_id":
        raise ParseError(f"{path}: header must be instance_id,member_id,p_0,...,p_(K-1) with K >= 2", line=1)
    K = len(header) - 2
    classes = [class_name(h) for h in header[2:]]

    members: dict[str, list[str]] = {}
    probs: dict[str, list[np.ndarray]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != K + 2:
            raise ParseError(f"{path}: expected {K + 2} fields, got {len(row)}", line=lineno, column=min(len(row), K + 2))
        iid, mid = row[0], row[1]
        values = []
        for col, cell in enumerate(row[2:], start=3):
            try:
                values.append(float(cell))
            except ValueError:
                raise ParseError(f"{path}: not a number: {cell!r}", line=lineno, column=col) from None
        try:
            p = make_prob_vector(values)
        except SouqError as exc:
            raise BadProbabilityRow(f"{path}: row {iid}/{mid} (line {lineno}): {exc}", row_id=f"{iid}/{mid}", line=lineno) from None
        if mid in members.setdefault(iid, []):
            raise InconsistentMembers(f"{path}: duplicate member {mid!r} for instance {iid!r} (line {lineno})")
        members[iid].append(mid)
        probs.setdefault(iid, []).append(p.probs)

    if not members:
        raise ParseError(f"{path}: no prediction rows", line=2)
    reference_id = min(members)
    reference = set(members[reference_id])
    for iid in sorted(members):
        if set(members[iid]) != reference:
            missing = sorted(reference - set(members[iid]))
            extra = sorted(set(members[iid]) - reference)
            raise InconsistentMembers(
                f"{path}: instance {iid!r} members differ from {reference_id!r} (missing {missing}, extra {extra})"
            )
    dists = {iid: EmpiricalSecondOrder(np.stack(probs[iid])) for iid in sorted(members)}
    return classes, dists


def load_predictions(path) -> dict[str, EmpiricalSecondOrder]:
    return read_predictions(path)[1]


def predictions_text(classes: Sequence[str], instances: Iterable[tuple[str, Sequence[str], np.ndarray]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance_id", "member_id"] + [f"p_{c}" for c in classes])
    for iid, member_ids, atoms in instances:
        for mid, row in zip(member_ids, atoms):
            w.writerow([iid, mid] + [_fmt(x) for x in row])
    return buf.getvalue()


def load_labels(path) -> dict[str, int]:
    rows = _read_rows(path)
    if not rows or [h.strip() for h in rows[0]] != ["instance_id", "label"]:
        raise ParseError(f"{path}: header must be instance_id,label", line=1)
    labels = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"{path}: expected 2 fields", line=lineno)
        try:
            labels[row[0]] = int(row[1])
        except ValueError:
            raise ParseError(f"{path}: label {row[1]!r} is not an integer", line=lineno, column=2) from None
    return labels


def labels_text(labels: Mapping[str, int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance_id", "label"])
    for iid, y in labels.items():
        w.writerow([iid, int(y)])
    return buf.getvalue()


def report_text(rows: Sequence[Mapping], meta: Mapping, fmt: str, columns: Sequence[str] | None = None) -> str:
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": list(rows)}, indent=2) + "\n"
    if fmt != "csv":
        raise SouqError(f"unknown output format {fmt!r}")
    columns = list(columns or (rows[0].keys() if rows else []))
    buf = io.StringIO()
    for key, value in meta.items():
        if not isinstance(value, str):
            value = json.dumps(value)
        buf.write(f"# {key}: {value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = row.get(c, "")
            out.append(json.dumps(v) if isinstance(v, (dict, list)) else _fmt(v))
        w.writerow(out)
    return buf.getvalue()


def write_report(path, rows, meta, fmt: str, columns=None) -> None:
    atomic_write(path, report_text(rows, meta, fmt, columns))

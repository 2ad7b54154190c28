"""Learning-set CSV and model JSON files.

CSV layout: header ``id,<criterion names...>,class`` then one row per
alternative, values in display units, class as a 1-based integer.  Criterion
directions are not part of the CSV and are supplied by the caller.

Model JSON holds ``criteria`` (name + direction), ``classes``, ``frontiers``
(one array per frontier, display units, ``null`` for ABOVE_ALL) and either
``sufficient`` (minimal coalitions as bit masks) or ``weights`` + ``lambda``.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .core import (
    ABOVE_ALL,
    MAXIMIZE,
    CriteriaSpec,
    LearningSet,
    MrSortModel,
    UncsModel,
    UpSet,
)
from .errors import InputError, ParseError


def _fmt(v: float) -> str:
    return repr(float(v))


def dump_learning_set(data: LearningSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", *data.criteria.names, "class"])
    for a in data.alternatives:
        w.writerow([a.id, *(_fmt(v) for v in data.criteria.display(a.profile)), a.category])
    return buf.getvalue()


def load_learning_set(text: str, classes: int | None = None, minimize=(), criteria=None) -> LearningSet:
    """Parse a learning-set CSV.

    ``minimize`` names the criteria to be minimized; alternatively pass a full
    :class:`CriteriaSpec` whose names must match the header.  When ``classes``
    is omitted it is taken as the largest class present (at least 2).
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty CSV: a header line is required")
    header = [c.strip() for c in rows[0]]
    if len(header) < 3 or header[0] != "id" or header[-1] != "class":
        raise ParseError(f"CSV header must be 'id,<criteria...>,class', got {','.join(header)!r}")
    names = tuple(header[1:-1])
    if criteria is None:
        minimize = set(minimize)
        unknown = minimize - set(names)
        if unknown:
            raise InputError(f"unknown criteria to minimize: {sorted(unknown)}")
        criteria = CriteriaSpec(names, tuple("min" if n in minimize else MAXIMIZE for n in names))
    elif criteria.names != names:
        raise InputError(f"CSV criteria {names} do not match model criteria {criteria.names}")
    parsed = []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} fields, got {len(r)}")
        try:
            values = [float(c) for c in r[1:-1]]
            cat = int(r[-1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        parsed.append((r[0].strip(), values, cat))
    if classes is None:
        classes = max([2, *(c for _, _, c in parsed)])
    return LearningSet.from_raw(criteria, classes, parsed)


def read_learning_set(path, **kwargs) -> LearningSet:
    return load_learning_set(Path(path).read_text(), **kwargs)


def write_learning_set(data: LearningSet, path) -> None:
    Path(path).write_text(dump_learning_set(data))


def model_to_dict(model) -> dict:
    crit = model.criteria
    frontiers = [
        [None if v == ABOVE_ALL else v for v in crit.display(b)] for b in model.frontiers
    ]
    doc = {
        "criteria": [{"name": n, "direction": d} for n, d in zip(crit.names, crit.directions)],
        "classes": model.classes,
        "frontiers": frontiers,
    }
    if isinstance(model, MrSortModel):
        doc["weights"] = list(model.weights)
        doc["lambda"] = model.threshold
    else:
        doc["sufficient"] = model.sufficient.minimal()
    return doc


def model_from_dict(doc: dict):
    try:
        crit = CriteriaSpec(
            tuple(c["name"] for c in doc["criteria"]),
            tuple(c.get("direction", MAXIMIZE) for c in doc["criteria"]),
        )
        classes = int(doc["classes"])
        frontiers = []
        for b in doc["frontiers"]:
            if len(b) != crit.count:
                raise ParseError(f"frontier has {len(b)} entries, expected {crit.count}")
            frontiers.append(crit.orient([ABOVE_ALL if v is None else v for v in b]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed model document: {exc!r}") from None
    if "sufficient" in doc:
        return UncsModel(crit, classes, tuple(frontiers), UpSet.generated_by(crit.count, doc["sufficient"]))
    if "weights" in doc and "lambda" in doc:
        return MrSortModel(crit, classes, tuple(frontiers), tuple(doc["weights"]), doc["lambda"])
    raise ParseError("model document needs 'sufficient' or 'weights' + 'lambda'")


def dump_model(model) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def load_model(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return model_from_dict(doc)


def read_model(path):
    return load_model(Path(path).read_text())


def write_model(model, path) -> None:
    Path(path).write_text(dump_model(model))

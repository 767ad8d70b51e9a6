"""File formats: matrix CSV/JSON, tree JSON, report JSON.

CSV matrices are a header row of point labels followed by an n x n
block of cells; a cell is a decimal float or a dyadic literal "p/2^k",
which parses exactly and is exempt from value snapping. JSON documents
carry a schema_version field and reject unknown keys. Serialization is
canonical (sorted keys, repr floats), so equal objects give identical
bytes and dyadic values round-trip bit for bit.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from typing import Optional

from .metric import DistanceMatrix, ValidationReport, from_entries
from .represent import RepresentingTree
from .trees import ExplicitTree, Node, node as make_node

SCHEMA_VERSION = 1

_DYADIC_RE = re.compile(r"^\s*(\d+)\s*/\s*2\^(\d+)\s*$")


class ParseError(ValueError):
    """Input text does not match the declared format."""

    def __init__(self, message, line: Optional[int] = None, column: Optional[int] = None):
        where = ""
        if line is not None:
            where = " (line %d%s)" % (line, ", cell %d" % column if column is not None else "")
        super().__init__(message + where)
        self.line = line
        self.column = column


def _parse_cell(cell: str, line: int, column: int):
    """Returns (value, is_exact_literal)."""
    m = _DYADIC_RE.match(cell)
    if m:
        p, k = int(m.group(1)), int(m.group(2))
        return math.ldexp(float(p), -k), True
    try:
        return float(cell), False
    except ValueError:
        raise ParseError("cannot parse cell %r" % cell.strip(), line=line, column=column) from None


def parse_matrix_csv(text: str) -> DistanceMatrix:
    rows = list(csv.reader(_io.StringIO(text)))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise ParseError("empty matrix file", line=1)
    labels = tuple(cell.strip() for cell in rows[0])
    n = len(labels)
    if len(rows) != n + 1:
        raise ParseError("expected %d data rows after the header, got %d" % (n, len(rows) - 1),
                         line=len(rows))
    data = []
    anchors = set()
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != n:
            raise ParseError("expected %d cells, got %d" % (n, len(row)), line=i)
        out = []
        for j, cell in enumerate(row):
            v, exact = _parse_cell(cell, line=i, column=j + 1)
            if exact:
                anchors.add(v)
            out.append(v)
        data.append(out)
    return from_entries(data, labels=labels, snap=True, anchors=anchors)


def _format_value(v: float) -> str:
    return repr(float(v))


def format_matrix_csv(m: DistanceMatrix) -> str:
    out = _io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(m.labels)
    for i in range(m.n):
        w.writerow([_format_value(v) for v in m.d[i]])
    return out.getvalue()


def matrix_to_json_dict(m: DistanceMatrix) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "labels": list(m.labels),
        "d": [[float(v) for v in row] for row in m.d],
    }


def _require_keys(doc: dict, allowed: set, what: str):
    if not isinstance(doc, dict):
        raise ParseError("%s document must be a JSON object" % what)
    unknown = set(doc) - allowed
    if unknown:
        raise ParseError("unknown %s fields: %s" % (what, ", ".join(sorted(unknown))))
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError("unsupported schema_version %r" % (version,))


def matrix_from_json_dict(doc: dict) -> DistanceMatrix:
    _require_keys(doc, {"schema_version", "labels", "d"}, "matrix")
    if "d" not in doc:
        raise ParseError("matrix document needs a 'd' field")
    return from_entries(doc["d"], labels=doc.get("labels"), snap=True)


def parse_matrix_json(text: str) -> DistanceMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON: %s" % exc, line=exc.lineno, column=exc.colno) from None
    return matrix_from_json_dict(doc)


def load_matrix(path: str) -> DistanceMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".csv"):
        return parse_matrix_csv(text)
    return parse_matrix_json(text)


def _label_to_json(label) -> str:
    return str(label)


def _label_from_json(s: str):
    return int(s) if s.lstrip("-").isdigit() else s


def tree_node_to_json_dict(nd: Node) -> dict:
    return {
        "children": {_label_to_json(lbl): tree_node_to_json_dict(sub)
                     for lbl, sub in nd.children},
        "stalk": nd.stalk,
    }


def tree_node_from_json_dict(doc: dict) -> Node:
    unknown = set(doc) - {"children", "stalk"}
    if unknown:
        raise ParseError("unknown tree node fields: %s" % ", ".join(sorted(unknown)))
    kids = {(_label_from_json(lbl)): tree_node_from_json_dict(sub)
            for lbl, sub in doc.get("children", {}).items()}
    return make_node(kids, stalk=bool(doc.get("stalk", False)))


def tree_to_json_dict(t: ExplicitTree) -> dict:
    return {"schema_version": SCHEMA_VERSION, "node": tree_node_to_json_dict(t.root)}


def tree_from_json_dict(doc: dict) -> ExplicitTree:
    _require_keys(doc, {"schema_version", "node"}, "tree")
    if "node" not in doc:
        raise ParseError("tree document needs a 'node' field")
    return ExplicitTree(root=tree_node_from_json_dict(doc["node"]))


def representing_tree_to_json_dict(rt: RepresentingTree) -> dict:
    """Tree JSON with per-node ball member lists and the schedule.

    The ball of the node at level k labelled lbl is the stored level-k
    partition class with that label.
    """
    labels = rt.labels
    level_sets = rt.level_sets

    def walk(nd: Node, level: int, lbl: int) -> dict:
        members = level_sets[level][lbl]
        doc = {"members": sorted(labels[i] for i in members),
               "stalk": nd.stalk, "children": {}}
        for sub_lbl, sub in nd.children:
            doc["children"][_label_to_json(sub_lbl)] = walk(sub, level + 1, sub_lbl)
        return doc

    return {
        "schema_version": SCHEMA_VERSION,
        "schedule": rt.schedule.to_json_dict(),
        "labels": list(labels),
        "node": walk(rt.tree.root, 0, 0),
    }


def validation_report_to_json_dict(rep: ValidationReport) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "is_metric": rep.is_metric,
        "is_ultrametric": rep.is_ultrametric,
        "witness": None,
    }
    if rep.witness is not None:
        doc["witness"] = {
            "kind": rep.witness.kind,
            "points": list(rep.witness.points),
            "entries": list(rep.witness.entries),
        }
    return doc


def dumps(doc) -> str:
    """Canonical JSON text: sorted keys, two-space indent, one trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"

"""Command-line driver.

    ultratree <command> <input> [--out path] [--horizon H] [--seed S]
                                [--cap-n N] [--l-max L]

Commands: validate, coerce, tree, vitali, analyze, generate. Inputs are
matrix files (.csv or JSON); vitali takes a JSON document with an extra
"requests" list; generate takes "N" or "N:LEVELS" instead of a path.
Exit codes: 0 ok, 1 validation-negative, 2 structural or parse error,
3 cap exceeded. Identical invocations write identical bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from . import io as tio
from .analysis import (DEFAULT_BRUTE_CAP, DEFAULT_L_MAX, BallRequest, analyze,
                       vitali_select)
from .instances import random_ultrametric
from .metric import StructuralError, validate
from .represent import build, export_newick, verify_isometry
from .sdz import NotUltrametricError, coerce_sdz
from .trees import DEFAULT_CHILD_CAP, CapExceededError

COMMANDS = ("validate", "coerce", "tree", "vitali", "analyze", "generate")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_STRUCTURAL = 2
EXIT_CAP = 3


@dataclass
class RunConfig:
    command: str
    input: str
    out: Optional[str] = None
    horizon: int = 16
    seed: int = 0
    cap_n: int = DEFAULT_BRUTE_CAP
    l_max: int = DEFAULT_L_MAX
    child_cap: int = DEFAULT_CHILD_CAP

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError("unknown command %r" % (self.command,))
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.cap_n < 1 or self.l_max < 1 or self.child_cap < 1:
            raise ValueError("caps must be positive")


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_vitali_doc(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise tio.ParseError("invalid JSON: %s" % exc, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise tio.ParseError("vitali document must be a JSON object")
    unknown = set(doc) - {"schema_version", "labels", "d", "requests"}
    if unknown:
        raise tio.ParseError("unknown vitali fields: %s" % ", ".join(sorted(unknown)))
    m = tio.matrix_from_json_dict({k: v for k, v in doc.items() if k != "requests"})
    requests = []
    for item in doc.get("requests", []):
        if set(item) - {"center", "radius"}:
            raise tio.ParseError("unknown request fields in %r" % (item,))
        center = item["center"]
        if isinstance(center, str):
            center = m.index_of(center)
        requests.append(BallRequest(center=int(center), radius=float(item["radius"])))
    return m, requests


def _parse_generate_input(text: str):
    parts = text.split(":")
    if len(parts) not in (1, 2) or not all(p.strip().isdigit() for p in parts):
        raise tio.ParseError("generate expects N or N:LEVELS, got %r" % (text,))
    n = int(parts[0])
    levels = int(parts[1]) if len(parts) == 2 else 4
    return n, levels


def run(cfg: RunConfig) -> int:
    """Dispatch one command; returns the process exit code."""
    try:
        return _run(cfg)
    except NotUltrametricError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    except CapExceededError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CAP
    except (tio.ParseError, StructuralError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_STRUCTURAL


def _run(cfg: RunConfig) -> int:
    if cfg.command == "generate":
        n, levels = _parse_generate_input(cfg.input)
        m = random_ultrametric(n, levels, cfg.seed)
        _emit_matrix(cfg, m)
        return EXIT_OK

    if cfg.command == "vitali":
        m, requests = _load_vitali_doc(cfg.input)
        report = validate(m)
        if not report.is_ultrametric:
            print("error: input is not ultrametric: %r" % (report.witness,), file=sys.stderr)
            return EXIT_INVALID
        selected = vitali_select(m, requests)
        doc = {
            "schema_version": tio.SCHEMA_VERSION,
            "selected": [{"center": m.labels[b.center], "radius": b.radius}
                         for b in selected],
        }
        _emit(cfg, tio.dumps(doc))
        return EXIT_OK

    m = tio.load_matrix(cfg.input)

    if cfg.command == "validate":
        report = validate(m)
        _emit(cfg, tio.dumps(tio.validation_report_to_json_dict(report)))
        return EXIT_OK if report.is_ultrametric else EXIT_INVALID

    if cfg.command == "coerce":
        coerced = coerce_sdz(m)          # raises NotUltrametricError -> exit 1
        _emit_matrix(cfg, coerced)
        return EXIT_OK

    report = validate(m)
    if not report.is_ultrametric:
        print("error: input is not ultrametric: %r" % (report.witness,), file=sys.stderr)
        return EXIT_INVALID

    if cfg.command == "tree":
        rt, rc = build(m)
        iso = verify_isometry(m, built=(rt, rc))
        doc = tio.representing_tree_to_json_dict(rt)
        doc["newick"] = export_newick(rt)
        doc["isometry"] = bool(iso)
        doc["clade_size"] = len(rc.clade.members)
        _emit(cfg, tio.dumps(doc))
        return EXIT_OK

    if cfg.command == "analyze":
        rep = analyze(m, cap_n=cfg.cap_n, l_max=cfg.l_max)
        _emit(cfg, tio.dumps(rep.to_json_dict()))
        return EXIT_OK

    raise AssertionError("unreachable command %r" % (cfg.command,))


def _emit_matrix(cfg: RunConfig, m):
    if cfg.out and cfg.out.endswith(".csv"):
        _emit(cfg, tio.format_matrix_csv(m))
    else:
        _emit(cfg, tio.dumps(tio.matrix_to_json_dict(m)))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ultratree",
        description="Validate finite ultrametrics, build their representing "
                    "trees, and decide tree-structural properties.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input",
                        help="matrix file (.csv or JSON); for generate: N or N:LEVELS")
    parser.add_argument("--out", default=None, help="write the artifact here instead of stdout")
    parser.add_argument("--horizon", type=int, default=16, help="probe depth for generator trees")
    parser.add_argument("--seed", type=int, default=0, help="random seed for generate")
    parser.add_argument("--cap-n", type=int, default=DEFAULT_BRUTE_CAP,
                        help="largest n for brute-force doubling")
    parser.add_argument("--l-max", type=int, default=DEFAULT_L_MAX,
                        help="largest lag tried by the sufficient doubling condition")
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(command=args.command, input=args.input, out=args.out,
                        horizon=args.horizon, seed=args.seed,
                        cap_n=args.cap_n, l_max=args.l_max)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_STRUCTURAL
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

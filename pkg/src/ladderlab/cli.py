"""Command line front end: ``ladderlab <subcommand> INSTANCE [options]``.

Exit status: 0 on success, 1 when an oracle cross-check disagrees, 2 on
usage, parse, validation or size-limit errors.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from . import __version__
from .algebra import parse_field_spec
from .colouring import Colouring, FilterD, is_equivalent
from .corpus import generate_corpus
from .errors import LadderLabError
from .instance import Instance, format_instance, load, parse_colouring
from .isobridge import (brute_iso, check_extension_property, classify_No, classify_union,
                        decode_structure)
from .ladder import GenParams, generate, is_window_separated, validate
from .modelcode import build_model, model_stats, restrict_model, structure_from_dict, structure_to_dict
from .quotient import DEFAULT_CAP, brute_class_count, class_count
from .uniformize import (PartialUniformizer, extend_uniformizer, global_uniformize,
                         solve_ladder_equations)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    operation: str
    digest: str | None = None
    instance: str | None = None
    seed: int | None = None
    results: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    timing: float | None = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, expected, got) -> None:
        self.checks.append(Check(name, expected == got, f"expected {expected}, got {got}"))

    def as_dict(self) -> dict:
        out = {"operation": self.operation, "instance": self.instance, "digest": self.digest,
               "seed": self.seed, "results": self.results,
               "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
               "ok": self.ok}
        if self.timing is not None:
            out["timing_s"] = round(self.timing, 6)
        return out


def emit_report(report: Report, fmt: str = "text", stream: IO[str] | None = None) -> str:
    """Serialize a report; json output is one line with sorted keys."""
    if fmt == "json":
        text = json.dumps(report.as_dict(), sort_keys=True, separators=(",", ":")) + "\n"
    elif fmt == "text":
        lines = [f"== {report.operation}" + (f" [{report.instance}]" if report.instance else "")]
        if report.digest:
            lines.append(f"digest: {report.digest[:16]}")
        if report.seed is not None:
            lines.append(f"seed: {report.seed}")
        width = max((len(k) for k in report.results), default=0)
        for key in sorted(report.results):
            value = report.results[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            lines.append(f"{key.ljust(width)}  {value}")
        for c in report.checks:
            if c.passed:
                lines.append(f"check {c.name}: pass")
            else:
                lines.append(f"ORACLE MISMATCH: {c.name}: {c.detail}")
        if report.timing is not None:
            lines.append(f"time: {report.timing:.3f}s")
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if stream is not None:
        stream.write(text)
    return text


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _new_report(op: str, inst: Instance | None, seed: int | None = None) -> Report:
    if inst is None:
        return Report(op, seed=seed)
    return Report(op, inst.digest, inst.name or None, inst.seed if seed is None else seed)


def _colouring(inst: Instance, spec: str) -> Colouring:
    """A named colouring of the instance, or an inline ``delta:v,..; ...`` literal."""
    if spec in inst.colourings:
        return inst.colourings[spec]
    try:
        return parse_colouring(spec, inst.sys.S, inst.sys.length)
    except ValueError:
        raise LadderLabError(f"no colouring named {spec!r} and not a colouring literal") from None


def _colourings(inst: Instance, names: Sequence[str] | None) -> list[tuple[str, Colouring]]:
    if names:
        return [(n, _colouring(inst, n)) for n in names]
    if not inst.colourings:
        return [("zero", Colouring.zero(inst.sys.S, inst.sys.length))]
    return list(inst.colourings.items())


def cmd_gen(args) -> list[Report]:
    F = parse_field_spec(args.field)
    window = tuple(int(t) for t in args.window.split(",")) if args.window else (args.length - 1,)
    S = tuple(int(t) for t in args.S.split(",")) if args.S else ()
    sys = generate(args.seed, GenParams(args.horizon, args.length, S, window, args.regime, F))
    inst = Instance(sys, FilterD(args.length, frozenset(window)), {}, args.seed, args.regime)
    text = format_instance(inst)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    rep = _new_report("gen", inst, args.seed)
    rep.results = {"instance": text, "window_separated": is_window_separated(sys, inst.D)}
    return [rep]


def cmd_corpus(args) -> list[Report]:
    reports = []
    for inst in generate_corpus(args.seed, args.count):
        rep = _new_report("corpus", inst, args.seed)
        qr = class_count(inst.sys, inst.D, 0)
        rep.results = {"q": inst.field.q, "horizon": inst.sys.horizon, "length": inst.sys.length,
                       "S": list(inst.sys.S), "window": list(inst.D.sorted_window),
                       "regime": inst.regime, "class_count": qr.class_count}
        if args.cross_check:
            rep.check("class_count = brute_class_count", qr.class_count,
                      brute_class_count(inst.sys, inst.D))
        reports.append(rep)
    return reports


def cmd_validate(args) -> list[Report]:
    inst = load(args.instance)
    rep = _new_report("validate", inst)
    rep.results = {"valid": validate(inst.sys).ok,
                   "window_separated": is_window_separated(inst.sys, inst.D),
                   "colourings": sorted(inst.colourings)}
    return [rep]


def cmd_solve(args) -> list[Report]:
    inst = load(args.instance)
    reports = []
    for name, a in _colourings(inst, args.colouring):
        rep = _new_report("solve", inst)
        rep.results["colouring"] = f"{name} = {a}"
        for delta, ladder in inst.sys.items():
            g = solve_ladder_equations(inst.field, ladder, a(delta))
            rep.results[f"delta {delta}"] = {str(x): v for x, v in sorted(g.items())}
        reports.append(rep)
    return reports


def cmd_uniformize(args) -> list[Report]:
    inst = load(args.instance)
    sys, D = inst.sys, inst.D
    reports = []
    for name, a in _colourings(inst, args.colouring):
        rep = _new_report("uniformize", inst)
        rep.results["colouring"] = f"{name} = {a}"
        if args.mu is not None:
            f0 = PartialUniformizer(sys.horizon, tuple(int(t) for t in args.prefix.split(",")) if args.prefix else ())
            f = extend_uniformizer(sys, D, a, f0, args.mu)
        else:
            f = global_uniformize(sys, D, a)
        rep.results["uniform"] = f is not None
        rep.results["f"] = None if f is None else list(f.values)
        if args.cross_check:
            from .quotient import unifset_membership
            rep.check("uniform (linear solve)", unifset_membership(sys, D, a)[0], f is not None)
        reports.append(rep)
    return reports


def cmd_quotient(args) -> list[Report]:
    inst = load(args.instance)
    rep = _new_report("quotient", inst)
    qr = class_count(inst.sys, inst.D, args.cap)
    rep.results = qr.as_dict()
    if args.cross_check:
        rep.check("class_count = brute_class_count", qr.class_count, brute_class_count(inst.sys, inst.D))
    return [rep]


def cmd_code(args) -> list[Report]:
    inst = load(args.instance)
    reports = []
    for name, a in _colourings(inst, args.colouring):
        M = build_model(inst.sys, inst.D, a)
        if args.mu is not None:
            M = restrict_model(M, args.mu)
        stats = model_stats(M)
        rep = _new_report("code", inst)
        rep.results = {"colouring": f"{name} = {a}", "mu": M.mu, **stats.as_dict()}
        rep.checks.append(Check("model clauses", stats.valid, json.dumps(stats.failures())))
        if args.out:
            path = Path(args.out.format(name=name))
            path.write_text(json.dumps(structure_to_dict(M)), encoding="utf-8")
            rep.results["written"] = str(path)
        reports.append(rep)
    return reports


def cmd_iso(args) -> list[Report]:
    inst = load(args.instance)
    sys, D = inst.sys, inst.D
    a, b = _colouring(inst, args.a), _colouring(inst, args.b)
    Ma, Mb = build_model(sys, D, a), build_model(sys, D, b)
    rep = _new_report("iso", inst)
    rep.results = {"a": str(a), "b": str(b)}
    if args.mu0 is not None:
        mu1 = sys.horizon if args.mu1 is None else args.mu1
        rep.results.update({"mu0": args.mu0, "mu1": mu1,
                            **check_extension_property(sys, D, a, b, args.mu0, mu1).as_dict()})
        return [rep]
    iota = brute_iso(Ma, Mb)
    rep.results["isomorphic"] = iota is not None
    if iota is not None and args.show_map:
        rep.results["map"] = iota.pairs()
    if args.cross_check:
        rep.check("isomorphic = equivalent", is_equivalent(sys, D, a, b), iota is not None)
    return [rep]


def cmd_decode(args) -> list[Report]:
    inst = load(args.instance)
    data = json.loads(Path(args.structure).read_text(encoding="utf-8"))
    N = structure_from_dict(data, inst.sys.horizon)
    if args.shuffle is not None:
        N = N.permuted(np.random.default_rng(args.shuffle).permutation(N.size))
    b, iota = decode_structure(N, inst.sys, inst.D)
    rep = _new_report("decode", inst)
    rep.results = {"colouring": str(b), "verified": iota.verified}
    if args.cross_check and "colouring" in data:
        expected = parse_colouring(data["colouring"], inst.sys.S, inst.sys.length)
        rep.check("decoded colouring equivalent to source", True,
                  is_equivalent(inst.sys, inst.D, b, expected))
    return [rep]


def cmd_classify(args) -> list[Report]:
    inst = load(args.instance)
    sys, D = inst.sys, inst.D
    rep = _new_report("classify", inst)
    result = classify_No(sys, D, cross_check=args.cross_check, cap=args.cap)
    rep.results = result.as_dict()
    if result.cross_checked:
        rep.check("class_count = isomorphism classes", result.class_count, result.iso_class_count)
    if args.union is not None:
        if result.representatives is None:
            raise LadderLabError("too many classes to pick representatives; raise --cap")
        rep.results["union_copies"] = args.union
        try:
            rep.results["union_types"] = classify_union(sys, D, result.representatives, args.union,
                                                        cross_check=args.cross_check)
            if args.cross_check:
                rep.checks.append(Check("union types by search", True))
        except RuntimeError as exc:
            rep.checks.append(Check("union types by search", False, str(exc)))
    return [rep]


def cmd_demo(args) -> list[Report]:
    reports = []
    for q in (2, 3, 4):
        inst = load(f"paper_q{q}")
        rep = _new_report("demo", inst)
        qr = class_count(inst.sys, inst.D)
        rep.results = {"field": str(inst.field), "q": q, "class_count": qr.class_count,
                       "coset_reps": [str(c) for c in qr.coset_reps]}
        rep.check("class_count = |F|", q, qr.class_count)
        rep.check("class_count = brute_class_count", qr.class_count, brute_class_count(inst.sys, inst.D))
        if args.cross_check:
            res = classify_No(inst.sys, inst.D, cross_check=True)
            rep.check("class_count = isomorphism classes", res.class_count, res.iso_class_count)
        reports.append(rep)
    return reports


COMMANDS = {
    "gen": cmd_gen, "corpus": cmd_corpus, "validate": cmd_validate, "solve": cmd_solve,
    "uniformize": cmd_uniformize, "quotient": cmd_quotient, "code": cmd_code, "iso": cmd_iso,
    "decode": cmd_decode, "classify": cmd_classify, "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--cross-check", action="store_true", help="run the brute-force oracles too")
    common.add_argument("--timing", action="store_true", help="add wall-clock time to reports")

    parser = argparse.ArgumentParser(prog="ladderlab", description="Ladder systems, uniformization and coded models.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str, instance: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        if instance:
            p.add_argument("instance", help="instance file or bundled fixture name")
        return p

    p = add("gen", "generate a seeded instance", instance=False)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--regime", choices=("separated", "overlapping"), default="separated")
    p.add_argument("--field", default="GF(2^1)")
    p.add_argument("--horizon", type=int, default=6)
    p.add_argument("--length", type=int, default=2)
    p.add_argument("--window", help="comma-separated window indices (default: last step)")
    p.add_argument("--S", help="comma-separated deltas")
    p.add_argument("--out", help="write the instance file here")

    p = add("corpus", "class counts over a seeded random corpus", instance=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)

    add("validate", "parse and validate an instance")

    for name, help in (("solve", "solve each ladder's equations"),
                       ("uniformize", "find uniformizers")):
        p = add(name, help)
        p.add_argument("--colouring", action="append", help="colouring name or literal (repeatable)")
        if name == "uniformize":
            p.add_argument("--mu", type=int, help="extend --prefix to [0, mu) instead of solving globally")
            p.add_argument("--prefix", default="", help="comma-separated values of f0")

    p = add("quotient", "exact ColSet/UnifSet")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max coset representatives to list")

    p = add("code", "build coded models and check them")
    p.add_argument("--colouring", action="append")
    p.add_argument("--mu", type=int, help="restrict to mu")
    p.add_argument("--out", help="write structure JSON ({name} is replaced)")

    p = add("iso", "decide M_a = M_b, or the extension property with --mu0")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mu0", type=int)
    p.add_argument("--mu1", type=int)
    p.add_argument("--show-map", action="store_true")

    p = add("decode", "recover a colouring from a structure file")
    p.add_argument("structure")
    p.add_argument("--shuffle", type=int, help="rename elements with this seed first")

    p = add("classify", "count isomorphism types of coded models")
    p.add_argument("--union", type=int, help="also count unions of this many copies")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    add("demo", "class counts of the bundled fixtures", instance=False)
    return parser


def main(argv: Sequence[str] | None = None, stdout: IO[str] | None = None,
         stderr: IO[str] | None = None) -> int:
    stdout = stdout or _sys.stdout
    stderr = stderr or _sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        reports = COMMANDS[args.command](args)
    except (LadderLabError, ValueError, OSError, json.JSONDecodeError) as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE
    elapsed = time.perf_counter() - start
    for rep in reports:
        if args.timing:
            rep.timing = elapsed / len(reports)
        emit_report(rep, args.format, stdout)
        for c in rep.checks:
            if not c.passed:
                stderr.write(f"ORACLE MISMATCH: {c.name}: {c.detail}\n")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_MISMATCH


if __name__ == "__main__":
    raise SystemExit(main())

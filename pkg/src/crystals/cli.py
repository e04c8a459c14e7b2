"""Command-line entry point: ``crystals <verb> [options]``.

Exit codes: 0 success, 1 domain error, 2 failed verification or
non-isomorphic inputs, 3 vertex cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .assembler import Assembler
from .core import Crystal, from_json, isomorphic, to_dot, to_json
from .crossing import generate
from .errors import CrystalError, InputError, ResourceLimitError, parse_parameter
from .extract import Describer, base_parameter, extract
from .lowrank import sail_build, worm_generate
from .verifier import verify_A, verify_BC

EXIT_OK, EXIT_DOMAIN, EXIT_FAILED, EXIT_RESOURCE = 0, 1, 2, 3

VERBS = ("gen", "assemble", "worm", "sail", "extract", "verify", "iso", "stats", "export")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def parse_c(text: str) -> tuple[int, ...]:
    try:
        values = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"--c expects comma-separated integers, got {text!r}") from None
    return parse_parameter(values)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crystals", description="Build, extract, verify and compare crystal graphs.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("inputs", nargs="*", help="crystal-v1 JSON files")
    p.add_argument("--c", type=str)
    p.add_argument("--family", choices=("A", "B", "C"))
    p.add_argument("--kind", choices=("B", "C"))
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--annotate-descriptions", action="store_true")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    return p


def _load(path: str) -> Crystal:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return from_json(text)


def _need_c(args) -> tuple[int, ...]:
    if args.c is None:
        raise InputError(f"{args.verb} needs --c")
    return parse_c(args.c)


def _inputs(args, count: int) -> list[Crystal]:
    if len(args.inputs) != count:
        raise InputError(f"{args.verb} takes {count} input file{'s' * (count > 1)}, got {len(args.inputs)}")
    return [_load(p) for p in args.inputs]


def _emit(text: str, args, out) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)


def _emit_crystal(K: Crystal, args, out, annotations=None) -> None:
    if args.format == "dot":
        _emit(to_dot(K), args, out)
    else:
        _emit(to_json(K, annotations), args, out)


def _descriptions(base: Crystal, ext) -> dict:
    describe = Describer(base)
    return {"descriptions": [list(describe(int(v))) for v in ext.vertices]}


def _extract_of(base: Crystal, kind: str, annotate: bool):
    ext = extract(base, kind)
    notes = _descriptions(base, ext) if annotate else None
    return ext.crystal, notes


def _kind_of(K: Crystal) -> str:
    return "B" if K.n % 2 else "C"


def run(argv: list[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return _run(build_parser().parse_intermixed_args(argv), out, err)
    except ResourceLimitError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_RESOURCE
    except CrystalError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def _run(args, out, err) -> int:
    if args.threads < 1:
        raise InputError("--threads must be positive")
    verb = args.verb
    if args.annotate_descriptions and verb not in ("gen", "extract"):
        raise InputError("--annotate-descriptions applies to gen and extract")

    if verb == "gen":
        c = _need_c(args)
        family = args.family or "A"
        if family == "A":
            if args.annotate_descriptions:
                raise InputError("descriptions exist for B and C extracts only")
            K, notes = generate(c), None
        else:
            K, notes = _extract_of(generate(base_parameter(family, c)), family, args.annotate_descriptions)
        _emit_crystal(K, args, out, notes)
        return EXIT_OK

    if verb == "assemble":
        c = _need_c(args)
        if args.family not in (None, "A"):
            raise InputError("assembly builds A-crystals only")
        asm = Assembler()
        K = asm.assemble(c)
        _emit_crystal(K, args, out)
        err.write(json.dumps(asm.stats.to_dict()) + "\n")
        return EXIT_OK

    if verb in ("worm", "sail"):
        c = _need_c(args)
        if len(c) != 2:
            raise InputError(f"{verb} needs exactly two parameters")
        _emit_crystal(worm_generate(*c) if verb == "worm" else sail_build(*c), args, out)
        return EXIT_OK

    if verb == "extract":
        (K,) = _inputs(args, 1)
        kind = _kind_of(K)
        if args.kind is not None and args.kind != kind:
            raise InputError(f"a crystal with {K.n} colors has a {kind}-extract, not a {args.kind}-extract")
        if K.family not in ("A", "raw"):
            raise InputError(f"extraction needs an A-crystal, got family {K.family}")
        E, notes = _extract_of(K, kind, args.annotate_descriptions)
        _emit_crystal(E, args, out, notes)
        return EXIT_OK

    if verb == "verify":
        (K,) = _inputs(args, 1)
        family = args.family or (K.family if K.family in ("A", "B", "C") else "A")
        report = verify_A(K) if family == "A" else verify_BC(K, family)
        _emit(report.to_json() + "\n", args, out)
        return EXIT_OK if report.summary else EXIT_FAILED

    if verb == "iso":
        K1, K2 = _inputs(args, 2)
        same = K1.n == K2.n and isomorphic(K1, K2)
        out.write("isomorphic\n" if same else "not isomorphic\n")
        return EXIT_OK if same else EXIT_FAILED

    if verb == "stats":
        t0 = time.perf_counter()
        if args.inputs:
            (K,) = _inputs(args, 1)
        else:
            c = _need_c(args)
            family = args.family or "A"
            K = generate(c) if family == "A" else extract(generate(base_parameter(family, c)), family).crystal
        seconds = time.perf_counter() - t0
        lines = [f"vertices={K.num_vertices} edges={K.num_edges}"]
        lines += [f"color{i}={m}" for i, m in enumerate(K.color_counts(), start=1)]
        lines.append(f"seconds={seconds:.6f}")
        _emit("\n".join(lines) + "\n", args, out)
        return EXIT_OK

    if verb == "export":
        (K,) = _inputs(args, 1)
        _emit_crystal(K, args, out)
        return EXIT_OK

    raise InputError(f"unknown verb {verb}")  # unreachable, argparse restricts verbs


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

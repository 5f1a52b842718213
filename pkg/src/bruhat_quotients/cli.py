"""Command-line front end: bruhat-quotients <command> ..."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .blind import resolve_forms_blind
from .chainlike import analysis_report, word_forms
from .coxeter import DEFAULT_CLOSURE_CAP, BwGraph, parse_bw_graph
from .errors import ConsistencyError, ParseError, QuotientError
from .isomorphism import classify_pair, exceptional_cases
from .quotient import QuotientPoset, enumerate_quotient, load_poset, save_poset
from .reconstruct import ReconstructionResult, decompose, reconstruct
from .render import graph_to_dot, poset_to_dot, reconstruction_to_dot

DEFAULT_MAX_LENGTH = 14
DEFAULT_MAX_ELEMENTS = 100_000


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str, args) -> tuple[QuotientPoset, BwGraph | None]:
    """A poset from a PosetFile, or the enumerated quotient of a bw-graph file."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        p = load_poset(text)
        return p, p.graph
    g = parse_bw_graph(text)
    return _enumerate(g, args), g


def _enumerate(g: BwGraph, args) -> QuotientPoset:
    return enumerate_quotient(g, args.max_len, method=args.method, cap=args.closure_cap,
                              max_elements=args.max_elements)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _levels_text(p: QuotientPoset) -> str:
    state = "complete" if p.complete else f"truncated at length {p.max_length}"
    lines = [f"# {len(p)} elements, {state}"]
    for level, members in enumerate(p.levels):
        lines.append(f"{level}: " + " ".join(p.label(i) for i in members))
    return "\n".join(lines) + "\n"


def cmd_enumerate(path: str, args) -> str:
    p = _enumerate(parse_bw_graph(_read(path)), args)
    if args.format == "dot":
        return poset_to_dot(p)
    if args.format == "text":
        return _levels_text(p)
    return save_poset(p)


def _report_text(report: dict) -> str:
    lines = [f"# {report['elements']} elements", "chainlikes:"]
    for c in report["chainlikes"]:
        mark = "" if c["certain"] else "  (at truncation)"
        lines.append(f"  {c['word']:<16} {c['form']:<4}{mark}")
    lines.append("baskets:")
    lines += [f"  {b['words'][0]} / {b['words'][1]}  {b['kind']}" for b in report["baskets"]] or ["  none"]
    return "\n".join(lines) + "\n"


def cmd_analyze(path: str, args) -> str:
    p, _ = _load(path, args)
    report = analysis_report(p)
    return _report_text(report) if args.format == "text" else _dump(report)


def _result_json(result: ReconstructionResult) -> dict:
    return {
        "nodes": result.names,
        "black": [result.names[b] for b in sorted(result.black)],
        "edges": [{"between": [result.names[a], result.names[b]], "label": str(m), "status": m.status}
                  for (a, b), m in sorted(result.labels.items())],
        "caveats": result.caveats,
    }


def _render_results(results: list[ReconstructionResult], notes: list[str], args, exception: bool = False) -> str:
    if args.format == "json":
        return _dump({"candidates": [_result_json(r) for r in results], "exception": exception, "notes": notes})
    if args.format == "dot":
        return "".join(reconstruction_to_dot(r) for r in results)
    header = [f"# {n}" for n in notes]
    if exception:
        header.append(f"# exceptional poset: {len(results)} graphs reproduce it")
    blocks = []
    for i, r in enumerate(results):
        title = f"# candidate {i + 1}\n" if len(results) > 1 else ""
        blocks.append(title + r.to_text())
    return "\n".join(header + [""] if header else []) + "\n".join(blocks)


def cmd_reconstruct(path: str, args) -> str:
    p, g = _load(path, args)
    if args.blind or p.words is None:
        resolution = resolve_forms_blind(p)
        results, notes = [], list(resolution.notes)
        for k, factor in enumerate(resolution.factors):
            for reading in factor.readings:
                if len(resolution.factors) > 1:
                    reading.result.caveats.append(f"factor {k + 1} of {len(resolution.factors)}")
                results.append(reading.result)
        if resolution.partial:
            notes.append("candidate budget exhausted; the family may be incomplete")
        return _render_results(results, notes, args, resolution.exception)
    parts = decompose(p)
    results = [reconstruct(c.poset, word_forms(c.poset)) for c in parts.components]
    return _render_results(results, parts.caveats, args)


def _decomposition_json(path: str, args) -> dict:
    p, g = _load(path, args)
    parts = decompose(p)
    comps = []
    for c in parts.components:
        entry = {"atoms": [p.label(a) for a in c.atoms], "generators": c.generators, "elements": len(c.poset)}
        if c.graph is not None:
            entry["graph"] = c.graph.to_text()
            entry["cases"] = exceptional_cases(c.graph)
        comps.append(entry)
    if parts.trivial_generators:
        comps.append({"atoms": [], "generators": sorted(sum(parts.trivial_generators, [])), "elements": 1,
                      "cases": [6]})
    return {"components": comps, "trivialCount": parts.trivial_count, "caveats": parts.caveats,
            "complete": p.complete, "maxLength": p.max_length}


def cmd_decompose(path: str, args) -> str:
    return _dump(_decomposition_json(path, args))


def cmd_classify(paths: list[str], args) -> str:
    a, b = (parse_bw_graph(_read(x)) for x in paths)
    verdict = classify_pair(a, b, bound=args.max_len)
    if args.format == "dot":
        return graph_to_dot(a) + graph_to_dot(b)
    return _dump(verdict.to_json())


def cmd_selftest(args) -> str:
    from .selftest import run_selftest

    lines, ok = run_selftest()
    if not ok:
        raise ConsistencyError("selftest failed:\n" + "\n".join(lines))
    return "\n".join(lines) + "\n"


SINGLE = {"enumerate": cmd_enumerate, "analyze": cmd_analyze, "reconstruct": cmd_reconstruct,
          "decompose": cmd_decompose}


def _run_one(command: str, path: str, args) -> str:
    return SINGLE[command](path, args)


def _suffix(args) -> str:
    return {"json": ".json", "dot": ".dot", "text": ".txt"}[args.format]


def _run_batch(args) -> str:
    folder = Path(args.batch)
    if not folder.is_dir():
        raise ParseError(f"{folder} is not a directory")
    files = sorted(str(f) for f in folder.iterdir() if f.is_file())
    with ProcessPoolExecutor() as pool:
        outputs = list(pool.map(_run_one, [args.command] * len(files), files, [args] * len(files)))
    if args.out:
        target = Path(args.out)
        target.mkdir(parents=True, exist_ok=True)
        for f, text in zip(files, outputs):
            (target / (Path(f).stem + _suffix(args))).write_text(text, encoding="utf-8")
        return ""
    return "".join(f"# {f}\n{text}" for f, text in zip(files, outputs))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bruhat-quotients",
                                     description="Bruhat order on Coxeter quotients W^J.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-len", type=int, default=DEFAULT_MAX_LENGTH, help="truncation length (default 14)")
    common.add_argument("--closure-cap", type=int, default=DEFAULT_CLOSURE_CAP,
                        help="braid-closure size limit for --method words")
    common.add_argument("--method", choices=("orbit", "words"), default="orbit",
                        help="enumeration route (default: orbit action table)")
    common.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS,
                        help="abort enumeration beyond this many elements")
    common.add_argument("--format", choices=("json", "dot", "text"), default=None)
    common.add_argument("--out", help="write output here instead of stdout (a directory with --batch)")
    common.add_argument("--seed", type=int, default=0, help="accepted for reproducible runs; searches are deterministic")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text, default in (
        ("enumerate", "enumerate W^J from a bw-graph file", "json"),
        ("analyze", "chainlike analysis of a poset or graph file", "json"),
        ("reconstruct", "rebuild the bw-graph from a poset file", "text"),
        ("decompose", "split a reducible quotient into factors", "json"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("input", nargs="?")
        cmd.add_argument("--batch", help="process every file in this directory")
        if name == "reconstruct":
            cmd.add_argument("--blind", action="store_true", help="ignore any embedded graph")
        cmd.set_defaults(default_format=default)
    cmd = sub.add_parser("classify", parents=[common], help="isomorphism verdict for two bw-graph files")
    cmd.add_argument("inputs", nargs=2)
    cmd.set_defaults(default_format="json")
    cmd = sub.add_parser("selftest", parents=[common], help="quick internal consistency checks")
    cmd.set_defaults(default_format="text")
    return parser


def run(argv: list[str] | None = None) -> tuple[str, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    return _dispatch(args), args


def _dispatch(args: argparse.Namespace) -> str:
    if args.format is None:
        args.format = args.default_format
    if args.max_len < 0:
        raise ParseError("--max-len must be >= 0")
    if args.command == "selftest":
        return cmd_selftest(args)
    if args.command == "classify":
        return cmd_classify(args.inputs, args)
    if getattr(args, "batch", None):
        return _run_batch(args)
    if not args.input:
        raise ParseError(f"{args.command} needs an input file or --batch")
    return SINGLE[args.command](args.input, args)


def main(argv: list[str] | None = None) -> int:
    try:
        text, args = run(argv)
    except QuotientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out and not getattr(args, "batch", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: generate, inject, match, classify, evaluate, compare.

A corpus is a directory holding ``targets.jsonl``, ``refs.jsonl``,
``links.jsonl`` and ``sources.jsonl``. Every command is reproducible from its
arguments alone.

Exit codes: 0 success, 2 usage, 3 I/O failure, 4 malformed input,
5 unknown profile or invalid cascade config.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from citematch.corpusforge import InjectionPlan, forge, generate_clean
from citematch.evalkit import ExclusionList, ScoreMode, compare_profiles
from citematch.fileio import (
    FormatError,
    atomic_write,
    dumps_table,
    loads_table,
    read_compact_references,
    read_records,
    write_records,
)
from citematch.model import Corpus
from citematch.ruleengine import BUILTIN, ConfigError, UnknownProfileError, build_index, load_profile, match_corpus, resolve_profile
from citematch.ruleengine.rules import CascadeProfile
from citematch.taxonomy import annotate_missed, single_vs_multi_inaccuracy_stats

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_SCHEMA = 4
EXIT_PROFILE = 5

CORPUS_FILES = {"targets": "targets.jsonl", "refs": "refs.jsonl", "links": "links.jsonl", "sources": "sources.jsonl"}


class UsageError(Exception):
    pass


def read_corpus(path: str | Path, *, need: Sequence[str] = ("targets", "refs", "links", "sources")) -> Corpus:
    d = Path(path)
    if not d.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {d}")
    parts = {}
    for kind in CORPUS_FILES:
        p = d / CORPUS_FILES[kind]
        parts[kind] = read_records(kind, p) if kind in need or p.exists() else []
    return Corpus(parts["targets"], parts["refs"], parts["links"], parts["sources"])


def write_corpus(path: str | Path, corpus: Corpus) -> None:
    d = Path(path)
    for kind, name in CORPUS_FILES.items():
        write_records(kind, d / name, getattr(corpus, kind))


def read_exclusions(path: str | Path | None) -> ExclusionList | None:
    if path is None:
        return None
    rows = loads_table("exclusions", Path(path).read_text(encoding="utf-8"), path)
    refs = [r["id"] for r in rows if r.get("kind") == "ref"]
    targets = [r["id"] for r in rows if r.get("kind") == "target"]
    bad = [r for r in rows if r.get("kind") not in ("ref", "target")]
    if bad:
        raise UsageError(f"{path}: exclusion kind must be 'ref' or 'target'")
    return ExclusionList.of(refs, targets)


def _profile(args: argparse.Namespace) -> CascadeProfile:
    if getattr(args, "cascade_config", None):
        return load_profile(args.cascade_config)
    return resolve_profile(args.profile or "strict")


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _load_plan(args: argparse.Namespace) -> InjectionPlan:
    data = json.loads(Path(args.plan).read_text(encoding="utf-8")) if args.plan else {}
    if args.seed is not None:
        data["seed"] = args.seed
    return InjectionPlan.from_dict(data)


# --- commands ------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    corpus = generate_clean(args.n_targets, args.n_refs, args.seed if args.seed is not None else 0)
    write_corpus(args.out, corpus)
    return EXIT_OK


def cmd_inject(args: argparse.Namespace) -> int:
    plan = _load_plan(args)
    clean = read_corpus(args.corpus)
    result = forge(clean, plan)
    out = Path(args.out)
    write_corpus(out, result.corpus)
    atomic_write(out / "plan.json", json.dumps(plan.to_dict(), indent=2, sort_keys=True) + "\n")
    atomic_write(
        out / "injection_log.tsv",
        dumps_table(
            "injection_log",
            ("ref_id", "field", "code", "original", "corrupted"),
            ((e.ref_id, e.field, e.code, e.original, e.corrupted) for e in result.injection_log.entries),
        ),
    )
    atomic_write(
        out / "skipped_draws.tsv",
        dumps_table(
            "skipped_draws",
            ("ref_id", "code", "field", "reason"),
            ((s.ref_id, s.code, s.field, s.reason) for s in result.injection_log.skipped),
        ),
    )
    atomic_write(
        out / "phantom_log.tsv",
        dumps_table(
            "phantom_log",
            ("ref_id", "phantom_target_id", "displaced_target_id", "cited_work", "collision", "cross_domain"),
            (
                (p.ref_id, p.phantom_target_id, p.displaced_target_id, p.cited_work, p.collision, p.cross_domain)
                for p in result.phantom_log
            ),
        ),
    )
    atomic_write(
        out / "duplicate_log.tsv",
        dumps_table(
            "duplicate_log",
            ("original_id", "duplicate_id"),
            ((d.original_id, d.duplicate_id) for d in result.duplicate_log),
        ),
    )
    return EXIT_OK


def _read_refs(args: argparse.Namespace, corpus: Corpus) -> list:
    if not args.refs:
        return corpus.refs
    if args.refs.endswith(".jsonl"):
        return read_records("refs", args.refs)
    return read_compact_references(args.refs)


def cmd_match(args: argparse.Namespace) -> int:
    profile = _profile(args)
    corpus = read_corpus(args.corpus, need=("targets",) if args.refs else ("targets", "refs"))
    refs = _read_refs(args, corpus)
    idx = build_index(corpus.targets, profile)
    matches = match_corpus(refs, idx, workers=args.workers, executor=args.executor)
    text = "\n".join(
        [json.dumps({"format": "citematch/matches", "version": 1, "profile": profile.name}, sort_keys=True)]
        + [
            json.dumps(
                {
                    "ref_id": m.ref_id,
                    "outcome": m.outcome.value,
                    "matched_targets": [list(p) for p in m.matched_targets],
                    "selected_target": m.selected_target,
                },
                sort_keys=True,
            )
            for m in matches
        ]
    ) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _read_matches(path: str) -> list:
    return read_records("matches", path)


def _match_label(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    try:
        return str(json.loads(first).get("profile") or Path(path).stem)
    except (json.JSONDecodeError, AttributeError):
        return Path(path).stem


def cmd_classify(args: argparse.Namespace) -> int:
    corpus = read_corpus(args.corpus, need=("targets", "refs", "links"))
    matches = _read_matches(args.matches)
    result = annotate_missed(matches, corpus.refs, corpus.targets, corpus.links)
    text = dumps_table(
        "annotations",
        ("ref_id", "field", "codes", "observed", "expected"),
        ((a.ref_id, a.field, ",".join(a.codes), a.observed, a.expected) for a in result.annotations),
    )
    _emit(text, args.out)
    single, multi = single_vs_multi_inaccuracy_stats(result.annotations)
    fmt = lambda x: "NA" if x is None else f"{x:.4f}"  # noqa: E731
    print(
        f"annotations={len(result.annotations)} skipped={len(result.skipped)} "
        f"single={fmt(single)} multi={fmt(multi)}",
        file=sys.stderr,
    )
    return EXIT_OK


def _report(report, fmt: str) -> str:
    if fmt == "delimited":
        return report.to_delimited()
    return "\n".join(report.to_table(mode) for mode in ScoreMode)


def cmd_evaluate(args: argparse.Namespace) -> int:
    corpus = read_corpus(args.corpus, need=("links",))
    matches = _read_matches(args.matches)
    report = compare_profiles({_match_label(args.matches): matches}, corpus.links, exclude=read_exclusions(args.exclude))
    _emit(_report(report, args.format), args.out)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    profiles = [resolve_profile(p) for p in (args.profile or ([] if args.cascade_config else list(BUILTIN)))]
    profiles += [load_profile(p) for p in args.cascade_config or ()]
    names = [p.name for p in profiles]
    if len(set(names)) != len(names):
        raise UsageError(f"profile names must be distinct, got {names}")
    corpus = read_corpus(args.corpus, need=("targets", "refs", "links"))
    runs = {}
    annotations = {}
    for p in profiles:
        idx = build_index(corpus.targets, p)
        runs[p.name] = match_corpus(corpus.refs, idx, workers=args.workers, executor=args.executor)
        annotations[p.name] = annotate_missed(runs[p.name], corpus.refs, corpus.targets, corpus.links).annotations
    report = compare_profiles(runs, corpus.links, annotations=annotations, exclude=read_exclusions(args.exclude))
    _emit(_report(report, args.format), args.out)
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="citematch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def profile_flags(p: argparse.ArgumentParser, many: bool = False) -> None:
        if many:
            p.add_argument("--profile", action="append", help=f"built-in profile ({', '.join(BUILTIN)}) or .toml path; repeatable")
            p.add_argument("--cascade-config", action="append", help="cascade TOML file; repeatable")
        else:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--profile", help=f"built-in profile ({', '.join(BUILTIN)}) or .toml path")
            g.add_argument("--cascade-config", help="cascade TOML file")

    def parallel_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--workers", type=int, default=1, help="parallel matching workers")
        p.add_argument("--executor", choices=("process", "thread"), default="process")

    p = sub.add_parser("generate", help="write a clean synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-targets", type=int, default=300)
    p.add_argument("--n-refs", type=int, default=3968)
    p.add_argument("--out", required=True, help="output corpus directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("inject", help="corrupt a corpus per an injection plan")
    p.add_argument("--corpus", required=True)
    p.add_argument("--plan", help="injection plan JSON")
    p.add_argument("--seed", type=int, help="overrides the plan's seed")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("match", help="match references against targets")
    p.add_argument("--corpus", required=True)
    p.add_argument("--refs", help="references to match instead of the corpus ones (.jsonl, or compact strings one per line)")
    profile_flags(p)
    parallel_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("classify", help="annotate missed matches with inaccuracy codes")
    p.add_argument("--corpus", required=True)
    p.add_argument("--matches", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="score a match run against ground truth")
    p.add_argument("--corpus", required=True)
    p.add_argument("--matches", required=True)
    p.add_argument("--exclude", help="exclusion list (kind, id)")
    p.add_argument("--format", choices=("table", "delimited"), default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="match and score several profiles side by side")
    p.add_argument("--corpus", required=True)
    profile_flags(p, many=True)
    parallel_flags(p)
    p.add_argument("--exclude")
    p.add_argument("--format", choices=("table", "delimited"), default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UnknownProfileError as exc:
        print(f"citematch: {exc}", file=sys.stderr)
        return EXIT_PROFILE
    except ConfigError as exc:
        print(f"citematch: invalid cascade config: {exc}", file=sys.stderr)
        return EXIT_PROFILE
    except FormatError as exc:
        print(f"citematch: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except UsageError as exc:
        print(f"citematch: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"citematch: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"citematch: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

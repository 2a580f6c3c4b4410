"""Compare the compiled and pure-Python edit-distance backends.

    python3 benchmarks/bench_kernels.py [--pairs N] [--refs N] [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from citematch import strmetrics
from citematch.corpusforge import InjectionPlan, forge, generate_clean
from citematch.ruleengine import build_index, builtin_profile, match_corpus


def _pairs(n: int, seed: int) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    alpha = "ABCDEFGHIJKLMNOPQRSTUVWXYZ "
    out = []
    for _ in range(n):
        a = "".join(rng.choice(alpha) for _ in range(rng.randint(4, 32)))
        b = list(a)
        for _ in range(rng.randint(0, 4)):
            b[rng.randrange(len(b))] = rng.choice(alpha)
        out.append((a, "".join(b)))
    return out


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=20_000)
    ap.add_argument("--refs", type=int, default=4_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = ["python"] + (["cython"] if strmetrics.compiled_available() else [])
    if len(backends) == 1:
        print("compiled extension not available; timing the Python backend only", file=sys.stderr)

    pairs = _pairs(args.pairs, args.seed)
    plan = InjectionPlan(seed=args.seed, per_code_rates={c: 0.03 for c in "BDEFGHIJKMNOQRSTU"})
    corpus = forge(generate_clean(300, args.refs, args.seed), plan).corpus
    profiles = {name: builtin_profile(name) for name in ("cwts", "ifq")}

    rows: dict[str, dict[str, float]] = {}
    start_backend = strmetrics.backend()
    try:
        for b in backends:
            strmetrics.use_backend(b)
            lev, dl = strmetrics.levenshtein, strmetrics.damerau_levenshtein
            rows.setdefault("levenshtein", {})[b] = _best(lambda: [lev(x, y) for x, y in pairs], args.repeat)
            rows.setdefault("damerau_levenshtein", {})[b] = _best(lambda: [dl(x, y) for x, y in pairs], args.repeat)
            for name, p in profiles.items():
                idx = build_index(corpus.targets, p)
                rows.setdefault(f"match {name}", {})[b] = _best(lambda: match_corpus(corpus.refs, idx), args.repeat)
    finally:
        strmetrics.use_backend(start_backend)

    print(f"{args.pairs} string pairs, {args.refs} references, best of {args.repeat}")
    head = f"{'task':<22}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else "")
    print(head)
    for task, t in rows.items():
        line = f"{task:<22}" + "".join(f"{t[b]:>11.3f}s" for b in backends)
        if len(backends) > 1:
            line += f"{t['python'] / t['cython']:>11.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Time the numba and numpy propagation backends on templates of growing size.

    python benchmarks/bench_propagate.py [--max-size N] [--repeat K]

Two measurements per equation: one root closure (all fixed facts pushed
through the rules once) and a full ``decide``.  The numba kernel is compiled
before any timing starts.
"""

import argparse
import time

from dlpg._accel import HAVE_NUMBA
from dlpg._kernels import closure
from dlpg.delta import build_template
from dlpg.normalize import to_intentional
from dlpg.search import _Problem, _seeds, decide
from dlpg.term import parse_equation

EQUATIONS = [
    "1 <= x^l x",
    "x^l = x^r",
    "x y = y x",
    "(x y)^l = y^l x^l",
    "(x \\/ y)^r = x^r /\\ y^r",
    "x^l^r = x",
    "x y /\\ 1 <= y^l x^r",
    "1 (y^l \\/ y) = x^l^l (y^l \\/ x^r)",
    "x \\/ x \\/ x^r /\\ y <= y x /\\ (y \\/ y^r)",
    "1 x^l \\/ y x^l = x^l /\\ y \\/ x^l x^l",
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-size", type=int, default=1500, help="skip templates larger than this")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-numpy", type=int, default=800, help="largest template timed on the numpy backend")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    decide(build_template(to_intentional(*parse_equation("1 <= x^l x"))[0]), backend="numba")

    print(f"{'equation':40} {'size':>6} {'closure nb':>11} {'closure np':>11} {'decide nb':>11} {'decide np':>11}")
    for text in EQUATIONS:
        t = build_template(to_intentional(*parse_equation(text))[0], cap=None)
        n = len(t)
        if n > args.max_size:
            print(f"{text:40} {n:>6}  skipped")
            continue
        problem = _Problem(t)
        seeds = _seeds(problem.facts)
        row = [f"{text:40}", f"{n:>6}"]
        cols = []
        for backend in ("numba", "numpy"):
            if backend == "numpy" and n > args.max_numpy:
                cols += [None, None]
                continue
            cols.append(best_of(lambda: closure(problem.rules, seeds, backend), args.repeat))
            cols.append(best_of(lambda: decide(t, backend=backend), args.repeat))
        order = [cols[0], cols[2], cols[1], cols[3]]
        row += [f"{c * 1e3:>9.2f}ms" if c is not None else f"{'-':>11}" for c in order]
        print(" ".join(row))


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python precondition matchers.

Run with ``python benchmarks/bench_kernels.py``. Two measurements per kernel:
a micro benchmark that joins the deliver preconditions against a large
generated state, and a full state-engine solve of a 10-box problem.
"""
import argparse
import statistics
import time

from htnkit import _kernels
from htnkit.core import ops
from htnkit.core.state import State
from htnkit.generate import gen_logistics_problem, logistics_domain_text
from htnkit.io import parse_domain
from htnkit.state_engine import plan_state


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - start)
    return statistics.median(runs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--boxes", type=int, default=10)
    args = ap.parse_args()

    domain = parse_domain(logistics_domain_text())
    problem = gen_logistics_problem(args.boxes, 4, 4, 0)
    state = State(problem.init)
    branch = domain.methods_for("deliver")[4]
    pos = tuple(branch.pre_pos)

    kernels = {"python": _kernels.match_pure}
    if _kernels.match_compiled is not None:
        kernels["cython"] = _kernels.match_compiled
    else:
        print("compiled kernel not built; showing the pure-Python kernel only")

    results = {}
    for name, kernel in kernels.items():
        micro = _time(lambda: [list(kernel(pos, (), state.index, state.facts, {}))
                               for _ in range(20)], args.repeat)
        saved = ops._kernels.match
        ops._kernels.match = kernel
        try:
            solve = _time(lambda: plan_state(domain, problem), args.repeat)
        finally:
            ops._kernels.match = saved
        results[name] = (micro, solve)
        print(f"{name:<7} join x20  {micro * 1e3:8.2f} ms   solve {args.boxes} boxes "
              f"{solve * 1e3:8.2f} ms")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speed-up: join {py[0] / cy[0]:.2f}x, solve {py[1] / cy[1]:.2f}x")


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 plan found (or plan valid), 1 no solution (or plan invalid),
2 budget exhausted, 3 input error. Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib.resources import files
from pathlib import Path

from .core.errors import DomainError, HTNError, OrderingViolation
from .core.model import Budget
from .generate import gen_logistics
from .io import ParseErrors, classify_domain, parse_domain, parse_problem
from .io.serialize import PlanFormatError, explain_text, read_plan, serialize_plan
from .oracle import oracle_enumerate
from .plan_engine import all_solutions_po, plan_po
from .state_engine import plan_state
from .validate import validate_plan

EXIT_FOUND, EXIT_NONE, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> tuple:
    """Text and display name of ``path``; bare names of packaged fixtures also work."""
    p = Path(path)
    if not p.exists():
        packaged = files("htnkit") / "fixtures" / path
        if os.sep not in path and packaged.is_file():
            return packaged.read_text(), path
        raise InputError(f"{path}: no such file")
    try:
        return p.read_text(), path
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load(domain_path: str, problem_path: str = None):
    text, name = _read(domain_path)
    domain = parse_domain(text, name)
    if problem_path is None:
        return domain, None
    text, name = _read(problem_path)
    return domain, parse_problem(text, domain, name)


def _budget(args, problem):
    if args.budget is None:
        return None
    if args.budget < 1:
        raise InputError("--budget must be at least 1")
    return Budget(max_decompositions=args.budget)


def cmd_solve(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    engine = args.engine or problem.engine
    budget = _budget(args, problem)
    if engine == "state":
        result = plan_state(domain, problem, budget, all_solutions=args.all_solutions,
                            style=args.style)
    else:
        if args.style:
            logging.getLogger(__name__).info("--style is ignored by the plan engine")
        run = all_solutions_po if args.all_solutions else plan_po
        result = run(domain, problem, budget)
    if args.validate:
        for k, plan in enumerate(result.plans):
            verdict = validate_plan(plan, problem, domain)
            if not verdict:
                print(f"plan {k} failed validation: {verdict}", file=sys.stderr)
                return EXIT_NONE
    if args.format == "json":
        sys.stdout.write(serialize_plan(result, "json", problem, args.explain))
    elif args.all_solutions:
        for k, plan in enumerate(result.plans):
            if k:
                sys.stdout.write("\n")
            sys.stdout.write(f"; plan {k}\n")
            sys.stdout.write("".join(line + "\n" for line in plan.lines()))
    else:
        sys.stdout.write(serialize_plan(result, "text"))
    if args.explain and args.format != "json":
        sys.stderr.write(explain_text(result))
    print(f"{result.status.value} ({engine} engine)", file=sys.stderr)
    return result.exit_code


def cmd_validate(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    text, _ = _read(args.plan)
    plan = read_plan(text)
    verdict = validate_plan(plan, problem, domain)
    print(str(verdict))
    if not plan.trace and problem.network.tasks:
        print("note: plan has no decomposition trace; only its execution was checked",
              file=sys.stderr)
    return EXIT_FOUND if verdict else EXIT_NONE


def cmd_oracle(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    res = oracle_enumerate(domain, problem, args.depth, max_nodes=args.max_nodes)
    plans = sorted(res.plans, key=lambda p: (len(p), p))
    if args.format == "json":
        doc = {"complete": res.complete, "expanded": res.expanded,
               "plans": [[f"({' '.join(s)})" for s in p] for p in plans]}
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        for k, p in enumerate(plans):
            if k:
                sys.stdout.write("\n")
            sys.stdout.write(f"; plan {k}\n")
            for i, s in enumerate(p):
                sys.stdout.write(f"{i}: ({' '.join(s)})\n")
    print(f"{len(plans)} plan(s), {'complete' if res.complete else 'incomplete: bound reached'}",
          file=sys.stderr)
    if plans:
        return EXIT_FOUND
    return EXIT_NONE if res.complete else EXIT_BUDGET


def cmd_gen(args) -> int:
    try:
        domain_text, problem_text = gen_logistics(args.boxes, args.cities, args.locs, args.seed,
                                                  ordered=not args.unordered)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.out is None:
        sys.stdout.write(problem_text)
        return EXIT_FOUND
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = f"logistics-b{args.boxes}-c{args.cities}-l{args.locs}-s{args.seed}"
    (out / "logistics.htd").write_text(domain_text)
    (out / f"{name}.htp").write_text(problem_text)
    print(out / f"{name}.htp")
    return EXIT_FOUND


def _range(text: str) -> list:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N, N-M or N,M,...: {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("box counts must be at least 1")
    return values


def cmd_bench(args) -> int:
    from .bench import cmd_bench as run_bench

    report = run_bench(args.boxes, args.engine or ["state"], args.cities, args.locs, args.seed,
                       _budget(args, None))
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_FOUND if report.ok else EXIT_NONE


def cmd_classify(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    cls = classify_domain(domain, problem)
    if args.format == "json":
        sys.stdout.write(json.dumps(cls.as_dict(), sort_keys=True, indent=2) + "\n")
    else:
        for k, v in cls.as_dict().items():
            print(f"{k}: {str(v).lower() if isinstance(v, bool) else v}")
    return EXIT_FOUND


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="htnkit", description="HTN planning toolkit")
    ap.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="find a plan")
    s.add_argument("domain")
    s.add_argument("problem")
    s.add_argument("--engine", choices=["state", "plan"])
    s.add_argument("--style", choices=["totd", "utd", "potd"])
    s.add_argument("--budget", type=int, help="maximum number of decompositions")
    s.add_argument("--all-solutions", action="store_true")
    s.add_argument("--explain", action="store_true", help="show the trace, threats and counters")
    s.add_argument("--validate", action="store_true", help="re-check plans before printing")
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a plan file")
    v.add_argument("domain")
    v.add_argument("problem")
    v.add_argument("plan")
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle", help="enumerate every plan by brute force")
    o.add_argument("domain")
    o.add_argument("problem")
    o.add_argument("--depth", type=int, default=200)
    o.add_argument("--max-nodes", type=int, default=None)
    o.add_argument("--format", choices=["text", "json"], default="text")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen-logistics", help="generate a logistics problem")
    g.add_argument("--boxes", type=int, default=1)
    g.add_argument("--cities", type=int, default=2)
    g.add_argument("--locs", type=int, default=2, help="locations per city")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--unordered", action="store_true", help="leave the deliveries unordered")
    g.add_argument("--out", help="directory for the .htd and .htp files")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="sweep generated problems")
    b.add_argument("--boxes", type=_range, default=list(range(1, 6)), help="e.g. 1-10")
    b.add_argument("--engine", action="append", choices=["state", "plan"])
    b.add_argument("--cities", type=int, default=2)
    b.add_argument("--locs", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--budget", type=int)
    b.add_argument("--format", choices=["text", "json"], default="text")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("classify", help="structural class of a domain")
    c.add_argument("domain")
    c.add_argument("problem", nargs="?")
    c.add_argument("--format", choices=["text", "json"], default="text")
    c.set_defaults(func=cmd_classify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_FOUND
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ParseErrors as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
    except (InputError, PlanFormatError, DomainError, OrderingViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except HTNError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

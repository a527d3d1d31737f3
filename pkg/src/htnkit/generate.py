"""Random logistics problems of growing size.

Layout: city ``ck`` owns locations ``l((k-1)*n+1)`` .. ``l(k*n)``; its last
location is the airport. Every pair of locations in a city is adjacent, as
is every pair of airports. Each city has one truck at its first location and
there is one plane, at the airport of ``c1``. With more than one city every
box travels between two different cities, chosen at random, so each delivery
needs the plane; a single city gives random distinct locations. All such
problems are solvable.
"""
from __future__ import annotations

import random
from importlib.resources import files

from .core.model import Problem, TaskInstance, TaskNetwork
from .io.printer import print_problem


def logistics_domain_text() -> str:
    return (files("htnkit") / "fixtures" / "logistics.htd").read_text()


def _layout(cities: int, locs_per_city: int):
    city_locs = {}
    for c in range(1, cities + 1):
        base = (c - 1) * locs_per_city
        city_locs[f"c{c}"] = [f"l{base + i}" for i in range(1, locs_per_city + 1)]
    return city_locs


def _facts(city_locs: dict) -> list:
    where = {l: c for c, ls in city_locs.items() for l in ls}
    airport = {c: ls[-1] for c, ls in city_locs.items()}
    locs = list(where)
    facts = []
    for a in locs:
        for b in locs:
            if a == b:
                continue
            if where[a] == where[b] or (a == airport[where[a]] and b == airport[where[b]]):
                facts.append(("adjacent", a, b))
    facts += [("in-city", l, where[l]) for l in locs]
    facts += [("same-city", c, c) for c in city_locs]
    facts += [("different-city", c, d) for c in city_locs for d in city_locs if c != d]
    for a in locs:
        for b in locs:
            if a == b:
                continue
            if where[a] == where[b]:
                hop = b
            elif a != airport[where[a]]:
                hop = airport[where[a]]
            else:
                hop = airport[where[b]]
            facts.append(("next-hop", a, b, hop))
    return facts


def gen_logistics_problem(boxes: int, cities: int, locs_per_city: int, seed: int,
                          ordered: bool = True) -> Problem:
    """The problem as a value; see :func:`gen_logistics`."""
    if min(boxes, cities, locs_per_city) < 1:
        raise ValueError("boxes, cities and locs_per_city must all be at least 1")
    if cities * locs_per_city < 2:
        raise ValueError("need at least two locations")
    rng = random.Random(seed)
    city_locs = _layout(cities, locs_per_city)
    locs = [l for ls in city_locs.values() for l in ls]
    init = [("truck-at", f"t{k}", ls[0]) for k, ls in enumerate(city_locs.values(), 1)]
    init.append(("plane-at", "p1", city_locs["c1"][-1]))
    tasks = []
    names = list(city_locs)
    for k in range(1, boxes + 1):
        if cities > 1:
            src = rng.choice(names)
            dst = rng.choice([c for c in names if c != src])
            origin, dest = rng.choice(city_locs[src]), rng.choice(city_locs[dst])
        else:
            origin = rng.choice(locs)
            dest = rng.choice([l for l in locs if l != origin])
        init.append(("box-at", f"b{k}", origin))
        tasks.append(TaskInstance(f"g{k}", "deliver", (f"b{k}", origin, dest)))
    init += _facts(city_locs)
    ordering = frozenset((tasks[i].id, tasks[i + 1].id) for i in range(len(tasks) - 1)) \
        if ordered else frozenset()
    name = f"logistics-b{boxes}-c{cities}-l{locs_per_city}-s{seed}"
    return Problem(name, "logistics", tuple(init), TaskNetwork(tuple(tasks), ordering),
                   style="totd" if ordered else "utd", budget=1000 * boxes)


def gen_logistics(boxes: int, cities: int, locs_per_city: int, seed: int,
                  ordered: bool = True) -> tuple:
    """``(domain text, problem text)`` for a random delivery problem.

    One ``deliver`` task per box, totally ordered unless ``ordered`` is false.
    The same arguments always give the same bytes.
    """
    problem = gen_logistics_problem(boxes, cities, locs_per_city, seed, ordered)
    return logistics_domain_text(), print_problem(problem)

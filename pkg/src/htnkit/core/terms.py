"""Terms, atoms and substitutions.

A term is a plain string. Variables carry a leading ``?``; everything else is a
constant. An atom is a tuple ``(predicate, arg, ...)``; a substitution is a
``dict`` from variable to term.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Optional

Atom = tuple
Substitution = dict


def is_var(term: str) -> bool:
    return term[:1] == "?"


def is_ground(atom: Atom) -> bool:
    return not any(is_var(a) for a in atom[1:])


def atom_vars(atom: Atom) -> list:
    return [a for a in atom[1:] if is_var(a)]


def vars_of(atoms: Iterable[Atom]) -> list:
    """Variables of ``atoms`` in first-occurrence order, without repeats."""
    seen = {}
    for atom in atoms:
        for a in atom[1:]:
            if is_var(a):
                seen.setdefault(a, None)
    return list(seen)


def ground(atom: Atom, sigma: Mapping[str, str]) -> Atom:
    """Replace every bound variable of ``atom``; unbound ones stay as they are."""
    if not sigma:
        return atom
    return (atom[0],) + tuple(sigma.get(a, a) for a in atom[1:])


def ground_all(atoms: Iterable[Atom], sigma: Mapping[str, str]) -> tuple:
    return tuple(ground(a, sigma) for a in atoms)


def subst_terms(terms: Iterable[str], sigma: Mapping[str, str]) -> tuple:
    return tuple(sigma.get(t, t) for t in terms)


def fmt_atom(atom: Atom) -> str:
    return "(" + " ".join(atom) + ")"


def fmt_pred(atom: Atom) -> str:
    """Functional notation, ``truck-at(t,l2)``; used in diagnostics."""
    return f"{atom[0]}({','.join(atom[1:])})"


def normalize(sigma: Mapping[str, str]) -> dict:
    """Resolve binding chains so that applying the result once is enough.

    Raises ``ValueError`` on a cyclic chain such as ``?x -> ?y -> ?x``.
    """
    out = {}
    for var in sigma:
        seen = {var}
        term = sigma[var]
        while term in sigma and term != var:
            if term in seen:
                raise ValueError(f"cyclic binding chain through {term}")
            seen.add(term)
            term = sigma[term]
        if term == var:
            raise ValueError(f"cyclic binding chain through {var}")
        out[var] = term
    return out


def match_args(pattern: Iterable[str], args: Iterable[str],
               sigma: Optional[Mapping[str, str]] = None) -> Optional[dict]:
    """One-way match of ``pattern`` terms against ``args``.

    Variables in ``pattern`` are bound; ``args`` are taken literally. Returns the
    extended substitution or ``None`` on a clash.
    """
    out = dict(sigma) if sigma else {}
    pattern = tuple(pattern)
    args = tuple(args)
    if len(pattern) != len(args):
        return None
    for p, a in zip(pattern, args):
        if is_var(p):
            bound = out.get(p)
            if bound is None:
                out[p] = a
            elif bound != a:
                return None
        elif p != a:
            return None
    return out


def _walk(term, sigma):
    while term in sigma:
        term = sigma[term]
    return term


def unify(a: Atom, b: Atom, sigma: Optional[Mapping[str, str]] = None) -> Optional[dict]:
    """Most general unifier of two atoms whose variables may occur on both sides."""
    if a[0] != b[0] or len(a) != len(b):
        return None
    out = dict(sigma) if sigma else {}
    for x, y in zip(a[1:], b[1:]):
        x = _walk(x, out)
        y = _walk(y, out)
        if x == y:
            continue
        if is_var(x):
            out[x] = y
        elif is_var(y):
            out[y] = x
        else:
            return None
    return out

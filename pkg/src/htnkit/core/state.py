"""Closed-world states with value semantics."""
from __future__ import annotations

from typing import Iterable, Iterator

from .terms import Atom, fmt_atom, is_ground
from .errors import NonGroundError


class State:
    """An immutable set of ground atoms that remembers insertion order.

    Equality and hashing use set semantics; the order only makes binding
    enumeration reproducible.
    """

    __slots__ = ("_facts", "_set", "_index", "_hash")

    def __init__(self, facts: Iterable[Atom] = ()):
        ordered = dict.fromkeys(tuple(f) for f in facts)
        for fact in ordered:
            if not is_ground(fact):
                raise NonGroundError(f"state fact {fmt_atom(fact)} is not ground")
        self._facts = tuple(ordered)
        self._set = frozenset(self._facts)
        self._index = None
        self._hash = None

    @classmethod
    def _trusted(cls, facts: tuple) -> "State":
        obj = cls.__new__(cls)
        obj._facts = facts
        obj._set = frozenset(facts)
        obj._index = None
        obj._hash = None
        return obj

    @property
    def facts(self) -> frozenset:
        return self._set

    @property
    def index(self) -> dict:
        """Facts bucketed by predicate name, each bucket in state order."""
        if self._index is None:
            idx = {}
            for fact in self._facts:
                idx.setdefault(fact[0], []).append(fact)
            self._index = idx
        return self._index

    def successor(self, delete: Iterable[Atom], add: Iterable[Atom]) -> "State":
        """``(self - delete) | add``; new facts go to the end in effect order."""
        gone = set(delete)
        kept = [f for f in self._facts if f not in gone] if gone else list(self._facts)
        present = set(kept)
        for fact in add:
            if fact not in present:
                kept.append(fact)
                present.add(fact)
        return State._trusted(tuple(kept))

    def __contains__(self, atom) -> bool:
        return atom in self._set

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._facts)

    def __len__(self) -> int:
        return len(self._facts)

    def __eq__(self, other) -> bool:
        if isinstance(other, State):
            return self._set == other._set
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._set)
        return self._hash

    def __repr__(self) -> str:
        return "State({" + ", ".join(fmt_atom(f) for f in self._facts) + "})"

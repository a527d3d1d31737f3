"""Pure-Python precondition matcher.

``match`` enumerates every extension of a substitution that maps the positive
atoms onto facts of a state, with negative atoms absent. Enumeration follows
the order of the positive atoms, then the insertion order of facts within each
predicate bucket.
"""


def match(pos, neg, index, facts, sigma):
    """Return the list of satisfying substitutions (each a fresh dict).

    ``pos``/``neg`` are tuples of atoms, ``index`` maps a predicate name to the
    facts carrying it (in state order), ``facts`` supports membership tests and
    ``sigma`` is the starting substitution. Negative atoms must be fully bound
    once the positive ones are.
    """
    out = []
    n = len(pos)
    env = dict(sigma)

    def check_neg():
        for atom in neg:
            g = (atom[0],) + tuple(env.get(a, a) for a in atom[1:])
            if g in facts:
                return False
        return True

    def rec(i):
        if i == n:
            if check_neg():
                out.append(dict(env))
            return
        atom = pos[i]
        arity = len(atom)
        for fact in index.get(atom[0], ()):
            if len(fact) != arity:
                continue
            added = []
            ok = True
            for k in range(1, arity):
                term = atom[k]
                if term[0] == "?":
                    bound = env.get(term)
                    if bound is None:
                        env[term] = fact[k]
                        added.append(term)
                    elif bound != fact[k]:
                        ok = False
                        break
                elif term != fact[k]:
                    ok = False
                    break
            if ok:
                rec(i + 1)
            for term in added:
                del env[term]

    rec(0)
    return out

# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled precondition matcher; same contract as ``match_py.match``."""


cdef bint _neg_ok(tuple neg, dict env, object facts):
    cdef tuple atom
    cdef list g
    cdef Py_ssize_t k
    for atom in neg:
        g = [atom[0]]
        for k in range(1, len(atom)):
            g.append(env.get(atom[k], atom[k]))
        if tuple(g) in facts:
            return False
    return True


cdef void _rec(Py_ssize_t i, Py_ssize_t n, tuple pos, tuple neg, dict index,
               object facts, dict env, list out):
    cdef tuple atom, fact
    cdef Py_ssize_t arity, k
    cdef str term
    cdef object bound
    cdef list added
    cdef bint ok
    if i == n:
        if _neg_ok(neg, env, facts):
            out.append(dict(env))
        return
    atom = <tuple>pos[i]
    arity = len(atom)
    bucket = index.get(atom[0])
    if bucket is None:
        return
    for fact in bucket:
        if len(fact) != arity:
            continue
        added = []
        ok = True
        for k in range(1, arity):
            term = <str>atom[k]
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
            _rec(i + 1, n, pos, neg, index, facts, env, out)
        for term in added:
            del env[term]


def match(pos, neg, index, facts, sigma):
    cdef list out = []
    cdef dict env = dict(sigma)
    _rec(0, len(pos), tuple(pos), tuple(neg), index, facts, env, out)
    return out

"""Independent brute-force reference routines.

Everything here works on raw tables (lists, None for undefined) and plain
Python sets, and never calls into the package, so agreement with the package
is a genuine two-route check.
"""

from __future__ import annotations

import itertools
import random


def ev(table, n, args):
    k = 0
    for a in args:
        k = k * n + a
    return table[k]


def closure(ops, n, U):
    """Least superset of U closed under every (arity, table) in ops."""
    out = set(U)
    while True:
        new = set()
        for arity, table in ops:
            for t in itertools.product(sorted(out), repeat=arity):
                v = ev(table, n, t)
                if v is not None and v not in out:
                    new.add(v)
        if not new:
            return frozenset(out)
        out |= new


def closed_under(ops, n, S):
    S = set(S)
    for arity, table in ops:
        for t in itertools.product(sorted(S), repeat=arity):
            v = ev(table, n, t)
            if v is not None and v not in S:
                return False
    return True


def preserves(ops, n, S, m):
    """m: dict S -> S. Checks σ(f(t)) = f(σ t) with matching definedness."""
    for arity, table in ops:
        for t in itertools.product(sorted(S), repeat=arity):
            a = ev(table, n, t)
            b = ev(table, n, tuple(m[x] for x in t))
            if a is None or b is None:
                if a is not b:
                    return False
            elif m[a] != b:
                return False
    return True


def all_maps(S):
    S = sorted(S)
    for vals in itertools.product(S, repeat=len(S)):
        yield dict(zip(S, vals))


def end(ops, n, S):
    return [m for m in all_maps(S) if preserves(ops, n, S, m)]


def aut(ops, n, S):
    return [m for m in end(ops, n, S) if len(set(m.values())) == len(m)]


def as_key(m):
    return tuple(m[x] for x in sorted(m))


def fixed(S, H):
    return frozenset(x for x in S if all(h[x] == x for h in H))


def gal(maps, K):
    return frozenset(as_key(m) for m in maps if all(m[x] == x for x in K))


def intermediates(S, B):
    S, B = sorted(set(S)), frozenset(B)
    rest = [x for x in S if x not in B]
    for r in range(len(rest) + 1):
        for c in itertools.combinations(rest, r):
            yield B | frozenset(c)


def closed_families(maps, S, B):
    """(fixed-set family, Galois family) as the closed sets of the connection K ↦ G(K)."""
    by_key = {as_key(m): m for m in maps}
    ints, gss = set(), set()
    for K in intermediates(S, B):
        G = gal(maps, K)
        gss.add(G)
        ints.add(fixed(S, [by_key[k] for k in G]))
    return ints, gss


def topologies(n):
    """Every topology on n labelled points (as frozensets of bitmasks), by brute filter."""
    full = (1 << n) - 1
    middle = list(range(1, full))
    out = []
    for bits in range(1 << len(middle)):
        fam = {0, full} | {middle[k] for k in range(len(middle)) if bits >> k & 1}
        if all(a | b in fam and a & b in fam for a in fam for b in fam):
            out.append(frozenset(fam))
    return out


def submonoid_closure(gens, S):
    ident = tuple(sorted(S))
    pos = {x: i for i, x in enumerate(ident)}
    out = {ident} | set(gens)
    while True:
        new = {tuple(a[pos[b[i]]] for i in range(len(ident))) for a in out for b in out} - out
        if not new:
            return frozenset(out)
        out |= new


def random_unary(rng: random.Random, n: int, k: int):
    """k random total self-maps of {0..n-1} plus Id, closed under composition."""
    gens = {tuple(range(n))}
    for _ in range(k):
        gens.add(tuple(rng.randrange(n) for _ in range(n)))
    out = set(gens)
    while True:
        new = {tuple(f[g[x]] for x in range(n)) for f in out for g in out} - out
        if not new:
            return sorted(out)
        out |= new

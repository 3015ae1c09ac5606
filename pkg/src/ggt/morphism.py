"""Structure-preserving maps: checks, enumeration, arrows and constructions.

Every predicate returns a ``Check`` that is truthy exactly when the property
holds and carries a replayable witness otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .carrier import (ILL_DEFINED, UNDEFINED, BudgetExceeded, OperationSystem,
                      PartialOperation, UsageError, compose, tuple_index)
from .tspace import closure_values

ENDO_BUDGET = 8
AUTO_BUDGET = 10
MAP_SEARCH_BUDGET = 200_000
MAX_MORPHISMS = 100_000    # enumerated maps kept in memory


class Kind(Enum):
    ENDO = "end"
    AUTO = "aut"


@dataclass(frozen=True)
class Check:
    ok: bool
    witness: object = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------- morphisms


@dataclass(frozen=True)
class Morphism:
    """A total map on a finite source set, stored as sorted domain and images."""

    domain: tuple
    values: tuple

    def __post_init__(self):
        if len(self.domain) != len(self.values):
            raise UsageError("domain and values differ in length")
        if list(self.domain) != sorted(set(self.domain)):
            raise UsageError("domain must be sorted and duplicate free")

    @classmethod
    def from_dict(cls, mapping: Mapping[int, int]) -> "Morphism":
        dom = tuple(sorted(mapping))
        return cls(dom, tuple(mapping[x] for x in dom))

    @classmethod
    def identity(cls, S: Iterable[int]) -> "Morphism":
        dom = tuple(sorted(S))
        return cls(dom, dom)

    @property
    def source(self) -> frozenset:
        return frozenset(self.domain)

    @property
    def image(self) -> frozenset:
        return frozenset(self.values)

    def as_dict(self) -> dict:
        return dict(zip(self.domain, self.values))

    def __call__(self, x: int) -> int:
        return self.values[self.domain.index(x)]

    def __len__(self):
        return len(self.domain)

    def then(self, other: "Morphism") -> "Morphism":
        """other ∘ self."""
        o = other.as_dict()
        return Morphism(self.domain, tuple(o[v] for v in self.values))

    def after(self, other: "Morphism") -> "Morphism":
        """self ∘ other."""
        return other.then(self)

    def restrict(self, U: Iterable[int]) -> "Morphism":
        m = self.as_dict()
        return Morphism.from_dict({u: m[u] for u in U})

    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def is_bijection_onto(self, target: Iterable[int]) -> bool:
        return self.is_injective() and self.image == frozenset(target)

    def inverse(self) -> "Morphism":
        if not self.is_injective():
            raise UsageError("map is not injective")
        return Morphism.from_dict({v: k for k, v in zip(self.domain, self.values)})

    def code(self, target: Iterable[int] | None = None) -> int:
        """Base-|target| integer with the first domain point most significant."""
        tgt = sorted(target) if target is not None else list(self.domain)
        pos = {t: i for i, t in enumerate(tgt)}
        k = 0
        for v in self.values:
            k = k * len(tgt) + pos[v]
        return k


def compose_maps(outer: Morphism, inner: Morphism) -> Morphism:
    return inner.then(outer)


def morphism_ops(system: OperationSystem, full: bool = False) -> tuple:
    """Operations a morphism check must quantify over.

    Generated systems (and capped slices) are checked on generators only;
    ``full`` forces the explicit member list.
    """
    if full:
        return system.members
    return system.value_generators or system.members


def is_t_morphism(system: OperationSystem, sigma: Morphism,
                  target: Iterable[int] | None = None, full: bool = False,
                  ops: Sequence[PartialOperation] | None = None) -> Check:
    m = sigma.as_dict()
    if target is not None:
        tgt = frozenset(target)
        stray = [v for v in sigma.values if v not in tgt]
        if stray:
            return Check(False, {"image_outside_target": stray[0]}, "image leaves target")
    pts = sigma.domain
    for f in (ops if ops is not None else morphism_ops(system, full)):
        n, table = f.size, f.table
        for t in itertools.product(pts, repeat=f.arity):
            lhs = table[tuple_index(t, n)]
            st = tuple(m[a] for a in t)
            rhs = table[tuple_index(st, n)]
            if lhs is UNDEFINED:
                if rhs is not UNDEFINED:
                    return Check(False, {"op": f.name, "args": t, "lhs": None, "rhs": rhs},
                                 "defined only after mapping")
                continue
            if lhs not in m:
                return Check(False, {"op": f.name, "args": t, "value": lhs},
                             "value leaves the source")
            if rhs is UNDEFINED or m[lhs] != rhs:
                return Check(False, {"op": f.name, "args": t, "lhs": m[lhs],
                                     "rhs": None if rhs is UNDEFINED else rhs},
                             "does not commute")
    return Check(True)


# -------------------------------------------------------------- enumeration


def _constraints(ops, S: Sequence[int]):
    """Constraints bucketed by the last domain position they mention."""
    pos = {x: i for i, x in enumerate(S)}
    buckets: list[list] = [[] for _ in S]
    for f in ops:
        n, table = f.size, f.table
        for t in itertools.product(S, repeat=f.arity):
            v = table[tuple_index(t, n)]
            ps = tuple(pos[a] for a in t)
            if v is UNDEFINED:
                r = None
                level = max(ps)
            else:
                if v not in pos:
                    return None
                r = pos[v]
                level = max(max(ps), r)
            buckets[level].append((table, n, ps, r))
    return buckets


def enumerate_morphisms(system: OperationSystem, S: Iterable[int], kind: Kind = Kind.ENDO,
                        budget: int | None = None, target: Iterable[int] | None = None,
                        verify: bool = True, max_results: int = MAX_MORPHISMS) -> list[Morphism]:
    """All operation-preserving maps S → target (default S), in ascending code order."""
    src = sorted(frozenset(S))
    tgt = sorted(frozenset(target)) if target is not None else src
    limit = budget if budget is not None else (ENDO_BUDGET if kind is Kind.ENDO else AUTO_BUDGET)
    if len(src) > limit:
        raise BudgetExceeded(f"{kind.value} enumeration", limit, len(src))
    ops = morphism_ops(system)
    buckets = _constraints(ops, src)
    if buckets is None:
        return []
    k = len(src)
    out: list[Morphism] = []
    assign = [0] * k
    used: set = set()
    auto = kind is Kind.AUTO

    def ok_at(level: int) -> bool:
        for table, n, ps, r in buckets[level]:
            idx = 0
            for p in ps:
                idx = idx * n + assign[p]
            v = table[idx]
            if r is None:
                if v is not UNDEFINED:
                    return False
            elif v is UNDEFINED or v != assign[r]:
                return False
        return True

    def rec(i: int):
        if i == k:
            if len(out) >= max_results:
                raise BudgetExceeded(f"{kind.value} enumeration (maps)", max_results,
                                     max_results + 1)
            out.append(Morphism(tuple(src), tuple(assign)))
            return
        for y in tgt:
            if auto and y in used:
                continue
            assign[i] = y
            if ok_at(i):
                if auto:
                    used.add(y)
                rec(i + 1)
                if auto:
                    used.discard(y)

    if auto and len(tgt) != k:
        return []
    rec(0)
    if verify and target is None and len(out) <= 512:
        _verify_closed(out, auto)
    return out


def _verify_closed(maps: list[Morphism], group: bool):
    keys = {m.values for m in maps}
    for a in maps:
        for b in maps:
            if a.then(b).values not in keys:
                raise AssertionError("enumerated maps are not closed under composition")
        if group and a.inverse().values not in keys:
            raise AssertionError("enumerated bijections are not closed under inverses")


def enumerate_morphisms_brute(system: OperationSystem, S: Iterable[int], kind: Kind = Kind.ENDO,
                              full: bool = True) -> list[Morphism]:
    """Oracle route: filter every map S → S through the full member check."""
    src = sorted(frozenset(S))
    maps = itertools.permutations(src) if kind is Kind.AUTO else itertools.product(src, repeat=len(src))
    out = [Morphism(tuple(src), tuple(v)) for v in maps]
    out = [m for m in out if is_t_morphism(system, m, full=full)]
    return sorted(out, key=lambda m: m.code())


# ------------------------------------------------------------------ θ maps


@dataclass(frozen=True)
class ThetaRelation:
    pairs: tuple

    def __post_init__(self):
        seen = []
        for p in self.pairs:
            if p not in seen:
                seen.append(p)
        object.__setattr__(self, "pairs", tuple(seen))

    @property
    def domain(self) -> tuple:
        out = []
        for f, _ in self.pairs:
            if f not in out:
                out.append(f)
        return tuple(out)

    @property
    def image(self) -> tuple:
        out = []
        for _, g in self.pairs:
            if g not in out:
                out.append(g)
        return tuple(out)

    def fiber(self, f: PartialOperation) -> tuple:
        return tuple(g for h, g in self.pairs if h == f)

    def inverse(self) -> "ThetaRelation":
        return ThetaRelation(tuple((g, f) for f, g in self.pairs))

    @classmethod
    def identity(cls, ops: Iterable[PartialOperation]) -> "ThetaRelation":
        return cls(tuple((f, f) for f in ops))


def _eval(g: PartialOperation, args: Sequence[int]):
    if g.arity != len(args):
        return UNDEFINED
    return g.table[tuple_index(args, g.size)]


def theta_value(theta: ThetaRelation, f: PartialOperation, args: Sequence[int]):
    fib = theta.fiber(f)
    if not fib:
        raise UsageError(f"{f.name} is not in the domain of the relation")
    vals = {_eval(g, args) for g in fib}
    if len(vals) == 1:
        return vals.pop()
    return ILL_DEFINED


def theta_is_map_on(theta: ThetaRelation, A: Iterable[int]) -> Check:
    pts = sorted(frozenset(A))
    for f in theta.domain:
        fib = theta.fiber(f)
        for g1, g2 in itertools.combinations(fib, 2):
            for k in sorted({g1.arity, g2.arity}):
                for t in itertools.product(pts, repeat=k):
                    a, b = _eval(g1, t), _eval(g2, t)
                    if a != b:
                        return Check(False, {"op": f.name, "pair": (g1.name, g2.name), "args": t},
                                     "relation is not a map here")
    return Check(True)


def is_theta_morphism(theta: ThetaRelation, phi: Morphism) -> Check:
    m = phi.as_dict()
    clause = theta_is_map_on(theta, phi.image)
    if not clause:
        return Check(False, clause.witness, "clause (i): " + clause.detail)
    pts = phi.domain
    for f in theta.domain:
        for t in itertools.product(pts, repeat=f.arity):
            lhs = _eval(f, t)
            rhs = theta_value(theta, f, tuple(m[a] for a in t))
            if lhs is UNDEFINED:
                if rhs is UNDEFINED or rhs is ILL_DEFINED:
                    continue
                return Check(False, {"op": f.name, "args": t, "lhs": None, "rhs": rhs},
                             "clause (ii): defined only after mapping")
            if lhs not in m:
                return Check(False, {"op": f.name, "args": t, "value": lhs},
                             "clause (ii): value leaves the source")
            if rhs is UNDEFINED or rhs is ILL_DEFINED or rhs != m[lhs]:
                return Check(False, {"op": f.name, "args": t, "lhs": m[lhs], "rhs": repr(rhs)
                                     if not isinstance(rhs, int) else rhs},
                             "clause (ii): does not commute")
    return Check(True)


# ------------------------------------------------------------------ arrows


@dataclass(frozen=True)
class PairRelation:
    """Pairs (derived value, same derivation on α-images) with a failure witness."""

    pairs: dict = field(default_factory=dict)
    failure: object = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def as_morphism(self) -> Morphism:
        return Morphism.from_dict(self.pairs)


def _relation_from(rows):
    """rows yield (x, y, tag); build a functional relation or a collision witness."""
    pairs: dict = {}
    tags: dict = {}
    for x, y, tag in rows:
        if x is UNDEFINED:
            continue
        if y is UNDEFINED or y is ILL_DEFINED:
            return PairRelation(pairs, {"kind": "definedness", "at": tag, "value": x})
        if x in pairs:
            if pairs[x] != y:
                return PairRelation(pairs, {"kind": "collision", "value": x,
                                            "first": tags[x], "second": tag,
                                            "images": (pairs[x], y)})
            continue
        pairs[x] = y
        tags[x] = tag
    return PairRelation(pairs)


def pair_relation(system: OperationSystem, alpha: Mapping[int, int]) -> PairRelation:
    U = sorted(alpha)
    gens = system.value_generators
    if gens is None:
        def rows():
            for f in system.members:
                for t in itertools.product(U, repeat=f.arity):
                    yield (f(*t), f(*(alpha[u] for u in t)), (f.name, t))
        return _relation_from(rows())
    # fixpoint over generators: tuples of already derived pairs feed the next layer
    base = []
    for g in gens:
        for t in itertools.product(U, repeat=g.arity):
            base.append((g(*t), g(*(alpha[u] for u in t)), (g.name, t)))
    rel = _relation_from(base)
    if not rel.ok:
        return rel
    pairs = dict(rel.pairs)
    fresh = set(pairs)
    while fresh:
        xs = sorted(pairs)
        layer = []
        for g in gens:
            for t in itertools.product(xs, repeat=g.arity):
                if not any(a in fresh for a in t):
                    continue
                layer.append((g(*t), g(*(pairs[a] for a in t)), (g.name, t)))
        new_pairs = dict(pairs)
        res = _relation_from([(x, y, ("derived", x)) for x, y in pairs.items()] + layer)
        if not res.ok:
            return res
        new_pairs = res.pairs
        fresh = set(new_pairs) - set(pairs)
        pairs = new_pairs
    return PairRelation(pairs)


def theta_pair_relation(theta: ThetaRelation, alpha: Mapping[int, int]) -> PairRelation:
    U = sorted(alpha)

    def rows():
        for f in theta.domain:
            for t in itertools.product(U, repeat=f.arity):
                yield (f(*t), theta_value(theta, f, tuple(alpha[u] for u in t)), (f.name, t))
    return _relation_from(rows())


def map_arrow_holds(system: OperationSystem, alpha: Mapping[int, int]) -> Check:
    rel = pair_relation(system, alpha)
    return Check(rel.ok, rel.failure)


def map_arrow_holds_theta(theta: ThetaRelation, alpha: Mapping[int, int]) -> Check:
    rel = theta_pair_relation(theta, alpha)
    return Check(rel.ok, rel.failure)


def _inverse_map(alpha: Mapping[int, int]):
    inv = {v: k for k, v in alpha.items()}
    return inv if len(inv) == len(alpha) else None


def two_way_arrow_holds(system: OperationSystem, alpha: Mapping[int, int]) -> Check:
    inv = _inverse_map(alpha)
    if inv is None:
        return Check(False, {"kind": "not bijective"})
    fwd = map_arrow_holds(system, alpha)
    if not fwd:
        return fwd
    back = map_arrow_holds(system, inv)
    return Check(back.ok, back.witness, "reverse direction" if not back else "")


def two_way_arrow_holds_theta(theta: ThetaRelation, alpha: Mapping[int, int]) -> Check:
    inv = _inverse_map(alpha)
    if inv is None:
        return Check(False, {"kind": "not bijective"})
    fwd = map_arrow_holds_theta(theta, alpha)
    if not fwd:
        return fwd
    back = map_arrow_holds_theta(theta.inverse(), inv)
    return Check(back.ok, back.witness, "reverse direction" if not back else "")


def arrow(system: OperationSystem, u: int, v: int) -> Check:
    """u → v: every coincidence of diagonal values at u persists at v."""
    return map_arrow_holds(system, {u: v})


@dataclass(frozen=True)
class ArrowSets:
    u: int
    front: frozenset
    eq_class: frozenset
    witnesses: dict


def arrow_sets(system: OperationSystem, u: int, scope: Iterable[int] | None = None) -> ArrowSets:
    pts = sorted(frozenset(scope)) if scope is not None else list(range(system.n))
    front, eq, wit = set(), set(), {}
    for v in pts:
        a = arrow(system, u, v)
        if not a:
            wit[v] = a.witness
            continue
        front.add(v)
        b = arrow(system, v, u)
        if b:
            eq.add(v)
        else:
            wit[v] = {"reverse": b.witness}
    return ArrowSets(u, frozenset(front), frozenset(eq), wit)


# ------------------------------------------------------------ constructions


@dataclass(frozen=True)
class Construction:
    ok: bool
    morphism: Morphism | None = None
    witness: object = None
    hypotheses: dict = field(default_factory=dict)
    verified: object = None

    def __bool__(self):
        return self.ok


def construct_morphism(system: OperationSystem, alpha: Mapping[int, int],
                       two_way: bool = False) -> Construction:
    """The map ⟨U⟩ → ⟨V⟩ sending each derived value to the same derivation on α(U)."""
    if two_way:
        chk = two_way_arrow_holds(system, alpha)
        if not chk:
            return Construction(False, witness=chk.witness)
    rel = pair_relation(system, alpha)
    if not rel.ok:
        return Construction(False, witness=rel.failure)
    sigma = rel.as_morphism()
    target = closure_values(system, frozenset(alpha.values()))
    ver = is_t_morphism(system, sigma, target=target)
    if two_way:
        ver = Check(ver.ok and sigma.is_bijection_onto(target), ver.witness)
    return Construction(True, sigma, hypotheses={"arrow": True}, verified=ver)


def theta_distributive_over(theta: ThetaRelation, A: Iterable[int]) -> Check:
    pts = sorted(frozenset(A))
    dom = theta.domain
    for f in dom:
        for gs in itertools.product(dom, repeat=f.arity):
            c = compose(f, gs)
            if c not in dom:
                continue
            m = c.arity
            for z in itertools.product(pts, repeat=m):
                lhs = theta_value(theta, c, z)
                if lhs is UNDEFINED or lhs is ILL_DEFINED:
                    continue
                inner = []
                pos = 0
                for g in gs:
                    v = theta_value(theta, g, z[pos:pos + g.arity])
                    pos += g.arity
                    if v is UNDEFINED or v is ILL_DEFINED:
                        break
                    inner.append(v)
                rhs = theta_value(theta, f, tuple(inner)) if len(inner) == len(gs) else UNDEFINED
                if rhs != lhs:
                    return Check(False, {"outer": f.name, "inner": [g.name for g in gs],
                                         "args": z, "lhs": lhs, "rhs": repr(rhs)})
    return Check(True)


def construct_theta_morphism(theta: ThetaRelation, system1: OperationSystem,
                             system2: OperationSystem, alpha: Mapping[int, int],
                             two_way: bool = False) -> Construction:
    dom_full = set(theta.domain) == set(system1.members)
    if not dom_full:
        return Construction(False, witness={"kind": "domain of relation is not the whole system"},
                            hypotheses={"domain_full": False})
    if two_way:
        chk = two_way_arrow_holds_theta(theta, alpha)
        if not chk:
            return Construction(False, witness=chk.witness, hypotheses={"domain_full": True})
    rel = theta_pair_relation(theta, alpha)
    if not rel.ok:
        return Construction(False, witness=rel.failure, hypotheses={"domain_full": True})
    phi = rel.as_morphism()
    V = frozenset(alpha.values())
    hyp = {
        "domain_full": True,
        "map_on_image": theta_is_map_on(theta, phi.image).ok,
        "distributive": theta_distributive_over(theta, V).ok,
    }
    if two_way:
        hyp["image_full"] = set(theta.image) == set(system2.members)
    ver = None
    if hyp["map_on_image"] and hyp["distributive"]:
        ver = is_theta_morphism(theta, phi)
    return Construction(True, phi, hypotheses=hyp, verified=ver)


def _constructs(system: OperationSystem, sigma: Mapping[int, int], alpha: Mapping[int, int]) -> bool:
    rel = pair_relation(system, alpha)
    if not rel.ok:
        return False
    return all(x in sigma and sigma[x] == y for x, y in rel.pairs.items())


def find_constructing_map(system: OperationSystem, sigma: Morphism, U: Iterable[int],
                          candidates: Iterable[int] | None = None,
                          budget: int = MAP_SEARCH_BUDGET):
    """Some α on U with σ(f(u⃗)) = f(αu⃗) for every derivation, or None."""
    us = sorted(frozenset(U))
    m = sigma.as_dict()
    if set(us) <= set(m):
        alpha = {u: m[u] for u in us}
        if _constructs(system, m, alpha):
            return alpha
    pool = sorted(frozenset(candidates)) if candidates is not None else list(range(system.n))
    total = len(pool) ** len(us)
    if total > budget:
        raise BudgetExceeded("constructing-map search", budget, total)
    for vals in itertools.product(pool, repeat=len(us)):
        alpha = dict(zip(us, vals))
        if _constructs(system, m, alpha):
            return alpha
    return None


def find_constructing_map_theta(theta: ThetaRelation, phi: Morphism, U: Iterable[int],
                                candidates: Iterable[int], budget: int = MAP_SEARCH_BUDGET):
    us = sorted(frozenset(U))
    m = phi.as_dict()
    pool = sorted(frozenset(candidates))
    total = len(pool) ** len(us)
    if total > budget:
        raise BudgetExceeded("constructing-map search", budget, total)
    for vals in itertools.product(pool, repeat=len(us)):
        alpha = dict(zip(us, vals))
        rel = theta_pair_relation(theta, alpha)
        if rel.ok and all(x in m and m[x] == y for x, y in rel.pairs.items()):
            return alpha
    return None


@dataclass(frozen=True)
class ConstructibilitySurvey:
    morphisms: int
    constructible: int
    counterexamples: tuple


def constructibility_survey(system: OperationSystem, U: Iterable[int]) -> ConstructibilitySurvey:
    """Every operation-preserving map out of ⟨U⟩, tested for a constructing α.

    Used to probe the single-generator constructibility claim instance by instance.
    """
    src = closure_values(system, frozenset(U))
    maps = enumerate_morphisms(system, src, Kind.ENDO, target=range(system.n), verify=False)
    bad = []
    for sigma in maps:
        if find_constructing_map(system, sigma, U) is None:
            bad.append(sigma)
    return ConstructibilitySurvey(len(maps), len(maps) - len(bad), tuple(bad))


def invert_isomorphism(system: OperationSystem, sigma: Morphism) -> Morphism:
    if not sigma.is_injective():
        raise UsageError("map is not bijective")
    inv = sigma.inverse()
    chk = is_t_morphism(system, inv)
    if not chk:
        raise AssertionError(f"inverse fails the morphism check: {chk.witness}")
    return inv


def invert_theta_isomorphism(theta: ThetaRelation, phi: Morphism):
    if not phi.is_injective():
        raise UsageError("map is not bijective")
    inv = phi.inverse()
    tinv = theta.inverse()
    chk = is_theta_morphism(tinv, inv)
    if not chk:
        raise AssertionError(f"inverse fails the relation check: {chk.witness}")
    return inv, tinv

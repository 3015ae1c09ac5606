"""Dualities, core fixed sets, stability and normality, quotients of θ-morphisms,
splitting spaces and the extensional transcendence check."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .carrier import (NOT_APPLICABLE, UNDEFINED, BudgetExceeded, Carrier,
                      OperationSystem, PartialOperation, Tier, UsageError, _inner_choices,
                      compose, identity, tuple_index, validate_system)
from .galois import Ambient, fixed_set, galois_monoid
from .morphism import (Check, Kind, Morphism, ThetaRelation, arrow, arrow_sets,
                       construct_morphism, enumerate_morphisms, is_theta_morphism,
                       theta_is_map_on)
from .tspace import TSpace, closure_values, generate_space, is_quasi_space, is_t_space

MAP_BUDGET = 50_000        # |D|^|D| for exhaustive self-map scans
COMPOSITE_BUDGET = 20_000  # composites examined when certifying a quotient system


def _all_maps(points: Sequence[int], into: Sequence[int], budget: int = MAP_BUDGET):
    total = len(into) ** len(points)
    if total > budget:
        raise BudgetExceeded("self-map scan", budget, total)
    for vals in itertools.product(into, repeat=len(points)):
        yield Morphism(tuple(points), vals)


def _restrict_ops(system: OperationSystem, S: Iterable[int]) -> frozenset:
    S = sorted(S)
    return frozenset(Morphism(tuple(S), tuple(f(x) for x in S)) for f in system.members)


def _commutes(f: Morphism, sigmas: Iterable[Morphism], S: Iterable[int]) -> bool:
    fm = f.as_dict()
    for s in sigmas:
        sm = s.as_dict()
        for a in S:
            if sm[fm[a]] != fm[sm[a]]:
                return False
    return True


def _unary_only(system: OperationSystem):
    if system.tier is not Tier.UNARY or system.is_generated:
        raise UsageError("needs an explicit unary system")


def _space(system: OperationSystem, S) -> frozenset:
    S = frozenset(S.elements if isinstance(S, TSpace) else S)
    if not is_quasi_space(system, S) or not S <= closure_values(system, S):
        if is_t_space(system, S) is not True:
            raise UsageError("S is not a space of the system")
    return S


# -------------------------------------------------------------- dualities


def accommodating_system(system: OperationSystem, S, kind=Kind.ENDO,
                         budget: int = MAP_BUDGET) -> OperationSystem:
    """All self-maps of D that keep S inside S and commute on S with End (or Aut) of S."""
    _unary_only(system)
    S = _space(system, S)
    kind = Kind(kind) if isinstance(kind, str) else kind
    sig = enumerate_morphisms(system, S, kind)
    n = system.n
    ops = []
    for f in _all_maps(list(range(n)), list(range(n)), budget):
        if all(f(a) in S for a in S) and _commutes(f, sig, S):
            ops.append(PartialOperation("f" + "".join(map(str, f.values)), 1, n, f.values))
    acc = OperationSystem(system.carrier, Tier.UNARY, tuple(ops), name=f"T_{kind.value}")
    if not validate_system(acc).closed:
        raise AssertionError("accommodating system is not closed")
    if not set(system.members) <= set(ops):
        raise AssertionError("accommodating system misses a member of T")
    return acc


@dataclass(frozen=True)
class DualityReport:
    kind: str
    star_closed: bool                # clause (a): End/Aut of S is a semigroup on S, S a space of it
    accommodating_closed: bool       # clause (a): the accommodating system is a semigroup on D
    hypotheses: dict
    contains_restriction: object     # End_{T*}(S) ⊇ T|_S (NOT_APPLICABLE if gated)
    equality: object                 # End_{T*}(S) = T|_S
    restrictions_equal: object       # T|_S = T_End(S)|_S
    biconditional: object
    sizes: dict = field(default_factory=dict)

    @property
    def violation(self) -> bool:
        return (not self.star_closed or not self.accommodating_closed
                or self.contains_restriction is False or self.biconditional is False)


def verify_duality(system: OperationSystem, S, kind=Kind.ENDO,
                   budget: int = MAP_BUDGET) -> DualityReport:
    _unary_only(system)
    S = _space(system, S)
    kind = Kind(kind) if isinstance(kind, str) else kind
    pts = sorted(S)
    star = enumerate_morphisms(system, S, kind)
    star_set = set(star)
    idS = Morphism.identity(pts)
    closed = idS in star_set and all(a.then(b) in star_set for a in star for b in star)
    acc = accommodating_system(system, S, kind, budget)
    acc_closed = validate_system(acc).closed
    t_s = _restrict_ops(system, pts)
    acc_s = _restrict_ops(acc, pts)
    dual = [m for m in _all_maps(pts, pts, budget) if _commutes(m, star, pts)]
    if kind is Kind.AUTO:
        dual = [m for m in dual if m.is_bijection_onto(pts)]
    dual_set = set(dual)
    hyp = {}
    contains: object = t_s <= dual_set
    equality: object = dual_set == t_s
    restr_eq: object = t_s == acc_s
    if kind is Kind.AUTO:
        hyp["T_bijective_on_S"] = all(m.is_bijection_onto(pts) for m in t_s)
        hyp["accommodating_bijective_on_S"] = all(m.is_bijection_onto(pts) for m in acc_s)
        if not hyp["T_bijective_on_S"]:
            contains = NOT_APPLICABLE
        if not hyp["accommodating_bijective_on_S"]:
            equality = restr_eq = NOT_APPLICABLE
    bic = NOT_APPLICABLE if equality is NOT_APPLICABLE else (equality == restr_eq)
    sizes = {"star": len(star), "dual": len(dual), "restriction": len(t_s),
             "accommodating": len(acc.members)}
    return DualityReport(kind.value, closed, acc_closed, hyp, contains, equality, restr_eq, bic,
                         sizes)


# -------------------------------------------------- core sets, transitivity


def core_fixed_sets(system: OperationSystem, S) -> tuple[frozenset, frozenset]:
    S = _space(system, S)
    c_end, c_aut = set(), set()
    for u in sorted(S):
        a = arrow_sets(system, u, S)
        if a.front == {u}:
            c_end.add(u)
        if a.eq_class == {u}:
            c_aut.add(u)
    return frozenset(c_end), frozenset(c_aut)


@dataclass(frozen=True)
class TransitivityReport:
    kind: str
    core: frozenset
    fixed: frozenset
    containment: bool               # core ⊆ S^{End} (or S^{Aut}), unconditional
    hypotheses: dict
    applicable: bool
    witnesses: dict                 # (u, v) -> σ values, for every arrow pair
    missing: tuple
    core_equals_fixed: object       # NOT_APPLICABLE when the hypotheses fail

    @property
    def violation(self) -> bool:
        return (not self.containment
                or (self.applicable and (bool(self.missing) or self.core_equals_fixed is False)))


def verify_transitivity(system: OperationSystem, S, kind=Kind.ENDO) -> TransitivityReport:
    S = _space(system, S)
    kind = Kind(kind) if isinstance(kind, str) else kind
    c_end, c_aut = core_fixed_sets(system, S)
    core = c_end if kind is Kind.ENDO else c_aut
    maps = enumerate_morphisms(system, S, kind)
    fixed = fixed_set(S, maps)
    hyp = {"identity_in_T": system.has_identity()}
    bad = [a for a in sorted(S - core) if closure_values(system, frozenset({a})) != S]
    hyp["generic_points_generate"] = not bad
    if bad:
        hyp["failing_point"] = bad[0]
    applicable = hyp["identity_in_T"] and hyp["generic_points_generate"]
    witnesses, missing = {}, []
    if applicable:
        for u in sorted(S):
            for v in sorted(S):
                rel = arrow(system, u, v)
                if kind is Kind.AUTO:
                    rel = Check(rel.ok and arrow(system, v, u).ok)
                if not rel:
                    continue
                sigma = next((m for m in maps if m(u) == v), None)
                if sigma is None:
                    missing.append((u, v))
                else:
                    witnesses[(u, v)] = sigma.values
    return TransitivityReport(kind.value, core, fixed, core <= fixed, hyp, applicable, witnesses,
                              tuple(missing), (core == fixed) if applicable else NOT_APPLICABLE)


def constructed_transitivity_witness(system: OperationSystem, S, u: int, v: int):
    """The map ⟨u⟩ → ⟨v⟩ built from the arrow u → v (a T-morphism of S when ⟨u⟩ = S)."""
    return construct_morphism(system, {u: v})


# ------------------------------------------------------ stability, normality


def is_stable(K: Iterable[int], H: Iterable[Morphism]):
    K = frozenset(K)
    for s in H:
        for a in sorted(K):
            if s(a) not in K:
                return Check(False, {"map": s.values, "point": a})
    return Check(True)


def is_normal_t_subset(system: OperationSystem, K: Iterable[int], S) -> Check:
    S = _space(system, S)
    K = frozenset(K)
    if not K <= S:
        raise UsageError("K must lie inside S")
    for a in sorted(K):
        cls = arrow_sets(system, a, S).eq_class
        out = sorted(cls - K)
        if out:
            return Check(False, {"point": a, "outside": out[0]})
    return Check(True)


# ------------------------------------------------------------ finite groups


def cayley_table(elems: Sequence[Morphism]) -> list[list[int]]:
    pos = {m: i for i, m in enumerate(elems)}
    return [[pos[b.then(a)] for b in elems] for a in elems]   # row a, col b: a∘b


def _identity_of(table) -> int:
    n = len(table)
    return next(e for e in range(n) if all(table[e][x] == x for x in range(n)))


def _orders(table) -> list[int]:
    e = _identity_of(table)
    out = []
    for g in range(len(table)):
        k, x = 1, g
        while x != e:
            x = table[g][x]
            k += 1
        out.append(k)
    return out


def groups_isomorphic(t1, t2):
    """An explicit isomorphism (list) between two Cayley tables, or None."""
    n = len(t1)
    if n != len(t2):
        return None
    o1, o2 = _orders(t1), _orders(t2)
    if sorted(o1) != sorted(o2):
        return None
    e1, e2 = _identity_of(t1), _identity_of(t2)
    order = sorted(range(n), key=lambda g: (-o1[g], g))
    phi = {e1: e2}

    def extend(phi):
        # close the partial map under products; None on conflict
        changed = True
        while changed:
            changed = False
            for a, fa in list(phi.items()):
                for b, fb in list(phi.items()):
                    c, fc = t1[a][b], t2[fa][fb]
                    if c in phi:
                        if phi[c] != fc:
                            return None
                    else:
                        if fc in phi.values():
                            return None
                        phi[c] = fc
                        changed = True
        return phi

    def rec(phi):
        if len(phi) == n:
            return phi
        g = next(x for x in order if x not in phi)
        used = set(phi.values())
        for h in range(n):
            if h in used or o2[h] != o1[g]:
                continue
            cand = extend({**phi, g: h})
            if cand is not None:
                res = rec(cand)
                if res is not None:
                    return res
        return None

    res = rec(extend(phi))
    return None if res is None else [res[i] for i in range(n)]


@dataclass(frozen=True)
class RestrictionReport:
    stable: bool
    witness: object
    k_is_space: bool
    homomorphism: object
    kernel_is_fixing_group: object
    kernel_normal: object
    quotient_onto_image: object         # explicit coset → image isomorphism exists
    image_is_full: object               # Im γ = GGr(K/B)
    quotient_isomorphic_to_target: object
    sizes: dict
    sufficient_conditions: dict

    @property
    def violation(self) -> bool:
        if not self.stable or not self.k_is_space:
            return False
        if not (self.homomorphism and self.kernel_is_fixing_group and self.kernel_normal
                and self.quotient_onto_image):
            return True
        return any(v.get("violation") for v in self.sufficient_conditions.values())


def _fixing(maps, K):
    return frozenset(m for m in maps if all(m(a) == a for a in K))


def restriction_homomorphism(system: OperationSystem, S, B: Iterable[int],
                             K: Iterable[int]) -> RestrictionReport:
    S = _space(system, S)
    B, K = frozenset(B), frozenset(K)
    if not B <= K <= S:
        raise UsageError("needs B ⊆ K ⊆ S")
    amb = Ambient(system, S)
    G = sorted(galois_monoid(amb, B, Kind.AUTO).members, key=lambda m: m.code())
    stable = is_stable(K, G)
    k_space = is_t_space(system, K) is True
    na = NOT_APPLICABLE
    if not stable or not k_space:
        return RestrictionReport(bool(stable), stable.witness, k_space, na, na, na, na, na, na,
                                 {"G": len(G)}, {})
    autK = enumerate_morphisms(system, K, Kind.AUTO)
    GK = sorted(_fixing(autK, B), key=lambda m: m.code())
    kpts = sorted(K)
    gamma = {s: s.restrict(kpts) for s in G}
    hom = all(gamma[s] in set(GK) for s in G) and all(
        gamma[b.then(a)] == gamma[b].then(gamma[a]) for a in G for b in G)
    idK = Morphism.identity(kpts)
    kernel = frozenset(s for s in G if gamma[s] == idK)
    fixing_group = galois_monoid(amb, K, Kind.AUTO).members
    normal = all(b.inverse().then(k).then(b) in kernel for k in kernel for b in G)   # b k b⁻¹
    # cosets σ·ker ↦ γ(σ)
    cosets: dict = {}
    for s in G:
        cosets.setdefault(frozenset(k.then(s) for k in kernel), gamma[s])
    well = all(gamma[s] == cosets[frozenset(k.then(s) for k in kernel)] for s in G)
    image = sorted(set(gamma.values()), key=lambda m: m.code())
    onto_image = well and len(cosets) == len(image)
    reps = []
    for c, img in cosets.items():
        reps.append((min(c, key=lambda m: m.code()), img))
    full = set(image) == set(GK)
    iso = groups_isomorphic(_coset_table(G, kernel), cayley_table(GK)) is not None
    suff = _sufficient_conditions(system, amb, S, B, K, G, GK, kernel, fixing_group, normal)
    return RestrictionReport(True, None, True, hom, kernel == fixing_group, normal, onto_image,
                             full, iso, {"G": len(G), "kernel": len(kernel), "image": len(image),
                                         "target": len(GK)}, suff)


def _coset_table(G, kernel):
    cos = []
    index = {}
    for s in G:
        c = frozenset(k.then(s) for k in kernel)
        if c not in index:
            index[c] = len(cos)
            cos.append(s)
    coset_of = {s: index[frozenset(k.then(s) for k in kernel)] for s in G}
    return [[coset_of[b.then(a)] for b in cos] for a in cos]


def _sufficient_conditions(system, amb, S, B, K, G, GK, kernel, fixing_group, normal) -> dict:
    """Hypothesis bundles that each imply B = K^{GGr(K/B)}; reported, never treated as necessary."""
    b_closed = fixed_set(S, G) == B
    k_closed = fixed_set(S, fixing_group) == K
    gset = set(G)
    extends = all(any(s.restrict(sorted(K)) == t for s in gset) for t in GK)
    stable = bool(is_stable(K, G))
    k_normal = bool(is_normal_t_subset(system, K, S))
    conclusion = fixed_set(K, GK) == B
    bundles = {
        "normal_kernel": [b_closed, k_closed, bool(normal), extends],
        "stable": [b_closed, k_closed, stable, extends],
        "normal_subset": [b_closed, k_closed, k_normal, extends],
    }
    out = {}
    for name, hyps in bundles.items():
        holds = all(hyps)
        out[name] = {"hypotheses": holds, "conclusion": conclusion,
                     "violation": holds and not conclusion}
    return out


# ----------------------------------------------------------- quotients


@dataclass(frozen=True)
class QuotientSpace:
    classes: tuple            # tuples of domain points, ordered by least member
    values: tuple             # φ value of each class
    class_index: dict

    @property
    def size(self) -> int:
        return len(self.classes)


def quotient_of_morphism(phi: Morphism) -> QuotientSpace:
    fib: dict = {}
    for x, z in zip(phi.domain, phi.values):
        fib.setdefault(z, []).append(x)
    classes = sorted((tuple(v) for v in fib.values()), key=lambda c: c[0])
    idx = {x: i for i, c in enumerate(classes) for x in c}
    return QuotientSpace(tuple(classes), tuple(phi(c[0]) for c in classes), idx)


@dataclass(frozen=True)
class QuotientSystem:
    quotient: QuotientSpace
    system: OperationSystem          # T# = {Id} ∪ T* on the classes
    star: dict                       # member of T -> its quotient operation
    theta_star: ThetaRelation
    composite_identity: bool         # (f∘(g…))* = f*∘(g*…) on every examined composite
    closed: bool


class QuotientIllDefined(UsageError):
    """Two representatives of the same classes give different classes."""

    def __init__(self, op: PartialOperation, args: tuple):
        super().__init__(f"{op.name}* is not a partial function at {args}")
        self.op, self.args = op, args


def _star_op(f: PartialOperation, q: QuotientSpace) -> PartialOperation:
    k = q.size
    table: list = [UNDEFINED] * (k ** f.arity)
    dom = sorted(q.class_index)
    for t in itertools.product(dom, repeat=f.arity):
        v = f.table[tuple_index(t, f.size)]
        if v is UNDEFINED:
            continue
        if v not in q.class_index:
            raise UsageError(f"{f.name} leaves the domain of φ")
        i = tuple_index(tuple(q.class_index[a] for a in t), k)
        c = q.class_index[v]
        if table[i] is not UNDEFINED and table[i] != c:
            raise QuotientIllDefined(f, t)
        table[i] = c
    return PartialOperation(f.name + "*", f.arity, k, tuple(table))


def quotient_system(system: OperationSystem, phi: Morphism, theta: ThetaRelation,
                    composite_budget: int = COMPOSITE_BUDGET) -> QuotientSystem:
    chk = is_theta_morphism(theta, phi)
    if not chk:
        raise UsageError(f"φ is not a θ-morphism: {chk.detail}")
    q = quotient_of_morphism(phi)
    members = list(system.members)
    star = {f: _star_op(f, q) for f in members}
    idq = identity(q.size)
    ops = [idq]
    for s in star.values():
        if s not in ops:
            ops.append(s)
    carrier = Carrier(tuple(q.classes))
    tsharp = OperationSystem(carrier, Tier.PARTIAL_GENERALIZED, tuple(ops), name="T#")
    # (f∘(g1…gn))* = f*∘(g1*…gn*), examined on composites within the member arity cap
    cap = max((f.arity for f in members), default=1)
    ok, seen = True, 0
    for f in members:
        for gs in _inner_choices(members, f.arity, cap):
            seen += 1
            if seen > composite_budget:
                break
            c = compose(f, gs)
            lhs = _star_op(c, q)
            rhs = compose(star[f], tuple(star[g] for g in gs))
            if lhs != rhs:
                ok = False
    closed = validate_system(tsharp).closed
    ts = ThetaRelation(tuple((star[f], g) for f, g in theta.pairs))
    return QuotientSystem(q, tsharp, star, ts, ok, closed)


@dataclass(frozen=True)
class FirstIsoReport:
    applicable: bool
    reason: str
    quotient_size: int | None = None
    bijective: object = NOT_APPLICABLE
    theta_star_map_on_image: object = NOT_APPLICABLE
    theta_star_agrees: object = NOT_APPLICABLE
    theta_star_morphism: object = NOT_APPLICABLE
    composite_identity: object = NOT_APPLICABLE
    closed: object = NOT_APPLICABLE
    witness: object = None

    @property
    def isomorphism(self) -> object:
        if not self.applicable:
            return NOT_APPLICABLE
        return bool(self.bijective and self.theta_star_morphism)

    @property
    def violation(self) -> bool:
        return self.applicable and not (self.isomorphism and self.theta_star_map_on_image
                                        and self.theta_star_agrees and self.composite_identity
                                        and self.closed)


def verify_first_isomorphism(system1: OperationSystem, system2: OperationSystem, phi: Morphism,
                             theta: ThetaRelation) -> FirstIsoReport:
    if is_t_space(system1, phi.domain) is not True:
        return FirstIsoReport(False, "domain of φ is not a space of the source system")
    chk = is_theta_morphism(theta, phi)
    if not chk:
        return FirstIsoReport(False, "φ is not a θ-morphism", witness=chk.witness)
    img = phi.image
    if is_t_space(system2, img) is not True:
        return FirstIsoReport(False, "image of φ is not a space of the target system")
    try:
        qs = quotient_system(system1, phi, theta)
    except QuotientIllDefined as e:
        # well-definedness of f* is only guaranteed for f in Dom θ
        inside = e.op in theta.domain
        return FirstIsoReport(inside,
                              "quotient operation ill-defined for an operation outside Dom θ"
                              if not inside else "quotient operation ill-defined",
                              witness={"op": e.op.name, "args": e.args})
    q = qs.quotient
    phistar = Morphism(tuple(range(q.size)), q.values)
    bij = phistar.is_bijection_onto(img)
    map_on = theta_is_map_on(qs.theta_star, img)
    agrees = True
    pts = sorted(img)
    for f, g in theta.pairs:
        fs = qs.star[f]
        for g2 in qs.theta_star.fiber(fs):
            for t in itertools.product(pts, repeat=g.arity):
                a = g.table[tuple_index(t, g.size)]
                b = g2.table[tuple_index(t, g2.size)] if g2.arity == g.arity else UNDEFINED
                if a != b:
                    agrees = False
    mor = is_theta_morphism(qs.theta_star, phistar)
    return FirstIsoReport(True, "", q.size, bij, bool(map_on), agrees, bool(mor),
                          qs.composite_identity, qs.closed,
                          None if mor else mor.witness)


def theta_morphisms_between(system1: OperationSystem, system2: OperationSystem,
                            budget: int = MAP_BUDGET):
    """Every (φ, θ) on the full carriers with θ a partial choice function T → T′.

    Each f is either left out of Dom θ or paired with one g that intertwines
    φ on all points; the resulting pairs are re-checked by ``is_theta_morphism``.
    """
    n1, n2 = system1.n, system2.n
    T1, T2 = list(system1.members), list(system2.members)
    for phi in _all_maps(list(range(n1)), list(range(n2)), budget):
        choices = []
        for f in T1:
            good = [None]
            for g in T2:
                if g.arity != f.arity:
                    continue
                ok = True
                for t in itertools.product(range(n1), repeat=f.arity):
                    v = f.table[tuple_index(t, n1)]
                    w = g.table[tuple_index(tuple(phi(a) for a in t), n2)]
                    if (v is UNDEFINED) != (w is UNDEFINED) or (
                            v is not UNDEFINED and phi(v) != w):
                        ok = False
                        break
                if ok:
                    good.append(g)
            choices.append(good)
        for pick in itertools.product(*choices):
            theta = ThetaRelation(tuple((f, g) for f, g in zip(T1, pick) if g is not None))
            yield phi, theta


# ------------------------------------------------------- splitting spaces


@dataclass(frozen=True)
class SplittingReport:
    space: frozenset
    galois_defined: bool
    reason: str
    group: tuple = ()
    monoid: tuple = ()


def splitting_space(system: OperationSystem, solutions: Iterable[int],
                    B: Iterable[int] = ()) -> SplittingReport:
    U = frozenset(solutions)
    B = frozenset(B)
    space = generate_space(system, U).elements
    if not B <= space:
        return SplittingReport(space, False, "B is not inside the splitting space")
    amb = Ambient(system, space)
    grp = galois_monoid(amb, B, Kind.AUTO).ordered
    mon = galois_monoid(amb, B, Kind.ENDO).ordered
    return SplittingReport(space, True, "", tuple(m.values for m in grp),
                           tuple(m.values for m in mon))


def derivation_traces(system: OperationSystem, seeds: Iterable[int]) -> dict:
    """For every value generated from ``seeds``: one (op, args) producing it, breadth first.

    Seeds themselves are recorded as ("given",) unless they are also generated.
    """
    gens = system.value_generators or system.ops
    seeds = frozenset(seeds)
    traces: dict = {}
    layer_pool = seeds
    first = True
    known: set = set()
    fresh: set = set()
    while True:
        new = {}
        pool = sorted(layer_pool)
        for f in gens:
            for t in itertools.product(pool, repeat=f.arity):
                if not first and not any(a in fresh for a in t):
                    continue
                v = f.table[tuple_index(t, f.size)]
                if v is not UNDEFINED and v not in known and v not in new:
                    new[v] = (f.name, t)
        if not new:
            break
        traces.update(new)
        known |= set(new)
        fresh = set(new)
        layer_pool = frozenset(known)
        first = False
    for s in seeds:
        traces.setdefault(s, ("given",))
    return traces


@dataclass(frozen=True)
class ChainReport:
    inclusion: bool                  # the last space covers the target space
    missing: tuple
    bookkeeping: bool                # recorded B_i equals the generated space
    bookkeeping_failures: tuple
    derivations: bool                # every step value has a derivation trace
    traces: tuple
    deviation: str = ("step derivability is checked as the existence of a derivation trace "
                      "from B_{i-1} and U_i")

    @property
    def ok(self) -> bool:
        return self.inclusion and self.bookkeeping and self.derivations


def verify_decomposition_chain(chain: Sequence[tuple], target: tuple,
                               B0: Iterable[int] = ()) -> ChainReport:
    """chain: (U_i, T_i, recorded B_i or None); target: (U_Q, T)."""
    if not chain:
        raise UsageError("the chain needs at least one step")
    prev = frozenset(B0)
    book_fail, traces = [], []
    deriv_ok = True
    last = frozenset()
    for i, step in enumerate(chain, 1):
        U, T = frozenset(step[0]), step[1]
        recorded = step[2] if len(step) > 2 else None
        space = generate_space(T, U).elements
        if recorded is not None and frozenset(recorded) != space:
            book_fail.append((i, sorted(recorded), sorted(space)))
        tr = derivation_traces(T, prev | U)
        if not space <= set(tr):
            deriv_ok = False
        traces.append({v: tr[v] for v in sorted(space) if v in tr})
        prev = space
        last = space
    UQ, TQ = target
    goal = generate_space(TQ, UQ).elements
    missing = tuple(sorted(goal - last))
    return ChainReport(not missing, missing, not book_fail, tuple(book_fail), deriv_ok,
                       tuple(traces))


# --------------------------------------------------------- transcendence


@dataclass(frozen=True)
class TranscendenceReport:
    tuples_checked: int
    transcendental: bool
    collisions: tuple
    mode: str = "EXTENSIONAL"


def _collisions(F: Sequence[PartialOperation], u: tuple) -> list:
    out = []
    same = [f for f in F if f.arity == len(u)]
    for f, g in itertools.combinations(same, 2):
        a, b = f.table[tuple_index(u, f.size)], g.table[tuple_index(u, g.size)]
        if a is not UNDEFINED and a == b and f != g:
            out.append((f.name, g.name, u))
    return out


def is_transcendental_tuple(F: Sequence[PartialOperation], u: Sequence[int]) -> TranscendenceReport:
    F = _same_carrier(F)
    col = _collisions(F, tuple(u))
    return TranscendenceReport(1, not col, tuple(col))


def transcendental_report(F: Sequence[PartialOperation], U: Iterable[int]) -> TranscendenceReport:
    """Every tuple of distinct U-points, for each arity present in F."""
    F = _same_carrier(F)
    U = sorted(frozenset(U))
    cols, n = [], 0
    for k in sorted({f.arity for f in F}):
        for t in itertools.permutations(U, k):
            n += 1
            cols.extend(_collisions(F, t))
    return TranscendenceReport(n, not cols, tuple(cols))


def _same_carrier(F):
    F = list(F)
    if len({f.size for f in F}) > 1:
        raise UsageError("operations live on different carriers")
    return F

"""Finite topological spaces seen through their power sets.

A space X on points 0..n-1 yields the power-set carrier whose element i is the
subset with bitmask i.  The operation system on it is {Id, Cl}; point maps
p: X → Y are tuples of image positions and induce maps of power sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .carrier import BudgetExceeded, Carrier, OperationSystem, PartialOperation, Tier, UsageError
from .morphism import Kind, Morphism, enumerate_morphisms, is_t_morphism
from .topology import FiniteTopology, from_subbasis

POWERSET_BUDGET = 4        # |X| for non-enumerative work (16-element carrier)
END_POINTS_BUDGET = 3      # |X| for End enumeration on P(X)
MAP_BUDGET = 4096          # |Y|^|X| for exhaustive point-map scans


@dataclass(frozen=True)
class FiniteTopoSpace:
    labels: tuple
    topology: FiniteTopology

    def __post_init__(self):
        if tuple(self.topology.points) != tuple(range(len(self.labels))):
            raise UsageError("topology must live on the point positions")
        if not self.topology.is_valid():
            raise UsageError("not a topology")

    @classmethod
    def from_opens(cls, labels: Sequence, opens: Iterable[Iterable]) -> "FiniteTopoSpace":
        labels = tuple(labels)
        pos = {l: i for i, l in enumerate(labels)}
        sub = [[pos[x] for x in o] for o in opens]
        top = from_subbasis(range(len(labels)), sub + [list(range(len(labels)))])
        space = cls(labels, top)
        given = {space.mask(o) for o in opens}
        if not given <= set(top.opens) or len(set(top.opens) - given - {0, top.full}) > 0:
            raise UsageError("open sets do not form a topology")
        return space

    @classmethod
    def discrete(cls, n: int) -> "FiniteTopoSpace":
        return cls(tuple(range(n)), FiniteTopology(tuple(range(n)), tuple(range(1 << n))))

    @classmethod
    def indiscrete(cls, n: int) -> "FiniteTopoSpace":
        full = (1 << n) - 1
        return cls(tuple(range(n)), FiniteTopology(tuple(range(n)), tuple(sorted({0, full}))))

    @property
    def n(self) -> int:
        return len(self.labels)

    def mask(self, A: Iterable) -> int:
        pos = {l: i for i, l in enumerate(self.labels)}
        m = 0
        for a in A:
            m |= 1 << pos[a]
        return m

    def subset_label(self, m: int) -> tuple:
        return tuple(self.labels[i] for i in range(self.n) if m >> i & 1)

    @cached_property
    def closed(self) -> frozenset:
        return frozenset(self.topology.closed_masks)

    def cl(self, m: int) -> int:
        return self.topology._closure_mask(m)

    def is_t1(self) -> bool:
        return all((1 << i) in self.closed for i in range(self.n))


def sierpinski() -> FiniteTopoSpace:
    return FiniteTopoSpace.from_opens(("a", "b"), [[], ["b"], ["a", "b"]])


# ------------------------------------------------------- power-set system


def powerset_system(X: FiniteTopoSpace, budget: int = POWERSET_BUDGET) -> OperationSystem:
    if X.n > budget:
        raise BudgetExceeded("power-set carrier", budget, X.n)
    size = 1 << X.n
    carrier = Carrier(tuple(X.subset_label(m) for m in range(size)))
    idn = PartialOperation("Id", 1, size, tuple(range(size)))
    cl = PartialOperation("Cl", 1, size, tuple(X.cl(m) for m in range(size)))
    ops = (idn,) if cl == idn else (idn, cl)
    return OperationSystem(carrier, Tier.UNARY, ops, name="powerset")


def image_mask(p: Sequence[int], m: int) -> int:
    out = 0
    for i, y in enumerate(p):
        if m >> i & 1:
            out |= 1 << y
    return out


def induced_map(p: Sequence[int], X: FiniteTopoSpace, Y: FiniteTopoSpace | None = None) -> Morphism:
    """The map of power sets: closure of the image on closed sets, plain image otherwise."""
    Y = Y or X
    if len(p) != X.n or any(not 0 <= y < Y.n for y in p):
        raise UsageError("point map does not fit the spaces")
    vals = []
    for m in range(1 << X.n):
        img = image_mask(p, m)
        vals.append(Y.cl(img) if m in X.closed else img)
    return Morphism(tuple(range(1 << X.n)), tuple(vals))


def is_continuous(p: Sequence[int], X: FiniteTopoSpace, Y: FiniteTopoSpace | None = None) -> bool:
    Y = Y or X
    opens_x = set(X.topology.opens)
    for o in Y.topology.opens:
        pre = 0
        for i, y in enumerate(p):
            if o >> y & 1:
                pre |= 1 << i
        if pre not in opens_x:
            return False
    return True


def all_point_maps(X: FiniteTopoSpace, Y: FiniteTopoSpace | None = None, budget: int = MAP_BUDGET):
    Y = Y or X
    total = Y.n ** X.n
    if total > budget:
        raise BudgetExceeded("point-map scan", budget, total)
    return list(itertools.product(range(Y.n), repeat=X.n))


def compose_points(f: Sequence[int], g: Sequence[int]) -> tuple:
    """f ∘ g."""
    return tuple(f[g[i]] for i in range(len(g)))


# ----------------------------------------------------------------- reports


@dataclass(frozen=True)
class ContinuityReport:
    maps: int
    continuous: int
    star_continuous: int          # |C*(X)|
    stars: int                    # |F*(X)|
    equivalence: bool
    mismatches: tuple
    stars_in_end_equal_continuous: bool
    end_size: int | None          # None past the enumeration budgets


def continuity_equivalence_report(X: FiniteTopoSpace) -> ContinuityReport:
    system = powerset_system(X)
    mismatches = []
    cont_stars, all_stars, stars_in_end = set(), set(), set()
    n_cont = 0
    maps = all_point_maps(X)
    for p in maps:
        c = is_continuous(p, X)
        star = induced_map(p, X)
        t = is_t_morphism(system, star).ok
        all_stars.add(star)
        if c:
            n_cont += 1
            cont_stars.add(star)
        if t:
            stars_in_end.add(star)
        if c != t:
            mismatches.append(p)
    end_size = None
    if X.n <= END_POINTS_BUDGET:
        try:
            end_size = len(enumerate_morphisms(system, range(1 << X.n), Kind.ENDO))
        except BudgetExceeded:
            end_size = None
    return ContinuityReport(len(maps), n_cont, len(cont_stars), len(all_stars),
                            not mismatches, tuple(mismatches), stars_in_end == cont_stars, end_size)


@dataclass(frozen=True)
class InjectivityReport:
    maps: int
    injective: bool
    expected_injective: bool
    witness: tuple | None

    @property
    def violation(self) -> bool:
        return self.expected_injective and not self.injective


def star_injectivity_report(X: FiniteTopoSpace, Y: FiniteTopoSpace | None = None) -> InjectivityReport:
    same = Y is None or Y is X
    Y = Y or X
    seen: dict = {}
    witness = None
    maps = all_point_maps(X, Y)
    for p in maps:
        star = induced_map(p, X, Y).values
        if star in seen and witness is None:
            witness = (seen[star], p)
        seen.setdefault(star, p)
    return InjectivityReport(len(maps), witness is None, same or Y.is_t1(), witness)


def star_composition_check(f: Sequence[int], g: Sequence[int], X: FiniteTopoSpace) -> dict:
    lhs = induced_map(compose_points(f, g), X)
    rhs = induced_map(g, X).then(induced_map(f, X))
    hyp = is_continuous(f, X) and is_continuous(g, X) and len(set(g)) == len(g)
    return {"hypotheses": hyp, "equal": lhs == rhs}


@dataclass(frozen=True)
class CompositionReport:
    qualifying_pairs: int
    violations: tuple
    relaxed_failures: int


def star_composition_report(X: FiniteTopoSpace) -> CompositionReport:
    maps = all_point_maps(X)
    stars = {p: induced_map(p, X) for p in maps}
    cont = {p for p in maps if is_continuous(p, X)}
    qualifying, violations, relaxed = 0, [], 0
    for f in maps:
        for g in maps:
            equal = stars[compose_points(f, g)] == stars[g].then(stars[f])
            if f in cont and g in cont and len(set(g)) == len(g):
                qualifying += 1
                if not equal:
                    violations.append((f, g))
            elif not equal:
                relaxed += 1
    return CompositionReport(qualifying, tuple(violations), relaxed)


# ------------------------------------------------ homeomorphism correspondence


def homeomorphisms(X: FiniteTopoSpace) -> list[tuple]:
    out = []
    for p in itertools.permutations(range(X.n)):
        inv = [0] * X.n
        for i, y in enumerate(p):
            inv[y] = i
        if is_continuous(p, X) and is_continuous(tuple(inv), X):
            out.append(tuple(p))
    return out


@dataclass(frozen=True)
class Bijection:
    bijective: bool
    mutually_inverse: bool
    inclusion_reversing: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.mutually_inverse and self.inclusion_reversing


def check_correspondence(groups: list, sets: list, gamma, delta) -> Bijection:
    gs, ss = set(groups), set(sets)
    g_img = {H: gamma(H) for H in gs}
    d_img = {K: delta(K) for K in ss}
    bij = (all(v in ss for v in g_img.values()) and all(v in gs for v in d_img.values())
           and len(set(g_img.values())) == len(gs) == len(ss))
    inv = bij and all(d_img[g_img[H]] == H for H in gs) and all(g_img[d_img[K]] == K for K in ss)
    rev = all(g_img[b] <= g_img[a] for a in gs for b in gs if a <= b) and all(
        d_img[b] <= d_img[a] for a in ss for b in ss if a <= b)
    return Bijection(bij, inv, rev)


@dataclass(frozen=True)
class HomReport:
    hom: int
    hom_star_in_aut: bool
    hom_star_group: bool
    star_isomorphism: bool
    fixed_sets_agree: bool          # P^F = P^{F*} for every F ⊆ Hom
    int_families_agree: bool        # Int over Hom equals Int over Hom*
    restricted_isomorphisms: bool   # I_X maps each point-level Galois group onto its star version
    beta_bijective: bool
    star_correspondence: Bijection
    point_correspondence: Bijection
    int_size: int
    gs_size: int
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (self.hom_star_in_aut and self.hom_star_group and self.star_isomorphism
                and self.fixed_sets_agree and self.int_families_agree
                and self.restricted_isomorphisms and self.beta_bijective
                and self.star_correspondence.ok and self.point_correspondence.ok)


def _point_fixed(F: Iterable[tuple], size: int) -> frozenset:
    F = list(F)
    return frozenset(A for A in range(size) if all(image_mask(f, A) == A for f in F))


def _star_fixed(Fs: Iterable[Morphism], size: int) -> frozenset:
    Fs = list(Fs)
    return frozenset(A for A in range(size) if all(s(A) == A for s in Fs))


def hom_correspondence(X: FiniteTopoSpace, B: Iterable[int] = (), budget: int = END_POINTS_BUDGET) -> HomReport:
    if X.n > budget:
        raise BudgetExceeded("homeomorphism correspondence", budget, X.n)
    B = frozenset(B)
    size = 1 << X.n
    system = powerset_system(X)
    hom = homeomorphisms(X)
    star = {f: induced_map(f, X) for f in hom}
    stars = set(star.values())
    in_aut = all(s.is_bijection_onto(range(size)) and is_t_morphism(system, s) for s in stars)
    group = all(a.then(b) in stars for a in stars for b in stars) and all(
        s.inverse() in stars for s in stars)
    iso = len(stars) == len(hom) and all(
        star[compose_points(f, g)] == star[g].then(star[f]) for f in hom for g in hom)
    subsets_hom = [frozenset(c) for r in range(len(hom) + 1) for c in itertools.combinations(hom, r)]
    fixed_agree = all(_point_fixed(F, size) == _star_fixed((star[f] for f in F), size)
                      for F in subsets_hom)
    int_hom = {K for K in (_point_fixed(F, size) for F in subsets_hom) if B <= K}
    int_star = {K for K in (_star_fixed((star[f] for f in F), size) for F in subsets_hom) if B <= K}
    rest = sorted(set(range(size)) - B)
    ks = [B | frozenset(c) for r in range(len(rest) + 1) for c in itertools.combinations(rest, r)]

    def ggr_hom(K):
        return frozenset(f for f in hom if all(image_mask(f, A) == A for A in K))

    def ggr_star(K):
        return frozenset(s for s in stars if all(s(A) == A for A in K))

    restricted = True
    beta: dict = {}
    beta_ok = True
    for K in ks:
        G, Gs = ggr_hom(K), ggr_star(K)
        if frozenset(star[f] for f in G) != Gs:
            restricted = False
        if G in beta and beta[G] != Gs:
            beta_ok = False
        beta[G] = Gs
    beta_ok = beta_ok and len(set(beta.values())) == len(beta)
    gs_hom = list({ggr_hom(K) for K in ks})
    gs_star = list({ggr_star(K) for K in ks})
    star_corr = check_correspondence(gs_star, sorted(int_star, key=sorted),
                                     lambda H: _star_fixed(H, size), ggr_star)
    point_corr = check_correspondence(gs_hom, sorted(int_hom, key=sorted),
                                      lambda F: _point_fixed(F, size), ggr_hom)
    return HomReport(len(hom), in_aut, group, iso, fixed_agree, int_hom == int_star, restricted,
                     beta_ok, star_corr, point_corr, len(int_hom), len(gs_hom))

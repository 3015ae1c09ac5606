"""Command-line front end: ``ggt <subcommand> <instance-path> [options]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from enum import Enum

from . import topology as topo_mod
from .carrier import (INDETERMINATE, BudgetExceeded, Tier, UsageError, _Sentinel)
from .dynsys import (action_to_system, iterated_map_system, same_action_table, same_system,
                     system_to_action)
from .fixtures import FIXTURE_NAMES, SCHEMA_VERSION, all_fixtures
from .galois import (Ambient, all_substructures, fixed_set, galois_monoid, generated_subset,
                     gs_family, gs_family_brute, int_family_brute, lattice_report,
                     quasi_intermediates, verify_correspondence)
from .instance import Instance, ParseError, ReferenceError_, SchemaError, load_instance
from .morphism import Kind, Morphism, enumerate_morphisms
from .structure import (core_fixed_sets, is_normal_t_subset, restriction_homomorphism,
                        splitting_space, transcendental_report, verify_decomposition_chain,
                        verify_duality, verify_first_isomorphism, verify_transitivity)
from .topology import Context, equation_holds, from_subbasis, map_topology, \
    space_topology, theorem_conditions
from .topospace import (continuity_equivalence_report, hom_correspondence,
                        star_composition_report, star_injectivity_report)
from .tspace import find_generating_set, generate_space, is_quasi_space, is_t_space

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_VIOLATION = 3
EXIT_PARSE = 4
EXIT_SCHEMA = 5
EXIT_REFERENCE = 6

OK, INDET, VIOLATION = "ok", "indeterminate", "violation"
_RANK = {OK: 0, INDET: 1, VIOLATION: 2}


# ------------------------------------------------------------ serialization


def jsonable(x):
    if isinstance(x, _Sentinel):
        return repr(x)
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, Morphism):
        return list(x.values)
    if isinstance(x, dict):
        return {_key(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        items = [jsonable(v) for v in x]
        return sorted(items, key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def _key(k) -> str:
    if isinstance(k, str):
        return k
    return json.dumps(jsonable(k), sort_keys=True)


def emit_report(report: dict, fmt: str = "text") -> str:
    body = jsonable(dict(report))
    body["schema_version"] = SCHEMA_VERSION
    if fmt == "json":
        return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    lines: list[str] = []
    _text(body, 0, lines)
    return "\n".join(lines) + "\n"


def _text(x, depth: int, lines: list):
    pad = "  " * depth
    for k in sorted(x):
        v = x[k]
        if isinstance(v, dict) and v:
            lines.append(f"{pad}{k}:")
            _text(v, depth + 1, lines)
        else:
            lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}")


# ---------------------------------------------------------------- helpers


class Run:
    """Per-invocation state: the instance, budgets and the running verdict."""

    def __init__(self, inst: Instance, budget: int | None):
        self.inst = inst
        self.budget = budget
        self.verdict = OK
        self._amb = None

    def note(self, status: str):
        if _RANK[status] > _RANK[self.verdict]:
            self.verdict = status

    def check(self, ok) -> bool:
        if ok is INDETERMINATE:
            self.note(INDET)
        elif ok is False:
            self.note(VIOLATION)
        return ok

    @property
    def amb(self) -> Ambient:
        if self._amb is None:
            self._amb = Ambient(self.inst.system, self.inst.S, self.budget)
        return self._amb

    def labels(self, xs) -> list:
        return self.inst.labels_of(xs)

    def map_labels(self, m: Morphism) -> list:
        return [self.inst.labels[v] for v in m.values]


def _kinds(kind: str | None) -> list[Kind]:
    if kind is None:
        return [Kind.ENDO, Kind.AUTO]
    return [Kind.ENDO if kind in ("end", "monoid") else Kind.AUTO]


# -------------------------------------------------------------- sections


def sec_space(run: Run, args) -> dict:
    inst, system = run.inst, run.inst.system
    S = inst.S
    ts = is_t_space(system, S)
    run.check(True if ts is not INDETERMINATE else INDETERMINATE)
    out = {"space": run.labels(S), "quasi": is_quasi_space(system, S), "t_space": ts,
           "closure": run.labels(generate_space(system, S).elements)}
    gen = find_generating_set(system, S)
    out["generating_set"] = gen if gen is None or gen is INDETERMINATE else run.labels(gen)
    subs = {}
    for name, U in sorted(inst.subsets.items()):
        sp = generate_space(system, U).elements
        subs[name] = {"generated": run.labels(sp), "quasi": is_quasi_space(system, U),
                      "t_space": is_t_space(system, U)}
    if subs:
        out["subsets"] = subs
    return out


def sec_maps(run: Run, kind: Kind) -> dict:
    maps = enumerate_morphisms(run.inst.system, run.inst.S, kind, budget=run.budget)
    return {"kind": kind.value, "count": len(maps), "domain": run.labels(run.inst.S),
            "maps": [run.map_labels(m) for m in maps]}


def sec_galois(run: Run, args) -> dict:
    amb, B = run.amb, run.inst.B
    out = {"base": run.labels(B)}
    for k in _kinds(args.kind):
        rep = verify_correspondence(amb, B, k)
        run.check(rep.ok)
        maps = amb.maps(k)
        pos = {m: i for i, m in enumerate(maps)}
        sec = {
            "ok": rep.ok,
            "int_family": [run.labels(K) for K in rep.int_family],
            "galois_family": [sorted(pos[m] for m in H) for H in rep.gs_family],
            "gamma": [list(p) for p in rep.gamma],
            "delta": [list(p) for p in rep.delta],
            "bijective": rep.bijective,
            "mutually_inverse": rep.mutually_inverse,
            "inclusion_reversing": rep.inclusion_reversing,
            "failures": list(rep.failures),
            "maps": [run.map_labels(m) for m in maps],
        }
        if len(maps) <= 16:
            agree = (int_family_brute(amb, B, k) == list(rep.int_family)
                     and gs_family_brute(amb, B, k) == list(rep.gs_family))
            sec["oracle_agrees"] = agree
            run.check(agree)
        out[k.value] = sec
    return out


def sec_lattice(run: Run, args) -> dict:
    amb, inst = run.amb, run.inst
    rep = lattice_report(amb, inst.B)
    group = galois_monoid(amb, inst.B, Kind.AUTO).members
    n_int = len(quasi_intermediates(inst.system, inst.S, inst.B))
    n_sgr = len(all_substructures(amb, group, Kind.AUTO))
    out = {
        "intermediates": n_int,
        "subgroups_of_galois_group": n_sgr,
        "summary": f"|Int|={n_int}, |SGr|={n_sgr}",
        "sub_lattice_complete": rep.sub_lattice_complete,
        "int_meet_closed": rep.int_meet_closed,
        "int_join_closed": rep.int_join_closed,
        "galois_meet_closed": rep.gs_meet_closed,
        "galois_join_closed": rep.gs_join_closed,
        "witnesses": rep.witnesses,
    }
    if inst.morphism_sets:
        kind = Kind.AUTO if inst.morphism_kind == "group" else Kind.ENDO
        fam = set(gs_family(amb, inst.B, kind))
        named = {}
        for name, H in sorted(inst.morphism_sets.items()):
            named[name] = {"size": len(H), "in_galois_family": frozenset(H) in fam}
        joins = {}
        names = sorted(inst.morphism_sets)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                J = generated_subset(amb, inst.morphism_sets[a] | inst.morphism_sets[b], kind).members
                closure = galois_monoid(amb, fixed_set(amb.S, J), kind).members
                joins[f"{a}|{b}"] = {"size": len(J), "closure_size": len(closure),
                                     "in_galois_family": J in fam}
        out["named"] = {"kind": kind.value, "sets": named, "joins": joins}
    return out


def sec_topology(run: Run, args) -> dict:
    action = args.action or "theorem-conditions"
    ctx = Context(run.amb, run.inst.B)
    if action == "subbasis":
        sub = [sorted(U) for _, U in sorted(run.inst.subsets.items())]
        t = from_subbasis(sorted(run.inst.S), sub)
        return {"subbasis": {"opens": [run.labels(o) for o in t.open_sets()]}}
    if action == "equations":
        res = {}
        for eq in topo_mod.EQUATIONS:
            kind = Kind.AUTO if eq in ("5.3", "5.5") else Kind.ENDO
            t = space_topology(ctx, kind) if eq in ("5.1", "5.2", "5.3") else map_topology(ctx, kind)
            r = equation_holds(ctx, eq, t)
            res[eq] = {"ok": r.ok, "missing": r.missing, "extra": r.extra}
        return {"equations": res}
    if action != "theorem-conditions":
        raise UsageError(f"unknown topology action {action!r}")
    which = [args.which] if args.which else list(topo_mod.THEOREMS)
    out = {}
    for w in which:
        r = theorem_conditions(ctx, w, run.budget)
        if r.violation:
            run.note(VIOLATION)
        if any(v is INDETERMINATE for v in r.clauses.values()):
            run.note(INDET)
        out[w] = {"clauses": r.clauses, "consistent": r.consistent,
                  "sufficient_condition": r.sufficient_condition, "notes": list(r.notes),
                  "witnesses": r.witnesses}
    return {"theorem_conditions": out}


def sec_topospace(run: Run, args) -> dict:
    X = run.inst.topospace
    if X is None:
        raise UsageError("instance has no topology")
    actions = [args.action] if args.action else ["continuity", "injectivity", "composition",
                                                 "hom-correspondence"]
    out = {}
    for a in actions:
        if a == "continuity":
            r = continuity_equivalence_report(X)
            run.check(r.equivalence and r.stars_in_end_equal_continuous)
            out[a] = {"maps": r.maps, "continuous": r.continuous,
                      "star_continuous": r.star_continuous, "stars": r.stars,
                      "equivalence": r.equivalence, "mismatches": r.mismatches,
                      "stars_in_end_equal_continuous": r.stars_in_end_equal_continuous,
                      "end_size": r.end_size}
        elif a == "injectivity":
            r = star_injectivity_report(X)
            run.check(not r.violation)
            out[a] = {"maps": r.maps, "injective": r.injective,
                      "expected_injective": r.expected_injective, "witness": r.witness}
        elif a == "composition":
            r = star_composition_report(X)
            run.check(not r.violations)
            out[a] = {"qualifying_pairs": r.qualifying_pairs, "violations": r.violations,
                      "relaxed_failures": r.relaxed_failures}
        elif a == "hom-correspondence":
            r = hom_correspondence(X)
            run.check(r.ok)
            out[a] = {"ok": r.ok, "hom": r.hom, "int_size": r.int_size, "gs_size": r.gs_size,
                      "hom_star_in_aut": r.hom_star_in_aut, "star_isomorphism": r.star_isomorphism,
                      "fixed_sets_agree": r.fixed_sets_agree,
                      "int_families_agree": r.int_families_agree,
                      "restricted_isomorphisms": r.restricted_isomorphisms,
                      "beta_bijective": r.beta_bijective,
                      "star_correspondence": r.star_correspondence.ok,
                      "point_correspondence": r.point_correspondence.ok}
        else:
            raise UsageError(f"unknown topospace action {a!r}")
    return {"topospace": out}


def sec_dynsys(run: Run, args) -> dict:
    inst = run.inst
    if inst.action is not None:
        system, space = action_to_system(inst.action)
        back = system_to_action(system, space)
        rt_action = same_action_table(inst.action.faithful(), back)
        rt_system = same_system(action_to_system(back)[0], system)
    else:
        system = inst.system
        if system.tier is not Tier.UNARY or system.is_generated or not system.has_identity():
            return {"dynsys": {"applicable": False,
                               "reason": "needs an explicit unary system containing Id"}}
        space = generate_space(system, range(system.n))
        if space.elements != frozenset(range(system.n)):
            return {"dynsys": {"applicable": False, "reason": "carrier is not a space"}}
        back = system_to_action(system, space)
        rt_system = same_system(action_to_system(back)[0], system)
        rt_action = same_action_table(back.faithful(), system_to_action(
            action_to_system(back)[0]))
    amb = Ambient(system, space.elements, run.budget)
    corr = {k.value: verify_correspondence(amb, (), k).ok for k in (Kind.ENDO, Kind.AUTO)}
    iterated = {f.name: iterated_map_system(f).contained_in_end for f in system.members}
    for v in (rt_action, rt_system, *corr.values(), *iterated.values()):
        run.check(v)
    return {"dynsys": {"applicable": True, "round_trip_action": rt_action,
                       "round_trip_system": rt_system, "correspondence": corr,
                       "iterates_are_endomorphisms": iterated,
                       "monoid_size": len(back.elements)}}


def sec_structure(run: Run, args) -> dict:
    inst = run.inst
    system = inst.system
    unary = system.tier is Tier.UNARY and not system.is_generated
    wanted = [args.action] if args.action else ["duality", "transitivity", "normality",
                                                "restriction", "quotient", "splitting", "chain",
                                                "transcendental"]
    out = {}
    for a in wanted:
        if a == "duality":
            if not unary:
                out[a] = {"applicable": False, "reason": "unary explicit systems only"}
                continue
            res = {}
            for k in (Kind.ENDO, Kind.AUTO):
                r = verify_duality(system, inst.S, k)
                run.check(not r.violation)
                res[k.value] = {"contains_restriction": r.contains_restriction,
                                "equality": r.equality, "restrictions_equal": r.restrictions_equal,
                                "biconditional": r.biconditional, "hypotheses": r.hypotheses,
                                "sizes": r.sizes}
            out[a] = res
        elif a == "transitivity":
            res = {}
            for k in (Kind.ENDO, Kind.AUTO):
                r = verify_transitivity(system, inst.S, k)
                run.check(not r.violation)
                res[k.value] = {"core": run.labels(r.core), "fixed": run.labels(r.fixed),
                                "containment": r.containment, "applicable": r.applicable,
                                "hypotheses": r.hypotheses, "witness_count": len(r.witnesses),
                                "missing": r.missing, "core_equals_fixed": r.core_equals_fixed}
            out[a] = res
        elif a == "normality":
            res = {}
            for name, K in sorted(inst.subsets.items()):
                if not K <= inst.S:
                    continue
                c = is_normal_t_subset(system, K, inst.S)
                res[name] = {"normal": c.ok, "witness": c.witness}
            c_end, c_aut = core_fixed_sets(system, inst.S)
            out[a] = {"subsets": res, "core_end": run.labels(c_end), "core_aut": run.labels(c_aut)}
        elif a == "restriction":
            if inst.restriction is None:
                continue
            r = restriction_homomorphism(system, inst.S, inst.restriction["base"],
                                         inst.restriction["subset"])
            run.check(not r.violation)
            out[a] = {"stable": r.stable, "witness": r.witness, "k_is_space": r.k_is_space,
                      "homomorphism": r.homomorphism,
                      "kernel_is_fixing_group": r.kernel_is_fixing_group,
                      "kernel_normal": r.kernel_normal,
                      "quotient_onto_image": r.quotient_onto_image,
                      "image_is_full": r.image_is_full,
                      "quotient_isomorphic_to_target": r.quotient_isomorphic_to_target,
                      "sizes": r.sizes, "sufficient_conditions": r.sufficient_conditions}
        elif a == "quotient":
            if inst.phi is None:
                continue
            r = verify_first_isomorphism(system, inst.target, inst.phi, inst.theta)
            run.check(not r.violation)
            out[a] = {"applicable": r.applicable, "reason": r.reason,
                      "quotient_size": r.quotient_size, "bijective": r.bijective,
                      "theta_star_morphism": r.theta_star_morphism,
                      "theta_star_map_on_image": r.theta_star_map_on_image,
                      "isomorphism": r.isomorphism, "witness": r.witness}
        elif a == "splitting":
            if inst.solutions is None:
                continue
            r = splitting_space(system, inst.solutions, inst.B)
            out[a] = {"space": run.labels(r.space), "galois_defined": r.galois_defined,
                      "reason": r.reason, "group_size": len(r.group),
                      "monoid_size": len(r.monoid)}
        elif a == "chain":
            if not inst.chain:
                continue
            target = (inst.solutions or frozenset(), system)
            r = verify_decomposition_chain(inst.chain, target, inst.B)
            run.check(r.ok)
            out[a] = {"ok": r.ok, "inclusion": r.inclusion, "missing": run.labels(r.missing),
                      "bookkeeping": r.bookkeeping, "derivations": r.derivations,
                      "deviation": r.deviation,
                      "traces": [{_key(inst.labels[v]): list(t) for v, t in step.items()}
                                 for step in r.traces]}
        elif a == "transcendental":
            if inst.transcendental is None:
                continue
            r = transcendental_report(inst.transcendental["ops"], inst.transcendental["subset"])
            out[a] = {"transcendental": r.transcendental, "mode": r.mode,
                      "tuples_checked": r.tuples_checked, "collisions": r.collisions}
        else:
            raise UsageError(f"unknown structure action {a!r}")
    return {"structure": out}


def _guard(run: Run, fn, *a) -> dict:
    try:
        return fn(run, *a)
    except BudgetExceeded as e:
        run.note(INDET)
        return {"indeterminate": str(e)}


def sec_verify_all(run: Run, args) -> dict:
    inst = run.inst
    out = {"space": _guard(run, sec_space, args)}
    small = len(inst.S) <= (run.budget or 8)
    if small:
        out["end"] = {"count": len(run.amb.end)}
        out["aut"] = {"count": len(run.amb.aut)}
        sub = argparse.Namespace(**{**vars(args), "kind": None, "action": None, "which": None})
        out["galois"] = _guard(run, sec_galois, sub)
        out["lattice"] = _guard(run, sec_lattice, sub)
        out.update(_guard(run, sec_topology, sub))
        out.update(_guard(run, sec_structure, sub))
    else:
        run.note(INDET)
        out["skipped"] = "space exceeds the enumeration budget"
    if inst.topospace is not None:
        out.update(_guard(run, sec_topospace, argparse.Namespace(action=None)))
    out.update(_guard(run, sec_dynsys, args))
    return out


# ------------------------------------------------------------- dispatch


SUBCOMMANDS = ("space", "end", "aut", "galois", "lattice", "topology", "topospace", "dynsys",
               "structure", "verify-all", "fixtures", "replay")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ggt", description="Finite Galois-type correspondences "
                                "for operation systems.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("operands", nargs="*", metavar="[ACTION] PATH",
                   help="optional action for topology/topospace/structure, then the instance "
                        "file or built-in fixture name")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--which", default=None)
    p.add_argument("--kind", choices=("end", "aut", "monoid", "group"), default=None)
    p.add_argument("--action", default=None)
    return p


ACTIONS = {
    "topology": ("subbasis", "equations", "theorem-conditions"),
    "topospace": ("continuity", "hom-correspondence", "injectivity", "composition"),
    "structure": ("duality", "transitivity", "normality", "restriction", "quotient", "splitting",
                  "chain", "transcendental"),
}


def _split_operands(args):
    ops = list(args.operands)
    allowed = ACTIONS.get(args.subcommand)
    if allowed and len(ops) == 2:
        if ops[0] not in allowed:
            raise UsageError(f"unknown {args.subcommand} action {ops[0]!r}")
        if args.action is not None and args.action != ops[0]:
            raise UsageError("conflicting actions")
        args.action = ops.pop(0)
    if len(ops) > 1:
        raise UsageError("too many operands")
    args.path = ops[0] if ops else None
    if args.action is not None and allowed and args.action not in allowed:
        raise UsageError(f"unknown {args.subcommand} action {args.action!r}")


def _budget(args) -> int | None:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("GGT_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError("GGT_BUDGET must be an integer") from None
    return None


def run_command(argv: list[str], out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return _dispatch(args, argv, out)
    except ParseError as e:
        print(f"ggt: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except SchemaError as e:
        print(f"ggt: schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except ReferenceError_ as e:
        print(f"ggt: dangling reference: {e}", file=sys.stderr)
        return EXIT_REFERENCE
    except BudgetExceeded as e:
        print(f"ggt: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except UsageError as e:
        print(f"ggt: {e}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args, argv, out) -> int:
    _split_operands(args)
    if args.subcommand == "fixtures":
        return _fixtures(args, out)
    if args.subcommand == "replay":
        return _replay(args, out)
    if not args.path:
        raise UsageError(f"{args.subcommand} needs an instance path")
    budget = _budget(args)
    if budget is not None and budget < 1:
        raise UsageError("budget must be positive")
    inst = load_instance(args.path)
    run = Run(inst, budget)
    sc = args.subcommand
    if sc == "space":
        body = sec_space(run, args)
    elif sc in ("end", "aut"):
        body = sec_maps(run, Kind.ENDO if sc == "end" else Kind.AUTO)
    elif sc == "galois":
        body = sec_galois(run, args)
    elif sc == "lattice":
        body = sec_lattice(run, args)
    elif sc == "topology":
        body = sec_topology(run, args)
    elif sc == "topospace":
        body = sec_topospace(run, args)
    elif sc == "dynsys":
        body = sec_dynsys(run, args)
    elif sc == "structure":
        body = sec_structure(run, args)
    else:
        body = sec_verify_all(run, args)
    replay_argv = [sc, args.path] + _options(args)
    report = {"command": sc, "instance": inst.name, "verdict": run.verdict, "report": body,
              "replay": {"argv": replay_argv}}
    out.write(emit_report(report, args.format))
    return {OK: EXIT_OK, INDET: EXIT_BUDGET, VIOLATION: EXIT_VIOLATION}[run.verdict]


def _options(args) -> list[str]:
    opts = []
    for name in ("budget", "which", "kind", "action"):
        v = getattr(args, name)
        if v is not None:
            opts += [f"--{name}", str(v)]
    return opts


def _fixtures(args, out) -> int:
    docs = all_fixtures()
    if args.path:
        os.makedirs(args.path, exist_ok=True)
        for name, doc in docs.items():
            with open(os.path.join(args.path, f"{name}.json"), "w", encoding="utf-8") as fh:
                fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    out.write(emit_report({"fixtures": list(FIXTURE_NAMES),
                           "written_to": args.path}, args.format))
    return EXIT_OK


def _replay(args, out) -> int:
    """Re-run the command recorded in a JSON report and compare the output byte for byte."""
    if not args.path:
        raise UsageError("replay needs a report path")
    try:
        with open(args.path, encoding="utf-8") as fh:
            text = fh.read()
        rep = json.loads(text)
    except OSError as e:
        raise UsageError(str(e)) from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{args.path}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        argv = list(rep["replay"]["argv"])
    except (KeyError, TypeError):
        raise SchemaError("report has no replay record") from None
    import io
    buf = io.StringIO()
    code = run_command(argv + ["--format", "json"], buf)
    same = buf.getvalue() == text
    out.write(emit_report({"replayed": argv, "identical": same, "exit_code": code}, args.format))
    return code if same else EXIT_VIOLATION


def main(argv: list[str] | None = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

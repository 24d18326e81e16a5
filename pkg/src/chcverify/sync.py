"""The synchronization transformation.

Pairs of query atoms whose relations iterate the same list source in
lockstep (one base clause, one step clause consuming exactly one element)
are merged into a product relation. The product's step clause conjoins
both step bodies, fuses the two recursive atoms into one, and implants the
per-step equality of the heads drawn from the shared source. Two query
atoms of the same numeric recursive relation form a self-product the same
way, implanting equality of the decremented induction arguments instead.

The result is a new system to be solved instead of the original one; the
input system is never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import terms as T
from .encoder import ChcSystem, Clause, ClauseAtom, ClauseMeta, RelationSymbol


@dataclass
class RelStructure:
    base: Clause
    step: Clause
    self_idx: int            # index of the recursive atom in step.atoms
    in_vars: tuple           # formal input names, in head order
    guard_vars: frozenset    # input names read by branch guards


@dataclass
class SyncCandidate:
    i: int
    j: int
    kind: str                # 'list' | 'numeric'
    shared_source: str | None = None
    induction: tuple = ()    # input names (numeric candidates)
    note: str = ""


def relation_structure(sys: ChcSystem, rel: str) -> RelStructure | None:
    """Base/step decomposition; None when the shape does not fit."""
    clauses = sys.clauses_of(rel)
    if len(clauses) != 2:
        return None
    base = step = None
    self_idx = None
    for c in clauses:
        own = [k for k, a in enumerate(c.atoms) if a.rel == rel]
        if not own:
            base = c
        elif len(own) == 1:
            step = c
            self_idx = own[0]
        else:
            return None
    if base is None or step is None:
        return None
    in_vars = step.meta.formal_ins
    rsym = sys.relations[rel]
    guard_vars = set()
    for clause in (base, step):
        outish = _outish_vars(sys, clause, rsym)
        for f in T.conjuncts(clause.constraint):
            if not (T.free_vars(f) & outish):
                guard_vars |= T.free_vars(f) & set(in_vars)
    return RelStructure(base, step, self_idx, in_vars, frozenset(guard_vars))


def _outish_vars(sys: ChcSystem, clause: Clause, rsym: RelationSymbol) -> set:
    """Variables bound by outputs: head outs plus every atom's output args."""
    out = {clause.head_args[i] for i in rsym.out_positions} if clause.head_rel else set()
    for a in clause.atoms:
        asym = sys.relations[a.rel]
        for i in asym.out_positions:
            out |= T.free_vars(a.args[i])
    return out


def find_candidates(sys: ChcSystem) -> tuple[list, list]:
    """Valid candidates among query-clause atom pairs, plus skip warnings."""
    queries = sys.queries()
    if len(queries) != 1:
        return [], []
    atoms = queries[0].atoms
    candidates = []
    warnings = []
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            cand, warn = _pair_candidate(sys, atoms, i, j)
            if cand is not None:
                candidates.append(cand)
            if warn:
                warnings.append(warn)
    return candidates, warnings


def _pair_candidate(sys, atoms, i, j):
    a, b = atoms[i], atoms[j]
    shared = [
        (pa, pb, sida)
        for (pa, sida, lena) in a.list_bindings
        for (pb, sidb, lenb) in b.list_bindings
        if sida == sidb and lena == lenb
    ]
    if shared:
        pa, pb, sid = shared[0]
        ok, warn = _check_list_pair(sys, a, b, sid)
        if ok:
            return SyncCandidate(i, j, "list", shared_source=sid,
                                 note=f"{a.rel} |x| {b.rel} on {sid}"), None
        return None, warn
    if a.rel == b.rel:
        return _numeric_candidate(sys, atoms, i, j)
    return None, None


def _check_list_pair(sys, a, b, sid):
    for atom in (a, b):
        s = relation_structure(sys, atom.rel)
        if s is None:
            return False, (f"sync skipped: {atom.rel} lacks a base/step "
                           "decomposition")
        sites = set(s.step.meta.consumed)
        if not sites:
            return False, f"sync skipped: {atom.rel} does not consume a list"
        if not sites <= set(s.base.meta.base_sites):
            return False, (f"sync skipped: base clause of {atom.rel} does not "
                           "empty every consumed list")
        # every consumed site must be bound to the shared source, at the
        # same position (equal length terms checked by the caller pairing)
        bound = {p: (s2, l2) for (p, s2, l2) in atom.list_bindings}
        for site in sites:
            if site not in bound or bound[site][0] != sid:
                return False, (f"sync skipped: {atom.rel} consumes a list "
                               "other than the shared source")
        lens = {bound[site][1] for site in sites}
        if len(lens) != 1:
            return False, (f"sync skipped: {atom.rel} consumes the source at "
                           "different positions")
        site_len_vars = {f"{site}.len" for site in sites}
        if not s.guard_vars <= site_len_vars:
            return False, (f"sync skipped: {atom.rel} guards on arguments "
                           "beyond the list length")
    return True, None


def _numeric_candidate(sys, atoms, i, j):
    a, b = atoms[i], atoms[j]
    s = relation_structure(sys, a.rel)
    if s is None:
        return None, None
    if s.step.meta.consumed:
        return None, None          # list iterators pair through their source
    idx = {v: k for k, v in enumerate(s.in_vars)}
    self_atom = s.step.atoms[s.self_idx]
    changed = {v for v in s.in_vars
               if self_atom.args[idx[v]] not in (T.ivar(v), T.bvar(v))}
    induction = tuple(v for v in s.in_vars if v in (changed & s.guard_vars))
    if not induction:
        return None, (f"sync skipped: {a.rel} has no decremented induction "
                      "argument read by its guards")
    for v in s.guard_vars:
        if a.args[idx[v]] != b.args[idx[v]]:
            return None, (f"sync skipped: query atoms of {a.rel} disagree on "
                          f"guard argument {v}; lockstep alignment unsound")
    return SyncCandidate(i, j, "numeric", induction=induction,
                         note=f"{a.rel} |x| {a.rel} lockstep on "
                              f"{', '.join(induction)}"), None


# ---------------------------------------------------------------------------
# product construction


def _clause_vars(sys, clause: Clause) -> set:
    vs = set(clause.head_args)
    vs |= T.free_vars(clause.constraint)
    for a in clause.atoms:
        for arg in a.args:
            vs |= T.free_vars(arg)
        for _, _, length in a.list_bindings:
            vs |= T.free_vars(length)
    for hd in clause.meta.consumed.values():
        vs.add(hd)
    return vs


def _rename_clause(sys, clause: Clause, tag: str) -> Clause:
    names = sorted(_clause_vars(sys, clause))
    bools = T.bool_vars(clause.constraint)
    if clause.head_rel is not None:
        rsym = sys.relations[clause.head_rel]
        for pos, v in enumerate(clause.head_args):
            if rsym.arg_sorts[pos] == "bool":
                bools.add(v)
    for a in clause.atoms:
        for arg in a.args:
            bools |= T.bool_vars(arg)
    mapping = {}
    for v in names:
        mapping[v] = T.bvar(f"{tag}.{v}") if v in bools else T.ivar(f"{tag}.{v}")
    rename = {v: f"{tag}.{v}" for v in names}
    atoms = [
        ClauseAtom(a.rel,
                   tuple(T.subst(x, mapping) for x in a.args),
                   tuple((f"{tag}.{p}", sid, T.subst(length, mapping))
                         for p, sid, length in a.list_bindings))
        for a in clause.atoms
    ]
    meta = ClauseMeta(
        kind=clause.meta.kind,
        rel=clause.meta.rel,
        formal_ins=tuple(rename[v] for v in clause.meta.formal_ins),
        consumed={f"{tag}.{p}": rename[hd] for p, hd in clause.meta.consumed.items()},
        base_sites=frozenset(f"{tag}.{p}" for p in clause.meta.base_sites),
    )
    return Clause(clause.head_rel,
                  tuple(rename[v] for v in clause.head_args),
                  T.subst(clause.constraint, mapping), atoms, meta)


def synchronize(sys: ChcSystem, cand: SyncCandidate) -> ChcSystem:
    """Replace the candidate pair with a product relation; new system."""
    query = sys.queries()[0]
    a, b = query.atoms[cand.i], query.atoms[cand.j]
    sa, sb = relation_structure(sys, a.rel), relation_structure(sys, b.rel)
    rsa, rsb = sys.relations[a.rel], sys.relations[b.rel]
    n = sum(1 for r in sys.relations if r.startswith("sync%"))
    prod = f"sync%{n}"

    base_l = _rename_clause(sys, sa.base, "L")
    base_r = _rename_clause(sys, sb.base, "R")
    step_l = _rename_clause(sys, sa.step, "L")
    step_r = _rename_clause(sys, sb.step, "R")

    prod_sym = RelationSymbol(
        name=prod,
        arg_sorts=rsa.arg_sorts + rsb.arg_sorts,
        out_positions=tuple(rsa.out_positions)
        + tuple(len(rsa.arg_sorts) + p for p in rsb.out_positions),
        origin=("sync", a.rel, b.rel),
    )

    base = Clause(
        prod, base_l.head_args + base_r.head_args,
        T.conj(base_l.constraint, base_r.constraint),
        list(base_l.atoms) + list(base_r.atoms),
        ClauseMeta(kind="def", rel=prod,
                   formal_ins=base_l.meta.formal_ins + base_r.meta.formal_ins,
                   base_sites=base_l.meta.base_sites | base_r.meta.base_sites),
    )

    self_l = step_l.atoms[sa.self_idx]
    self_r = step_r.atoms[sb.self_idx]
    fused = ClauseAtom(prod, self_l.args + self_r.args,
                       self_l.list_bindings + self_r.list_bindings)
    others = [x for k, x in enumerate(step_l.atoms) if k != sa.self_idx] \
        + [x for k, x in enumerate(step_r.atoms) if k != sb.self_idx]
    if cand.kind == "list":
        implant = [T.eq(T.ivar(step_l.meta.consumed[site_l]),
                        T.ivar(step_r.meta.consumed[site_r]))
                   for site_l in sorted(step_l.meta.consumed)
                   for site_r in sorted(step_r.meta.consumed)]
        implant = implant[:1]   # one shared source, equate its two heads
    else:
        idx = {v: k for k, v in enumerate(sa.in_vars)}
        implant = [T.eq(self_l.args[idx[v]], self_r.args[idx[v]])
                   for v in cand.induction]
    step = Clause(
        prod, step_l.head_args + step_r.head_args,
        T.conj(step_l.constraint, step_r.constraint, *implant),
        [fused] + others,
        ClauseMeta(kind="def", rel=prod,
                   formal_ins=step_l.meta.formal_ins + step_r.meta.formal_ins,
                   consumed={**step_l.meta.consumed, **step_r.meta.consumed}),
    )

    prod_atom = ClauseAtom(prod, a.args + b.args,
                           tuple((f"L.{p}", sid, length) for p, sid, length in a.list_bindings)
                           + tuple((f"R.{p}", sid, length) for p, sid, length in b.list_bindings))
    new_atoms = []
    for k, atom in enumerate(query.atoms):
        if k == cand.i:
            new_atoms.append(prod_atom)
        elif k != cand.j:
            new_atoms.append(atom)
    new_query = Clause(None, (), query.constraint, new_atoms, ClauseMeta(kind="query"))

    relations = dict(sys.relations)
    relations[prod] = prod_sym
    clauses = [c for c in sys.clauses if c.head_rel is not None] + [base, step, new_query]
    out = ChcSystem(relations=relations, clauses=clauses, sources=dict(sys.sources),
                    consumers={k: list(v) for k, v in sys.consumers.items()},
                    warnings=list(sys.warnings))
    _prune_unreachable(out)
    return out


def _prune_unreachable(sys: ChcSystem):
    """Keep only relations reachable from the query clauses."""
    reachable = set()
    work = [a.rel for q in sys.queries() for a in q.atoms]
    while work:
        rel = work.pop()
        if rel in reachable:
            continue
        reachable.add(rel)
        for c in sys.clauses_of(rel):
            work.extend(a.rel for a in c.atoms)
    sys.clauses = [c for c in sys.clauses
                   if c.head_rel is None or c.head_rel in reachable]
    sys.relations = {k: v for k, v in sys.relations.items() if k in reachable}


def apply_all(sys: ChcSystem) -> ChcSystem:
    """Fold synchronize over candidates, leftmost pair first, to a fixpoint."""
    seen_warnings = []
    applied = []
    while True:
        candidates, warnings = find_candidates(sys)
        for w in warnings:
            if w not in seen_warnings:
                seen_warnings.append(w)
        if not candidates:
            break
        cand = candidates[0]
        sys = synchronize(sys, cand)
        applied.append(cand.note)
    sys = replace_warnings(sys, seen_warnings, applied)
    return sys


def replace_warnings(sys: ChcSystem, warnings, applied) -> ChcSystem:
    sys.warnings = list(dict.fromkeys(list(sys.warnings) + warnings))
    sys.sync_applied = applied
    return sys

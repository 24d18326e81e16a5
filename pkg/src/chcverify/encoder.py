"""From branch summaries to a constrained Horn clause system.

One uninterpreted relation per function instance, where an instance is a
function together with a concrete assignment of its function-typed
parameters, the element-transform chains of its list parameters, and the
sorts of its value parameters. Distinct assignments yield distinct
relations; repeated identical assignments are memoized. Globals read or
written by an instance are threaded through its signature as extra
arguments; unused global state stays out of the encoding.

In-body assertions propagate up the call graph as guarded obligations.
Inside recursive instances (and wherever an obligation mentions internal
call outputs) they are carried by an extra boolean `ok` output instead,
and the query conjoins every collected obligation with the main
assertions.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from . import terms as T
from .frontend import (FnArg, FunctionDef, If, ListOp, Lit, Param, Prim,
                       Program, Ref, Let, Begin, Call, Assert, Assume, SetGlobal)
from .lists import SymListSource, SymListValue
from .symexec import (BranchSummary, CallAtom, EncodeError, FnValue, MainResult,
                      OpApply, execute_main, summarize_instance)


@dataclass
class InstanceInfo:
    key: tuple
    fname: str
    rel: str
    assignment: dict          # fn-param unique name -> function name
    value_sorts: tuple        # per value param: 'int' | 'bool' | 'list'
    chains: dict              # list-param name -> transform chain
    globals_in: tuple
    globals_out: tuple
    ret_sort: str
    has_ok: bool = False
    propagated: tuple = ()    # (guard, formula) over formal inputs


@dataclass
class RelationSymbol:
    name: str
    arg_sorts: tuple          # 'int' | 'bool' per position
    out_positions: tuple      # indices of output arguments
    origin: tuple             # (fname, assignment items, chains items)

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass
class ClauseAtom:
    rel: str
    args: tuple               # Terms/Formulas; inputs then outputs
    list_bindings: tuple = () # (callee param name, source id, length Term)


@dataclass
class ClauseMeta:
    kind: str                 # 'def' | 'query'
    rel: str | None = None
    formal_ins: tuple = ()
    consumed: dict = field(default_factory=dict)   # list param -> hd var
    base_sites: frozenset = frozenset()


@dataclass
class Clause:
    head_rel: str | None      # None encodes a false head (the query)
    head_args: tuple          # var names
    constraint: T.Formula
    atoms: list
    meta: ClauseMeta


@dataclass
class ChcSystem:
    relations: dict
    clauses: list
    sources: dict             # source id -> (length var name or None, declared)
    consumers: dict           # source id -> [(relation, param site)]
    warnings: list = field(default_factory=list)
    sync_applied: list = field(default_factory=list)

    def clauses_of(self, rel: str) -> list:
        return [c for c in self.clauses if c.head_rel == rel]

    def queries(self) -> list:
        return [c for c in self.clauses if c.head_rel is None]


class EncodeContext:
    def __init__(self, program: Program):
        self.program = program
        self.names = T.NameGen()
        self.instances: dict[tuple, InstanceInfo] = {}
        self.summaries: dict[tuple, list] = {}
        self.order: list[tuple] = []
        self.synth_defs: dict[str, FunctionDef] = {}
        self.sources: dict[str, tuple] = {}
        self.consumers: dict[str, list] = {}
        self.head_registry: dict[str, str] = {}
        self.rel_names: set[str] = set()
        self._ret_sort_memo: dict = {}

    # -- definitions ---------------------------------------------------------

    def resolve_def(self, name: str) -> FunctionDef:
        if name in self.program.functions:
            return self.program.functions[name]
        if name in self.synth_defs:
            return self.synth_defs[name]
        raise EncodeError(f"internal: unknown function '{name}'")

    def fold_def(self, op: str) -> str:
        name = f"%{op}"
        if name not in self.synth_defs:
            pop = Param(f"{op}.op", "op", True)
            pacc = Param(f"{op}.acc", "acc", False)
            plst = Param(f"{op}.lst", "lst", False)
            body = If(
                Prim("=", (ListOp("length", (Ref(plst.name),)), Lit(0))),
                Ref(pacc.name),
                OpApply(pop.name, (
                    ListOp("head", (Ref(plst.name),)),
                    ListOp(op, (FnArg(pop.name, "param"), Ref(pacc.name),
                                ListOp("tail", (Ref(plst.name),)))),
                )))
            self.synth_defs[name] = FunctionDef(name, (pop, pacc, plst), body)
        return name

    # -- sources ---------------------------------------------------------------

    def declare_source(self, source: SymListSource):
        self.sources[source.id] = (f"{source.id}.len" if source.declared else None,
                                   source.declared)

    def fresh_source(self, length: T.Term) -> SymListSource:
        sid = self.names.fresh("app")
        src = SymListSource(sid, length)
        self.declare_source(src)
        return src

    def register_consumer(self, source_id: str, rel: str, site: str):
        entries = self.consumers.setdefault(source_id, [])
        if (rel, site) not in entries:
            entries.append((rel, site))

    # -- instantiation ---------------------------------------------------------

    def instantiate_call(self, callee: str, arg_values: list) -> InstanceInfo:
        fd = self.resolve_def(callee)
        if len(arg_values) != len(fd.params):
            raise EncodeError(f"'{callee}' expects {len(fd.params)} arguments, "
                              f"got {len(arg_values)}")
        assignment: dict[str, str] = {}
        sorts: list[str] = []
        chains: dict[str, tuple] = {}
        for p, v in zip(fd.params, arg_values):
            if p.is_fn:
                if not isinstance(v, FnValue):
                    raise EncodeError(
                        f"argument for function parameter '{p.surface}' of "
                        f"'{callee}' is not a function")
                target = self.resolve_def(v.name)
                if target.fn_params:
                    raise EncodeError(
                        f"function '{v.name}' passed to '{callee}' has "
                        "unassigned function parameters")
                assignment[p.name] = v.name
            elif isinstance(v, SymListValue):
                sorts.append("list")
                chains[p.name] = v.chain
            elif isinstance(v, T.Formula):
                sorts.append("bool")
            elif isinstance(v, T.Term):
                sorts.append("int")
            else:
                raise EncodeError(f"bad argument to '{callee}'")
        key = (callee,
               tuple(sorted(assignment.items())),
               tuple(sorts),
               tuple(sorted(chains.items())))
        if key in self.instances:
            return self.instances[key]

        reads, writes = self._instance_global_sets(callee, assignment, chains)
        inst = InstanceInfo(
            key=key,
            fname=callee,
            rel=self._rel_name(callee, key),
            assignment=assignment,
            value_sorts=tuple(sorts),
            chains=chains,
            globals_in=tuple(sorted(reads | writes)),
            globals_out=tuple(sorted(writes)),
            ret_sort=self._infer_ret_sort(callee, assignment, tuple(sorts)) or "int",
        )
        self.instances[key] = inst
        self.order.append(key)
        self.summaries[key] = summarize_instance(self, inst)
        return inst

    def _rel_name(self, fname: str, key) -> str:
        display = fname.lstrip("%").replace("%", "")
        digest = hashlib.sha1(repr(key).encode()).hexdigest()
        for n in (6, 10, 20):
            name = f"{display}#{digest[:n]}"
            if name not in self.rel_names:
                self.rel_names.add(name)
                return name
        raise EncodeError("internal: relation name collision")

    def _instance_global_sets(self, callee, assignment, chains):
        reads: set[str] = set()
        writes: set[str] = set()
        fd = self.resolve_def(callee)
        if callee in self.program.functions:
            reads |= fd.reads
            writes |= fd.writes
        names = list(assignment.values())
        for chain in chains.values():
            names.extend(chain)
        for name in names:
            sub = self.resolve_def(name)
            if name in self.program.functions:
                reads |= sub.reads
                writes |= sub.writes
        return reads, writes

    # -- return sort inference ---------------------------------------------------

    def _infer_ret_sort(self, fname, assignment, value_sorts) -> str | None:
        memo_key = (fname, tuple(sorted(assignment.items())), value_sorts)
        if memo_key in self._ret_sort_memo:
            return self._ret_sort_memo[memo_key]
        self._ret_sort_memo[memo_key] = None  # in-progress: recursion yields None
        fd = self.resolve_def(fname)
        env = {}
        vi = 0
        for p in fd.params:
            if p.is_fn:
                env[p.name] = ("fn", assignment.get(p.name))
            else:
                env[p.name] = ("sort", value_sorts[vi] if vi < len(value_sorts) else "int")
                vi += 1
        sort = self._expr_sort(fd.body, env, assignment)
        self._ret_sort_memo[memo_key] = sort
        return sort

    def _expr_sort(self, e, env, assignment) -> str | None:
        if isinstance(e, Lit):
            return "bool" if isinstance(e.value, bool) else "int"
        if isinstance(e, Ref):
            hit = env.get(e.name)
            if hit is not None:
                return hit[1] if hit[0] == "sort" else None
            if e.name in self.program.globals:
                return "int"
            if e.name in self.program.symconsts:
                return {"list": "list"}.get(self.program.symconsts[e.name],
                                            self.program.symconsts[e.name])
            return None
        if isinstance(e, Prim):
            return "int" if e.op in ("+", "-", "neg", "*") else "bool"
        if isinstance(e, If):
            return self._expr_sort(e.then, env, assignment) \
                or self._expr_sort(e.other, env, assignment)
        if isinstance(e, Let):
            env2 = dict(env)
            env2[e.name] = ("sort", self._expr_sort(e.value, env, assignment))
            return self._expr_sort(e.body, env2, assignment)
        if isinstance(e, Begin):
            return self._expr_sort(e.exprs[-1], env, assignment)
        if isinstance(e, (Assert, Assume)):
            return "bool"
        if isinstance(e, SetGlobal):
            return "int"
        if isinstance(e, (Call, OpApply)):
            if isinstance(e, OpApply):
                target = env.get(e.fn, (None, None))[1]
            elif e.callee_kind == "param":
                target = env.get(e.callee, (None, None))[1]
            else:
                target = e.callee
            if target is None:
                return None
            callee_fd = self.resolve_def(target)
            sub_assign = {}
            sub_sorts = []
            args = [a for a in e.args]
            for p, a in zip(callee_fd.params, args):
                if p.is_fn:
                    if isinstance(a, FnArg):
                        sub_assign[p.name] = (a.name if a.kind == "def"
                                              else env.get(a.name, (None, None))[1])
                else:
                    sub_sorts.append(self._expr_sort(a, env, assignment) or "int")
            if any(v is None for v in sub_assign.values()):
                return None
            return self._infer_ret_sort(target, sub_assign, tuple(sub_sorts))
        if isinstance(e, ListOp):
            if e.op in ("length", "head"):
                return "int"
            if e.op in ("foldl", "foldr"):
                return self._expr_sort(e.args[1], env, assignment)
            return "list"
        if isinstance(e, FnArg):
            return None
        return None


# ---------------------------------------------------------------------------
# obligation propagation


def _formal_in_vars(inst: InstanceInfo, fd: FunctionDef) -> list:
    names = []
    vi = 0
    for p in fd.params:
        if p.is_fn:
            continue
        names.append(f"{p.name}.len" if inst.value_sorts[vi] == "list" else p.name)
        vi += 1
    names.extend(f"{g}.in" for g in inst.globals_in)
    return names


def _tarjan_sccs(nodes, edges):
    index = {}
    low = {}
    stack = []
    on_stack = set()
    sccs = []
    counter = [0]

    def strongconnect(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in edges.get(v, ()):
            if w not in index:
                strongconnect(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            scc = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                scc.append(w)
                if w == v:
                    break
            sccs.append(scc)

    for v in nodes:
        if v not in index:
            strongconnect(v)
    return sccs   # callees appear before callers


def _resolve_obligations(ctx: EncodeContext, main: MainResult) -> list:
    """Assign ok outputs and per-summary resolved obligation lists.

    Works bottom-up over the instance call graph: non-recursive callees
    propagate textually when their obligations mention only formal inputs,
    recursive cycles (and inexpressible cases) carry an ok output instead.
    Returns the main context's resolved obligations.
    """
    edges = {}
    for key, summaries in ctx.summaries.items():
        edges[key] = {a.callee_key for s in summaries for a in s.atoms}
    sccs = _tarjan_sccs(list(ctx.instances.keys()), edges)
    scc_of = {}
    for i, scc in enumerate(sccs):
        for k in scc:
            scc_of[k] = i

    def resolve_summary(own_scc, s: BranchSummary) -> list:
        out = list(s.obligations)
        for atom in s.atoms:
            callee = ctx.instances[atom.callee_key]
            in_cycle = own_scc is not None and scc_of[atom.callee_key] == own_scc
            if callee.has_ok or in_cycle:
                if atom.ok_var is None:
                    atom.ok_var = ctx.names.fresh("ok")
                out.append((atom.guard, T.bvar(atom.ok_var)))
            elif callee.propagated:
                formals = _formal_in_vars(callee, ctx.resolve_def(callee.fname))
                mapping = dict(zip(formals, atom.inputs))
                out.extend((T.conj(atom.guard, T.subst(g, mapping)),
                            T.subst(f, mapping))
                           for g, f in callee.propagated)
        return out

    for scc in sccs:
        recursive = len(scc) > 1 or scc[0] in edges.get(scc[0], set())
        if recursive:
            has_any = any(s.obligations for key in scc for s in ctx.summaries[key])
            if not has_any:
                for key in scc:
                    for s in ctx.summaries[key]:
                        for atom in s.atoms:
                            callee = ctx.instances[atom.callee_key]
                            if scc_of[atom.callee_key] != scc_of[key] and (
                                    callee.has_ok or callee.propagated):
                                has_any = True
            for key in scc:
                ctx.instances[key].has_ok = has_any
            for key in scc:
                for s in ctx.summaries[key]:
                    s.resolved = resolve_summary(scc_of[key], s) if has_any else []
        else:
            key = scc[0]
            inst = ctx.instances[key]
            resolved_all = []
            for s in ctx.summaries[key]:
                s.resolved = resolve_summary(None, s)
                resolved_all.extend(s.resolved)
            if not resolved_all:
                continue
            formals = set(_formal_in_vars(inst, ctx.resolve_def(inst.fname)))
            expressible = all(
                (T.free_vars(g) | T.free_vars(f)) <= formals
                for g, f in resolved_all)
            if expressible:
                inst.propagated = tuple(resolved_all)
            else:
                inst.has_ok = True

    return resolve_summary(None, main.summary)


# ---------------------------------------------------------------------------
# clause construction


def _instance_signature(ctx, inst: InstanceInfo):
    fd = ctx.resolve_def(inst.fname)
    in_vars, in_sorts = [], []
    vi = 0
    for p in fd.params:
        if p.is_fn:
            continue
        sort = inst.value_sorts[vi]
        vi += 1
        if sort == "list":
            in_vars.append(f"{p.name}.len")
            in_sorts.append("int")
        else:
            in_vars.append(p.name)
            in_sorts.append(sort)
    for g in inst.globals_in:
        in_vars.append(f"{g}.in")
        in_sorts.append("int")
    out_vars, out_sorts = ["ret.out"], [inst.ret_sort]
    for g in inst.globals_out:
        out_vars.append(f"{g}.out")
        out_sorts.append("int")
    if inst.has_ok:
        out_vars.append("ok.out")
        out_sorts.append("bool")
    return in_vars, in_sorts, out_vars, out_sorts


def _atom_to_clause_atom(ctx, atom: CallAtom) -> ClauseAtom:
    callee = ctx.instances[atom.callee_key]
    args = list(atom.inputs)
    args.append(T.bvar(atom.ret_var) if atom.ret_sort == "bool" else T.ivar(atom.ret_var))
    args.extend(T.ivar(v) for _, v in atom.glob_outs)
    if callee.has_ok:
        if atom.ok_var is None:
            atom.ok_var = ctx.names.fresh("ok")
        args.append(T.bvar(atom.ok_var))
    return ClauseAtom(callee.rel, tuple(args), atom.list_bindings)


def _build_clause(ctx, inst: InstanceInfo, summary: BranchSummary) -> Clause:
    in_vars, _, out_vars, _ = _instance_signature(ctx, inst)
    parts = list(summary.phi)
    if inst.ret_sort == "bool":
        if not isinstance(summary.value, T.Formula):
            raise EncodeError(f"'{inst.fname}' must return a boolean on every path")
        parts.append(T.iff(T.bvar("ret.out"), summary.value))
    else:
        if not isinstance(summary.value, T.Term):
            raise EncodeError(f"'{inst.fname}' must return an integer on every "
                              "path (list-valued functions are not supported)")
        parts.append(T.eq(T.ivar("ret.out"), summary.value))
    for g in inst.globals_out:
        parts.append(T.eq(T.ivar(f"{g}.out"), summary.globals_out[g]))
    if inst.has_ok:
        ok_parts = [T.implies(g, f) for g, f in (summary.resolved or ())]
        parts.append(T.iff(T.bvar("ok.out"), T.conj(*ok_parts)))
    atoms = [_atom_to_clause_atom(ctx, a) for a in summary.atoms]

    # step/base structure relative to each list parameter
    consumed = {}
    base_sites = set()
    fd = ctx.resolve_def(inst.fname)
    vi = 0
    for p in fd.params:
        if p.is_fn:
            continue
        sort = inst.value_sorts[vi]
        vi += 1
        if sort != "list":
            continue
        sid = f"param:{inst.rel}:{p.name}"
        len_var = f"{p.name}.len"
        for raw, ca in zip(summary.atoms, atoms):
            if raw.callee_key != inst.key:
                continue
            for (cp, bsid, blen) in ca.list_bindings:
                if bsid == sid and _is_decrement(blen, len_var):
                    hd = summary.hd_names.get((sid, T.ivar(len_var)))
                    consumed[p.name] = hd if hd else ctx.names.fresh("hd")
        if _phi_forces_zero(summary.phi, len_var):
            base_sites.add(p.name)
    meta = ClauseMeta(kind="def", rel=inst.rel,
                      formal_ins=tuple(in_vars),
                      consumed=consumed, base_sites=frozenset(base_sites))
    return Clause(inst.rel, tuple(in_vars + out_vars), T.conj(*parts), atoms, meta)


def _is_decrement(length: T.Term, len_var: str) -> bool:
    try:
        coeffs, const = T.linearize(length)
    except T.LinearityError:
        return False
    return coeffs == {len_var: 1} and const == -1


def _phi_forces_zero(phi, len_var: str) -> bool:
    for f in phi:
        if isinstance(f, T.Cmp) and f.op == "eq":
            try:
                coeffs, const = T.linearize(T.sub(f.lhs, f.rhs))
            except T.LinearityError:
                continue
            if const == 0 and (coeffs == {len_var: 1} or coeffs == {len_var: -1}):
                return True
    return False


def _build_query(ctx, main: MainResult, main_obligations) -> Clause:
    s = main.summary
    atoms = [_atom_to_clause_atom(ctx, a) for a in s.atoms]
    parts = list(s.phi)
    post = T.conj(*main.post, *[T.implies(g, f) for g, f in main_obligations])
    mentioned = set()
    for f in parts + [post]:
        mentioned |= T.free_vars(f)
    for a in atoms:
        for arg in a.args:
            mentioned |= T.free_vars(arg)
    for sid, (len_var, declared) in ctx.sources.items():
        if declared and len_var in mentioned:
            parts.append(T.ge(T.ivar(len_var), T.iconst(0)))
    parts.append(T.neg(post))
    meta = ClauseMeta(kind="query")
    return Clause(None, (), T.conj(*parts), atoms, meta)


def encode_program(program: Program):
    """Run the whole front half of the pipeline: summaries then clauses."""
    ctx = EncodeContext(program)
    main = execute_main(ctx)
    if main.parse_only:
        return None, ctx, main
    main_obligations = _resolve_obligations(ctx, main)
    if not main.post and not main_obligations:
        raise EncodeError("vacuous verification: the program contains no "
                          "assertions to check")
    relations = {}
    clauses = []
    for key in ctx.order:
        inst = ctx.instances[key]
        in_vars, in_sorts, out_vars, out_sorts = _instance_signature(ctx, inst)
        relations[inst.rel] = RelationSymbol(
            name=inst.rel,
            arg_sorts=tuple(in_sorts + out_sorts),
            out_positions=tuple(range(len(in_vars), len(in_vars) + len(out_vars))),
            origin=(inst.fname, tuple(sorted(inst.assignment.items())),
                    tuple(sorted(inst.chains.items()))),
        )
        for summary in ctx.summaries[key]:
            clauses.append(_build_clause(ctx, inst, summary))
    clauses.append(_build_query(ctx, main, main_obligations))
    system = ChcSystem(relations=relations, clauses=clauses,
                       sources=dict(ctx.sources),
                       consumers={k: list(v) for k, v in ctx.consumers.items()})
    return system, ctx, main


# ---------------------------------------------------------------------------
# human-readable rendering (the --emit-chc format: head <- body)


def render_system(sys: ChcSystem) -> str:
    lines = []
    for clause in sys.clauses:
        body = []
        for a in clause.atoms:
            args = ", ".join(_render(x) for x in a.args)
            body.append(f"{a.rel}({args})")
        body.extend(T.render_formula(f) for f in T.conjuncts(clause.constraint))
        rhs = ", ".join(body) if body else "true"
        if clause.head_rel is None:
            lines.append(f"false <- {rhs}.")
        else:
            head = f"{clause.head_rel}({', '.join(clause.head_args)})"
            lines.append(f"{head} <- {rhs}.")
    return "\n".join(lines) + "\n"


def _render(x) -> str:
    return T.render_term(x) if isinstance(x, T.Term) else T.render_formula(x)

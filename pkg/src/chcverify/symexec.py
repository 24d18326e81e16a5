"""Symbolic execution into merged branch summaries.

Each function instance is executed symbolically. Control-flow joins merge
scalar state with if-then-else terms; branches that contain relation calls
or conflicting list bindings split into separate summaries, in the style
of large-block encoding. Recursive calls are never unrolled: every call to
a user-defined function becomes a call atom naming the callee instance.

Fold operators and map transforms that are call-free are inlined into the
consuming clause instead of getting relations of their own.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import terms as T
from .frontend import (Assert, Assume, Begin, Call, CoreExpr, FnArg, FunctionDef,
                       If, Let, Lit, ListOp, Prim, Ref, SetGlobal)
from .lists import SymListSource, SymListValue, append as list_append, cons as list_cons, fuse_map


class EncodeError(Exception):
    pass


class _InlineImpossible(Exception):
    pass


@dataclass(frozen=True)
class FnValue:
    name: str


@dataclass(frozen=True)
class OpApply(CoreExpr):
    """Apply a function value, inlining it when call-free (fold operators)."""

    fn: str          # fn-param unique name
    args: tuple


@dataclass
class CallAtom:
    """One nested call: callee instance, inputs, fresh output placeholders."""

    callee_key: tuple
    rel: str
    inputs: tuple            # Terms/Formulas: value args (+ lengths) then global-ins
    ret_var: str
    ret_sort: str            # 'int' | 'bool'
    glob_outs: tuple         # ((global name, var name), ...)
    guard: T.Formula
    list_bindings: tuple     # ((param unique name, source id, length Term), ...)
    ok_var: str | None = None


@dataclass
class BranchSummary:
    """One merged execution branch: path condition, calls, outputs."""

    phi: tuple               # Formula conjuncts
    atoms: tuple             # CallAtoms in program order
    value: object            # return Value
    globals_out: dict        # name -> Term at branch end
    obligations: tuple       # (guard Formula, asserted Formula)
    hd_names: dict           # (source id, length Term) -> raw head var
    resolved: list | None = None   # obligations incl. callee inheritance


@dataclass
class SymState:
    env: dict
    globals: dict
    path: tuple = ()
    atoms: tuple = ()
    obligations: tuple = ()

    def bind(self, name, value) -> "SymState":
        env = dict(self.env)
        env[name] = value
        return replace(self, env=env)

    def unbind(self, name) -> "SymState":
        env = dict(self.env)
        env.pop(name, None)
        return replace(self, env=env)

    def set_global(self, name, value) -> "SymState":
        g = dict(self.globals)
        g[name] = value
        return replace(self, globals=g)

    def add_path(self, f: T.Formula) -> "SymState":
        if f == T.TRUE or f in self.path:
            return self
        return replace(self, path=self.path + (f,))

    def add_atom(self, atom: CallAtom) -> "SymState":
        return replace(self, atoms=self.atoms + (atom,))

    def add_obligation(self, cond: T.Formula) -> "SymState":
        guard = T.conj(*self.path)
        return replace(self, obligations=self.obligations + ((guard, cond),))


@dataclass
class EvalCtx:
    """Per-summarization context: owning instance plus head memoization."""

    enc: object                  # EncodeContext
    instance: object             # InstanceInfo or None for the main context
    hd_names: dict = field(default_factory=dict)
    no_atoms: bool = False

    def hd_for(self, source_id: str, length: T.Term) -> str:
        key = (source_id, length)
        if key not in self.hd_names:
            name = self.enc.names.fresh("hd")
            self.hd_names[key] = name
            self.enc.head_registry[name] = source_id
        return self.hd_names[key]


# ---------------------------------------------------------------------------
# evaluation: list of (value, state) outcomes


def eval_expr(ec: EvalCtx, e: CoreExpr, st: SymState) -> list:
    if isinstance(e, Lit):
        v = T.iconst(e.value) if isinstance(e.value, int) and not isinstance(e.value, bool) \
            else T.bconst(e.value)
        return [(v, st)]
    if isinstance(e, Ref):
        if e.name in st.env:
            return [(st.env[e.name], st)]
        if e.name in st.globals:
            return [(st.globals[e.name], st)]
        raise EncodeError(f"internal: unbound reference '{e.name}'")
    if isinstance(e, FnArg):
        if e.kind == "def":
            return [(FnValue(e.name), st)]
        v = st.env.get(e.name)
        if not isinstance(v, FnValue):
            raise EncodeError(f"function parameter '{e.name}' is unassigned")
        return [(v, st)]
    if isinstance(e, Prim):
        return _eval_prim(ec, e, st)
    if isinstance(e, If):
        return _eval_if(ec, e, st)
    if isinstance(e, Let):
        out = []
        for v, st1 in eval_expr(ec, e.value, st):
            for bv, st2 in eval_expr(ec, e.body, st1.bind(e.name, v)):
                out.append((bv, st2.unbind(e.name)))
        return out
    if isinstance(e, Begin):
        return _eval_seq(ec, e.exprs, st, keep="last")
    if isinstance(e, Assert):
        out = []
        for v, st1 in eval_expr(ec, e.expr, st):
            out.append((T.TRUE, st1.add_obligation(_as_formula(v, "assert"))))
        return out
    if isinstance(e, Assume):
        out = []
        for v, st1 in eval_expr(ec, e.expr, st):
            out.append((T.TRUE, st1.add_path(_as_formula(v, "assume"))))
        return out
    if isinstance(e, SetGlobal):
        out = []
        for v, st1 in eval_expr(ec, e.expr, st):
            out.append((v, st1.set_global(e.name, _as_term(v, "set-global!"))))
        return out
    if isinstance(e, Call):
        return _eval_call(ec, e, st)
    if isinstance(e, OpApply):
        return _eval_opapply(ec, e, st)
    if isinstance(e, ListOp):
        return _eval_listop(ec, e, st)
    raise EncodeError(f"internal: unhandled expression {e!r}")


def _eval_seq(ec, exprs, st, keep="all") -> list:
    outcomes = [((), st)]
    for e in exprs:
        nxt = []
        for vals, st1 in outcomes:
            for v, st2 in eval_expr(ec, e, st1):
                nxt.append((vals + (v,), st2))
        outcomes = nxt
    if keep == "last":
        return [(vals[-1], st1) for vals, st1 in outcomes]
    return outcomes


def _as_formula(v, what) -> T.Formula:
    if isinstance(v, T.Formula):
        return v
    raise EncodeError(f"{what} expects a boolean expression")


def _as_term(v, what) -> T.Term:
    if isinstance(v, T.Term):
        return v
    raise EncodeError(f"{what} expects an integer expression")


def _eval_prim(ec, e: Prim, st) -> list:
    out = []
    for vals, st1 in _eval_seq(ec, e.args, st):
        out.append((_apply_prim(e.op, vals), st1))
    return out


def _apply_prim(op, vals):
    if op == "+":
        return T.add(*[_as_term(v, "+") for v in vals])
    if op == "-":
        a, b = vals
        return T.sub(_as_term(a, "-"), _as_term(b, "-"))
    if op == "neg":
        return T.mul(-1, _as_term(vals[0], "-"))
    if op == "*":
        a, b = vals
        a, b = _as_term(a, "*"), _as_term(b, "*")
        if isinstance(a, T.IConst):
            return T.mul(a.value, b)
        if isinstance(b, T.IConst):
            return T.mul(b.value, a)
        raise EncodeError("multiplication must have a constant operand")
    if op in ("<", "<=", ">", ">="):
        a, b = (_as_term(v, op) for v in vals)
        return {"<": T.lt, "<=": T.le, ">": T.gt, ">=": T.ge}[op](a, b)
    if op == "=":
        a, b = vals
        if isinstance(a, T.Term) and isinstance(b, T.Term):
            return T.eq(a, b)
        if isinstance(a, T.Formula) and isinstance(b, T.Formula):
            return T.iff(a, b)
        raise EncodeError("= compares two integers or two booleans")
    if op == "and":
        return T.conj(*[_as_formula(v, "and") for v in vals])
    if op == "or":
        return T.disj(*[_as_formula(v, "or") for v in vals])
    if op == "not":
        return T.neg(_as_formula(vals[0], "not"))
    if op == "=>":
        a, b = (_as_formula(v, "=>") for v in vals)
        return T.implies(a, b)
    raise EncodeError(f"internal: unknown primitive {op}")


def _eval_if(ec, e: If, st) -> list:
    out = []
    for cv, st1 in eval_expr(ec, e.cond, st):
        c = _as_formula(cv, "if")
        if c == T.TRUE:
            out.extend(eval_expr(ec, e.then, st1))
            continue
        if c == T.FALSE:
            out.extend(eval_expr(ec, e.other, st1))
            continue
        t_outs = eval_expr(ec, e.then, st1.add_path(c))
        e_outs = eval_expr(ec, e.other, st1.add_path(T.neg(c)))
        merged = None
        if len(t_outs) == 1 and len(e_outs) == 1:
            merged = _try_merge(st1, c, t_outs[0], e_outs[0])
        if merged is not None:
            out.append(merged)
        else:
            out.extend(t_outs)
            out.extend(e_outs)
    return out


def merge_value(guard: T.Formula, a, b):
    """Merge two branch values under `guard`; None signals a split."""
    if isinstance(a, T.Term) and isinstance(b, T.Term):
        return T.ite(guard, a, b)
    if isinstance(a, T.Formula) and isinstance(b, T.Formula):
        return T.bite(guard, a, b)
    if isinstance(a, SymListValue) and isinstance(b, SymListValue):
        return a if a == b else None
    if isinstance(a, FnValue) and isinstance(b, FnValue):
        return a if a == b else None
    return None


def _try_merge(base: SymState, c: T.Formula, t_out, e_out):
    (tv, ts), (ev, es) = t_out, e_out
    if ts.atoms != base.atoms or es.atoms != base.atoms:
        return None
    value = merge_value(c, tv, ev)
    if value is None:
        return None
    env = dict(base.env)
    for k in env:
        a, b = ts.env.get(k), es.env.get(k)
        if a == b:
            env[k] = a
        else:
            m = merge_value(c, a, b)
            if m is None:
                return None
            env[k] = m
    globs = {}
    for k in base.globals:
        a, b = ts.globals[k], es.globals[k]
        globs[k] = a if a == b else T.ite(c, a, b)
    base_path = base.path + (c,)
    pt = ts.path[len(base_path):] if ts.path[:len(base_path)] == base_path else ts.path
    base_path_e = base.path + (T.neg(c),)
    pe = es.path[len(base_path_e):] if es.path[:len(base_path_e)] == base_path_e else es.path
    merged_state = replace(base, env=env, globals=globs)
    extra = T.bite(c, T.conj(*pt), T.conj(*pe))
    if extra != T.TRUE:
        merged_state = merged_state.add_path(extra)
    n = len(base.obligations)
    merged_state = replace(merged_state,
                           obligations=base.obligations + ts.obligations[n:] + es.obligations[n:])
    return (value, merged_state)


# ---------------------------------------------------------------------------
# calls


def _eval_call(ec, e: Call, st) -> list:
    if e.callee_kind == "param":
        fv = st.env.get(e.callee)
        if not isinstance(fv, FnValue):
            raise EncodeError(f"function parameter '{e.callee}' is unassigned")
        callee = fv.name
    else:
        callee = e.callee
    out = []
    for vals, st1 in _eval_seq(ec, e.args, st):
        out.append(make_call(ec, st1, callee, list(vals)))
    return out


def _eval_opapply(ec, e: OpApply, st) -> list:
    fv = st.env.get(e.fn)
    if not isinstance(fv, FnValue):
        raise EncodeError(f"internal: fold operator '{e.fn}' unresolved")
    out = []
    for vals, st1 in _eval_seq(ec, e.args, st):
        try:
            out.append(inline_apply(ec, fv.name, list(vals), st1))
        except _InlineImpossible:
            out.append(make_call(ec, st1, fv.name, list(vals)))
    return out


def inline_apply(ec, fname: str, arg_values: list, st: SymState):
    """Inline a call-free function application; raises when not inlinable."""
    fd = ec.enc.resolve_def(fname)
    if fd.fn_params:
        raise _InlineImpossible()
    if len(arg_values) != len(fd.params):
        raise EncodeError(f"'{fname}' expects {len(fd.params)} arguments")
    inner_env = {p.name: v for p, v in zip(fd.params, arg_values)}
    probe = replace(st, env=inner_env)
    saved = ec.no_atoms
    ec.no_atoms = True
    try:
        outcomes = eval_expr(ec, fd.body, probe)
    finally:
        ec.no_atoms = saved
    if len(outcomes) != 1:
        raise _InlineImpossible()
    value, st2 = outcomes[0]
    return (value, replace(st2, env=dict(st.env)))


def make_call(ec, st: SymState, callee: str, arg_values: list):
    if ec.no_atoms:
        raise _InlineImpossible()
    inst = ec.enc.instantiate_call(callee, arg_values)
    value_inputs = []
    list_bindings = []
    for p, v in zip(ec.enc.resolve_def(callee).params, arg_values):
        if p.is_fn:
            continue
        if isinstance(v, SymListValue):
            if v.prefix:
                raise EncodeError(
                    "passing a partially-specified list to a function is not "
                    "supported; fold the concrete prefix in yourself")
            value_inputs.append(v.source.length)
            list_bindings.append((p.name, v.source.id, v.source.length))
        elif isinstance(v, (T.Term, T.Formula)):
            value_inputs.append(v)
        else:
            raise EncodeError(f"bad argument to '{callee}'")
    glob_ins = [st.globals[g] for g in inst.globals_in]
    ret_var = ec.enc.names.fresh("r")
    glob_outs = tuple((g, ec.enc.names.fresh(f"{g}.o")) for g in inst.globals_out)
    atom = CallAtom(
        callee_key=inst.key,
        rel=inst.rel,
        inputs=tuple(value_inputs) + tuple(glob_ins),
        ret_var=ret_var,
        ret_sort=inst.ret_sort,
        glob_outs=glob_outs,
        guard=T.conj(*st.path),
        list_bindings=tuple(list_bindings),
    )
    for pname, sid, _ in list_bindings:
        ec.enc.register_consumer(sid, inst.rel, pname)
    st = st.add_atom(atom)
    for g, var in glob_outs:
        st = st.set_global(g, T.ivar(var))
    value = T.bvar(ret_var) if inst.ret_sort == "bool" else T.ivar(ret_var)
    return (value, st)


# ---------------------------------------------------------------------------
# list builtins


def _eval_listop(ec, e: ListOp, st) -> list:
    if e.op in ("map", "foldl", "foldr"):
        return _eval_listop_ho(ec, e, st)
    out = []
    for vals, st1 in _eval_seq(ec, e.args, st):
        out.append(_apply_listop(ec, e.op, list(vals), st1))
    return out


def _as_list(v, what) -> SymListValue:
    if isinstance(v, SymListValue):
        return v
    raise EncodeError(f"{what} expects a list")


def _apply_listop(ec, op, vals, st):
    if op == "length":
        return (_as_list(vals[0], "length").total_length(), st)
    if op == "head":
        lv = _as_list(vals[0], "head")
        if lv.prefix:
            return (lv.prefix[0], st)
        if lv.source is None:
            return (T.iconst(0), st.add_path(T.FALSE))  # unreachable: empty list
        st = st.add_path(T.lt(T.iconst(0), lv.source.length))
        raw = T.ivar(ec.hd_for(lv.source.id, lv.source.length))
        value, st = _apply_chain(ec, lv.chain, raw, st)
        return (value, st)
    if op == "tail":
        lv = _as_list(vals[0], "tail")
        if lv.prefix:
            return (SymListValue(lv.prefix[1:], lv.source, lv.chain), st)
        if lv.source is None:
            return (lv, st.add_path(T.FALSE))
        st = st.add_path(T.lt(T.iconst(0), lv.source.length))
        return (lv.with_source_length(T.sub(lv.source.length, T.iconst(1))), st)
    if op == "cons":
        head, lv = _as_term(vals[0], "cons"), _as_list(vals[1], "cons")
        return (list_cons(head, lv), st)
    if op == "append":
        a, b = _as_list(vals[0], "append"), _as_list(vals[1], "append")
        return (list_append(a, b, ec.enc.fresh_source), st)
    raise EncodeError(f"internal: unknown list op {op}")


def _apply_chain(ec, chain, value, st):
    for fname in chain:
        try:
            value, st = inline_apply(ec, fname, [value], st)
        except _InlineImpossible:
            raise EncodeError(
                f"mapped function '{fname}' must be call-free to fuse into "
                "the consuming iterator")
    return (value, st)


def _eval_listop_ho(ec, e: ListOp, st) -> list:
    out = []
    for (fv, st1) in eval_expr(ec, e.args[0], st):
        if not isinstance(fv, FnValue):
            raise EncodeError(f"{e.op} expects a function as first argument")
        if e.op == "map":
            for lv, st2 in eval_expr(ec, e.args[1], st1):
                lv = _as_list(lv, "map")
                fd = ec.enc.resolve_def(fv.name)
                if len(fd.params) != 1 or fd.fn_params:
                    raise EncodeError("map expects a unary function")

                def apply_prefix(p, _st=st2, _f=fv.name):
                    v, _ = inline_apply(ec, _f, [p], _st)
                    return v

                try:
                    fused = fuse_map(fv.name, lv, apply_prefix)
                except _InlineImpossible:
                    raise EncodeError(
                        f"mapped function '{fv.name}' must be call-free to "
                        "fuse into the consuming iterator")
                out.append((fused, st2))
        else:
            for vals, st2 in _eval_seq(ec, e.args[1:], st1):
                init, lv = vals[0], _as_list(vals[1], e.op)
                if lv.prefix:
                    raise EncodeError(
                        "folding a partially-specified list is not supported")
                fold_fn = ec.enc.fold_def(e.op)
                out.append(make_call(ec, st2, fold_fn,
                                     [fv, _as_term(init, e.op), lv]))
    return out


# ---------------------------------------------------------------------------
# summaries


def _simplify_path(path: tuple) -> tuple:
    """Drop disequality conjuncts subsumed by a strict comparison."""

    def lindiff(a, b):
        try:
            ca, ka = T.linearize(a)
            cb, kb = T.linearize(b)
        except T.LinearityError:
            return None
        keys = set(ca) | set(cb)
        return (tuple(sorted((k, ca.get(k, 0) - cb.get(k, 0)) for k in keys
                             if ca.get(k, 0) != cb.get(k, 0))), ka - kb)

    strict = set()
    for f in path:
        if isinstance(f, T.Cmp) and f.op == "lt":
            d = lindiff(f.lhs, f.rhs)
            if d is not None:
                strict.add(d)
                strict.add((tuple((k, -c) for k, c in d[0]), -d[1]))
    out = []
    for f in path:
        if isinstance(f, T.Not) and isinstance(f.arg, T.Cmp) and f.arg.op == "eq":
            d = lindiff(f.arg.lhs, f.arg.rhs)
            if d is not None and d in strict:
                continue
        out.append(f)
    return tuple(out)


def _finalize(outcomes, hd_names) -> list:
    summaries = []
    for value, st in outcomes:
        summaries.append(BranchSummary(
            phi=_simplify_path(st.path),
            atoms=st.atoms,
            value=value,
            globals_out=dict(st.globals),
            obligations=st.obligations,
            hd_names=dict(hd_names),
        ))
    return summaries


def summarize_instance(enc, inst) -> list:
    """Summarize one function instance; callee signatures must be declared."""
    fd = enc.resolve_def(inst.fname)
    ec = EvalCtx(enc=enc, instance=inst)
    env = {}
    vi = 0
    for p in fd.params:
        if p.is_fn:
            env[p.name] = FnValue(inst.assignment[p.name])
            continue
        sort = inst.value_sorts[vi]
        vi += 1
        if sort == "list":
            source = SymListSource(f"param:{inst.rel}:{p.name}",
                                   T.ivar(f"{p.name}.len"))
            env[p.name] = SymListValue((), source, inst.chains.get(p.name, ()))
        elif sort == "bool":
            env[p.name] = T.bvar(p.name)
        else:
            env[p.name] = T.ivar(p.name)
    globs = {g: T.ivar(f"{g}.in") for g in inst.globals_in}
    st = SymState(env=env, globals=globs)
    outcomes = eval_expr(ec, fd.body, st)
    return _finalize(outcomes, ec.hd_names)


@dataclass
class MainResult:
    summary: BranchSummary
    post: list          # verify formulas
    parse_only: bool = False


def execute_main(enc) -> MainResult:
    """Execute globals init, top-level forms, and the verify arguments."""
    program = enc.program
    ec = EvalCtx(enc=enc, instance=None)
    env = {}
    for name, sort in program.symconsts.items():
        if sort == "list":
            source = SymListSource(name, T.ivar(f"{name}.len"), declared=True)
            env[name] = SymListValue((), source, ())
            enc.declare_source(source)
        elif sort == "bool":
            env[name] = T.bvar(name)
        else:
            env[name] = T.ivar(name)
    st = SymState(env=env, globals={})

    def run(expr, st):
        outcomes = eval_expr(ec, expr, st)
        if len(outcomes) != 1:
            raise EncodeError(
                "top-level control flow must merge: branches containing "
                "calls or conflicting lists belong inside a function")
        return outcomes[0]

    for gname, init in program.globals.items():
        v, st = run(init, st)
        st = st.set_global(gname, _as_term(v, "global init"))
    for form in program.main_forms:
        if form.kind == "bind":
            v, st = run(form.expr, st)
            st = st.bind(form.name, v)
        elif form.kind == "assume":
            v, st = run(form.expr, st)
            st = st.add_path(_as_formula(v, "assume"))
        elif form.kind == "assert":
            v, st = run(form.expr, st)
            st = st.add_obligation(_as_formula(v, "assert"))
        else:
            _, st = run(form.expr, st)
    post = []
    if program.verify_exprs is None:
        return MainResult(_finalize([(T.TRUE, st)], ec.hd_names)[0], [], parse_only=True)
    for expr in program.verify_exprs:
        v, st = run(expr, st)
        post.append(_as_formula(v, "verify"))
    return MainResult(_finalize([(T.TRUE, st)], ec.hd_names)[0], post)


def render_summary(s: BranchSummary) -> str:
    """Stable text form for --dump-summaries: `phi ; calls |- outputs`."""
    phi = " & ".join(T.render_formula(f) for f in s.phi) or "true"
    calls = ", ".join(
        f"{a.rel}({', '.join(_render_arg(x) for x in a.inputs)}) -> "
        f"({', '.join([a.ret_var] + [v for _, v in a.glob_outs])})"
        for a in s.atoms) or "-"
    if isinstance(s.value, T.Term):
        out = T.render_term(s.value)
    elif isinstance(s.value, T.Formula):
        out = T.render_formula(s.value)
    else:
        out = str(s.value)
    globs = "".join(f", {g} := {T.render_term(t)}" for g, t in sorted(s.globals_out.items()))
    obls = "".join(f" [assert {T.render_formula(f)} when {T.render_formula(g)}]"
                   for g, f in s.obligations)
    return f"{phi} ; {calls} |- {out}{globs}{obls}"


def _render_arg(x) -> str:
    return T.render_term(x) if isinstance(x, T.Term) else T.render_formula(x)

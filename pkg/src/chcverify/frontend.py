"""Surface syntax and lowering to the core IR.

The concrete syntax is a small Racket-like s-expression language:

    (define-global counter 0)
    (declare-symbolic xs (listof int))
    (define (inc x) (+ x 1))
    (define r (foldl + 0 (map inc xs)))
    (assume (>= n 0))
    (verify (= r ...))

Lowering resolves every name to a unique binder (shadowing is renamed
away), lifts lambda literals to top-level function definitions, marks
function-typed parameters, and computes the static call graph together
with transitive global read/write sets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .sexpr import SAtom, SList, SexprError, read_forms, pretty


class FrontendError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def located(self, filename: str) -> str:
        return f"{filename}:{self.line}:{self.col}: {self.message}"


PRIMITIVES = {"+", "-", "*", "=", "<", "<=", ">", ">=", "and", "or", "not", "=>"}
LIST_BUILTINS = {"length", "head", "tail", "cons", "append", "map", "foldl", "foldr"}
KEYWORDS = {
    "define", "define-global", "declare-symbolic", "assume", "assert",
    "verify", "if", "let", "lambda", "begin", "set-global!", "true", "false",
} | PRIMITIVES | LIST_BUILTINS

_IDENT_RE = re.compile(r"^[A-Za-z!$^&*_+=<>.?/~-][A-Za-z0-9!$^&*_+=<>.?/~-]*$")


# ---------------------------------------------------------------------------
# core IR


@dataclass(frozen=True)
class CoreExpr:
    pass


@dataclass(frozen=True)
class Lit(CoreExpr):
    value: object  # int | bool


@dataclass(frozen=True)
class Ref(CoreExpr):
    name: str


@dataclass(frozen=True)
class Prim(CoreExpr):
    op: str
    args: tuple


@dataclass(frozen=True)
class If(CoreExpr):
    cond: CoreExpr
    then: CoreExpr
    other: CoreExpr


@dataclass(frozen=True)
class Let(CoreExpr):
    name: str
    value: CoreExpr
    body: CoreExpr


@dataclass(frozen=True)
class FnArg(CoreExpr):
    """A function value in argument position: a definition or an fn-param."""

    name: str
    kind: str  # 'def' | 'param'


@dataclass(frozen=True)
class Call(CoreExpr):
    callee: str
    callee_kind: str  # 'def' | 'param'
    args: tuple


@dataclass(frozen=True)
class ListOp(CoreExpr):
    op: str  # length | head | tail | cons | append | map | foldl | foldr
    args: tuple


@dataclass(frozen=True)
class Assert(CoreExpr):
    expr: CoreExpr


@dataclass(frozen=True)
class Assume(CoreExpr):
    expr: CoreExpr


@dataclass(frozen=True)
class SetGlobal(CoreExpr):
    name: str
    expr: CoreExpr


@dataclass(frozen=True)
class Begin(CoreExpr):
    exprs: tuple


@dataclass(frozen=True)
class Param:
    name: str      # unique, post-renaming
    surface: str
    is_fn: bool


@dataclass
class FunctionDef:
    name: str
    params: tuple
    body: CoreExpr
    loc: tuple = (0, 0)
    is_lambda: bool = False
    # filled by analysis
    reads: frozenset = frozenset()
    writes: frozenset = frozenset()

    @property
    def value_params(self) -> tuple:
        return tuple(p for p in self.params if not p.is_fn)

    @property
    def fn_params(self) -> tuple:
        return tuple(p for p in self.params if p.is_fn)


@dataclass
class MainForm:
    kind: str  # 'bind' | 'assume' | 'assert' | 'expr'
    name: str | None
    expr: CoreExpr
    loc: tuple = (0, 0)


@dataclass
class Program:
    functions: dict
    fn_order: list
    globals: dict           # name -> init CoreExpr, ordered
    symconsts: dict         # name -> 'int' | 'bool' | 'list', ordered
    main_forms: list
    verify_exprs: list | None   # None means parse-only mode
    verify_loc: tuple = (0, 0)
    call_edges: dict = field(default_factory=dict)
    filename: str = "<input>"


@dataclass
class SurfaceProgram:
    forms: list
    filename: str


# ---------------------------------------------------------------------------
# parsing


_TOP_HEADS = {"define", "define-global", "declare-symbolic", "assume", "assert", "verify"}


def parse(text: str, filename: str = "<input>") -> SurfaceProgram:
    try:
        forms = read_forms(text)
    except SexprError as e:
        raise FrontendError(e.message, e.line, e.col) from e
    verify_count = 0
    for form in forms:
        if not isinstance(form, SList) or not form.items:
            raise FrontendError("top-level form must be a non-empty list",
                                *_loc(form))
        head = form.items[0]
        if not isinstance(head, SAtom):
            raise FrontendError("unknown top-level form", *_loc(form))
        if head.text == "verify":
            verify_count += 1
            if verify_count > 1:
                raise FrontendError("duplicate verify directive", *_loc(form))
        elif head.text not in _TOP_HEADS:
            # bare expressions (for effect) are allowed
            pass
    return SurfaceProgram(forms, filename)


def pretty_print(sp: SurfaceProgram) -> str:
    return "\n".join(pretty(f) for f in sp.forms) + "\n"


def _loc(form) -> tuple:
    return (form.line, form.col)


# ---------------------------------------------------------------------------
# lowering


class _Lowerer:
    def __init__(self, sp: SurfaceProgram):
        self.sp = sp
        self.functions: dict[str, FunctionDef] = {}
        self.fn_order: list[str] = []
        self.globals: dict[str, CoreExpr] = {}
        self.symconsts: dict[str, str] = {}
        self.main_forms: list[MainForm] = []
        self.verify_exprs: list | None = None
        self.verify_loc = (0, 0)
        self.headers: dict[str, list] = {}       # fn -> param spec (name, is_fn)
        self.rename_counts: dict[str, int] = {}
        self.lambda_count = 0
        self.prim_wrappers: dict[str, str] = {}
        self.call_edges: dict[str, set] = {}
        self.main_scope: list[dict] = [{}]

    def err(self, msg: str, form) -> FrontendError:
        line, col = _loc(form) if hasattr(form, "line") else (0, 0)
        return FrontendError(msg, line, col)

    def unique(self, surface: str) -> str:
        n = self.rename_counts.get(surface, 0)
        self.rename_counts[surface] = n + 1
        return surface if n == 0 else f"{surface}%{n}"

    # -- pass 1: headers ----------------------------------------------------

    def collect_headers(self):
        for form in self.sp.forms:
            head = form.items[0].text if isinstance(form.items[0], SAtom) else None
            if head == "define" and len(form.items) >= 2 and isinstance(form.items[1], SList):
                sig = form.items[1]
                if not sig.items or not isinstance(sig.items[0], SAtom):
                    raise self.err("bad function signature", sig)
                name = sig.items[0].text
                self.check_ident(name, sig.items[0])
                if name in self.headers:
                    raise self.err(f"duplicate definition of '{name}'", sig)
                spec = []
                for p in sig.items[1:]:
                    if isinstance(p, SAtom):
                        self.check_ident(p.text, p)
                        spec.append((p.text, False))
                    elif (isinstance(p, SList) and len(p.items) == 3
                          and isinstance(p.items[0], SAtom)
                          and isinstance(p.items[1], SAtom) and p.items[1].text == ":"
                          and isinstance(p.items[2], SAtom) and p.items[2].text == "fn"):
                        self.check_ident(p.items[0].text, p.items[0])
                        spec.append((p.items[0].text, True))
                    else:
                        raise self.err("bad parameter: expected name or (name : fn)", p)
                self.headers[name] = spec
            elif head == "define-global":
                if len(form.items) != 3 or not isinstance(form.items[1], SAtom):
                    raise self.err("expected (define-global name init)", form)
                name = form.items[1].text
                self.check_ident(name, form.items[1])
                if name in self.globals:
                    raise self.err(f"duplicate global '{name}'", form)
                self.globals[name] = None  # filled in pass 2
            elif head == "declare-symbolic":
                if len(form.items) != 3 or not isinstance(form.items[1], SAtom):
                    raise self.err("expected (declare-symbolic name sort)", form)
                name = form.items[1].text
                self.check_ident(name, form.items[1])
                sort = self.parse_sort(form.items[2])
                if name in self.symconsts:
                    raise self.err(f"duplicate symbolic constant '{name}'", form)
                self.symconsts[name] = sort

    def check_ident(self, name: str, form):
        if name in KEYWORDS:
            raise self.err(f"'{name}' is reserved", form)
        if not _IDENT_RE.match(name):
            raise self.err(f"bad identifier '{name}'", form)

    def parse_sort(self, form) -> str:
        if isinstance(form, SAtom) and form.text in ("int", "bool"):
            return form.text
        if (isinstance(form, SList) and len(form.items) == 2
                and isinstance(form.items[0], SAtom) and form.items[0].text == "listof"
                and isinstance(form.items[1], SAtom)):
            if form.items[1].text != "int":
                raise self.err("only (listof int) lists are supported", form)
            return "list"
        raise self.err("bad sort: expected int, bool or (listof int)", form)

    # -- pass 2: bodies -----------------------------------------------------

    def run(self) -> Program:
        self.collect_headers()
        for form in self.sp.forms:
            head = form.items[0].text if isinstance(form.items[0], SAtom) else None
            if head == "define":
                self.lower_define(form)
            elif head == "define-global":
                init = self.lower_expr(form.items[2], [{}], fn=None)
                self.globals[form.items[1].text] = init
            elif head == "declare-symbolic":
                pass
            elif head == "assume":
                if len(form.items) != 2:
                    raise self.err("expected (assume expr)", form)
                e = self.lower_expr(form.items[1], self.main_scope, fn=None)
                self.main_forms.append(MainForm("assume", None, e, _loc(form)))
            elif head == "assert":
                if len(form.items) != 2:
                    raise self.err("expected (assert expr)", form)
                e = self.lower_expr(form.items[1], self.main_scope, fn=None)
                self.main_forms.append(MainForm("assert", None, e, _loc(form)))
            elif head == "verify":
                self.verify_loc = _loc(form)
                self.verify_exprs = [
                    self.lower_expr(arg, self.main_scope, fn=None)
                    for arg in form.items[1:]
                ]
            else:
                e = self.lower_expr(form, self.main_scope, fn=None)
                self.main_forms.append(MainForm("expr", None, e, _loc(form)))
        program = Program(
            functions=self.functions,
            fn_order=self.fn_order,
            globals=self.globals,
            symconsts=self.symconsts,
            main_forms=self.main_forms,
            verify_exprs=self.verify_exprs,
            verify_loc=self.verify_loc,
            call_edges={k: set(v) for k, v in self.call_edges.items()},
            filename=self.sp.filename,
        )
        _compute_global_sets(program)
        return program

    def lower_define(self, form):
        if len(form.items) < 3:
            raise self.err("expected (define name-or-signature body...)", form)
        target = form.items[1]
        if isinstance(target, SList):
            name = target.items[0].text
            spec = self.headers[name]
            scope = {}
            params = []
            for surface, is_fn in spec:
                if surface in scope:
                    raise self.err(f"duplicate parameter '{surface}'", target)
                uniq = self.unique(surface)
                scope[surface] = ("fnparam" if is_fn else "param", uniq)
                params.append(Param(uniq, surface, is_fn))
            self.call_edges.setdefault(name, set())
            body = self.lower_body(form.items[2:], [scope], fn=name)
            fd = FunctionDef(name, tuple(params), body, _loc(form))
            self.functions[name] = fd
            self.fn_order.append(name)
        elif isinstance(target, SAtom):
            name = target.text
            self.check_ident(name, target)
            if len(form.items) != 3:
                raise self.err("expected (define name expr)", form)
            value = form.items[2]
            if _is_lambda(value):
                # (define f (lambda ...)) is sugar for (define (f ...) ...)
                lam = value
                params_form = lam.items[1]
                if not isinstance(params_form, SList):
                    raise self.err("bad lambda parameter list", lam)
                sig = SList((target,) + params_form.items, target.line, target.col)
                define = SList((form.items[0], sig) + tuple(lam.items[2:]),
                               form.line, form.col)
                # register header late (it was not a signature in pass 1)
                if name in self.headers:
                    raise self.err(f"duplicate definition of '{name}'", form)
                spec = []
                for p in params_form.items:
                    if not isinstance(p, SAtom):
                        raise self.err("lambda parameters must be plain names", p)
                    spec.append((p.text, False))
                self.headers[name] = spec
                self.lower_define(define)
            else:
                if name in self.main_scope[0] or name in self.headers:
                    raise self.err(f"duplicate definition of '{name}'", form)
                e = self.lower_expr(value, self.main_scope, fn=None)
                uniq = self.unique(name)
                self.main_scope[0][name] = ("mainbind", uniq)
                self.main_forms.append(MainForm("bind", uniq, e, _loc(form)))
        else:
            raise self.err("bad define", form)

    def lower_body(self, forms, scopes, fn) -> CoreExpr:
        exprs = [self.lower_expr(f, scopes, fn) for f in forms]
        return exprs[0] if len(exprs) == 1 else Begin(tuple(exprs))

    # -- expressions ---------------------------------------------------------

    def lower_expr(self, form, scopes, fn) -> CoreExpr:
        if isinstance(form, SAtom):
            return self.lower_atom(form, scopes, fn)
        if not form.items:
            raise self.err("empty application", form)
        head = form.items[0]
        if isinstance(head, SList):
            raise self.err("computed function positions are not supported "
                           "(assign the function a name first)", head)
        op = head.text
        args = form.items[1:]
        if op == "if":
            if len(args) != 3:
                raise self.err("expected (if c t e)", form)
            return If(*[self.lower_expr(a, scopes, fn) for a in args])
        if op == "let":
            return self.lower_let(form, scopes, fn)
        if op == "begin":
            if not args:
                raise self.err("empty begin", form)
            return self.lower_body(args, scopes, fn)
        if op == "assert":
            if len(args) != 1:
                raise self.err("expected (assert expr)", form)
            return Assert(self.lower_expr(args[0], scopes, fn))
        if op == "assume":
            if len(args) != 1:
                raise self.err("expected (assume expr)", form)
            return Assume(self.lower_expr(args[0], scopes, fn))
        if op == "set-global!":
            if len(args) != 2 or not isinstance(args[0], SAtom):
                raise self.err("expected (set-global! name expr)", form)
            gname = args[0].text
            if gname not in self.globals:
                raise self.err(f"unknown global '{gname}'", args[0])
            return SetGlobal(gname, self.lower_expr(args[1], scopes, fn))
        if op == "lambda":
            raise self.err("lambda is only allowed in function-argument "
                           "position or at (define name (lambda ...))", form)
        if op in PRIMITIVES:
            return self.lower_prim(op, form, scopes, fn)
        if op in LIST_BUILTINS:
            return self.lower_listop(op, form, scopes, fn)
        return self.lower_call(op, form, scopes, fn)

    def lower_atom(self, atom: SAtom, scopes, fn) -> CoreExpr:
        text = atom.text
        if _is_int(text):
            return Lit(int(text))
        if text in ("true", "#t"):
            return Lit(True)
        if text in ("false", "#f"):
            return Lit(False)
        hit = _scope_lookup(scopes, text)
        if hit is not None:
            kind, uniq = hit
            if kind == "fnparam":
                raise self.err(f"function parameter '{text}' used as a value", atom)
            return Ref(uniq)
        if text in self.globals:
            return Ref(text)
        if text in self.symconsts:
            if fn is not None:
                raise self.err(
                    f"function body refers to symbolic constant '{text}'; "
                    "pass it as a parameter instead", atom)
            return Ref(text)
        if text in self.headers:
            raise self.err(f"function '{text}' used as a value outside an "
                           "argument position", atom)
        raise self.err(f"unbound identifier '{text}'", atom)

    def lower_let(self, form, scopes, fn) -> CoreExpr:
        if len(form.items) < 3 or not isinstance(form.items[1], SList):
            raise self.err("expected (let ((x e) ...) body...)", form)
        bindings = []
        scope = {}
        for b in form.items[1].items:
            if (not isinstance(b, SList) or len(b.items) != 2
                    or not isinstance(b.items[0], SAtom)):
                raise self.err("expected binding (name expr)", b)
            surface = b.items[0].text
            self.check_ident(surface, b.items[0])
            if _is_lambda(b.items[1]):
                raise self.err("let-bound lambdas are not supported; use "
                               "(define name (lambda ...))", b)
            value = self.lower_expr(b.items[1], scopes + [scope], fn)
            uniq = self.unique(surface)
            scope[surface] = ("let", uniq)
            bindings.append((uniq, value))
        body = self.lower_body(form.items[2:], scopes + [scope], fn)
        for uniq, value in reversed(bindings):
            body = Let(uniq, value, body)
        return body

    def lower_prim(self, op, form, scopes, fn) -> CoreExpr:
        args = [self.lower_expr(a, scopes, fn) for a in form.items[1:]]
        if op == "-":
            if len(args) == 1:
                return Prim("neg", tuple(args))
            if len(args) != 2:
                raise self.err("expected (- a) or (- a b)", form)
        elif op == "not":
            if len(args) != 1:
                raise self.err("expected (not a)", form)
        elif op == "*":
            if len(args) != 2:
                raise self.err("expected (* a b)", form)
            if not (_is_const_expr(args[0]) or _is_const_expr(args[1])):
                raise self.err("multiplication must have a constant operand; "
                               "write nonlinear arithmetic as a recursive "
                               "function", form)
        elif op in ("=", "<", "<=", ">", ">=", "=>"):
            if len(args) != 2:
                raise self.err(f"expected ({op} a b)", form)
        elif op in ("and", "or", "+"):
            if len(args) < 2:
                raise self.err(f"expected ({op} a b ...)", form)
        return Prim(op, tuple(args))

    def lower_listop(self, op, form, scopes, fn) -> CoreExpr:
        items = form.items[1:]
        arity = {"length": 1, "head": 1, "tail": 1, "cons": 2, "append": 2,
                 "map": 2, "foldl": 3, "foldr": 3}[op]
        if len(items) != arity:
            raise self.err(f"expected ({op} {' '.join('_' * arity)})", form)
        if op in ("map", "foldl", "foldr"):
            f_arg = self.lower_fn_arg(items[0], scopes, fn)
            rest = tuple(self.lower_expr(a, scopes, fn) for a in items[1:])
            return ListOp(op, (f_arg,) + rest)
        return ListOp(op, tuple(self.lower_expr(a, scopes, fn) for a in items))

    def lower_call(self, name, form, scopes, fn) -> CoreExpr:
        hit = _scope_lookup(scopes, name)
        if hit is not None:
            kind, uniq = hit
            if kind == "fnparam":
                args = tuple(self.lower_call_arg(a, scopes, fn) for a in form.items[1:])
                return Call(uniq, "param", args)
            raise self.err(f"'{name}' is not a function", form)
        if name in self.headers:
            spec = self.headers[name]
            if len(form.items) - 1 != len(spec):
                raise self.err(f"'{name}' expects {len(spec)} arguments, "
                               f"got {len(form.items) - 1}", form)
            args = []
            for (pname, is_fn), a in zip(spec, form.items[1:]):
                if is_fn:
                    args.append(self.lower_fn_arg(a, scopes, fn))
                else:
                    args.append(self.lower_expr(a, scopes, fn))
            if fn is not None:
                self.call_edges.setdefault(fn, set()).add(name)
            return Call(name, "def", tuple(args))
        raise self.err(f"unbound identifier '{name}'", form)

    def lower_call_arg(self, form, scopes, fn) -> CoreExpr:
        """Argument to a call through an fn-param: shape checked at instantiation."""
        if isinstance(form, SAtom):
            hit = _scope_lookup(scopes, form.text)
            if hit is not None and hit[0] == "fnparam":
                return FnArg(hit[1], "param")
            if hit is None and form.text in self.headers:
                if fn is not None:
                    self.call_edges.setdefault(fn, set()).add(form.text)
                return FnArg(form.text, "def")
        if _is_lambda(form):
            return FnArg(self.lift_lambda(form, fn), "def")
        return self.lower_expr(form, scopes, fn)

    def lower_fn_arg(self, form, scopes, fn) -> FnArg:
        if isinstance(form, SAtom):
            text = form.text
            hit = _scope_lookup(scopes, text)
            if hit is not None:
                kind, uniq = hit
                if kind == "fnparam":
                    return FnArg(uniq, "param")
                raise self.err(f"'{text}' is not a function", form)
            if text in self.headers:
                if fn is not None:
                    self.call_edges.setdefault(fn, set()).add(text)
                return FnArg(text, "def")
            if text in ("+", "-"):
                return FnArg(self.prim_wrapper(text), "def")
            raise self.err(f"unbound function '{text}'", form)
        if _is_lambda(form):
            return FnArg(self.lift_lambda(form, fn), "def")
        raise self.err("expected a function name or a lambda literal", form)

    def prim_wrapper(self, op: str) -> str:
        """Wrap a binary primitive as a definition so it can be a fold op."""
        if op in self.prim_wrappers:
            return self.prim_wrappers[op]
        name = "prim.add" if op == "+" else "prim.sub"
        a, b = Param(f"{name}.a", "a", False), Param(f"{name}.b", "b", False)
        body = Prim(op, (Ref(a.name), Ref(b.name)))
        self.functions[name] = FunctionDef(name, (a, b), body)
        self.fn_order.append(name)
        self.headers[name] = [("a", False), ("b", False)]
        self.call_edges.setdefault(name, set())
        self.prim_wrappers[op] = name
        return name

    def lift_lambda(self, form, fn) -> str:
        params_form = form.items[1]
        if not isinstance(params_form, SList):
            raise self.err("bad lambda parameter list", form)
        self.lambda_count += 1
        name = f"lambda%{self.lambda_count}"
        scope = {}
        params = []
        for p in params_form.items:
            if not isinstance(p, SAtom):
                raise self.err("lambda parameters must be plain names "
                               "(function-typed lambda parameters are not "
                               "supported)", p)
            self.check_ident(p.text, p)
            uniq = self.unique(p.text)
            scope[p.text] = ("param", uniq)
            params.append(Param(uniq, p.text, False))
        # lambda bodies resolve against their own params plus the top level
        # only: capturing enclosing locals would prevent static resolution.
        body = self.lower_body(form.items[2:], [scope], fn=name)
        fd = FunctionDef(name, tuple(params), body, _loc(form), is_lambda=True)
        self.functions[name] = fd
        self.fn_order.append(name)
        self.headers[name] = [(p.surface, False) for p in params]
        self.call_edges.setdefault(name, set())
        if fn is not None:
            self.call_edges.setdefault(fn, set()).add(name)
        return name


def _is_lambda(form) -> bool:
    return (isinstance(form, SList) and len(form.items) >= 3
            and isinstance(form.items[0], SAtom) and form.items[0].text == "lambda")


def _is_int(text: str) -> bool:
    body = text[1:] if text[:1] in "+-" else text
    return body.isdigit()


def _is_const_expr(e: CoreExpr) -> bool:
    if isinstance(e, Lit) and isinstance(e.value, int):
        return True
    if isinstance(e, Prim) and e.op == "neg":
        return _is_const_expr(e.args[0])
    return False


def _scope_lookup(scopes, name):
    for scope in reversed(scopes):
        if name in scope:
            return scope[name]
    return None


def lower(sp: SurfaceProgram) -> Program:
    return _Lowerer(sp).run()


def load_program(text: str, filename: str = "<input>") -> Program:
    return lower(parse(text, filename))


# ---------------------------------------------------------------------------
# static analysis: global read/write sets, transitively through calls


def _direct_global_sets(program: Program, body: CoreExpr) -> tuple[set, set, set]:
    """(reads, writes, callees) syntactically present in `body`."""
    reads: set[str] = set()
    writes: set[str] = set()
    callees: set[str] = set()

    def walk(e: CoreExpr):
        if isinstance(e, Ref):
            if e.name in program.globals:
                reads.add(e.name)
        elif isinstance(e, SetGlobal):
            writes.add(e.name)
            walk(e.expr)
        elif isinstance(e, Prim):
            for a in e.args:
                walk(a)
        elif isinstance(e, If):
            walk(e.cond), walk(e.then), walk(e.other)
        elif isinstance(e, Let):
            walk(e.value), walk(e.body)
        elif isinstance(e, Call):
            if e.callee_kind == "def":
                callees.add(e.callee)
            for a in e.args:
                walk(a)
        elif isinstance(e, FnArg):
            if e.kind == "def":
                callees.add(e.name)
        elif isinstance(e, ListOp):
            for a in e.args:
                walk(a)
        elif isinstance(e, (Assert, Assume)):
            walk(e.expr)
        elif isinstance(e, Begin):
            for a in e.exprs:
                walk(a)

    walk(body)
    return reads, writes, callees


def _compute_global_sets(program: Program):
    direct = {}
    edges = {}
    for name, fd in program.functions.items():
        r, w, c = _direct_global_sets(program, fd.body)
        direct[name] = (r, w)
        edges[name] = c
        program.call_edges.setdefault(name, set()).update(c)
    # fixpoint over the call graph
    changed = True
    reads = {n: set(direct[n][0]) for n in program.functions}
    writes = {n: set(direct[n][1]) for n in program.functions}
    while changed:
        changed = False
        for name in program.functions:
            for callee in edges[name]:
                if callee not in reads:
                    continue
                if not reads[callee] <= reads[name]:
                    reads[name] |= reads[callee]
                    changed = True
                if not writes[callee] <= writes[name]:
                    writes[name] |= writes[callee]
                    changed = True
    for name, fd in program.functions.items():
        fd.reads = frozenset(reads[name])
        fd.writes = frozenset(writes[name])

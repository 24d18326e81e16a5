"""SMT-LIB2 HORN fragment -> clause system.

Accepts the standard shape: declarations of Bool-valued relations over
Int/Bool, then `assert`ed universally quantified implications whose head
is a relation application or `false`. Strict about unknown symbols and
sorts so it can serve as a well-formedness reference for the format.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .sexp import SmtSyntaxError, read_all


class HornParseError(Exception):
    pass


@dataclass
class HornClause:
    head: tuple | None          # (rel name, [arg exprs]) or None for false
    body_atoms: list            # [(rel name, [arg exprs])]
    constraints: list           # side-condition expressions
    binders: dict               # var -> 'Int' | 'Bool'


@dataclass
class HornSystem:
    relations: dict             # name -> [sorts]
    clauses: list = field(default_factory=list)
    has_check_sat: bool = False
    wants_model: bool = False

    def clauses_of(self, rel: str) -> list:
        return [c for c in self.clauses if c.head is not None and c.head[0] == rel]

    def queries(self) -> list:
        return [c for c in self.clauses if c.head is None]


_INT_FUNS = {"+", "-", "*", "ite"}
_BOOL_FUNS = {"and", "or", "not", "=>", "=", "<", "<=", ">", ">=", "ite",
              "true", "false"}


def _is_numeral(tok) -> bool:
    return isinstance(tok, str) and (tok.isdigit()
                                     or (tok[:1] == "-" and tok[1:].isdigit()))


def parse_script(text: str) -> HornSystem:
    try:
        forms = read_all(text)
    except SmtSyntaxError as e:
        raise HornParseError(str(e)) from e
    system = HornSystem(relations={})
    for form in forms:
        if not isinstance(form, list) or not form:
            raise HornParseError(f"bad top-level form: {form!r}")
        head = form[0]
        if head == "set-logic":
            if form[1] != "HORN":
                raise HornParseError(f"unsupported logic {form[1]}")
        elif head in ("set-info", "set-option", "push", "pop", "exit",
                      "get-info"):
            continue
        elif head == "declare-fun":
            _parse_declare(system, form)
        elif head == "assert":
            if len(form) != 2:
                raise HornParseError("assert takes one argument")
            system.clauses.append(_parse_clause(system, form[1]))
        elif head == "check-sat":
            system.has_check_sat = True
        elif head == "get-model":
            system.wants_model = True
        else:
            raise HornParseError(f"unsupported command {head}")
    return system


def _parse_declare(system: HornSystem, form):
    if len(form) != 4 or not isinstance(form[1], str) \
            or not isinstance(form[2], list):
        raise HornParseError("bad declare-fun")
    name, args, ret = form[1], form[2], form[3]
    if ret != "Bool":
        raise HornParseError(f"relation {name} must return Bool")
    for s in args:
        if s not in ("Int", "Bool"):
            raise HornParseError(f"unsupported sort {s} in {name}")
    if name in system.relations:
        raise HornParseError(f"duplicate declaration of {name}")
    system.relations[name] = list(args)


def _parse_clause(system: HornSystem, expr) -> HornClause:
    binders: dict[str, str] = {}
    if isinstance(expr, list) and expr and expr[0] == "forall":
        if len(expr) != 3 or not isinstance(expr[1], list):
            raise HornParseError("bad forall")
        for b in expr[1]:
            if not (isinstance(b, list) and len(b) == 2
                    and isinstance(b[0], str)):
                raise HornParseError("bad binder")
            if b[1] not in ("Int", "Bool"):
                raise HornParseError(f"unsupported binder sort {b[1]}")
            binders[b[0]] = b[1]
        expr = expr[2]
    if isinstance(expr, list) and expr and expr[0] == "=>":
        if len(expr) != 3:
            raise HornParseError("=> takes two arguments")
        body, head = expr[1], expr[2]
    else:
        body, head = "true", expr

    body_parts = body[1:] if isinstance(body, list) and body and body[0] == "and" \
        else [body]
    atoms = []
    constraints = []
    for part in body_parts:
        if isinstance(part, list) and part and isinstance(part[0], str) \
                and part[0] in system.relations:
            atoms.append(_parse_atom(system, part, binders))
        else:
            _check_expr(system, part, binders)
            constraints.append(part)

    if head == "false":
        parsed_head = None
    elif isinstance(head, list) and head and isinstance(head[0], str) \
            and head[0] in system.relations:
        parsed_head = _parse_atom(system, head, binders)
    else:
        raise HornParseError(
            f"clause head must be a relation application or false: {head!r}")
    return HornClause(parsed_head, atoms, constraints, binders)


def _parse_atom(system, form, binders) -> tuple:
    rel = form[0]
    args = form[1:]
    sorts = system.relations[rel]
    if len(args) != len(sorts):
        raise HornParseError(
            f"{rel} expects {len(sorts)} arguments, got {len(args)}")
    for a in args:
        _check_expr(system, a, binders)
    return (rel, list(args))


def _check_expr(system, expr, binders):
    """Well-formedness: every symbol is bound, declared or builtin."""
    if isinstance(expr, str):
        if _is_numeral(expr) or expr in ("true", "false"):
            return
        if expr in binders:
            return
        raise HornParseError(f"unbound symbol {expr!r}")
    if not isinstance(expr, list) or not expr:
        raise HornParseError(f"bad expression {expr!r}")
    head = expr[0]
    if not isinstance(head, str):
        raise HornParseError(f"bad application {expr!r}")
    if head in system.relations:
        raise HornParseError(
            f"relation {head} may not occur under other operators")
    if head not in (_INT_FUNS | _BOOL_FUNS):
        raise HornParseError(f"unsupported function {head!r}")
    for a in expr[1:]:
        _check_expr(system, a, binders)

"""Linear integer terms and quantifier-free boolean constraints.

Terms stay linear by construction: multiplication is a constant scale.
Smart constructors fold constants and flatten nested sums/connectives so
that structurally equal values compare equal, which the golden tests and
the memoization of relation instances rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union


class LinearityError(Exception):
    pass


# ---------------------------------------------------------------------------
# terms (integer sort)


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class IConst(Term):
    value: int


@dataclass(frozen=True)
class IVar(Term):
    name: str


@dataclass(frozen=True)
class Add(Term):
    args: tuple


@dataclass(frozen=True)
class Mul(Term):
    coeff: int
    arg: Term


@dataclass(frozen=True)
class ITE(Term):
    cond: "Formula"
    then: Term
    other: Term


def iconst(v: int) -> Term:
    return IConst(int(v))


def ivar(name: str) -> Term:
    return IVar(name)


def add(*parts: Term) -> Term:
    flat: list[Term] = []
    const = 0
    for p in parts:
        if isinstance(p, IConst):
            const += p.value
        elif isinstance(p, Add):
            for q in p.args:
                if isinstance(q, IConst):
                    const += q.value
                else:
                    flat.append(q)
        else:
            flat.append(p)
    if const != 0 or not flat:
        flat.append(IConst(const))
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(coeff: int, t: Term) -> Term:
    coeff = int(coeff)
    if coeff == 0:
        return IConst(0)
    if coeff == 1:
        return t
    if isinstance(t, IConst):
        return IConst(coeff * t.value)
    if isinstance(t, Mul):
        return mul(coeff * t.coeff, t.arg)
    if isinstance(t, Add):
        return add(*[mul(coeff, a) for a in t.args])
    return Mul(coeff, t)


def sub(a: Term, b: Term) -> Term:
    return add(a, mul(-1, b))


def ite(cond: "Formula", then: Term, other: Term) -> Term:
    if isinstance(cond, BConst):
        return then if cond.value else other
    if then == other:
        return then
    return ITE(cond, then, other)


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class BConst(Formula):
    value: bool


@dataclass(frozen=True)
class BVar(Formula):
    name: str


@dataclass(frozen=True)
class Cmp(Formula):
    """op is one of 'eq', 'le', 'lt' over integer terms."""

    op: str
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


TRUE = BConst(True)
FALSE = BConst(False)


def bconst(v: bool) -> Formula:
    return TRUE if v else FALSE


def bvar(name: str) -> Formula:
    return BVar(name)


def cmp(op: str, lhs: Term, rhs: Term) -> Formula:
    assert op in ("eq", "le", "lt")
    if isinstance(lhs, IConst) and isinstance(rhs, IConst):
        a, b = lhs.value, rhs.value
        return bconst(a == b if op == "eq" else a <= b if op == "le" else a < b)
    return Cmp(op, lhs, rhs)


def eq(a: Term, b: Term) -> Formula:
    return cmp("eq", a, b)


def le(a: Term, b: Term) -> Formula:
    return cmp("le", a, b)


def lt(a: Term, b: Term) -> Formula:
    return cmp("lt", a, b)


def ge(a: Term, b: Term) -> Formula:
    return cmp("le", b, a)


def gt(a: Term, b: Term) -> Formula:
    return cmp("lt", b, a)


def conj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, BConst):
            if not p.value:
                return FALSE
        elif isinstance(p, And):
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, BConst):
            if p.value:
                return TRUE
        elif isinstance(p, Or):
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def neg(f: Formula) -> Formula:
    if isinstance(f, BConst):
        return bconst(not f.value)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return disj(conj(a, b), conj(neg(a), neg(b)))


def bite(cond: Formula, then: Formula, other: Formula) -> Formula:
    if isinstance(cond, BConst):
        return then if cond.value else other
    if then == other:
        return then
    return disj(conj(cond, then), conj(neg(cond), other))


def conjuncts(f: Formula) -> tuple:
    if isinstance(f, And):
        return f.args
    if f == TRUE:
        return ()
    return (f,)


# ---------------------------------------------------------------------------
# traversal helpers


def free_vars(x: Union[Term, Formula]) -> set[str]:
    out: set[str] = set()
    _walk_vars(x, out)
    return out


def _walk_vars(x, out: set[str]):
    if isinstance(x, (IConst, BConst)):
        return
    if isinstance(x, (IVar, BVar)):
        out.add(x.name)
    elif isinstance(x, Add):
        for a in x.args:
            _walk_vars(a, out)
    elif isinstance(x, Mul):
        _walk_vars(x.arg, out)
    elif isinstance(x, ITE):
        _walk_vars(x.cond, out)
        _walk_vars(x.then, out)
        _walk_vars(x.other, out)
    elif isinstance(x, Cmp):
        _walk_vars(x.lhs, out)
        _walk_vars(x.rhs, out)
    elif isinstance(x, (And, Or)):
        for a in x.args:
            _walk_vars(a, out)
    elif isinstance(x, Not):
        _walk_vars(x.arg, out)
    else:
        raise TypeError(f"not a term or formula: {x!r}")


def bool_vars(x: Union[Term, Formula]) -> set[str]:
    """Names of boolean variables occurring anywhere in x."""
    out: set[str] = set()

    def walk(y):
        if isinstance(y, BVar):
            out.add(y.name)
        elif isinstance(y, Add):
            for a in y.args:
                walk(a)
        elif isinstance(y, Mul):
            walk(y.arg)
        elif isinstance(y, ITE):
            walk(y.cond), walk(y.then), walk(y.other)
        elif isinstance(y, Cmp):
            walk(y.lhs), walk(y.rhs)
        elif isinstance(y, (And, Or)):
            for a in y.args:
                walk(a)
        elif isinstance(y, Not):
            walk(y.arg)

    walk(x)
    return out


def subst(x, mapping: Mapping[str, Union[Term, Formula]]):
    """Substitute variables by name. IVar maps to Term, BVar to Formula."""
    if isinstance(x, (IConst, BConst)):
        return x
    if isinstance(x, IVar):
        return mapping.get(x.name, x)
    if isinstance(x, BVar):
        return mapping.get(x.name, x)
    if isinstance(x, Add):
        return add(*[subst(a, mapping) for a in x.args])
    if isinstance(x, Mul):
        return mul(x.coeff, subst(x.arg, mapping))
    if isinstance(x, ITE):
        return ite(subst(x.cond, mapping), subst(x.then, mapping), subst(x.other, mapping))
    if isinstance(x, Cmp):
        return cmp(x.op, subst(x.lhs, mapping), subst(x.rhs, mapping))
    if isinstance(x, And):
        return conj(*[subst(a, mapping) for a in x.args])
    if isinstance(x, Or):
        return disj(*[subst(a, mapping) for a in x.args])
    if isinstance(x, Not):
        return neg(subst(x.arg, mapping))
    raise TypeError(f"not a term or formula: {x!r}")


def evaluate(x, env: Mapping[str, Union[int, bool]]):
    """Concrete evaluation; every free variable must be bound in env."""
    if isinstance(x, IConst):
        return x.value
    if isinstance(x, BConst):
        return x.value
    if isinstance(x, (IVar, BVar)):
        return env[x.name]
    if isinstance(x, Add):
        return sum(evaluate(a, env) for a in x.args)
    if isinstance(x, Mul):
        return x.coeff * evaluate(x.arg, env)
    if isinstance(x, ITE):
        return evaluate(x.then if evaluate(x.cond, env) else x.other, env)
    if isinstance(x, Cmp):
        a, b = evaluate(x.lhs, env), evaluate(x.rhs, env)
        return a == b if x.op == "eq" else a <= b if x.op == "le" else a < b
    if isinstance(x, And):
        return all(evaluate(a, env) for a in x.args)
    if isinstance(x, Or):
        return any(evaluate(a, env) for a in x.args)
    if isinstance(x, Not):
        return not evaluate(x.arg, env)
    raise TypeError(f"not a term or formula: {x!r}")


def linearize(t: Term) -> tuple[dict[str, int], int]:
    """Flatten an ite-free term into (coefficients, constant).

    Raises LinearityError when the term contains an ite node.
    """
    coeffs: dict[str, int] = {}
    const = _lin(t, 1, coeffs)
    return {k: v for k, v in coeffs.items() if v != 0}, const


def _lin(t: Term, k: int, coeffs: dict[str, int]) -> int:
    if isinstance(t, IConst):
        return k * t.value
    if isinstance(t, IVar):
        coeffs[t.name] = coeffs.get(t.name, 0) + k
        return 0
    if isinstance(t, Add):
        return sum(_lin(a, k, coeffs) for a in t.args)
    if isinstance(t, Mul):
        return _lin(t.arg, k * t.coeff, coeffs)
    if isinstance(t, ITE):
        raise LinearityError("ite term is not linear")
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# rendering (debug dumps and the human-readable clause printer)


def render_term(t: Term) -> str:
    if isinstance(t, IConst):
        return str(t.value)
    if isinstance(t, IVar):
        return t.name
    if isinstance(t, Add):
        parts = [render_term(t.args[0])]
        for a in t.args[1:]:
            if isinstance(a, Mul) and a.coeff < 0:
                parts.append(f"- {render_term(mul(-1, a))}")
            elif isinstance(a, IConst) and a.value < 0:
                parts.append(f"- {-a.value}")
            else:
                parts.append(f"+ {render_term(a)}")
        return " ".join(parts)
    if isinstance(t, Mul):
        return f"{t.coeff} * {_paren_term(t.arg)}"
    if isinstance(t, ITE):
        return f"ite({render_formula(t.cond)}, {render_term(t.then)}, {render_term(t.other)})"
    raise TypeError(f"not a term: {t!r}")


def _paren_term(t: Term) -> str:
    s = render_term(t)
    return f"({s})" if isinstance(t, Add) else s


_CMP_SYM = {"eq": "=", "le": "<=", "lt": "<"}


def render_formula(f: Formula) -> str:
    if isinstance(f, BConst):
        return "true" if f.value else "false"
    if isinstance(f, BVar):
        return f.name
    if isinstance(f, Cmp):
        return f"{render_term(f.lhs)} {_CMP_SYM[f.op]} {render_term(f.rhs)}"
    if isinstance(f, And):
        return " & ".join(_paren_formula(a) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_paren_formula(a) for a in f.args)
    if isinstance(f, Not):
        return f"not {_paren_formula(f.arg)}"
    raise TypeError(f"not a formula: {f!r}")


def _paren_formula(f: Formula) -> str:
    s = render_formula(f)
    return f"({s})" if isinstance(f, (And, Or)) else s


# ---------------------------------------------------------------------------
# fresh names


class NameGen:
    """Deterministic fresh-name source; one instance per pipeline run."""

    def __init__(self):
        self._counters: dict[str, int] = {}

    def fresh(self, prefix: str) -> str:
        n = self._counters.get(prefix, 0)
        self._counters[prefix] = n + 1
        return f"{prefix}%{n}"

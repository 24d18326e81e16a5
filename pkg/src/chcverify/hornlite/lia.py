"""Quantifier-free linear integer arithmetic with booleans.

Formulas are normalized trees:

    ('true',) | ('false',)
    ('lit', var, polarity)        boolean literal
    ('le', LinSum)                sum <= 0
    ('eq', LinSum)                sum == 0
    ('and', [..]) | ('or', [..])

Integer feasibility of a literal conjunction goes through HiGHS
(scipy.optimize.milp) with full integrality; strict comparisons are
integer-tightened (a < b becomes a - b + 1 <= 0), so answers are exact.
Disjunctions and lifted ite cases are handled by case splitting with
feasibility pruning.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .parser import HornParseError, _is_numeral


class LiaError(Exception):
    pass


@dataclass(frozen=True)
class LinSum:
    coeffs: tuple      # sorted ((var, coeff), ...), coeff != 0
    const: int

    @staticmethod
    def of(coeffs: dict, const: int) -> "LinSum":
        return LinSum(tuple(sorted((v, c) for v, c in coeffs.items() if c != 0)),
                      int(const))

    def plus(self, other: "LinSum") -> "LinSum":
        d = dict(self.coeffs)
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + c
        return LinSum.of(d, self.const + other.const)

    def scale(self, k: int) -> "LinSum":
        return LinSum.of({v: c * k for v, c in self.coeffs}, self.const * k)

    def shift(self, k: int) -> "LinSum":
        return LinSum(self.coeffs, self.const + k)

    def variables(self) -> set:
        return {v for v, _ in self.coeffs}

    def value(self, model: dict) -> int:
        return self.const + sum(c * int(model.get(v, 0)) for v, c in self.coeffs)

    def is_const(self) -> bool:
        return not self.coeffs


TRUE = ("true",)
FALSE = ("false",)


def mk_and(parts) -> tuple:
    flat = []
    for p in parts:
        if p == FALSE:
            return FALSE
        if p == TRUE:
            continue
        if p[0] == "and":
            flat.extend(p[1])
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return ("and", flat)


def mk_or(parts) -> tuple:
    flat = []
    for p in parts:
        if p == TRUE:
            return TRUE
        if p == FALSE:
            continue
        if p[0] == "or":
            flat.extend(p[1])
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return ("or", flat)


def negate(f: tuple) -> tuple:
    kind = f[0]
    if kind == "true":
        return FALSE
    if kind == "false":
        return TRUE
    if kind == "lit":
        return ("lit", f[1], not f[2])
    if kind == "le":       # not(s <= 0)  <=>  -s + 1 <= 0
        return ("le", f[1].scale(-1).shift(1))
    if kind == "eq":
        s = f[1]
        return mk_or([("le", s.shift(1)), ("le", s.scale(-1).shift(1))])
    if kind == "and":
        return mk_or([negate(a) for a in f[1]])
    if kind == "or":
        return mk_and([negate(a) for a in f[1]])
    raise LiaError(f"bad formula {f!r}")


def evaluate(f: tuple, model: dict) -> bool:
    kind = f[0]
    if kind == "true":
        return True
    if kind == "false":
        return False
    if kind == "lit":
        return bool(model.get(f[1], False)) == f[2]
    if kind == "le":
        return f[1].value(model) <= 0
    if kind == "eq":
        return f[1].value(model) == 0
    if kind == "and":
        return all(evaluate(a, model) for a in f[1])
    if kind == "or":
        return any(evaluate(a, model) for a in f[1])
    raise LiaError(f"bad formula {f!r}")


# ---------------------------------------------------------------------------
# compilation from parsed SMT expressions


def compile_bool(expr, env: dict) -> tuple:
    if isinstance(expr, str):
        if expr == "true":
            return TRUE
        if expr == "false":
            return FALSE
        if env.get(expr) == "Bool":
            return ("lit", expr, True)
        raise LiaError(f"expected a boolean, got {expr!r}")
    head = expr[0]
    if head == "not":
        return negate(compile_bool(expr[1], env))
    if head == "and":
        return mk_and([compile_bool(a, env) for a in expr[1:]])
    if head == "or":
        return mk_or([compile_bool(a, env) for a in expr[1:]])
    if head == "=>":
        return mk_or([negate(compile_bool(expr[1], env)),
                      compile_bool(expr[2], env)])
    if head == "ite":
        c = compile_bool(expr[1], env)
        return mk_or([mk_and([c, compile_bool(expr[2], env)]),
                      mk_and([negate(c), compile_bool(expr[3], env)])])
    if head in ("<", "<=", ">", ">="):
        return _compare(head, expr[1], expr[2], env)
    if head == "=":
        if _is_bool_expr(expr[1], env) or _is_bool_expr(expr[2], env):
            a, b = compile_bool(expr[1], env), compile_bool(expr[2], env)
            return mk_or([mk_and([a, b]), mk_and([negate(a), negate(b)])])
        return _compare("=", expr[1], expr[2], env)
    raise LiaError(f"unsupported boolean operator {head!r}")


def _is_bool_expr(expr, env) -> bool:
    if isinstance(expr, str):
        return expr in ("true", "false") or env.get(expr) == "Bool"
    head = expr[0]
    if head in ("and", "or", "not", "=>", "<", "<=", ">", ">=", "="):
        return True
    if head == "ite":
        return _is_bool_expr(expr[2], env)
    return False


def _compare(op, lhs, rhs, env) -> tuple:
    cases = []
    for gl, sl in compile_term(lhs, env):
        for gr, sr in compile_term(rhs, env):
            diff = sl.plus(sr.scale(-1))
            if op == "=":
                atom = ("eq", diff)
            elif op == "<=":
                atom = ("le", diff)
            elif op == "<":
                atom = ("le", diff.shift(1))
            elif op == ">=":
                atom = ("le", diff.scale(-1))
            else:  # >
                atom = ("le", diff.scale(-1).shift(1))
            if atom[1].is_const():
                ok = atom[1].const == 0 if atom[0] == "eq" else atom[1].const <= 0
                atom = TRUE if ok else FALSE
            cases.append(mk_and([gl, gr, atom]))
    return mk_or(cases)


def compile_term(expr, env) -> list:
    """Lift ites: returns [(guard, LinSum)] cases covering the term."""
    if isinstance(expr, str):
        if _is_numeral(expr):
            return [(TRUE, LinSum.of({}, int(expr)))]
        if env.get(expr) == "Int":
            return [(TRUE, LinSum.of({expr: 1}, 0))]
        raise LiaError(f"expected an integer, got {expr!r}")
    head = expr[0]
    if head == "+":
        cases = compile_term(expr[1], env)
        for arg in expr[2:]:
            cases = [(mk_and([g1, g2]), s1.plus(s2))
                     for g1, s1 in cases for g2, s2 in compile_term(arg, env)]
        return cases
    if head == "-":
        if len(expr) == 2:
            return [(g, s.scale(-1)) for g, s in compile_term(expr[1], env)]
        cases = compile_term(expr[1], env)
        for arg in expr[2:]:
            cases = [(mk_and([g1, g2]), s1.plus(s2.scale(-1)))
                     for g1, s1 in cases for g2, s2 in compile_term(arg, env)]
        return cases
    if head == "*":
        if len(expr) != 3:
            raise LiaError("* takes two arguments")
        a = compile_term(expr[1], env)
        b = compile_term(expr[2], env)
        if len(a) == 1 and a[0][1].is_const():
            k = a[0][1].const
            return [(g, s.scale(k)) for g, s in b]
        if len(b) == 1 and b[0][1].is_const():
            k = b[0][1].const
            return [(g, s.scale(k)) for g, s in a]
        raise LiaError("nonlinear multiplication")
    if head == "ite":
        c = compile_bool(expr[1], env)
        out = [(mk_and([c, g]), s) for g, s in compile_term(expr[2], env)]
        out += [(mk_and([negate(c), g]), s) for g, s in compile_term(expr[3], env)]
        return out
    raise LiaError(f"unsupported integer operator {head!r}")


# ---------------------------------------------------------------------------
# satisfiability


def _contradicted(f, facts: set, lits: dict) -> bool:
    """Cheap syntactic refutation of a disjunct against asserted facts."""
    if f[0] == "lit":
        return lits.get(f[1], f[2]) != f[2]
    if f[0] == "le":
        # s <= 0 contradicted by an asserted -s + 1 <= 0  (i.e. s >= 1)
        return ("le", f[1].scale(-1).shift(1)) in facts
    if f[0] == "eq":
        s = f[1]
        return ("le", s.scale(-1).shift(1)) in facts \
            or ("le", s.shift(1)) in facts
    if f[0] == "and":
        return any(_contradicted(a, facts, lits) for a in f[1])
    return False


_FEAS_CACHE_LIMIT = 200000


class Solver:
    """Case-splitting SAT over the normalized trees, HiGHS at the leaves."""

    def __init__(self, rng=None):
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.milp_calls = 0
        self._cache: dict = {}

    def sat(self, conjuncts, hint: dict | None = None,
            randomize: bool = False) -> dict | None:
        """A model of the conjunction, or None when unsatisfiable."""
        if hint is not None and all(evaluate(c, hint) for c in conjuncts):
            if not randomize:
                return dict(hint)
        return self._solve(list(conjuncts), [], {}, randomize)

    def _solve(self, pending, atoms, lits, randomize) -> dict | None:
        # propagate conjunctions and literals, collect splits
        splits = []
        work = list(pending)
        while work:
            f = work.pop()
            kind = f[0]
            if kind == "true":
                continue
            if kind == "false":
                return None
            if kind == "and":
                work.extend(f[1])
            elif kind == "lit":
                if lits.get(f[1], f[2]) != f[2]:
                    return None
                lits = {**lits, f[1]: f[2]}
            elif kind in ("le", "eq"):
                atoms = atoms + [f]
            elif kind == "or":
                splits.append(f)
            else:
                raise LiaError(f"bad formula {f!r}")
        model = self._feasible(atoms, lits, randomize)
        if model is None:
            return None
        if not splits:
            return model
        if all(evaluate(s, model) for s in splits):
            return model
        # drop disjuncts syntactically contradicted by asserted facts; most
        # lifted ite cases die here once their condition is decided
        facts = set(atoms)
        first = min(splits, key=lambda s: 0 if evaluate(s, model) else 1)
        rest = [s for s in splits if s is not first]
        order = sorted(first[1], key=lambda d: 0 if evaluate(d, model) else 1)
        for disjunct in order:
            if _contradicted(disjunct, facts, lits):
                continue
            got = self._solve(rest + [disjunct], atoms, lits, randomize)
            if got is not None:
                return got
        return None

    def _feasible(self, atoms, lits, randomize) -> dict | None:
        int_vars = sorted({v for a in atoms for v in a[1].variables()})
        if not atoms:
            return dict(lits)
        key = None
        if not randomize:
            key = (tuple(atoms), tuple(sorted(lits.items())))
            if key in self._cache:
                cached = self._cache[key]
                return dict(cached) if cached is not None else None
        model = self._milp(atoms, int_vars, randomize)
        if model is not None:
            model.update(lits)
        if key is not None and len(self._cache) < _FEAS_CACHE_LIMIT:
            self._cache[key] = dict(model) if model is not None else None
        return model

    def _milp(self, atoms, int_vars, randomize) -> dict | None:
        self.milp_calls += 1
        index = {v: i for i, v in enumerate(int_vars)}
        n = len(int_vars)
        if n == 0:
            for a in atoms:
                ok = a[1].const == 0 if a[0] == "eq" else a[1].const <= 0
                if not ok:
                    return None
            return {}
        rows, lbs, ubs = [], [], []
        for kind, s in atoms:
            row = np.zeros(n)
            for v, c in s.coeffs:
                row[index[v]] = c
            rows.append(row)
            if kind == "eq":
                lbs.append(-s.const)
                ubs.append(-s.const)
            else:
                lbs.append(-np.inf)
                ubs.append(-s.const)
        if randomize:
            c = self.rng.integers(-3, 4, size=n).astype(float)
        else:
            c = np.zeros(n)
        res = milp(c=c,
                   constraints=[LinearConstraint(np.array(rows), lbs, ubs)],
                   integrality=np.ones(n),
                   bounds=Bounds(-np.inf, np.inf))
        if res.status == 2:      # proven infeasible
            return None
        if res.x is None:
            if randomize:        # a wild objective can be unbounded; retry flat
                return self._milp(atoms, int_vars, False)
            return None
        model = {v: int(round(res.x[index[v]])) for v in int_vars}
        for kind, s in atoms:
            val = s.value(model)
            if (kind == "eq" and val != 0) or (kind == "le" and val > 0):
                if randomize:
                    return self._milp(atoms, int_vars, False)
                # never observed with unit-scale coefficients; fail loudly
                # rather than give a wrong feasibility answer
                raise LiaError("MILP returned a non-integral point")
        return model

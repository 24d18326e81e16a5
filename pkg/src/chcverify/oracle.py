"""Bounded brute-force oracle: a concrete interpreter plus input enumeration.

Deliberately shares no code with the encoder. The interpreter evaluates
the core IR directly; the enumerator walks all symbolic assignments with
integers in [-B, B], list lengths up to K with elements in [-B, B], and
recursion capped at depth D. `and`/`or` are strict, `if` is lazy, and
head/tail of an empty list blocks the execution (matching the guard
semantics of the encoding), as does a failed assume.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .frontend import (Assert, Assume, Begin, Call, FnArg, If, Let, ListOp, Lit,
                       Prim, Program, Ref, SetGlobal)


class OracleViolation(Exception):
    def __init__(self, what: str, loc=(0, 0)):
        super().__init__(what)
        self.what = what
        self.loc = loc


class OracleBlocked(Exception):
    """head/tail of an empty list: the path is outside the semantics."""


class OracleAssumeFailed(Exception):
    pass


class OracleDepthExceeded(Exception):
    pass


@dataclass(frozen=True)
class FnVal:
    name: str


@dataclass
class OracleConfig:
    max_list_len: int = 4      # K
    int_bound: int = 4         # B
    max_depth: int = 16        # D
    max_runs: int = 200_000
    seed: int = 7

    def __post_init__(self):
        if self.max_list_len < 0 or self.int_bound < 0 or self.max_depth < 1:
            raise ValueError("oracle bounds must be nonnegative (depth >= 1)")


@dataclass
class OracleResult:
    status: str                # VIOLATION | NO-VIOLATION-UP-TO-BOUND | DEPTH-EXCEEDED
    witness: dict | None = None
    what: str = ""
    runs: int = 0
    blocked: int = 0
    assumed_out: int = 0
    depth_exceeded: int = 0
    sampled: bool = False


class Interp:
    def __init__(self, program: Program, cfg: OracleConfig):
        self.program = program
        self.cfg = cfg

    # -- expression evaluation ------------------------------------------------

    def eval(self, e, env, globs, depth):
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, Ref):
            if e.name in env:
                return env[e.name]
            return globs[e.name]
        if isinstance(e, FnArg):
            if e.kind == "def":
                return FnVal(e.name)
            return env[e.name]
        if isinstance(e, Prim):
            vals = [self.eval(a, env, globs, depth) for a in e.args]
            return _prim(e.op, vals)
        if isinstance(e, If):
            c = self.eval(e.cond, env, globs, depth)
            return self.eval(e.then if c else e.other, env, globs, depth)
        if isinstance(e, Let):
            v = self.eval(e.value, env, globs, depth)
            env2 = dict(env)
            env2[e.name] = v
            return self.eval(e.body, env2, globs, depth)
        if isinstance(e, Begin):
            out = None
            for x in e.exprs:
                out = self.eval(x, env, globs, depth)
            return out
        if isinstance(e, Assert):
            v = self.eval(e.expr, env, globs, depth)
            if not v:
                raise OracleViolation("in-body assertion failed")
            return True
        if isinstance(e, Assume):
            v = self.eval(e.expr, env, globs, depth)
            if not v:
                raise OracleAssumeFailed()
            return True
        if isinstance(e, SetGlobal):
            v = self.eval(e.expr, env, globs, depth)
            globs[e.name] = v
            return v
        if isinstance(e, Call):
            callee = e.callee if e.callee_kind == "def" else env[e.callee].name
            args = [self.eval(a, env, globs, depth) for a in e.args]
            return self.apply(callee, args, globs, depth)
        if isinstance(e, ListOp):
            return self.eval_listop(e, env, globs, depth)
        raise TypeError(f"oracle cannot evaluate {e!r}")

    def apply(self, fname, args, globs, depth):
        if depth >= self.cfg.max_depth:
            raise OracleDepthExceeded()
        fd = self.program.functions[fname]
        env = {p.name: v for p, v in zip(fd.params, args)}
        return self.eval(fd.body, env, globs, depth + 1)

    def eval_listop(self, e, env, globs, depth):
        op = e.op
        if op in ("map", "foldl", "foldr"):
            f = self.eval(e.args[0], env, globs, depth)
            rest = [self.eval(a, env, globs, depth) for a in e.args[1:]]
            if op == "map":
                return tuple(self.apply(f.name, [x], globs, depth)
                             for x in rest[0])
            init, lst = rest
            acc = init
            order = lst if op == "foldl" else tuple(reversed(lst))
            for x in order:
                acc = self.apply(f.name, [x, acc], globs, depth)
            return acc
        vals = [self.eval(a, env, globs, depth) for a in e.args]
        if op == "length":
            return len(vals[0])
        if op == "head":
            if not vals[0]:
                raise OracleBlocked()
            return vals[0][0]
        if op == "tail":
            if not vals[0]:
                raise OracleBlocked()
            return vals[0][1:]
        if op == "cons":
            return (vals[0],) + vals[1]
        if op == "append":
            return vals[0] + vals[1]
        raise TypeError(f"oracle cannot evaluate list op {op}")

    # -- one whole-program run -------------------------------------------------

    def run(self, assignment: dict):
        """Execute the program under one concrete symbolic assignment."""
        env = dict(assignment)
        globs = {}
        for g, init in self.program.globals.items():
            globs[g] = self.eval(init, env, globs, 0)
        for form in self.program.main_forms:
            if form.kind == "bind":
                env[form.name] = self.eval(form.expr, env, globs, 0)
            elif form.kind == "assume":
                if not self.eval(form.expr, env, globs, 0):
                    raise OracleAssumeFailed()
            elif form.kind == "assert":
                if not self.eval(form.expr, env, globs, 0):
                    raise OracleViolation("top-level assertion failed", form.loc)
            else:
                self.eval(form.expr, env, globs, 0)
        for i, expr in enumerate(self.program.verify_exprs or ()):
            if not self.eval(expr, env, globs, 0):
                raise OracleViolation(f"verify condition {i + 1} failed",
                                      self.program.verify_loc)


def _prim(op, vals):
    if op == "+":
        return sum(vals)
    if op == "-":
        return vals[0] - vals[1]
    if op == "neg":
        return -vals[0]
    if op == "*":
        return vals[0] * vals[1]
    if op == "<":
        return vals[0] < vals[1]
    if op == "<=":
        return vals[0] <= vals[1]
    if op == ">":
        return vals[0] > vals[1]
    if op == ">=":
        return vals[0] >= vals[1]
    if op == "=":
        return vals[0] == vals[1]
    if op == "and":
        return all(vals)
    if op == "or":
        return any(vals)
    if op == "not":
        return not vals[0]
    if op == "=>":
        return (not vals[0]) or vals[1]
    raise TypeError(f"oracle cannot evaluate primitive {op}")


# ---------------------------------------------------------------------------
# input enumeration


def _domain(sort: str, cfg: OracleConfig):
    if sort == "int":
        return list(range(-cfg.int_bound, cfg.int_bound + 1))
    if sort == "bool":
        return [False, True]
    elems = list(range(-cfg.int_bound, cfg.int_bound + 1))
    lists = []
    for n in range(cfg.max_list_len + 1):
        lists.extend(itertools.product(elems, repeat=n))
    return lists


def enumerate_assignments(program: Program, cfg: OracleConfig):
    """All assignments when the space fits the run budget, else a seeded
    sample that always includes the all-smallest corner."""
    names = list(program.symconsts.keys())
    domains = [_domain(s, cfg) for s in program.symconsts.values()]
    total = 1
    for d in domains:
        total *= len(d)
    if total <= cfg.max_runs:
        for combo in itertools.product(*domains):
            yield dict(zip(names, combo)), False
        return
    import random
    rng = random.Random(cfg.seed)
    smallest = [d[0] if program.symconsts[n] != "int" else 0
                for n, d in zip(names, domains)]
    yield dict(zip(names, smallest)), True
    for _ in range(cfg.max_runs - 1):
        combo = [d[rng.randrange(len(d))] for d in domains]
        yield dict(zip(names, combo)), True


def run_oracle(program: Program, cfg: OracleConfig | None = None) -> OracleResult:
    cfg = cfg or OracleConfig()
    interp = Interp(program, cfg)
    result = OracleResult(status="NO-VIOLATION-UP-TO-BOUND")
    for assignment, sampled in enumerate_assignments(program, cfg):
        result.sampled = result.sampled or sampled
        result.runs += 1
        try:
            interp.run(assignment)
        except OracleViolation as v:
            result.status = "VIOLATION"
            result.witness = assignment
            result.what = v.what
            return result
        except OracleBlocked:
            result.blocked += 1
        except OracleAssumeFailed:
            result.assumed_out += 1
        except OracleDepthExceeded:
            result.depth_exceeded += 1
    if result.depth_exceeded:
        result.status = "DEPTH-EXCEEDED"
    return result

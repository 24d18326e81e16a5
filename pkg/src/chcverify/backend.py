"""SMT-LIB2 HORN serialization and the external solver driver.

The clause system is written as a `(set-logic HORN)` script: one
`declare-fun` into Bool per relation, one universally quantified
implication per clause, the query as an implication to false, then
`(check-sat)` and `(get-model)`. Satisfiable means SAFE (an inductive
interpretation of the relation symbols exists); unsatisfiable means
UNSAFE; anything else is UNKNOWN.

Solving happens strictly in a subprocess: `<exe> [engine flags] <file>`,
answer read from the first stdout token.
"""

from __future__ import annotations

import os
import re
import shutil
import subprocess
import sys as _sys
import tempfile
import time
from dataclasses import dataclass, field

from . import terms as T
from .encoder import ChcSystem


class BackendError(Exception):
    pass


# ---------------------------------------------------------------------------
# emission


_SIMPLE_SYMBOL = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*$")


def smt_symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.match(name):
        return name
    return f"|{name}|"


def smt_term(x) -> str:
    if isinstance(x, T.IConst):
        return str(x.value) if x.value >= 0 else f"(- {-x.value})"
    if isinstance(x, T.IVar):
        return smt_symbol(x.name)
    if isinstance(x, T.Add):
        return f"(+ {' '.join(smt_term(a) for a in x.args)})"
    if isinstance(x, T.Mul):
        return f"(* {smt_term(T.iconst(x.coeff))} {smt_term(x.arg)})"
    if isinstance(x, T.ITE):
        return f"(ite {smt_formula(x.cond)} {smt_term(x.then)} {smt_term(x.other)})"
    raise BackendError(f"cannot serialize term {x!r}")


def smt_formula(f) -> str:
    if isinstance(f, T.BConst):
        return "true" if f.value else "false"
    if isinstance(f, T.BVar):
        return smt_symbol(f.name)
    if isinstance(f, T.Cmp):
        op = {"eq": "=", "le": "<=", "lt": "<"}[f.op]
        return f"({op} {smt_term(f.lhs)} {smt_term(f.rhs)})"
    if isinstance(f, T.And):
        return f"(and {' '.join(smt_formula(a) for a in f.args)})"
    if isinstance(f, T.Or):
        return f"(or {' '.join(smt_formula(a) for a in f.args)})"
    if isinstance(f, T.Not):
        return f"(not {smt_formula(f.arg)})"
    raise BackendError(f"cannot serialize formula {f!r}")


def _smt_sort(sort: str) -> str:
    return "Bool" if sort == "bool" else "Int"


def emit(system: ChcSystem) -> str:
    """Deterministic SMT-LIB2 HORN script for the clause system."""
    lines = ["(set-logic HORN)"]
    for rel in system.relations.values():
        sorts = " ".join(_smt_sort(s) for s in rel.arg_sorts)
        lines.append(f"(declare-fun {smt_symbol(rel.name)} ({sorts}) Bool)")
    for clause in system.clauses:
        lines.append(_emit_clause(system, clause))
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def _emit_clause(system: ChcSystem, clause) -> str:
    body_parts = []
    for atom in clause.atoms:
        args = " ".join(
            smt_term(a) if isinstance(a, T.Term) else smt_formula(a)
            for a in atom.args)
        body_parts.append(f"({smt_symbol(atom.rel)} {args})")
    for f in T.conjuncts(clause.constraint):
        body_parts.append(smt_formula(f))
    body = body_parts[0] if len(body_parts) == 1 else \
        "(and " + " ".join(body_parts) + ")" if body_parts else "true"

    bound: dict[str, str] = {}
    if clause.head_rel is not None:
        rsym = system.relations[clause.head_rel]
        head_args = []
        for name, sort in zip(clause.head_args, rsym.arg_sorts):
            bound[name] = _smt_sort(sort)
            head_args.append(smt_symbol(name))
        head = f"({smt_symbol(clause.head_rel)} {' '.join(head_args)})"
    else:
        head = "false"
    for v in sorted(_clause_free_vars(system, clause)):
        if v not in bound:
            bound[v] = "Bool" if v in _clause_bool_vars(system, clause) else "Int"
    if bound:
        binders = " ".join(f"({smt_symbol(v)} {s})" for v, s in bound.items())
        return f"(assert (forall ({binders}) (=> {body} {head})))"
    return f"(assert (=> {body} {head}))"


def _clause_free_vars(system, clause) -> set:
    vs = set(T.free_vars(clause.constraint))
    for a in clause.atoms:
        for arg in a.args:
            vs |= T.free_vars(arg)
    return vs


def _clause_bool_vars(system, clause) -> set:
    out = set(T.bool_vars(clause.constraint))
    for a in clause.atoms:
        rsym = system.relations[a.rel]
        for pos, arg in enumerate(a.args):
            out |= T.bool_vars(arg)
            if isinstance(arg, T.BVar):
                out.add(arg.name)
            # integer positions contribute nothing further
    return out


# ---------------------------------------------------------------------------
# solving


@dataclass
class SolverConfig:
    solver: list | None = None        # argv prefix; None = auto-detect
    engine: str = "default"           # 'default' | 'spacer'
    timeout: float = 30.0
    keep_smt2: bool = False
    smt2_path: str | None = None

    def __post_init__(self):
        if self.timeout <= 0:
            raise BackendError("timeout must be positive")


@dataclass
class Verdict:
    outcome: str                      # 'SAFE' | 'UNSAFE' | 'UNKNOWN'
    model: str = ""                   # invariant model text (SAFE only)
    wall: float = 0.0
    raw: str = ""
    solver_cmd: tuple = ()


def find_solver(explicit: str | None = None) -> list:
    """Resolve the solver argv prefix: explicit path, z3, or the bundled
    reference Horn solver."""
    if explicit:
        return [explicit]
    z3 = shutil.which("z3")
    if z3:
        return [z3]
    lite = shutil.which("chc-horn-lite")
    if lite:
        return [lite]
    return [_sys.executable, "-m", "chcverify.hornlite"]


def engine_flags(argv: list, engine: str) -> list:
    exe = os.path.basename(argv[0]) if argv else ""
    if engine == "spacer" and "z3" in exe:
        return ["fp.engine=spacer"]
    return []


def solve(system: ChcSystem, cfg: SolverConfig) -> Verdict:
    text = emit(system)
    if cfg.smt2_path:
        path = cfg.smt2_path
        with open(path, "w") as fh:
            fh.write(text)
        cleanup = False
    else:
        fd, path = tempfile.mkstemp(suffix=".smt2", prefix="chc-verify-")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        cleanup = not cfg.keep_smt2
    argv = cfg.solver if cfg.solver is not None else find_solver()
    cmd = list(argv) + engine_flags(argv, cfg.engine) + [path]
    start = time.monotonic()
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True,
                              timeout=cfg.timeout)
        raw = proc.stdout
    except subprocess.TimeoutExpired as e:
        wall = time.monotonic() - start
        raw = (e.stdout or b"").decode() if isinstance(e.stdout, bytes) \
            else (e.stdout or "")
        return _finish(Verdict("UNKNOWN", raw=raw + "\n[timeout]", wall=wall,
                               solver_cmd=tuple(cmd)), path, cleanup)
    except FileNotFoundError:
        if cleanup and os.path.exists(path):
            os.unlink(path)
        raise BackendError(f"solver executable not found: {cmd[0]}")
    wall = time.monotonic() - start
    lines = raw.strip().splitlines()
    first = lines[0].strip() if lines else ""
    if first == "sat":
        v = Verdict("SAFE", model="\n".join(lines[1:]), wall=wall, raw=raw,
                    solver_cmd=tuple(cmd))
    elif first == "unsat":
        v = Verdict("UNSAFE", wall=wall, raw=raw, solver_cmd=tuple(cmd))
    else:
        v = Verdict("UNKNOWN", wall=wall, raw=raw, solver_cmd=tuple(cmd))
    return _finish(v, path, cleanup)


def _finish(verdict: Verdict, path: str, cleanup: bool) -> Verdict:
    if cleanup and os.path.exists(path):
        os.unlink(path)
    return verdict


EXIT_CODES = {"SAFE": 0, "UNSAFE": 1, "UNKNOWN": 2}

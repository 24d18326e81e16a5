"""The solving loop: bounded unfolding for bugs, synthesis for proofs."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import lia
from .invariants import (Synthesizer, eval_arg, generate_candidates,
                         precompile, sample_relations)
from .lia import Solver, compile_bool, mk_and, mk_or
from .parser import HornParseError, HornSystem, parse_script


@dataclass
class HornResult:
    status: str                  # 'sat' | 'unsat' | 'unknown'
    model: str = ""
    detail: str = ""


class _Deadline:
    def __init__(self, seconds: float | None):
        self.at = time.monotonic() + seconds if seconds else None

    def expired(self) -> bool:
        return self.at is not None and time.monotonic() > self.at


def _rename(expr, mapping):
    if isinstance(expr, str):
        return mapping.get(expr, expr)
    return [_rename(x, mapping) for x in expr]


class BoundedUnfolder:
    """Search for an integer-feasible derivation of false up to a depth."""

    MAX_NODES = 6000

    def __init__(self, system: HornSystem, solver: Solver):
        self.system = system
        self.solver = solver
        self.counter = 0
        self.nodes = 0

    def find(self, depth: int, deadline: _Deadline) -> dict | None:
        self.nodes = 0
        for query in self.system.queries():
            env = dict(query.binders)
            conj = [compile_bool(c, env) for c in query.constraints]
            model = self._expand(conj, [(a, depth) for a in query.body_atoms],
                                 env, deadline)
            if model is not None:
                return model
        return None

    def _expand(self, conj, pending, env, deadline) -> dict | None:
        if deadline.expired() or self.nodes > self.MAX_NODES:
            return None
        self.nodes += 1
        if not pending:
            return self.solver.sat(conj)
        (rel, args), budget = pending[0]
        rest = pending[1:]
        if budget <= 0:
            return None
        clauses = sorted(self.system.clauses_of(rel),
                         key=lambda c: len(c.body_atoms))
        for clause in clauses:
            if len(clause.body_atoms) > 0 and budget == 1:
                continue
            self.counter += 1
            mapping = {v: f"{v}@{self.counter}" for v in clause.binders}
            env2 = dict(env)
            env2.update({mapping[v]: s for v, s in clause.binders.items()})
            new_conj = list(conj)
            for c in clause.constraints:
                new_conj.append(compile_bool(_rename(c, mapping), env2))
            _, head_args = clause.head
            for actual, formal in zip(args, head_args):
                new_conj.append(compile_bool(
                    ["=", actual, _rename(formal, mapping)], env2))
            if self.solver.sat(new_conj) is None:
                continue
            new_pending = rest + [((a[0], [_rename(x, mapping) for x in a[1]]),
                                   budget - 1)
                                  for a in clause.body_atoms]
            got = self._expand(new_conj, new_pending, env2, deadline)
            if got is not None:
                return got
        return None


def solve_system(system: HornSystem, timeout: float | None = None,
                 seed: int = 2024, max_depth: int = 14,
                 verbose: bool = False) -> HornResult:
    deadline = _Deadline(timeout)
    rng = np.random.default_rng(seed)
    solver = Solver(rng=rng)
    if not system.queries():
        return HornResult("sat", model="( )",
                          detail="no query clause: trivially satisfiable")
    infos = precompile(system)
    unfolder = BoundedUnfolder(system, solver)

    schedule = [("bmc", 1), ("bmc", 2), ("bmc", 3), ("synth", 1),
                ("bmc", 5), ("synth", 2), ("bmc", 7)]
    schedule += [("bmc", d) for d in range(9, max_depth + 1, 2)]

    samples = None
    for phase, level in schedule:
        if deadline.expired():
            return HornResult("unknown", detail="timeout")
        try:
            if phase == "bmc":
                model = unfolder.find(level, deadline)
                if model is not None:
                    return HornResult("unsat",
                                      detail=f"derivation of false at depth {level}")
            else:
                if samples is None:
                    samples = sample_relations(system, infos, solver, rng)
                pools = {}
                for rel, sorts in system.relations.items():
                    pools[rel] = generate_candidates(sorts, samples[rel], level)
                synth = Synthesizer(system, infos, solver, verbose=verbose)
                pools = synth.fixpoint(pools, deadline=deadline)
                if deadline.expired():
                    return HornResult("unknown", detail="timeout")
                if synth.query_valid(pools, deadline=deadline):
                    return HornResult("sat", model=synth.render_model(pools),
                                      detail=f"inductive model at tier {level}")
        except lia.LiaError as e:
            return HornResult("unknown", detail=f"arithmetic failure: {e}")
        except RecursionError:
            return HornResult("unknown", detail="formula too deep")
    return HornResult("unknown", detail="no proof or refutation within budget")


def solve_text(text: str, **kw) -> HornResult:
    system = parse_script(text)
    return solve_system(system, **kw)

"""Data-driven conjunctive invariant synthesis.

Reachable states of each relation are sampled by forward clause
unfolding. Candidate facts are read off the samples: the exact affine
hull gives linear equalities, difference features give octagon-style
bounds, and guard/conclusion pairs filtered against the samples give
implications. A Houdini-style fixpoint then drops every candidate that is
not inductive; if the surviving conjunctions validate the query clause,
the system is satisfiable and the survivors are the model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import lia
from .lia import LinSum, Solver, TRUE, compile_bool, compile_term, mk_and, mk_or, negate
from .parser import HornSystem


# ---------------------------------------------------------------------------
# candidates


@dataclass(frozen=True)
class LinAtom:
    """sum(coeffs[i] * arg_i) + const  (op)  0 over relation arguments."""

    op: str          # 'eq' | 'le'
    coeffs: tuple
    const: int

    def complexity(self):
        return (sum(1 for c in self.coeffs if c), sum(map(abs, self.coeffs)),
                abs(self.const))


@dataclass(frozen=True)
class BoolAtom:
    pos: int
    val: bool

    def complexity(self):
        return (1, 1, 0)


@dataclass(frozen=True)
class Guarded:
    guards: tuple
    concl: object

    def complexity(self):
        return (len(self.guards) + 1,) + self.concl.complexity()


def holds_row(cand, row) -> bool:
    """Evaluate a candidate on one concrete argument tuple (bools as 0/1)."""
    if isinstance(cand, LinAtom):
        v = cand.const + sum(c * int(x) for c, x in zip(cand.coeffs, row))
        return v == 0 if cand.op == "eq" else v <= 0
    if isinstance(cand, BoolAtom):
        return bool(row[cand.pos]) == cand.val
    if isinstance(cand, Guarded):
        if all(holds_row(g, row) for g in cand.guards):
            return holds_row(cand.concl, row)
        return True
    raise TypeError(cand)


def _holds_all(cand, array: np.ndarray) -> bool:
    return all(holds_row(cand, row) for row in array)


# ---------------------------------------------------------------------------
# precompiled clause structures


@dataclass
class ArgInfo:
    sort: str        # 'Int' | 'Bool'
    cases: list      # [(guard tree, LinSum)] for Int
    tree: tuple      # formula tree for Bool


@dataclass
class ClauseInfo:
    clause: object
    constraints: list       # formula trees
    atoms: list             # [(rel, [ArgInfo])]
    head: tuple | None      # (rel, [ArgInfo])


def _arg_info(expr, env, sort) -> ArgInfo:
    if sort == "Bool":
        return ArgInfo("Bool", [], compile_bool(expr, env))
    return ArgInfo("Int", compile_term(expr, env), ())


def precompile(system: HornSystem) -> list:
    out = []
    for clause in system.clauses:
        env = clause.binders
        constraints = [compile_bool(c, env) for c in clause.constraints]
        atoms = []
        for rel, args in clause.body_atoms:
            sorts = system.relations[rel]
            atoms.append((rel, [_arg_info(a, env, s) for a, s in zip(args, sorts)]))
        head = None
        if clause.head is not None:
            rel, args = clause.head
            sorts = system.relations[rel]
            head = (rel, [_arg_info(a, env, s) for a, s in zip(args, sorts)])
        out.append(ClauseInfo(clause, constraints, atoms, head))
    return out


def inst_candidate(cand, arginfos) -> tuple:
    """The candidate as a formula over an atom's argument expressions."""
    if isinstance(cand, BoolAtom):
        tree = arginfos[cand.pos].tree
        return tree if cand.val else negate(tree)
    if isinstance(cand, LinAtom):
        used = [i for i, c in enumerate(cand.coeffs) if c]
        cases = [(TRUE, LinSum.of({}, cand.const))]
        for i in used:
            k = cand.coeffs[i]
            nxt = []
            for g1, s1 in cases:
                for g2, s2 in arginfos[i].cases:
                    nxt.append((mk_and([g1, g2]), s1.plus(s2.scale(k))))
            cases = nxt
        return mk_or([mk_and([g, (cand.op, s)]) for g, s in cases])
    if isinstance(cand, Guarded):
        parts = [negate(inst_candidate(g, arginfos)) for g in cand.guards]
        parts.append(inst_candidate(cand.concl, arginfos))
        return mk_or(parts)
    raise TypeError(cand)


def eval_arg(info: ArgInfo, model: dict):
    if info.sort == "Bool":
        return 1 if lia.evaluate(info.tree, model) else 0
    for guard, s in info.cases:
        if lia.evaluate(guard, model):
            return s.value(model)
    return info.cases[-1][1].value(model)


# ---------------------------------------------------------------------------
# sampling reachable states


_SAMPLE_BOX = 10 ** 6   # loose box: sampled derivations stay finite
_PIN_RANGE = 8          # pinned variables take values in [-range, range]


def sample_relations(system: HornSystem, infos, solver: Solver, rng,
                     rounds: int = 8, per_rel: int = 40,
                     combos_per_clause: int = 12) -> dict:
    """Forward derivation sampling.

    Diversity comes from pinning random subsets of clause variables to
    random small values, and from occasionally equating random same-sort
    variable pairs, which populates the sample regions that relational
    (pairwise-guard) candidates later need.
    """
    samples = {rel: [] for rel in system.relations}
    seen = {rel: set() for rel in system.relations}
    rules = [ci for ci in infos if ci.head is not None]
    for round_no in range(rounds):
        grew = False
        for ci in rules:
            head_rel = ci.head[0]
            if len(samples[head_rel]) >= per_rel:
                continue
            pools = [samples[rel] for rel, _ in ci.atoms]
            if any(not p for p in pools):
                continue
            box = _box_constraints(ci.clause.binders)
            for attempt in range(combos_per_clause):
                picks = [p[int(rng.integers(0, len(p)))] for p in pools]
                conj = list(ci.constraints) + box
                for (rel, arginfos), row in zip(ci.atoms, picks):
                    for info, v in zip(arginfos, row):
                        conj.append(_bind_arg(info, int(v)))
                if attempt > 0:
                    conj += _spread_constraints(ci.clause.binders, rng)
                try:
                    model = solver.sat(conj)
                except lia.LiaError:
                    model = None
                if model is None:
                    continue
                row = tuple(eval_arg(info, model) for info in ci.head[1])
                if row not in seen[head_rel]:
                    seen[head_rel].add(row)
                    samples[head_rel].append(row)
                    grew = True
        if not grew and round_no > 1:
            break
    return samples


def _box_constraints(binders: dict) -> list:
    out = []
    for v, sort in binders.items():
        if sort == "Int":
            out.append(("le", LinSum.of({v: 1}, -_SAMPLE_BOX)))
            out.append(("le", LinSum.of({v: -1}, -_SAMPLE_BOX)))
    return out


def _spread_constraints(binders: dict, rng) -> list:
    """A light random push: one or two pins, or a pair equality.

    Kept deliberately weak; over-constrained attempts come back infeasible
    and are simply discarded.
    """
    out = []
    int_vars = sorted(v for v, s in binders.items() if s == "Int")
    bool_vars = sorted(v for v, s in binders.items() if s == "Bool")
    if bool_vars and rng.random() < 0.5:
        v = bool_vars[int(rng.integers(0, len(bool_vars)))]
        out.append(("lit", v, bool(rng.integers(0, 2))))
    if not int_vars:
        return out
    n_pins = 1 if len(int_vars) < 2 else int(rng.integers(1, 3))
    if len(int_vars) >= 2 and rng.random() < 0.45:
        i, j = rng.choice(len(int_vars), size=2, replace=False)
        out.append(("eq", LinSum.of({int_vars[int(i)]: 1,
                                     int_vars[int(j)]: -1}, 0)))
        n_pins -= 1
    for _ in range(n_pins):
        v = int_vars[int(rng.integers(0, len(int_vars)))]
        val = int(rng.integers(-_PIN_RANGE, _PIN_RANGE + 1))
        out.append(("eq", LinSum.of({v: 1}, -val)))
    return out


def _bind_arg(info: ArgInfo, value: int) -> tuple:
    if info.sort == "Bool":
        return info.tree if value else negate(info.tree)
    return mk_or([mk_and([g, ("eq", s.shift(-value))]) for g, s in info.cases])


# ---------------------------------------------------------------------------
# candidate generation


_BOUND_CAP = 16
_COEFF_CAP = 12


def _nullspace_int(rows) -> list:
    """Integer basis of the nullspace of the rational row space."""
    if not rows:
        return []
    ncols = len(rows[0])
    m = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row_i, pc in enumerate(pivots):
            v[pc] = -m[row_i][fc]
        denom = 1
        for x in v:
            denom = denom * x.denominator // gcd(denom, x.denominator)
        ints = [int(x * denom) for x in v]
        g = 0
        for x in ints:
            g = gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        lead = next((x for x in ints if x != 0), 1)
        if lead < 0:
            ints = [-x for x in ints]
        basis.append(ints)
    return basis


def _hull_equalities(array: np.ndarray, int_pos) -> list:
    if len(array) == 0:
        return []
    rows = [[int(row[i]) for i in int_pos] + [1] for row in array]
    out = []
    for vec in _nullspace_int(rows):
        coeffs = vec[:-1]
        const = vec[-1]
        if all(c == 0 for c in coeffs):
            continue
        if max(map(abs, coeffs)) > _COEFF_CAP or abs(const) > 4 * _BOUND_CAP:
            continue
        full = [0] * array.shape[1]
        for i, c in zip(int_pos, coeffs):
            full[i] = c
        out.append(LinAtom("eq", tuple(full), const))
    return out


def _features(arity, int_pos, extended: bool):
    feats = []
    for i in int_pos:
        v = [0] * arity
        v[i] = 1
        feats.append(tuple(v))
    for i, j in itertools.combinations(int_pos, 2):
        v = [0] * arity
        v[i], v[j] = 1, -1
        feats.append(tuple(v))
        v = [0] * arity
        v[i], v[j] = 1, 1
        feats.append(tuple(v))
    if extended and len(int_pos) <= 12:
        pairs = list(itertools.combinations(int_pos, 2))
        for (i, j), (k, l) in itertools.combinations(pairs, 2):
            if {i, j} & {k, l}:
                continue
            v = [0] * arity
            v[i], v[j], v[k], v[l] = 1, -1, -1, 1
            feats.append(tuple(v))
    return feats


def _bounds_for(array, feats, baseline=None) -> list:
    out = []
    mat = np.array(array, dtype=np.int64)
    for f in feats:
        vals = mat @ np.array(f, dtype=np.int64)
        lo, hi = int(vals.min()), int(vals.max())
        base = baseline.get(f) if baseline else None
        lows = {lo}
        highs = {hi}
        if lo > 0:
            lows.add(0)
        if hi < 0:
            highs.add(0)
        for b in sorted(lows):
            if abs(b) <= _BOUND_CAP and (base is None or b > base[0]):
                out.append(LinAtom("le", tuple(-c for c in f), b))   # f >= b
        for b in sorted(highs, reverse=True):
            if abs(b) <= _BOUND_CAP and (base is None or b < base[1]):
                out.append(LinAtom("le", f, -b))                     # f <= b
    return out


def _feature_ranges(array, feats) -> dict:
    mat = np.array(array, dtype=np.int64)
    out = {}
    for f in feats:
        vals = mat @ np.array(f, dtype=np.int64)
        out[f] = (int(vals.min()), int(vals.max()))
    return out


def generate_candidates(sorts, rows, tier: int,
                        max_unconditional: int = 120,
                        max_guarded: int = 320) -> list:
    """Sample-consistent candidate facts for one relation."""
    if not rows:
        return []
    arity = len(sorts)
    array = np.array(rows, dtype=np.int64).reshape(len(rows), arity)
    int_pos = [i for i, s in enumerate(sorts) if s == "Int"]
    bool_pos = [i for i, s in enumerate(sorts) if s == "Bool"]

    cands = list(_hull_equalities(array, int_pos))
    feats = _features(arity, int_pos, extended=True)
    cands.extend(_constant_features(array, feats))
    cands.extend(_bounds_for(array, feats))
    for p in bool_pos:
        col = array[:, p]
        if col.min() == col.max():
            cands.append(BoolAtom(p, bool(col[0])))
    cands = _dedup(cands, array)[:max_unconditional]

    if tier >= 2:
        cands.extend(_guarded_candidates(array, sorts, int_pos, bool_pos,
                                         feats, max_guarded))
    return cands


def _mask_of(cand, array) -> np.ndarray:
    if isinstance(cand, BoolAtom):
        return (array[:, cand.pos] != 0) == cand.val
    vals = array @ np.array(cand.coeffs, dtype=np.int64) + cand.const
    return vals == 0 if cand.op == "eq" else vals <= 0


def _guard_positions(g) -> set:
    if isinstance(g, BoolAtom):
        return {g.pos}
    return {i for i, c in enumerate(g.coeffs) if c}


def _guard_offset(g):
    """Distance between the two compared positions of a pairwise guard."""
    if isinstance(g, BoolAtom):
        return None
    pos = sorted(_guard_positions(g))
    return pos[1] - pos[0] if len(pos) == 2 else None


_MAX_GUARD_SETS = 500


def _guarded_candidates(array, sorts, int_pos, bool_pos, feats, cap) -> list:
    n = len(array)
    guard_pool = []
    for p in bool_pos:
        col = array[:, p]
        if col.min() != col.max():
            guard_pool.append(BoolAtom(p, True))
            guard_pool.append(BoolAtom(p, False))
    arity = len(sorts)
    for i, j in itertools.combinations(int_pos, 2):
        v = [0] * arity
        v[i], v[j] = 1, -1
        for atom in (LinAtom("eq", tuple(v), 0),
                     LinAtom("le", tuple(v), 0),
                     LinAtom("le", tuple(-c for c in v), 0)):
            mask = _mask_of(atom, array)
            if 0 < mask.sum() < n:
                guard_pool.append(atom)

    masks = [_mask_of(g, array) for g in guard_pool]
    positions = [_guard_positions(g) for g in guard_pool]
    offsets = [_guard_offset(g) for g in guard_pool]
    guard_sets = [((g,), m) for g, m in zip(guard_pool, masks)]
    # pairs of guards over disjoint argument positions; pairs that compare
    # positions at one common stride (the halves of a product relation)
    # and bool-plus-anything pairs come first
    pairs = []
    for a, b in itertools.combinations(range(len(guard_pool)), 2):
        if positions[a] & positions[b]:
            continue
        same_stride = offsets[a] is not None and offsets[a] == offsets[b]
        with_bool = offsets[a] is None or offsets[b] is None
        pairs.append((0 if same_stride or with_bool else 1, a, b))
    pairs.sort()
    for _, a, b in pairs[:_MAX_GUARD_SETS]:
        guard_sets.append(((guard_pool[a], guard_pool[b]), masks[a] & masks[b]))

    simple_feats = [f for f in feats if sum(1 for c in f if c) <= 2]
    global_ranges = _feature_ranges(array, simple_feats)
    scored = {}           # candidate -> mask size (prefer weaker guards)

    def put(gs, concl, k):
        cand = Guarded(gs, concl)
        if scored.get(cand, -1) < k:
            scored[cand] = k

    for gs, mask in guard_sets:
        k = int(mask.sum())
        if k < 3 or k == n:
            continue
        sub = array[mask]
        for eqc in _constant_features(sub, feats):
            if _parallel_to_guards(gs, eqc) or _holds_all(eqc, array):
                continue
            put(gs, eqc, k)
        for bc in _zero_bounds(sub, simple_feats, global_ranges):
            if not _parallel_to_guards(gs, bc):
                put(gs, bc, k)
        for p in bool_pos:
            col = sub[:, p]
            if col.min() == col.max():
                put(gs, BoolAtom(p, bool(col[0])), k)

    # per conclusion and guard count keep the few weakest (widest-mask)
    # guard sets: junk single guards must not crowd out needed pairs
    by_concl: dict = {}
    for cand, k in scored.items():
        by_concl.setdefault((cand.concl, len(cand.guards)), []).append((k, cand))
    out = []
    for key, group in sorted(by_concl.items(), key=lambda kv: repr(kv[0])):
        group.sort(key=lambda t: (-t[0], t[1].complexity(), repr(t[1])))
        out.extend(cand for _, cand in group[:3])
    out = _dedup(out, array)
    out.sort(key=lambda c: (c.complexity(), -scored.get(c, 0)))
    return out[:cap]


def _constant_features(sub, feats) -> list:
    """Equalities `f = c` read off features that are constant on `sub`.

    Sparser and numerically tamer than a full affine hull on small masked
    sample sets.
    """
    out = []
    mat = np.array(sub, dtype=np.int64)
    for f in feats:
        vals = mat @ np.array(f, dtype=np.int64)
        v = int(vals[0])
        if abs(v) <= 4 * _BOUND_CAP and (vals == v).all():
            out.append(LinAtom("eq", f, -v))
    return out


def _zero_bounds(sub, feats, global_ranges) -> list:
    """Conditionally valid `f <= 0` / `f >= 0` facts, strictly stronger
    than what holds unconditionally."""
    out = []
    mat = np.array(sub, dtype=np.int64)
    for f in feats:
        vals = mat @ np.array(f, dtype=np.int64)
        glo, ghi = global_ranges[f]
        if vals.max() <= 0 and ghi > 0:
            out.append(LinAtom("le", f, 0))
        if vals.min() >= 0 and glo < 0:
            out.append(LinAtom("le", tuple(-c for c in f), 0))
    return out


def _parallel_to_guards(gs, concl) -> bool:
    if not isinstance(concl, LinAtom):
        return False
    for g in gs:
        if not isinstance(g, LinAtom):
            continue
        pos = [(c, d) for c, d in zip(g.coeffs, concl.coeffs) if c or d]
        if not pos or any(c == 0 or d == 0 for c, d in pos):
            continue
        ratios = {d / c for c, d in pos}
        if len(ratios) == 1:
            return True
    return False


def _dedup(cands, array) -> list:
    seen = set()
    out = []
    for c in sorted(cands, key=lambda c: (c.complexity(), repr(c))):
        if c in seen:
            continue
        seen.add(c)
        if _holds_all(c, array):
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# the Houdini fixpoint


class Synthesizer:
    def __init__(self, system: HornSystem, infos, solver: Solver, verbose=False):
        self.system = system
        self.infos = infos
        self.solver = solver
        self.verbose = verbose
        self._inst_cache: dict = {}
        self.last_model: dict | None = None

    def _inst(self, cand, rel, arginfos, tag) -> tuple:
        key = (tag, cand)
        got = self._inst_cache.get(key)
        if got is None:
            got = inst_candidate(cand, arginfos)
            self._inst_cache[key] = got
        return got

    def _assumptions(self, ci: ClauseInfo, pools, framed=None) -> list:
        """Clause-body context for an inductiveness check.

        Unconditional candidates of every body atom's relation always
        enter; implications enter only for the candidate under check
        (self-framing). That keeps case splitting linear, and is sound:
        the premise of every check is weaker than the full conjunction,
        so the surviving set is jointly inductive.
        """
        parts = list(ci.constraints)
        frame_rel, frame_cand = framed if framed else (None, None)
        for ai, (rel, arginfos) in enumerate(ci.atoms):
            for cand in pools.get(rel, ()):
                if isinstance(cand, Guarded):
                    continue
                parts.append(self._inst(cand, rel, arginfos, (id(ci), ai)))
            if frame_rel == rel and isinstance(frame_cand, Guarded):
                parts.append(self._inst(frame_cand, rel, arginfos, (id(ci), ai)))
        return parts


    def fixpoint(self, pools: dict, deadline=None) -> dict:
        """Drop candidates until every rule clause preserves the rest.

        A clause only needs rechecking when the pool of a relation it
        mentions has shrunk since its last clean pass.
        """
        rules = [ci for ci in self.infos if ci.head is not None]
        dirty = set(pools)
        while dirty:
            if deadline is not None and deadline.expired():
                for rel in pools:       # partial pools are not inductive
                    pools[rel] = []
                return pools
            now_dirty: set = set()
            for ci in rules:
                head_rel, head_args = ci.head
                mentioned = {head_rel} | {rel for rel, _ in ci.atoms}
                if not (mentioned & dirty):
                    continue
                idx = 0
                while idx < len(pools.get(head_rel, ())):
                    cand = pools[head_rel][idx]
                    assumptions = self._assumptions(ci, pools,
                                                    framed=(head_rel, cand))
                    goal = negate(self._inst(cand, head_rel, head_args,
                                             (id(ci), "head")))
                    try:
                        model = self.solver.sat(assumptions + [goal],
                                                hint=self.last_model)
                    except lia.LiaError:
                        model = None        # treat as not disprovable
                    if model is None:
                        idx += 1
                        continue
                    self.last_model = model
                    head_row = tuple(eval_arg(info, model) for info in head_args)
                    body_rows = [tuple(eval_arg(info, model) for info in arginfos)
                                 for rel, arginfos in ci.atoms if rel == head_rel]

                    def refuted(c):
                        return (all(holds_row(c, r) for r in body_rows)
                                and not holds_row(c, head_row))

                    before = len(pools[head_rel])
                    pools[head_rel] = [c for c in pools[head_rel]
                                       if not refuted(c)]
                    if len(pools[head_rel]) == before:
                        # defensive: drop the candidate under check
                        pools[head_rel] = [c for c in pools[head_rel] if c != cand]
                    now_dirty.add(head_rel)
            dirty = now_dirty
        return pools

    def query_valid(self, pools: dict, deadline=None) -> bool:
        """Check every query clause under the surviving invariants.

        Implications are activated lazily: only the ones that cut the
        current countermodel join the core, which keeps case splitting
        proportional to the implications actually needed.
        """
        for ci in self.infos:
            if ci.head is not None:
                continue
            inactive = []
            active = list(ci.constraints)
            for ai, (rel, arginfos) in enumerate(ci.atoms):
                for cand in pools.get(rel, ()):
                    tree = self._inst(cand, rel, arginfos, (id(ci), ai))
                    if isinstance(cand, Guarded):
                        inactive.append(tree)
                    else:
                        active.append(tree)
            proven = False
            while True:
                if deadline is not None and deadline.expired():
                    return False
                try:
                    model = self.solver.sat(active)
                except lia.LiaError:
                    return False
                if model is None:
                    proven = True
                    break
                cutters = [t for t in inactive if not lia.evaluate(t, model)]
                if not cutters:
                    break
                active.extend(cutters[:4])
                inactive = [t for t in inactive if t not in cutters[:4]]
            if not proven:
                return False
        return True

    def render_model(self, pools: dict) -> str:
        lines = ["("]
        for rel, sorts in self.system.relations.items():
            args = " ".join(f"(a{i} {s})" for i, s in enumerate(sorts))
            body = _render_conj(pools.get(rel, []))
            lines.append(f"  (define-fun {_sym(rel)} ({args}) Bool {body})")
        lines.append(")")
        return "\n".join(lines)


def _sym(name: str) -> str:
    import re
    if re.match(r"^[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*$", name):
        return name
    return f"|{name}|"


def _render_conj(cands) -> str:
    if not cands:
        return "true"
    parts = [_render_cand(c) for c in cands]
    if len(parts) == 1:
        return parts[0]
    return "(and " + " ".join(parts) + ")"


def _render_cand(c) -> str:
    if isinstance(c, BoolAtom):
        return f"a{c.pos}" if c.val else f"(not a{c.pos})"
    if isinstance(c, LinAtom):
        terms = []
        for i, k in enumerate(c.coeffs):
            if k == 0:
                continue
            if k == 1:
                terms.append(f"a{i}")
            else:
                terms.append(f"(* {_int(k)} a{i})")
        if c.const != 0 or not terms:
            terms.append(_int(c.const))
        lhs = terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"
        op = "=" if c.op == "eq" else "<="
        return f"({op} {lhs} 0)"
    if isinstance(c, Guarded):
        guards = [_render_cand(g) for g in c.guards]
        guard = guards[0] if len(guards) == 1 else "(and " + " ".join(guards) + ")"
        return f"(=> {guard} {_render_cand(c.concl)})"
    raise TypeError(c)


def _int(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"

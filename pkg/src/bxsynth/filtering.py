"""Turning sketches into testable programs and filtering hole candidates
with the examples.

Reconciliation holes are filled first: a guided put along the trace of
`get s'` tells exactly which reconciliation function runs and what it
must produce.  Those runs also yield concrete constraints on the
exit-condition holes, which are then solved one hole at a time."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .bx import BXError, BranchEvent, NeedHole, SOURCE, Machine, residualize
from .evaluate import EvalError, Evaluator
from .holes import complete_exit, complete_recon, patterns_overlap, shape_pattern
from .search import Stream
from .sketch import Sketch
from .syntax import show_value
from .syntax import (
    FALSE, PRELUDE_TYPES, TRUE, BBranch, BCase, Case, Con, DataEnv, Example, Expr, Hole,
    HoleInfo, HoleVal, Lam, SynthesisInput, Val, Var, App, Lift, BCon, fresh_var,
)


class SearchTimeout(Exception):
    pass


# ------------------------------------------------------ preparation


@dataclass
class Prepared:
    """A sketch whose exit and reconciliation slots are partially completed."""

    sketch: Sketch
    program: dict
    entry: Expr
    exit_holes: list
    recon_holes: dict
    defaults: dict


def _map_bcases(e: Expr, fn) -> Expr:
    t = type(e)
    if t is Lam:
        return Lam(e.param, _map_bcases(e.body, fn))
    if t is App:
        return App(_map_bcases(e.fun, fn), _map_bcases(e.arg, fn))
    if t is Con:
        return Con(e.con, tuple(_map_bcases(a, fn) for a in e.args))
    if t is BCon:
        return BCon(e.con, tuple(_map_bcases(a, fn) for a in e.args))
    if t is Lift:
        return Lift(_map_bcases(e.body, fn))
    if t is Case:
        return Case(_map_bcases(e.scrut, fn), tuple((p, _map_bcases(b, fn)) for p, b in e.branches))
    if t is BCase:
        inner = BCase(_map_bcases(e.scrut, fn),
                      tuple(BBranch(b.pattern, _map_bcases(b.body, fn), b.exit, b.recon)
                            for b in e.branches), e.site)
        return fn(inner)
    return e


def prepare(inp: SynthesisInput, sketch: Sketch, components: dict) -> Prepared:
    """Partially complete every exit and reconciliation hole of a sketch.

    A single-branch case gets `\\_ -> True` and `\\s _ -> s`; when the
    shapes of all branch bodies are pairwise disjoint the exit conditions
    are just those shape tests."""
    datas = inp.datas
    reserved = set(inp.program) | set(PRELUDE_TYPES) | set(sketch.defs)
    exit_holes: list = []
    recon_holes: dict = {}
    defaults: dict = {}

    def complete(bc: BCase) -> BCase:
        n = len(bc.branches)
        shapes = [shape_pattern(b.body, set()) for b in bc.branches]
        disjoint = n > 1 and all(
            not patterns_overlap(shapes[i], shapes[j]) for i in range(n) for j in range(i + 1, n))
        out = []
        for b in bc.branches:
            ex, rc = b.exit.info, b.recon.info
            view = ex.target.arg
            source = rc.target.arg
            if n == 1:
                used = reserved | {x for x, _ in ex.env}
                a = fresh_var("_v", used)
                s = fresh_var("s", used)
                out.append(BBranch(b.pattern, b.body, Lam(a, Con("True")), Lam(s, Lam(a, Var(s)))))
                continue
            exit_e, hs = complete_exit(datas, view, b.body, ex.env, reserved, assume_true=disjoint)
            exit_holes.extend(hs)
            recon_e, rhs = complete_recon(datas, source, view, b.pattern, b.body, rc.env, reserved)
            for h in rhs:
                recon_holes[h.id] = h
                s_name = h.env[len(rc.env)][0]
                defaults[h.id] = Var(s_name)
            out.append(BBranch(b.pattern, b.body, exit_e, recon_e))
        return BCase(bc.scrut, tuple(out), bc.site)

    defs = {n: _map_bcases(e, complete) for n, e in sketch.defs.items()}
    program = dict(components)
    program.update(defs)
    return Prepared(sketch, program, Var(sketch.main), exit_holes, recon_holes, defaults)


# -------------------------------------------------------- recording


def _freeze(v):
    try:
        hash(v)
        return v
    except TypeError:
        return repr(v)


@dataclass
class Constraint:
    hole: HoleInfo
    env: dict
    expected: bool

    def key(self):
        return tuple(sorted((k, _freeze(v)) for k, v in self.env.items()))


class TraceRecorder:
    """Collects exit-hole constraints and branch events of get/put runs."""

    def __init__(self):
        self.constraints: list = []
        self.events: list = []

    def exit_hole(self, hv: HoleVal, expected: bool, site: int, branch: int) -> None:
        names = {x for x, _ in hv.hole.env}
        env = {k: v for k, v in hv.env.items() if k in names}
        self.constraints.append(Constraint(hv.hole, env, expected))

    def event(self, ev: BranchEvent) -> None:
        self.events.append(ev)


def original_get(inp: SynthesisInput, s: Val, fuel: int) -> Val:
    ev = Evaluator(inp.program, fuel)
    return ev.apply(ev.eval(inp.entry, {}), s)


def compute_get_trace(prep: Prepared, s: Val, fuel: int, fills: dict | None = None,
                      recorder: TraceRecorder | None = None):
    """Traced get of the candidate on `s`; exit holes become constraints."""
    ev = Evaluator(prep.program, fuel, fills)
    E = residualize(ev, prep.entry)
    return Machine(ev, recorder).get({SOURCE: s}, E)


def guided_put(prep: Prepared, s: Val, v: Val, guide, fuel: int, fills: dict,
               recorder: TraceRecorder | None = None) -> Val:
    ev = Evaluator(prep.program, fuel, fills)
    E = residualize(ev, prep.entry)
    mu, _ = Machine(ev, recorder).put({SOURCE: s}, E, v, guide)
    return mu.get(SOURCE, s)


@dataclass
class ExampleRun:
    example: Example
    guide: object
    constraints: list = field(default_factory=list)


def precheck(prep: Prepared, inp: SynthesisInput, originals: list, fuel: int) -> list | None:
    """Run get on s and s' for every example.  Returns per-example guides
    and positive constraints, or None when the sketch cannot fit."""
    runs = []
    for ex, out in zip(inp.examples, originals):
        try:
            rec = TraceRecorder()
            v0, _ = compute_get_trace(prep, ex.source, fuel, recorder=rec)
            if v0 != out:
                return None
            v1, tr = compute_get_trace(prep, ex.updated, fuel, recorder=rec)
            if v1 != ex.view:
                return None
        except (BXError, EvalError, RecursionError):
            return None
        runs.append(ExampleRun(ex, tr, rec.constraints))
    return runs


def test_recon(prep: Prepared, runs: list, fills: dict, fuel: int):
    """Guided puts for every example with the given reconciliation fills.

    Returns ("need", hole, constraints) when an unfilled reconciliation
    slot is reached; the constraints are those recorded before that point
    and hold for every way of filling the slot.  Otherwise
    ("ok", constraints, events) when every example reproduces s', or
    ("fail", reason)."""
    constraints: list = [c for run in runs for c in run.constraints]
    events: list = []
    for run in runs:
        ex = run.example
        rec = TraceRecorder()
        try:
            s2 = guided_put(prep, ex.source, ex.view, run.guide, fuel, fills, rec)
        except NeedHole as nh:
            return ("need", nh.hole, constraints + rec.constraints)
        except (BXError, EvalError, RecursionError) as exc:
            return ("fail", f"{type(exc).__name__}: {exc}")
        if s2 != ex.updated:
            return ("fail", f"put produced {show_value(s2)}")
        constraints.extend(rec.constraints)
        events.extend(rec.events)
    return ("ok", constraints, events)


def group_constraints(constraints: list) -> dict | None:
    """Hole id -> list of (env, expected) without repeats; None on a
    contradiction (same environment required to be both True and False)."""
    out: dict = {}
    seen: dict = {}
    for c in constraints:
        k = (c.hole.id, c.key())
        prev = seen.get(k)
        if prev is not None:
            if prev != c.expected:
                return None
            continue
        seen[k] = c.expected
        out.setdefault(c.hole.id, []).append((c.env, c.expected))
    return out


def check_candidate(program: dict, cand: Expr, env: dict, expected: bool, fuel: int) -> bool:
    try:
        r = Evaluator(program, fuel).eval(cand, dict(env))
    except (EvalError, RecursionError):
        return False
    return r == (TRUE if expected else FALSE)


def satisfies(program: dict, cand: Expr, cons: list, fuel: int) -> bool:
    return all(check_candidate(program, cand, env, expected, fuel) for env, expected in cons)


def constraint_key(cons: list) -> tuple:
    return frozenset((_env_key(env), expected) for env, expected in cons)


def _env_key(env: dict) -> tuple:
    return tuple(sorted(((k, _freeze(v)) for k, v in env.items()), key=lambda kv: kv[0]))


class FilteredStream:
    """Candidates of a stream that satisfy a constraint list, found lazily.

    `verdicts` caches, per (candidate position, environment), whether the
    candidate evaluates to True there; it can be shared between streams
    over the same base."""

    def __init__(self, base: Stream, program: dict, cons: list, fuel: int, deadline: float | None,
                 verdicts: dict | None = None):
        self.base = base
        self.program = program
        self.cons = [(env, expected, _env_key(env)) for env, expected in cons]
        self.fuel = fuel
        self.deadline = deadline
        self.verdicts = {} if verdicts is None else verdicts
        self.found: list = []
        self.pos = 0

    def _ok(self, pos: int, cand: Expr) -> bool:
        for env, expected, key in self.cons:
            k = (pos, key)
            v = self.verdicts.get(k)
            if v is None:
                v = check_candidate(self.program, cand, env, True, self.fuel)
                if not v and not check_candidate(self.program, cand, env, False, self.fuel):
                    v = "neither"
                self.verdicts[k] = v
            if v != expected:
                return False
        return True

    def get(self, k: int):
        while len(self.found) <= k:
            item = self.base.get(self.pos)
            if item is None:
                return None
            pos = self.pos
            self.pos += 1
            if self.deadline is not None and pos % 64 == 0 and time.monotonic() > self.deadline:
                raise SearchTimeout()
            if self._ok(pos, item[1]):
                self.found.append(item)
        return self.found[k]


def final_check(program: dict, entry: Expr, inp: SynthesisInput, originals: list, fuel: int) -> str | None:
    """None if the complete program fits every example, else the reason."""
    for n, (ex, out) in enumerate(zip(inp.examples, originals), 1):
        try:
            ev = Evaluator(program, fuel)
            E = residualize(ev, entry)
            mu, _ = Machine(ev).put({SOURCE: ex.source}, E, ex.view)
            s2 = mu.get(SOURCE, ex.source)
            if s2 != ex.updated:
                return f"example {n}: put gives {show_value(s2)}"
            for src, want, what in ((ex.source, out, "get s"), (ex.updated, ex.view, "get s'")):
                ev = Evaluator(program, fuel)
                got, _ = Machine(ev).get({SOURCE: src}, residualize(ev, entry))
                if got != want:
                    return f"example {n}: {what} gives {show_value(got)}"
        except (BXError, EvalError, RecursionError) as exc:
            return f"example {n}: {type(exc).__name__}: {exc}"
    return None


def substitute_holes(e: Expr, fills: dict) -> Expr:
    t = type(e)
    if t is Hole:
        f = fills.get(e.info.id)
        return e if f is None else f
    if t is Lam:
        return Lam(e.param, substitute_holes(e.body, fills))
    if t is App:
        return App(substitute_holes(e.fun, fills), substitute_holes(e.arg, fills))
    if t is Con:
        return Con(e.con, tuple(substitute_holes(a, fills) for a in e.args))
    if t is BCon:
        return BCon(e.con, tuple(substitute_holes(a, fills) for a in e.args))
    if t is Lift:
        return Lift(substitute_holes(e.body, fills))
    if t is Case:
        return Case(substitute_holes(e.scrut, fills),
                    tuple((p, substitute_holes(b, fills)) for p, b in e.branches))
    if t is BCase:
        return BCase(substitute_holes(e.scrut, fills),
                     tuple(BBranch(b.pattern, substitute_holes(b.body, fills),
                                   substitute_holes(b.exit, fills), substitute_holes(b.recon, fills))
                           for b in e.branches), e.site)
    return e

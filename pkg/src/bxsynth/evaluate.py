"""Big-step call-by-value evaluation.

Bidirectional constructs do not run here: `case*`, starred constructors and
lifts evaluate to residual expressions whose branch bodies stay delayed.
Delayed bodies are kept together with the environment they close over,
which is observationally the same as substituting that environment in."""

from __future__ import annotations

import sys
import threading

from .syntax import (
    App, BCase, BCon, Builtin, Case, Closure, Con, Expr, Hole, HoleVal, Lam, Lift,
    PCon, PVar, Pattern, RBCase, RBCon, RBranch, RLift, RVar, Val, Value, Var,
    FALSE, TRUE, PRELUDE_DEFS,
)

# Object-level recursion maps onto Python recursion.  This depth is safe
# on a default 8 MB main-thread stack; `with_deep_stack` goes further.
SAFE_DEPTH = 10_000
if sys.getrecursionlimit() < SAFE_DEPTH:
    sys.setrecursionlimit(SAFE_DEPTH)


def with_deep_stack(fn, *args, stack_mb: int = 512, depth: int = 200_000):
    """Call `fn` on a thread with a large C stack and a raised recursion
    limit, so deep programs end in RecursionError rather than a crash."""
    box: dict = {}

    def run():
        try:
            box["value"] = fn(*args)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    old_size = threading.stack_size()
    old_limit = sys.getrecursionlimit()
    threading.stack_size(stack_mb * 1024 * 1024)
    sys.setrecursionlimit(depth)
    try:
        t = threading.Thread(target=run, daemon=True)
        t.start()
        t.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box.get("value")

DEFAULT_FUEL = 10 ** 6


class EvalError(Exception):
    pass


class PatternMatchFailure(EvalError):
    pass


class StuckTerm(EvalError):
    pass


class FuelExhausted(EvalError):
    pass


class UnboundName(StuckTerm):
    pass


def pat_match(p: Pattern, v: Val) -> dict | None:
    """Bindings making `p` equal to `v`, or None when they do not match."""
    if isinstance(p, PVar):
        return {p.name: v}
    if not isinstance(v, Val) or v.con != p.con or len(v.args) != len(p.args):
        return None
    out: dict = {}
    for q, w in zip(p.args, v.args):
        m = pat_match(q, w)
        if m is None:
            return None
        out.update(m)
    return out


def matches(p: Pattern, v: Val) -> bool:
    if isinstance(p, PVar):
        return True
    if v.con != p.con or len(v.args) != len(p.args):
        return False
    return all(matches(q, w) for q, w in zip(p.args, v.args))


class Evaluator:
    """Evaluates expressions against a set of top-level definitions.

    `fills` maps hole ids to expressions that stand in for those holes;
    an unfilled hole evaluates to a `HoleVal` recording its environment."""

    def __init__(self, program: dict, fuel: int = DEFAULT_FUEL, fills: dict | None = None):
        self.program = program
        self.fuel = fuel
        self.fills = fills or {}
        self._globals: dict = {}
        self._pending: set = set()

    def tick(self) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("evaluation step budget exhausted")

    def lookup_global(self, name: str) -> Value:
        v = self._globals.get(name)
        if v is None:
            if name in self._pending:
                # needs its own value before it has one: diverges
                raise FuelExhausted(f"{name} is defined in terms of itself")
            body = self.program.get(name)
            if body is None:
                body = PRELUDE_DEFS.get(name)
                if body is None:
                    raise UnboundName(f"unbound variable {name}")
            self.tick()
            self._pending.add(name)
            try:
                v = self.eval(body, {})
            finally:
                self._pending.discard(name)
            self._globals[name] = v
        return v

    def eval(self, e: Expr, env: dict) -> Value:
        t = type(e)
        if t is Var:
            v = env.get(e.name)
            if v is None:
                return self.lookup_global(e.name)
            return v
        if t is App:
            f = self.eval(e.fun, env)
            return self.apply(f, self.eval(e.arg, env))
        if t is Lam:
            return Closure(e.param, e.body, env)
        if t is Con:
            if not e.args:
                return Val(e.con)
            args = tuple(self.eval(a, env) for a in e.args)
            for a in args:
                if not isinstance(a, Val):
                    if isinstance(a, HoleVal):
                        return a
                    raise StuckTerm(f"constructor {e.con} applied to a non first-order value")
            return Val(e.con, args)
        if t is Case:
            v = self.eval(e.scrut, env)
            if isinstance(v, HoleVal):
                return v
            if not isinstance(v, Val):
                raise StuckTerm("case on a non first-order value")
            self.tick()
            for p, body in e.branches:
                m = pat_match(p, v)
                if m is not None:
                    return self.eval(body, {**env, **m} if m else env)
            raise PatternMatchFailure(f"no branch matches {v!r}")
        if t is BCase:
            s = self.eval(e.scrut, env)
            if not isinstance(s, (RVar, RBCon, RBCase, RLift)):
                raise StuckTerm("bidirectional case on a non-residual value")
            branches = [RBranch(br.pattern, br.body, env, self.eval(br.exit, env), self.eval(br.recon, env))
                        for br in e.branches]
            return RBCase(s, branches, e.site)
        if t is BCon:
            args = tuple(self.eval(a, env) for a in e.args)
            for a in args:
                if not isinstance(a, (RVar, RBCon, RBCase, RLift)):
                    raise StuckTerm(f"bidirectional constructor {e.con} applied to a non-residual value")
            return RBCon(e.con, args)
        if t is Lift:
            v = self.eval(e.body, env)
            if not isinstance(v, Val):
                raise StuckTerm("lift of a non first-order value")
            return RLift(v)
        if t is Hole:
            fill = self.fills.get(e.info.id)
            if fill is not None:
                return self.eval(fill, env)
            return HoleVal(e.info, env)
        raise StuckTerm(f"cannot evaluate {e!r}")

    def apply(self, f: Value, a: Value) -> Value:
        if type(f) is Closure:
            self.tick()
            env = f.env.copy()
            env[f.param] = a
            return self.eval(f.body, env)
        if type(f) is Builtin:
            return f.fn(a)
        if isinstance(f, HoleVal):
            return f
        raise StuckTerm("application of a non-function value")

    def apply_all(self, f: Value, *args: Value) -> Value:
        for a in args:
            f = self.apply(f, a)
        return f


def eval_u(program: dict, e: Expr, env: dict | None = None, fuel: int = DEFAULT_FUEL) -> Value:
    return Evaluator(program, fuel).eval(e, env or {})


def eval_u_bool(program: dict, f: Value, *args: Value, fuel: int = DEFAULT_FUEL) -> Val:
    """Apply a Bool-returning function value and insist on True or False."""
    r = Evaluator(program, fuel).apply_all(f, *args)
    if r != TRUE and r != FALSE:
        raise StuckTerm(f"expected a Bool, got {r!r}")
    return r

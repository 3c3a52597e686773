"""Bidirectional semantics of residual expressions.

`get` runs a residual expression forwards over an environment of source
values; `put` pushes an updated view back and returns updated bindings.
Both produce branch traces.  `put` can follow a guide trace instead of
consulting exit conditions, which is how candidate programs with unfilled
exit conditions are tested."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .evaluate import Evaluator, pat_match, DEFAULT_FUEL
from .syntax import (
    App, Br, EPS, Expr, FALSE, HoleVal, PCon, PVar, Pattern, RBCase, RBCon, RLift,
    RVar, TRUE, TTuple, Trace, Val, Var, rename_pattern, pattern_vars,
)

pat_match = pat_match


class BXError(Exception):
    pass


class NoMatch(BXError):
    pass


class MissingBinding(BXError):
    pass


class MergeConflict(BXError):
    def __init__(self, name, left, right):
        super().__init__(f"conflicting updates for {name}: {left!r} vs {right!r}")
        self.name, self.left, self.right = name, left, right


class DomainViolation(BXError):
    pass


class ExitAssertionFailed(BXError):
    def __init__(self, branch: int, value: Val):
        super().__init__(f"exit condition of branch {branch} is false on {value!r}")
        self.branch, self.value = branch, value


class NoBranchMatches(BXError):
    pass


class LiftMismatch(BXError):
    pass


class ConstructorMismatch(BXError):
    pass


class ReconPatternMismatch(BXError):
    pass


class TraceMismatch(BXError):
    pass


class ExitConditionRejects(BXError):
    pass


class UnfilledHoleError(BXError):
    pass


class NeedHole(BXError):
    """Raised when a reconciliation hole without a filler is reached."""

    def __init__(self, hole):
        super().__init__(f"hole ?{hole.id} has no filler")
        self.hole = hole


# --------------------------------------------------- patterns and envs


def pat_build(p: Pattern, mu: dict) -> Val:
    """Left inverse of matching: rebuild the value `p` denotes under `mu`."""
    if isinstance(p, PVar):
        if p.name not in mu:
            raise MissingBinding(f"no binding for {p.name}")
        return mu[p.name]
    return Val(p.con, tuple(pat_build(a, mu) for a in p.args))


def env_merge(m1: dict, m2: dict) -> dict:
    """Union of two environments that must agree where both are defined."""
    if len(m1) < len(m2):
        m1, m2 = m2, m1
    out = dict(m1)
    for k, v in m2.items():
        w = out.get(k)
        if w is None:
            out[k] = v
        elif w != v:
            raise MergeConflict(k, w, v)
    return out


def env_split(mu: dict, xs, ys) -> tuple[dict, dict]:
    xs, ys = set(xs), set(ys)
    if xs & ys:
        raise DomainViolation(f"overlapping domains {sorted(xs & ys)}")
    left, right = {}, {}
    for k, v in mu.items():
        if k in xs:
            left[k] = v
        elif k in ys:
            right[k] = v
        else:
            raise DomainViolation(f"{k} is in neither domain")
    return left, right


def env_default(updated: dict, original: dict) -> dict:
    """Bindings of `updated`, with `original` filling in the rest."""
    out = dict(original)
    out.update(updated)
    return out


@dataclass
class BranchEvent:
    site: int
    orig: int | None
    taken: int
    scrutinee: Val
    view: Val


class Recorder(Protocol):
    def exit_hole(self, hv: HoleVal, expected: bool, site: int, branch: int) -> None: ...

    def event(self, ev: BranchEvent) -> None: ...


def _is_res(v) -> bool:
    return isinstance(v, (RVar, RBCon, RBCase, RLift))


class Machine:
    """Runs get/put over residual expressions produced by an evaluator."""

    def __init__(self, evaluator: Evaluator, recorder: Recorder | None = None):
        self.ev = evaluator
        self.rec = recorder
        self.counter = 0

    # -- helpers
    def unfold(self, br, m: dict):
        """Evaluate a delayed branch body with its pattern variables renamed apart."""
        self.counter += 1
        k = self.counter
        ren = {x: f"{x}#{k}" for x in pattern_vars(br.pattern)}
        env = dict(br.env)
        for x, y in ren.items():
            env[x] = RVar(y)
        self.ev.tick()
        body = self.ev.eval(br.body, env)
        if not _is_res(body):
            raise BXError("branch body did not evaluate to a bidirectional value")
        return body, {ren[x]: v for x, v in m.items()}, rename_pattern(br.pattern, ren)

    def exit_of(self, br, u: Val):
        r = self.ev.apply(br.exit, u)
        if r is TRUE or r == TRUE:
            return True
        if r is FALSE or r == FALSE:
            return False
        if isinstance(r, HoleVal):
            return r
        raise BXError(f"exit condition returned {r!r}")

    def require_exit(self, br, u: Val, expected: bool, site: int, idx: int, err) -> None:
        r = self.exit_of(br, u)
        if isinstance(r, HoleVal):
            if self.rec is None:
                raise UnfilledHoleError(f"exit condition hole ?{r.hole.id} reached")
            self.rec.exit_hole(r, expected, site, idx)
            return
        if r != expected:
            raise err

    def concrete_exit(self, br, u: Val) -> bool:
        r = self.exit_of(br, u)
        if isinstance(r, HoleVal):
            raise UnfilledHoleError(f"exit condition hole ?{r.hole.id} reached")
        return r

    # -- get
    def get(self, mu: dict, E) -> tuple[Val, Trace]:
        t = type(E)
        if t is RVar:
            v = mu.get(E.name)
            if v is None:
                raise MissingBinding(f"no binding for {E.name}")
            return v, EPS
        if t is RLift:
            return E.value, EPS
        if t is RBCon:
            vals, trs = [], []
            for a in E.args:
                v, tr = self.get(mu, a)
                vals.append(v)
                trs.append(tr)
            return Val(E.con, tuple(vals)), TTuple(tuple(trs))
        if t is RBCase:
            u0, tr0 = self.get(mu, E.scrut)
            for i, br in enumerate(E.branches):
                m = pat_match(br.pattern, u0)
                if m is not None:
                    break
            else:
                raise NoBranchMatches(f"no branch matches {u0!r}")
            Ei, mui, _ = self.unfold(br, m)
            u, tri = self.get({**mu, **mui}, Ei)
            self.require_exit(br, u, True, E.site, i, ExitAssertionFailed(i, u))
            return u, Br(tr0, i, tri)
        raise BXError(f"not a residual expression: {E!r}")

    # -- put
    def put(self, mu: dict, E, u: Val, guide: Trace | None = None) -> tuple[dict, Trace]:
        t = type(E)
        if t is RVar:
            if guide is not None and guide is not EPS:
                raise TraceMismatch("variable met a non-empty guide")
            return {E.name: u}, EPS
        if t is RLift:
            if guide is not None and guide is not EPS:
                raise TraceMismatch("lift met a non-empty guide")
            if u != E.value:
                raise LiftMismatch(f"constant {E.value!r} cannot become {u!r}")
            return {}, EPS
        if t is RBCon:
            if not isinstance(u, Val) or u.con != E.con or len(u.args) != len(E.args):
                raise ConstructorMismatch(f"view {u!r} does not have constructor {E.con}")
            if guide is not None and (not isinstance(guide, TTuple) or len(guide.items) != len(E.args)):
                raise TraceMismatch("constructor met a mismatched guide")
            out: dict = {}
            trs = []
            for k, (a, w) in enumerate(zip(E.args, u.args)):
                m, tr = self.put(mu, a, w, None if guide is None else guide.items[k])
                out = env_merge(out, m)
                trs.append(tr)
            return out, TTuple(tuple(trs))
        if t is RBCase:
            return self._put_case(mu, E, u, guide)
        raise BXError(f"not a residual expression: {E!r}")

    def _put_case(self, mu: dict, E: RBCase, u: Val, guide):
        if guide is not None and not isinstance(guide, Br):
            raise TraceMismatch("case met a non-branch guide")
        u0, _ = self.get(mu, E.scrut)
        orig = None
        for i, br in enumerate(E.branches):
            if pat_match(br.pattern, u0) is not None:
                orig = i
                break
        n = len(E.branches)
        if guide is None:
            if orig is not None and self.concrete_exit(E.branches[orig], u):
                j = orig
            else:
                for j in range(n):
                    if j != orig and self.concrete_exit(E.branches[j], u):
                        break
                else:
                    raise ExitConditionRejects(f"no branch accepts view {u!r}")
        else:
            j = guide.index
            if not 0 <= j < n:
                raise TraceMismatch(f"guide selects missing branch {j}")
            rej = ExitConditionRejects(f"exit conditions disagree with the guide at {u!r}")
            if j == orig:
                self.require_exit(E.branches[j], u, True, E.site, j, rej)
            else:
                if orig is not None:
                    self.require_exit(E.branches[orig], u, False, E.site, orig, rej)
                for k in range(j):
                    if k != orig:
                        self.require_exit(E.branches[k], u, False, E.site, k, rej)
                self.require_exit(E.branches[j], u, True, E.site, j, rej)
        br = E.branches[j]
        if j == orig:
            m = pat_match(br.pattern, u0)
        else:
            r = self.ev.apply_all(br.recon, u0, u)
            if isinstance(r, HoleVal):
                raise NeedHole(r.hole)
            if not isinstance(r, Val):
                raise BXError(f"reconciliation returned {r!r}")
            m = pat_match(br.pattern, r)
            if m is None:
                raise ReconPatternMismatch(f"reconciled source {r!r} does not match branch {j}")
        if self.rec is not None:
            self.rec.event(BranchEvent(E.site, orig, j, u0, u))
        Ej, muj, pj = self.unfold(br, m)
        mu2, tr1 = self.put({**mu, **muj}, Ej, u, None if guide is None else guide.body)
        inner = {k: v for k, v in mu2.items() if k in muj}
        outer = {k: v for k, v in mu2.items() if k not in muj}
        u0_new = pat_build(pj, env_default(inner, muj))
        mu0, tr0 = self.put(mu, E.scrut, u0_new, None if guide is None else guide.scrut)
        return env_merge(mu0, outer), Br(tr0, j, tr1)


# ------------------------------------------------------------ top level

SOURCE = "s"


def residualize(ev: Evaluator, entry: Expr, names=(SOURCE,)):
    """Apply the entry expression to residual variables for its sources."""
    f = ev.eval(entry, {})
    for n in names:
        f = ev.apply(f, RVar(n))
    if not _is_res(f):
        raise BXError("entry did not produce a bidirectional value")
    return f


def get_trace(program: dict, entry: Expr, s: Val, fuel: int = DEFAULT_FUEL,
              recorder: Recorder | None = None, fills: dict | None = None) -> tuple[Val, Trace]:
    ev = Evaluator(program, fuel, fills)
    E = residualize(ev, entry)
    return Machine(ev, recorder).get({SOURCE: s}, E)


def put_trace(program: dict, entry: Expr, s: Val, v: Val, guide: Trace | None = None,
              fuel: int = DEFAULT_FUEL, recorder: Recorder | None = None,
              fills: dict | None = None) -> tuple[Val, Trace]:
    ev = Evaluator(program, fuel, fills)
    E = residualize(ev, entry)
    mu, tr = Machine(ev, recorder).put({SOURCE: s}, E, v, guide)
    return mu.get(SOURCE, s), tr


def run_get(program: dict, entry: Expr, s: Val, fuel: int = DEFAULT_FUEL) -> Val:
    return get_trace(program, entry, s, fuel)[0]


def run_put(program: dict, entry: Expr, s: Val, v: Val, fuel: int = DEFAULT_FUEL) -> Val:
    return put_trace(program, entry, s, v, None, fuel)[0]


def get_t(program: dict, mu: dict, expr: Expr, fuel: int = DEFAULT_FUEL, recorder=None):
    """Traced get of `expr`, whose free variables are the keys of `mu`."""
    ev = Evaluator(program, fuel)
    E = ev.eval(expr, {x: RVar(x) for x in mu})
    return Machine(ev, recorder).get(mu, E)


def put_t(program: dict, mu: dict, expr: Expr, u: Val, guide: Trace | None = None,
          fuel: int = DEFAULT_FUEL, recorder=None):
    """Traced put of `expr`; returns updated bindings and the trace taken."""
    ev = Evaluator(program, fuel)
    E = ev.eval(expr, {x: RVar(x) for x in mu})
    return Machine(ev, recorder).put(mu, E, u, guide)

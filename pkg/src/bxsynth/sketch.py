"""Sketch generation: bidirectional signatures and bidirectional sketches
with exit-condition and reconciliation holes, derived from a
unidirectional program.

Signatures of reachable definitions are chosen lazily: the first time a
definition is referenced, only signatures whose result fits the calling
context are tried.  Every assigned definition then has its body turned
into a sketch at that signature."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .config import Weights
from .search import Stream, bind, choose, empty, fmap, pure
from .surface import show_expr
from .syntax import (
    BOOL, PRELUDE_TYPES, App, BBranch, BCase, BCon, Case, Con, Expr, Hole, HoleInfo, Lam,
    Lift, SynthesisInput, TBX, TData, TFun, TParam, Type, Var, fresh_var,
    free_vars, holes_of, is_first_order, mentions_bx, next_hole_id, show_type, spine,
)
from .typecheck import TypeEnvs, check_pattern, infer_expr


class SketchError(ValueError):
    pass


# ----------------------------------------------------------- types


def bx_count(t: Type) -> int:
    if isinstance(t, TBX):
        return 1
    if isinstance(t, TFun):
        return bx_count(t.arg) + bx_count(t.res)
    if isinstance(t, TData):
        return sum(bx_count(a) for a in t.args)
    return 0


def _variants(t: Type) -> list:
    out = []
    if isinstance(t, TFun):
        out = [TFun(a, r) for a in _variants(t.arg) for r in _variants(t.res)]
    elif isinstance(t, TData):
        out = [TData(t.name, args) for args in itertools.product(*(_variants(a) for a in t.args))]
    else:
        out = [t]
    if is_first_order(t) and not mentions_bx(t):
        out.append(TBX(t))
    return out


def gen_type(t: Type, weight: int = 1) -> Stream:
    """Every way of wrapping first-order parts of `t` in BX, fewest first.
    Each wrapper costs `weight`."""
    vs = sorted(enumerate(_variants(t)), key=lambda iv: (bx_count(iv[1]), iv[0]))
    return Stream(lambda: [(bx_count(v) * weight, v) for _, v in vs])


def erase(t: Type) -> Type:
    if isinstance(t, TBX):
        return t.inner
    if isinstance(t, TFun):
        return TFun(erase(t.arg), erase(t.res))
    if isinstance(t, TData):
        return TData(t.name, tuple(erase(a) for a in t.args))
    return t


def is_variant(a: Type, b: Type) -> bool:
    """Whether `b` arises from `a` by wrapping first-order parts in BX."""
    if isinstance(b, TBX):
        return b.inner == a and is_first_order(a) and not mentions_bx(a)
    if isinstance(b, TFun):
        return isinstance(a, TFun) and is_variant(a.arg, b.arg) and is_variant(a.res, b.res)
    if isinstance(b, TData):
        return (isinstance(a, TData) and a.name == b.name and len(a.args) == len(b.args)
                and all(is_variant(x, y) for x, y in zip(a.args, b.args)))
    return a == b


def result_after(t: Type, n: int) -> Type | None:
    for _ in range(n):
        if not isinstance(t, TFun):
            return None
        t = t.res
    return t


def arg_types(t: Type, n: int) -> list:
    out = []
    for _ in range(n):
        out.append(t.arg)
        t = t.res
    return out


def _has_params(t: Type) -> bool:
    if isinstance(t, TParam):
        return True
    if isinstance(t, TFun):
        return _has_params(t.arg) or _has_params(t.res)
    if isinstance(t, (TData,)):
        return any(_has_params(a) for a in t.args)
    if isinstance(t, TBX):
        return _has_params(t.inner)
    return False


# ----------------------------------------------------- reachability


def reachable(program: dict, entry: Expr) -> list:
    """Definitions reachable from the entry, in discovery order."""
    seen: list = []
    todo = [entry]
    while todo:
        e = todo.pop()
        for x in sorted(free_vars(e)):
            if x in program and x not in seen:
                seen.append(x)
                todo.append(program[x])
    return seen


# -------------------------------------------------------- sketches


@dataclass
class Sketch:
    """Definitions with holes; `main` is the entry expression."""

    defs: dict
    types: dict
    main: str
    cost: int = 0

    def holes(self) -> list:
        out = []
        for e in self.defs.values():
            out.extend(holes_of(e))
        return out

    def show(self) -> str:
        lines = []
        for n, e in self.defs.items():
            body = show_expr(e, 0, holes=True)
            lines.append(f"{n} : {show_type(self.types[n])}")
            lines.append(f"{n} = {body}")
        return "\n".join(lines)

    def key(self) -> str:
        return re.sub(r"\?\d+", "?", self.show())


@dataclass(frozen=True)
class _Ctx:
    uni2: tuple = ()   # Gamma' : name -> generated type
    bx2: tuple = ()    # Delta' : name -> first-order type
    uni: tuple = ()    # Gamma  : name -> original type

    def lookup(self, which: str, x: str):
        for n, t in reversed(getattr(self, which)):
            if n == x:
                return t
        return None

    def bind_uni(self, orig: dict, gen: dict) -> "_Ctx":
        names = set(gen)
        return _Ctx(tuple((n, t) for n, t in self.uni2 if n not in names) + tuple(gen.items()),
                    tuple((n, t) for n, t in self.bx2 if n not in names),
                    self.uni + tuple(orig.items()))

    def bind_bx(self, orig: dict, gen: dict) -> "_Ctx":
        names = set(gen)
        return _Ctx(tuple((n, t) for n, t in self.uni2 if n not in names),
                    tuple((n, t) for n, t in self.bx2 if n not in names) + tuple(gen.items()),
                    self.uni + tuple(orig.items()))

    def hole_env(self) -> tuple:
        out = {}
        for n, t in self.uni2:
            out.pop(n, None)
            if not mentions_bx(t):
                out[n] = t
        return tuple(out.items())


@dataclass(frozen=True)
class _State:
    assigned: tuple = ()  # (name, type) in assignment order

    def type_of(self, x):
        for n, t in self.assigned:
            if n == x:
                return t
        return None

    def assign(self, x, t) -> "_State":
        return _State(self.assigned + ((x, t),))


class SketchGenerator:
    def __init__(self, inp: SynthesisInput, weights: Weights | None = None):
        self.inp = inp
        self.w = weights or Weights()
        self.datas = inp.datas
        self.program = inp.program
        self.sigs = inp.types
        reach = reachable(inp.program, inp.entry)
        bad = [c for c in inp.components if c in reach]
        if bad:
            raise SketchError(f"component {bad[0]} is reachable from the entry")
        self.reach = reach
        self.components = [(n, inp.types[n]) for n in inp.program if n not in reach]
        for n in reach:
            if _has_params(self.sigs[n]):
                raise SketchError(f"definition {n} reachable from the entry must be monomorphic")
        used = set(inp.program) | set(PRELUDE_TYPES)
        self.main = fresh_var("main", used)
        self.otype: dict = {}
        for n in reach:
            self._annotate({}, self.program[n], self.sigs[n])
        self._annotate({}, inp.entry, TFun(inp.source_type, inp.view_type))
        self.main_type = TFun(TBX(inp.source_type), TBX(inp.view_type))

    # -- original types of every subexpression
    def _global_type(self, x):
        if x in self.sigs:
            return self.sigs[x]
        return PRELUDE_TYPES.get(x)

    def _infer(self, env: dict, e: Expr) -> Type:
        return infer_expr(self.datas, TypeEnvs(dict(env), {}, self.sigs), e)

    def _annotate(self, env: dict, e: Expr, t: Type) -> None:
        self.otype[id(e)] = t
        if isinstance(e, Var):
            return
        if isinstance(e, Lam):
            self._annotate({**env, e.param: t.arg}, e.body, t.res)
            return
        if isinstance(e, App):
            head, args = spine(e)
            ht = None
            if isinstance(head, Var):
                ht = env.get(head.name) or self._global_type(head.name)
                if ht is not None and _has_params(ht):
                    ht = None
            if ht is None:
                ht = self._infer(env, head)
            self.otype[id(head)] = ht
            cur = e
            ft = ht
            partial = [ht]
            for a in args:
                ft = ft.res
                partial.append(ft)
            # record the type of every partial application in the spine
            nodes = []
            while isinstance(cur, App):
                nodes.append(cur)
                cur = cur.fun
            nodes.reverse()
            for k, node in enumerate(nodes):
                self.otype[id(node)] = partial[k + 1]
                self._annotate(env, node.arg, arg_types(ht, k + 1)[k])
            if not isinstance(head, Var):
                self._annotate(env, head, ht)
            return
        if isinstance(e, Con):
            ats = self.datas.con_args(e.con, t)
            for a, at in zip(e.args, ats):
                self._annotate(env, a, at)
            return
        if isinstance(e, Case):
            t0 = self._infer(env, e.scrut)
            self._annotate(env, e.scrut, t0)
            for p, b in e.branches:
                self._annotate({**env, **check_pattern(self.datas, p, t0)}, b, t)
            return
        raise SketchError(f"unexpected construct in a unidirectional program: {type(e).__name__}")

    # -- generation
    def gen(self, ctx: _Ctx, target: Type, e: Expr, st: _State) -> Stream:
        A = self.otype[id(e)]
        alts = []
        if isinstance(target, TBX) and target.inner == A:
            alts.append((self.w.lift, lambda: fmap(self.gen(ctx, A, e, st),
                                                  lambda r: (Lift(r[0]), r[1]))))
        if isinstance(e, Var):
            alts += self._var(ctx, target, e, A, st)
        elif isinstance(e, Lam):
            if isinstance(target, TFun) and isinstance(A, TFun):
                c2 = ctx.bind_uni({e.param: A.arg}, {e.param: target.arg})
                alts.append((0, lambda: fmap(self.gen(c2, target.res, e.body, st),
                                            lambda r: (Lam(e.param, r[0]), r[1]))))
        elif isinstance(e, App):
            alts += self._app(ctx, target, e, st)
        elif isinstance(e, Con):
            alts += self._con(ctx, target, e, A, st)
        elif isinstance(e, Case):
            alts += self._case(ctx, target, e, A, st)
        if not alts:
            return empty()
        return choose(alts)

    def _seq(self, ctx, items, st) -> Stream:
        """Generate [(target, expr)] left to right, threading the state."""
        if not items:
            return pure(((), st))
        (t, e), rest = items[0], items[1:]
        return bind(self.gen(ctx, t, e, st),
                    lambda r: fmap(self._seq(ctx, rest, r[1]), lambda q: ((r[0],) + q[0], q[1])))

    def _head_types(self, ctx, x, st, n, target):
        """Possible (type, weight, state) for head variable x used with n arguments."""
        t = ctx.lookup("uni2", x)
        if t is not None:
            return [(t, 0, st)] if result_after(t, n) == target else []
        if ctx.lookup("bx2", x) is not None or ctx.lookup("uni", x) is not None:
            return []
        if x in self.program and x in self.reach:
            t = st.type_of(x)
            if t is not None:
                return [(t, 0, st)] if result_after(t, n) == target else []
            out = []
            for c, v in gen_type(self.sigs[x], self.w.bx):
                if result_after(v, n) == target:
                    out.append((v, c, st.assign(x, v)))
            return out
        t = self._global_type(x)
        if t is not None and result_after(t, n) == target:
            return [(t, 0, st)]
        return []

    def _var(self, ctx, target, e, A, st):
        x = e.name
        if ctx.lookup("uni2", x) is None:
            d = ctx.lookup("bx2", x)
            if d is not None:
                if target == TBX(d) and d == A:
                    return [(0, lambda: pure((e, st)))]
                return []
        return [(c, lambda s2=s2: pure((e, s2))) for _, c, s2 in self._head_types(ctx, x, st, 0, target)]

    def _app(self, ctx, target, e, st):
        head, args = spine(e)
        if isinstance(head, Var):
            out = []
            for ht, c, s2 in self._head_types(ctx, head.name, st, len(args), target):
                items = list(zip(arg_types(ht, len(args)), args))
                out.append((c, lambda items=items, s2=s2: fmap(
                    self._seq(ctx, items, s2),
                    lambda r: (_apps(head, r[0]), r[1]))))
            return out
        # general application: guess the argument type
        A2 = self.otype[id(e.arg)]
        out = []
        for c, b2 in gen_type(A2, self.w.bx):
            out.append((c, lambda b2=b2: fmap(
                self._seq(ctx, [(TFun(b2, target), e.fun), (b2, e.arg)], st),
                lambda r: (App(r[0][0], r[0][1]), r[1]))))
        return out

    def _con(self, ctx, target, e, A, st):
        out = []
        ats = self.datas.con_args(e.con, A)
        if target == A:
            items = list(zip(ats, e.args))
            out.append((0, lambda: fmap(self._seq(ctx, items, st),
                                        lambda r: (Con(e.con, r[0]), r[1]))))
        elif target == TBX(A) and is_first_order(A):
            items = [(TBX(t), a) for t, a in zip(ats, e.args)]
            out.append((0, lambda: fmap(self._seq(ctx, items, st),
                                        lambda r: (BCon(e.con, r[0]), r[1]))))
        return out

    def _case(self, ctx, target, e, A, st):
        out = []
        A0 = self.otype[id(e.scrut)]
        if target == TBX(A) and is_first_order(A) and is_first_order(A0) and not mentions_bx(A0):
            out.append((self.w.bcase, lambda: self._bcase(ctx, target, e, A, A0, st)))
        for c, a0 in gen_type(A0, self.w.bx):
            if isinstance(a0, TBX):
                continue
            out.append((self.w.ucase + c, lambda a0=a0: self._ucase(ctx, target, e, A0, a0, st)))
        return out

    def _ucase(self, ctx, target, e, A0, a0, st):
        def branches(s_st):
            scrut, st1 = s_st
            return fmap(self._branches(ctx, target, e, A0, a0, st1, bx=False),
                        lambda r: (Case(scrut, tuple(zip((p for p, _ in e.branches), r[0]))), r[1]))
        return bind(self.gen(ctx, a0, e.scrut, st), branches)

    def _branches(self, ctx, target, e, A0, a0, st, bx):
        items = []
        ctxs = []
        for p, b in e.branches:
            orig = check_pattern(self.datas, p, A0)
            if bx:
                ctxs.append(ctx.bind_bx(orig, orig))
            else:
                ctxs.append(ctx.bind_uni(orig, check_pattern(self.datas, p, a0)))
            items.append(b)

        def go(k, st):
            if k == len(items):
                return pure(((), st))
            return bind(self.gen(ctxs[k], target, items[k], st),
                        lambda r: fmap(go(k + 1, r[1]), lambda q: ((r[0],) + q[0], q[1])))
        return go(0, st)

    def _bcase(self, ctx, target, e, A, A0, st):
        env = ctx.hole_env()

        def build(scrut, bodies):
            brs = []
            for (p, _), b in zip(e.branches, bodies):
                ex = HoleInfo(next_hole_id(), "exit", TFun(A, BOOL), env, None, b)
                rc = HoleInfo(next_hole_id(), "recon", TFun(A0, TFun(A, A0)), env, p, b)
                brs.append(BBranch(p, b, Hole(ex), Hole(rc)))
            return BCase(scrut, tuple(brs))

        def branches(s_st):
            scrut, st1 = s_st
            return fmap(self._branches(ctx, target, e, A0, A0, st1, bx=True),
                        lambda r: (build(scrut, r[0]), r[1]))
        return bind(self.gen(ctx, TBX(A0), e.scrut, st), branches)

    # -- whole programs
    def sketches(self) -> Stream:
        """All sketches of the program, cheapest first, without duplicates."""
        def rest(defs: dict, st: _State) -> Stream:
            for n, t in st.assigned:
                if n not in defs:
                    break
            else:
                types = dict(st.assigned)
                types[self.main] = self.main_type
                ordered = {n: defs[n] for n, _ in st.assigned}
                ordered[self.main] = defs[self.main]
                return pure(Sketch(ordered, types, self.main))
            return bind(self.gen(_Ctx(), t, self.program[n], st),
                        lambda r: rest({**defs, n: r[0]}, r[1]))

        raw = bind(self.gen(_Ctx(), self.main_type, self.inp.entry, _State()),
                   lambda r: rest({self.main: r[0]}, r[1]))

        def dedup():
            seen = set()
            for c, sk in raw:
                k = sk.key()
                if k in seen:
                    continue
                seen.add(k)
                sk.cost = c
                yield c, sk
        return Stream(dedup)


def _apps(head, args):
    e = head
    for a in args:
        e = App(e, a)
    return e

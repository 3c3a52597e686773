"""Brute-force term generator used as an oracle for the enumerator.

Every untyped AST up to a cost bound is built from a fixed vocabulary,
then filtered by type checking, normal-form rules and shape.  Nothing
here reuses the enumerator's own grammar code."""

from __future__ import annotations

from functools import lru_cache

from bxsynth.config import Weights
from bxsynth.syntax import (
    App, Case, Con, DataEnv, Lam, PCon, PVar, TData, TFun, Var, canonical,
)
from bxsynth.typecheck import Checker, TypeCheckError, TypeEnvs, infer_expr

LITERALS = ("0", "'a'")


def all_terms(datas: DataEnv, env: dict, components: dict, max_cost: int,
              w: Weights | None = None) -> list:
    """Every AST of cost <= max_cost over the vocabulary, untyped."""
    w = w or Weights()
    ctors = []
    for d in datas.decls.values():
        for c in d.constructors:
            ctors.append((c.name, len(c.args)))
    datatypes = [d for d in datas.decls.values() if d.constructors]

    @lru_cache(maxsize=None)
    def exact(c: int, binders: tuple) -> tuple:
        out = []
        if c <= 0:
            return ()
        names = list(env) + list(binders)
        if c == w.var:
            out += [Var(x) for x in names]
        if c == w.component:
            out += [Var(x) for x in components if x not in names]
        if c == w.literal:
            out += [Con(l) for l in LITERALS]
        for name, arity in ctors:
            rest = c - w.con
            if arity == 0:
                if rest == 0:
                    out.append(Con(name))
                continue
            for split in _compositions(rest, arity):
                for args in _cartesian([exact(k, binders) for k in split]):
                    out.append(Con(name, args))
        for cf in range(1, c - w.app):
            for f in exact(cf, binders):
                for a in exact(c - w.app - cf, binders):
                    out.append(App(f, a))
        x = f"b{len(binders)}"
        for b in exact(c - w.lam, binders + (x,)):
            out.append(Lam(x, b))
        for d in datatypes:
            k = len(d.constructors)
            fixed = w.case + (k - 1) * w.branch
            for cs in range(1, c - fixed):
                for scrut in exact(cs, binders):
                    rest = c - fixed - cs
                    if rest < k:
                        continue
                    pats, scopes = [], []
                    n = len(binders)
                    for ctor in d.constructors:
                        vs = tuple(f"b{n + i}" for i in range(len(ctor.args)))
                        pats.append(PCon(ctor.name, tuple(PVar(v) for v in vs)))
                        scopes.append(binders + vs)
                    for split in _compositions(rest, k):
                        bodies = [exact(bc, sc) for bc, sc in zip(split, scopes)]
                        for bs in _cartesian(bodies):
                            out.append(Case(scrut, tuple(zip(pats, bs))))
        return tuple(out)

    terms = []
    for c in range(1, max_cost + 1):
        terms += [(c, e) for e in exact(c, ())]
    return terms


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _cartesian(lists):
    combos = [()]
    for xs in lists:
        combos = [p + (x,) for p in combos for x in xs]
    return combos


# ------------------------------------------------------------- filters

def well_typed(datas, env, components, e, t) -> bool:
    try:
        Checker(datas).check(TypeEnvs(dict(env), {}, dict(components)), e, t)
        return True
    except (TypeCheckError, ValueError, KeyError):
        return False


def _spine(e):
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fun
    return e, args[::-1]


def normal(datas, env, components, e, t, case_depth: int = 2) -> bool:
    """beta-normal, eta-long, cases only at case-allowed positions with a
    component-application scrutinee of informative algebraic type."""
    envs = TypeEnvs(dict(env), {}, dict(components))

    def type_of(scope, x):
        return infer_expr(datas, envs.bind_uni(scope), x)

    def v_ok(x, scope, ty) -> bool:
        # V position: no case; function types only as lambdas
        if isinstance(ty, TFun):
            return isinstance(x, Lam) and u_ok(x.body, {**scope, x.param: ty.arg}, ty.res, 0)
        if isinstance(x, (Lam, Case)):
            return False
        if isinstance(x, Con):
            arg_types = datas.con_args(x.con, ty) if isinstance(ty, TData) else None
            if arg_types is None:
                return not x.args
            return all(v_ok(a, scope, at) for a, at in zip(x.args, arg_types))
        return app_ok(x, scope)

    def app_ok(x, scope) -> bool:
        head, args = _spine(x)
        if not isinstance(head, Var):
            return False
        ht = type_of(scope, head)
        for a in args:
            if not isinstance(ht, TFun) or not v_ok(a, scope, ht.arg):
                return False
            ht = ht.res
        return True

    def u_ok(x, scope, ty, depth) -> bool:
        if isinstance(x, Case):
            if depth >= case_depth or isinstance(ty, TFun):
                return False
            if not app_ok(x.scrut, scope):
                return False
            st = type_of(scope, x.scrut)
            if not isinstance(st, TData) or st.name in ("Int", "Char"):
                return False
            ctors = datas.constructors(st)
            if len(ctors) == 1 and not ctors[0][1]:
                return False
            if [p.con for p, _ in x.branches] != [c for c, _ in ctors]:
                return False
            for (p, b), (_, ats) in zip(x.branches, ctors):
                binds = {v.name: at for v, at in zip(p.args, ats)}
                if not u_ok(b, {**scope, **binds}, ty, depth + 1):
                    return False
            return True
        return v_ok(x, scope, ty)

    return u_ok(e, {}, t, 0)


def matches_shape(e, shape) -> bool:
    """Constructor-headed leaves agree with the shape; variable and
    application leaves are unconstrained."""
    if shape is None or isinstance(shape, PVar):
        return True
    if isinstance(e, Case):
        return all(matches_shape(b, shape) for _, b in e.branches)
    if not isinstance(e, Con):
        return True
    if e.con != shape.con or len(e.args) != len(shape.args):
        return False
    return all(matches_shape(a, p) for a, p in zip(e.args, shape.args))


def oracle_terms(datas, env: dict, components: dict, t, shape, max_cost: int,
                 w: Weights | None = None) -> set:
    """Canonical forms of all well-typed, normal, shape-respecting terms."""
    out = set()
    for _, e in all_terms(datas, env, components, max_cost, w):
        if not matches_shape(e, shape):
            continue
        if not well_typed(datas, env, components, e, t):
            continue
        if not normal(datas, env, components, e, t):
            continue
        out.add(canonical(e))
    return out

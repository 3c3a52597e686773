"""Dual-context type checking: Gamma holds unidirectional variables (any type),
Delta holds bidirectional variables (first-order types, used at BX type)."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

from .syntax import (
    BBranch, BCase, BCon, BOOL, Case, Con, DataEnv, Expr, Hole, Lam, Lift, App,
    PCon, PVar, Pattern, SynthesisInput, Example, TBX, TData, TFun, TParam, Type,
    Var, PRELUDE_TYPES, is_first_order, mentions_bx, is_linear, literal_type, pattern_vars, show_type,
)
from .surface import SpecFile, to_value, ValueError_


class TypeCheckError(TypeError):
    def __init__(self, message: str, found: Type | None = None, expected: Type | None = None,
                 where: str = ""):
        self.found = found
        self.expected = expected
        self.where = where
        self.message = message
        super().__init__(f"{where}: {message}" if where else message)

    def located(self, where: str) -> "TypeCheckError":
        return type(self)(self.message, self.found, self.expected, where)


class UnboundVariable(TypeCheckError):
    pass


class NonLinearPattern(TypeCheckError):
    pass


class ConstructorArity(TypeCheckError):
    pass


def mismatch(found: Type, expected: Type) -> TypeCheckError:
    return TypeCheckError(f"expected {show_type(expected)}, found {show_type(found)}", found, expected)


@dataclass
class TypeEnvs:
    """Gamma (`uni`) and Delta (`bx`); `globals` are top-level definitions."""

    uni: dict = field(default_factory=dict)
    bx: dict = field(default_factory=dict)
    globals: dict = field(default_factory=dict)

    def bind_uni(self, binds: dict) -> "TypeEnvs":
        uni = {**self.uni, **binds}
        bx = {k: v for k, v in self.bx.items() if k not in binds}
        return TypeEnvs(uni, bx, self.globals)

    def bind_bx(self, binds: dict) -> "TypeEnvs":
        for x, t in binds.items():
            if not is_first_order(t):
                raise TypeCheckError(f"bidirectional variable {x} has non first-order type {show_type(t)}")
        bx = {**self.bx, **binds}
        uni = {k: v for k, v in self.uni.items() if k not in binds}
        return TypeEnvs(uni, bx, self.globals)

    def lookup(self, x: str) -> Type:
        if x in self.uni:
            return self.uni[x]
        if x in self.bx:
            return TBX(self.bx[x])
        if x in self.globals:
            return self.globals[x]
        if x in PRELUDE_TYPES:
            return PRELUDE_TYPES[x]
        raise UnboundVariable(f"unbound variable {x}")


def check_pattern(datas: DataEnv, p: Pattern, t: Type) -> dict:
    """Bindings introduced by matching `p` against a value of type `t`."""
    if not is_linear(p):
        raise NonLinearPattern(f"variable repeated in pattern {pattern_vars(p)}")
    out: dict = {}

    def go(p, t):
        if isinstance(p, PVar):
            out[p.name] = t
            return
        if not isinstance(t, TData):
            raise TypeCheckError(f"pattern {p.con} cannot match type {show_type(t)}", t)
        if not datas.is_constructor(p.con):
            raise TypeCheckError(f"unknown constructor {p.con}")
        args = datas.con_args(p.con, t)
        if args is None:
            raise TypeCheckError(f"constructor {p.con} does not build {show_type(t)}", t)
        if len(args) != len(p.args):
            raise ConstructorArity(f"constructor {p.con} expects {len(args)} arguments, got {len(p.args)}")
        for a, at in zip(p.args, args):
            go(a, at)

    go(p, t)
    return out


class Checker:
    def __init__(self, datas: DataEnv):
        self.datas = datas

    def check(self, env: TypeEnvs, e: Expr, expected: Type) -> None:
        d = self.datas
        if isinstance(e, Lam):
            if not isinstance(expected, TFun):
                raise TypeCheckError(f"lambda checked against non-function type {show_type(expected)}",
                                     None, expected)
            self.check(env.bind_uni({e.param: expected.arg}), e.body, expected.res)
            return
        if isinstance(e, Con) and not (literal_type(e.con) and not e.args):
            args = d.con_args(e.con, expected) if d.is_constructor(e.con) else None
            if args is None:
                if not d.is_constructor(e.con):
                    raise TypeCheckError(f"unknown constructor {e.con}")
                raise TypeCheckError(f"constructor {e.con} does not build {show_type(expected)}", None, expected)
            if len(args) != len(e.args):
                raise ConstructorArity(f"constructor {e.con} expects {len(args)} arguments")
            for a, t in zip(e.args, args):
                self.check(env, a, t)
            return
        if isinstance(e, BCon):
            if not isinstance(expected, TBX):
                raise TypeCheckError(f"bidirectional constructor {e.con} at non-BX type {show_type(expected)}",
                                     None, expected)
            args = d.con_args(e.con, expected.inner) if d.is_constructor(e.con) else None
            if args is None:
                raise TypeCheckError(f"constructor {e.con} does not build {show_type(expected.inner)}",
                                     None, expected)
            if len(args) != len(e.args):
                raise ConstructorArity(f"constructor {e.con} expects {len(args)} arguments")
            for a, t in zip(e.args, args):
                self.check(env, a, TBX(t))
            return
        if isinstance(e, Lift):
            if not isinstance(expected, TBX):
                raise TypeCheckError(f"lift at non-BX type {show_type(expected)}", None, expected)
            self.check(env, e.body, expected.inner)
            return
        if isinstance(e, Case):
            t0 = self.infer(env, e.scrut)
            for p, b in e.branches:
                self.check(env.bind_uni(check_pattern(d, p, t0)), b, expected)
            return
        if isinstance(e, BCase):
            t0 = self.infer(env, e.scrut)
            if not isinstance(t0, TBX):
                raise TypeCheckError(f"bidirectional case on non-BX scrutinee of type {show_type(t0)}", t0)
            if not isinstance(expected, TBX):
                raise TypeCheckError(f"bidirectional case at non-BX type {show_type(expected)}", None, expected)
            s0, s = t0.inner, expected.inner
            for br in e.branches:
                binds = check_pattern(d, br.pattern, s0)
                self.check(env.bind_bx(binds), br.body, expected)
                self.check(env, br.exit, TFun(s, BOOL))
                self.check(env, br.recon, TFun(s0, TFun(s, s0)))
            return
        if isinstance(e, Hole):
            if e.info.target != expected:
                raise mismatch(e.info.target, expected)
            return
        found = self.infer(env, e)
        if found != expected:
            raise mismatch(found, expected)

    def infer(self, env: TypeEnvs, e: Expr) -> Type:
        d = self.datas
        if isinstance(e, Var):
            return env.lookup(e.name)
        if isinstance(e, App):
            ft = self.infer(env, e.fun)
            if not isinstance(ft, TFun):
                raise TypeCheckError(f"applying a value of non-function type {show_type(ft)}", ft)
            self.check(env, e.arg, ft.arg)
            return ft.res
        if isinstance(e, Hole):
            return e.info.target
        if isinstance(e, Con):
            lt = literal_type(e.con)
            if lt is not None:
                if e.args:
                    raise ConstructorArity(f"literal {e.con} takes no arguments")
                return lt
            return self._infer_con(e.con, [self.infer(env, a) for a in e.args])
        if isinstance(e, BCon):
            lt = literal_type(e.con)
            if lt is not None:
                return TBX(lt)
            ts = []
            for a in e.args:
                t = self.infer(env, a)
                if not isinstance(t, TBX):
                    raise TypeCheckError(f"argument of {e.con}* must be BX, found {show_type(t)}", t)
                ts.append(t.inner)
            return TBX(self._infer_con(e.con, ts))
        if isinstance(e, Lift):
            t = self.infer(env, e.body)
            if not is_first_order(t):
                raise TypeCheckError(f"cannot lift a value of type {show_type(t)}", t)
            return TBX(t)
        if isinstance(e, (Case, BCase)) and e.branches:
            t = self._infer_branches(env, e)
            self.check(env, e, t)
            return t
        raise TypeCheckError("cannot infer the type of this expression; add context")

    def _infer_branches(self, env, e):
        d = self.datas
        t0 = self.infer(env, e.scrut)
        if isinstance(e, Case):
            p, b = e.branches[0]
            return self.infer(env.bind_uni(check_pattern(d, p, t0)), b)
        if not isinstance(t0, TBX):
            raise TypeCheckError(f"bidirectional case on non-BX scrutinee of type {show_type(t0)}", t0)
        br = e.branches[0]
        return self.infer(env.bind_bx(check_pattern(d, br.pattern, t0.inner)), br.body)

    def _infer_con(self, con: str, arg_types: list[Type]) -> Type:
        d = self.datas
        if not d.is_constructor(con):
            raise TypeCheckError(f"unknown constructor {con}")
        params, args, res = d.fresh_params(con)
        if len(args) != len(arg_types):
            raise ConstructorArity(f"constructor {con} expects {len(args)} arguments")
        sub: dict = {}
        for pt, at in zip(args, arg_types):
            _match(pt, at, sub)
        if any(p.name not in sub for p in params):
            raise TypeCheckError(f"cannot infer the type of constructor {con}; add context")
        return _subst(res, sub)


def _match(pt: Type, t: Type, sub: dict) -> None:
    if isinstance(pt, TParam):
        if pt.name in sub and sub[pt.name] != t:
            raise mismatch(t, sub[pt.name])
        sub[pt.name] = t
        return
    if type(pt) is not type(t):
        raise mismatch(t, pt)
    if isinstance(pt, TData):
        if pt.name != t.name or len(pt.args) != len(t.args):
            raise mismatch(t, pt)
        for a, b in zip(pt.args, t.args):
            _match(a, b, sub)
    elif isinstance(pt, TFun):
        _match(pt.arg, t.arg, sub)
        _match(pt.res, t.res, sub)
    else:
        _match(pt.inner, t.inner, sub)


def _subst(t: Type, sub: dict) -> Type:
    if isinstance(t, TParam):
        return sub.get(t.name, t)
    if isinstance(t, TData):
        return TData(t.name, tuple(_subst(a, sub) for a in t.args))
    if isinstance(t, TFun):
        return TFun(_subst(t.arg, sub), _subst(t.res, sub))
    if isinstance(t, TBX):
        return TBX(_subst(t.inner, sub))
    return t


@dataclass(frozen=True)
class _MetaBX:
    """BX over a not-yet-solved type, used only during entry inference."""

    inner: Type


def check_expr(datas: DataEnv, envs: TypeEnvs, e: Expr, expected: Type) -> None:
    Checker(datas).check(envs, e, expected)


def infer_expr(datas: DataEnv, envs: TypeEnvs, e: Expr) -> Type:
    return Checker(datas).infer(envs, e)


def check_program(datas: DataEnv, program: dict, types: dict, where: dict | None = None) -> None:
    """Every definition checks against its signature with an empty Delta."""
    chk = Checker(datas)
    for name, body in program.items():
        if name not in types:
            raise TypeCheckError(f"missing type signature for {name}", where=(where or {}).get(name, name))
        try:
            datas.check_type(types[name])
            chk.check(TypeEnvs({}, {}, types), body, types[name])
        except TypeCheckError as exc:
            raise exc.located((where or {}).get(name, name))
        except ValueError as exc:
            raise TypeCheckError(str(exc), where=(where or {}).get(name, name))


def check_input(inp: SynthesisInput) -> None:
    check_program(inp.datas, inp.program, inp.types)
    src, view = inp.source_type, inp.view_type
    want = TFun(TBX(src), TBX(view)) if inp.entry_is_bx else TFun(src, view)
    Checker(inp.datas).check(TypeEnvs({}, {}, inp.types), inp.entry, want)


# ------------------------------------------------------ entry inference


class _Unifier:
    """Monomorphic unification used to find the type of the entry expression."""

    def __init__(self, datas: DataEnv, globals_: dict):
        self.datas = datas
        self.globals = globals_
        self.sub: dict = {}
        self.counter = itertools.count()

    def meta(self) -> TParam:
        return TParam(f"?{next(self.counter)}")

    def resolve(self, t):
        while isinstance(t, TParam) and t.name in self.sub:
            t = self.sub[t.name]
        return t

    def zonk(self, t):
        t = self.resolve(t)
        if isinstance(t, TData):
            return TData(t.name, tuple(self.zonk(a) for a in t.args))
        if isinstance(t, TFun):
            return TFun(self.zonk(t.arg), self.zonk(t.res))
        if isinstance(t, (TBX, _MetaBX)):
            inner = self.zonk(t.inner)
            if isinstance(inner, TParam) or not is_first_order(inner):
                return _MetaBX(inner)
            return TBX(inner)
        return t

    def unify(self, a, b):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TParam) and a.name.startswith("?"):
            self.sub[a.name] = b
            return
        if isinstance(b, TParam) and b.name.startswith("?"):
            self.sub[b.name] = a
            return
        if isinstance(a, (TBX, _MetaBX)) and isinstance(b, (TBX, _MetaBX)):
            self.unify(a.inner, b.inner)
            return
        if type(a) is not type(b):
            raise mismatch(self.zonk(a), self.zonk(b))
        if isinstance(a, TData):
            if a.name != b.name or len(a.args) != len(b.args):
                raise mismatch(self.zonk(a), self.zonk(b))
            for x, y in zip(a.args, b.args):
                self.unify(x, y)
        elif isinstance(a, TFun):
            self.unify(a.arg, b.arg)
            self.unify(a.res, b.res)
        else:
            raise mismatch(a, b)

    def con_sig(self, con):
        lt = literal_type(con)
        if lt is not None:
            return [], lt
        params, args, res = self.datas.fresh_params(con)
        sub = {p.name: self.meta() for p in params}
        return [_subst(a, sub) for a in args], _subst(res, sub)

    def infer(self, env: dict, e: Expr):
        if isinstance(e, Var):
            if e.name in env:
                return env[e.name]
            if e.name in self.globals:
                return self.globals[e.name]
            if e.name in PRELUDE_TYPES:
                return PRELUDE_TYPES[e.name]
            raise UnboundVariable(f"unbound variable {e.name}")
        if isinstance(e, Lam):
            a = self.meta()
            return TFun(a, self.infer({**env, e.param: a}, e.body))
        if isinstance(e, App):
            f = self.infer(env, e.fun)
            a = self.infer(env, e.arg)
            r = self.meta()
            self.unify(f, TFun(a, r))
            return r
        if isinstance(e, (Con, BCon)):
            args, res = self.con_sig(e.con)
            if len(args) != len(e.args):
                raise ConstructorArity(f"constructor {e.con} expects {len(args)} arguments")
            for x, t in zip(e.args, args):
                xt = self.infer(env, x)
                self.unify(xt, _MetaBX(t) if isinstance(e, BCon) else t)
            return _MetaBX(res) if isinstance(e, BCon) else res
        if isinstance(e, Lift):
            return _MetaBX(self.infer(env, e.body))
        if isinstance(e, Case):
            t0 = self.infer(env, e.scrut)
            r = self.meta()
            for p, b in e.branches:
                binds = self.pattern(p, t0)
                self.unify(self.infer({**env, **binds}, b), r)
            return r
        if isinstance(e, BCase):
            t0 = self.infer(env, e.scrut)
            s0 = self.meta()
            self.unify(t0, _MetaBX(s0))
            r = self.meta()
            for br in e.branches:
                binds = {k: _MetaBX(v) for k, v in self.pattern(br.pattern, s0).items()}
                self.unify(self.infer({**env, **binds}, br.body), _MetaBX(r))
            return _MetaBX(r)
        if isinstance(e, Hole):
            return e.info.target
        raise TypeCheckError("cannot infer the entry type")

    def pattern(self, p: Pattern, t):
        if isinstance(p, PVar):
            return {p.name: t}
        args, res = self.con_sig(p.con)
        if len(args) != len(p.args):
            raise ConstructorArity(f"constructor {p.con} expects {len(args)} arguments")
        self.unify(t, res)
        out = {}
        for a, at in zip(p.args, args):
            out.update(self.pattern(a, at))
        return out


def entry_type(datas: DataEnv, types: dict, entry: Expr) -> tuple[Type, Type]:
    """Infer `A -> B` for the entry expression; both sides must be ground."""
    u = _Unifier(datas, types)
    t = u.zonk(u.infer({}, entry))
    if not isinstance(t, TFun):
        raise TypeCheckError(f"entry must be a function, found {show_type(t)}")

    def ground(x):
        if isinstance(x, (TParam, _MetaBX)):
            return False
        if isinstance(x, TData):
            return all(ground(a) for a in x.args)
        if isinstance(x, TFun):
            return ground(x.arg) and ground(x.res)
        if isinstance(x, TBX):
            return ground(x.inner)
        return True

    if not (ground(t.arg) and ground(t.res)):
        raise TypeCheckError("entry type is ambiguous; add signatures")
    return t.arg, t.res


def _locations(spec: SpecFile) -> dict:
    out = {}
    for n in spec.definitions:
        line, col = spec.positions.get(n, (0, 0))
        out[n] = f"{spec.filename}:{line}:{col}" if line else f"{spec.filename}:{n}"
    return out


def build_input(spec: SpecFile, require_examples: bool = True) -> SynthesisInput:
    """Type-check a parsed spec file and turn it into a synthesis input."""
    datas = spec.datas
    for name in spec.definitions:
        if name not in spec.signatures:
            raise TypeCheckError(f"missing type signature for {name}", where=spec.filename)
    check_program(datas, spec.definitions, spec.signatures, _locations(spec))
    if spec.entry is None:
        raise TypeCheckError("missing #entry directive", where=spec.filename)
    try:
        src, view = entry_type(datas, spec.signatures, spec.entry)
        Checker(datas).check(TypeEnvs({}, {}, spec.signatures), spec.entry, TFun(src, view))
    except TypeCheckError as exc:
        raise exc.located(f"{spec.filename}:#entry")
    inner_src = src.inner if isinstance(src, TBX) else src
    inner_view = view.inner if isinstance(view, TBX) else view
    for c in spec.components:
        if c not in spec.definitions:
            raise TypeCheckError(f"unknown component {c}", where=spec.filename)
    examples = []
    for ex in spec.examples:
        try:
            examples.append(Example(to_value(ex.source, inner_src, datas),
                                    to_value(ex.view, inner_view, datas),
                                    to_value(ex.updated, inner_src, datas)))
        except ValueError_ as exc:
            raise TypeCheckError(str(exc), where=f"{spec.filename}:{ex.line}:1")
    if require_examples and not examples:
        raise TypeCheckError("at least one #example is required", where=spec.filename)
    name = spec.meta.get("name") or os.path.splitext(os.path.basename(spec.filename))[0]
    is_bx = isinstance(src, TBX) and isinstance(view, TBX)
    if not is_bx and (mentions_bx(src) or mentions_bx(view)):
        raise TypeCheckError(f"entry must have type A -> B or BX A -> BX B, found "
                             f"{show_type(TFun(src, view))}", where=f"{spec.filename}:#entry")
    return SynthesisInput(datas, dict(spec.definitions), dict(spec.signatures), spec.entry,
                          inner_src, inner_view, examples, list(spec.components), name, is_bx)

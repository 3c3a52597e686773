"""Partial completion of exit-condition and reconciliation holes, and
type-directed enumeration of terms for the holes that remain.

Enumerated terms are beta-normal and eta-long: a lambda appears exactly
at function types, applications are always headed by a variable or a
component and fully applied, and case analyses sit only at the top of a
term (under lambdas), each one exhaustive with fresh variables.  Costs
come from `Weights`; terms are produced level by level by exact cost."""

from __future__ import annotations

from typing import Iterable

from .config import Weights
from .search import Stream, from_levels
from .syntax import (
    BOOL, CHAR, INT, App, Case, Con, DataEnv, Expr, Hole, HoleInfo, Lam, PCon, PVar,
    Pattern, TBX, TData, TFun, Type, Var, BCon, Lift, fresh_var, literal_type, next_hole_id,
    pattern_vars, split_fun,
)
from .typecheck import check_pattern


# ------------------------------------------------------------ shapes


def shape_pattern(e: Expr, used: set) -> Pattern:
    """Constructor skeleton of `e`; every other position becomes a fresh
    variable.  A lifted constant has the shape of the constant.  `used`
    is updated with the names chosen."""
    while isinstance(e, Lift):
        e = e.body
    if isinstance(e, (Con, BCon)):
        return PCon(e.con, tuple(shape_pattern(a, used) for a in e.args))
    name = fresh_var("z", used)
    used.add(name)
    return PVar(name)


def patterns_overlap(p: Pattern, q: Pattern) -> bool:
    """Whether some value matches both patterns."""
    if isinstance(p, PVar) or isinstance(q, PVar):
        return True
    if p.con != q.con or len(p.args) != len(q.args):
        return False
    return all(patterns_overlap(a, b) for a, b in zip(p.args, q.args))


def pattern_expr(p: Pattern) -> Expr:
    if isinstance(p, PVar):
        return Var(p.name)
    return Con(p.con, tuple(pattern_expr(a) for a in p.args))


def has_vars(p: Pattern) -> bool:
    return bool(pattern_vars(p))


# ------------------------------------------------- partial completion


def complete_exit(datas: DataEnv, view: Type, body: Expr, env: tuple, reserved: set,
                  assume_true: bool = False) -> tuple[Expr, list[HoleInfo]]:
    """`\\v -> case v of { P(body) -> ?; _ -> False }`.

    When the shape is a bare variable the case is dropped; with
    `assume_true` the remaining hole is replaced by True."""
    used = set(reserved) | {x for x, _ in env}
    v = fresh_var("v", used)
    used.add(v)
    pe = shape_pattern(body, used)
    if isinstance(pe, PVar):
        if assume_true:
            return Lam(v, Con("True")), []
        info = HoleInfo(next_hole_id(), "bool", BOOL, env + ((v, view),))
        return Lam(v, Hole(info)), [info]
    binds = check_pattern(datas, pe, view)
    if assume_true:
        inner: Expr = Con("True")
        holes = []
    else:
        info = HoleInfo(next_hole_id(), "bool", BOOL,
                        env + ((v, view),) + tuple((x, binds[x]) for x in pattern_vars(pe)))
        inner = Hole(info)
        holes = [info]
    w = fresh_var("_w", used)
    return Lam(v, Case(Var(v), ((pe, inner), (PVar(w), Con("False"))))), holes


def complete_recon(datas: DataEnv, source: Type, view: Type, pattern: Pattern, body: Expr,
                   env: tuple, reserved: set) -> tuple[Expr, list[HoleInfo]]:
    """`\\s v -> case v of { P(body) -> ?shape }`, or `\\_ _ -> p` when the
    branch pattern has no variables."""
    used = set(reserved) | {x for x, _ in env}
    if not has_vars(pattern):
        a = fresh_var("_s", used)
        used.add(a)
        b = fresh_var("_v", used)
        return Lam(a, Lam(b, pattern_expr(pattern))), []
    s = fresh_var("s", used)
    used.add(s)
    v = fresh_var("v", used)
    used.add(v)
    pe = shape_pattern(body, used)
    if isinstance(pe, PVar):
        info = HoleInfo(next_hole_id(), "shape", source, env + ((s, source), (v, view)), pattern)
        return Lam(s, Lam(v, Hole(info))), [info]
    binds = check_pattern(datas, pe, view)
    info = HoleInfo(next_hole_id(), "shape", source,
                    env + ((s, source), (v, view)) + tuple((x, binds[x]) for x in pattern_vars(pe)),
                    pattern)
    return Lam(s, Lam(v, Case(Var(v), ((pe, Hole(info)),)))), [info]


# -------------------------------------------------------- enumeration


def _hint(t: Type) -> str:
    if isinstance(t, TFun):
        return "f"
    if isinstance(t, TData):
        if t.name == "List":
            return _hint(t.args[0])[:1] + "s"
        if t.name.startswith("Tuple"):
            return "p"
        return t.name[:1].lower()
    return "x"


def _splits(total: int, parts: int, minimum: int = 1):
    """Ordered ways to write `total` as `parts` numbers each >= minimum."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _splits(total - first, parts - 1, minimum):
            yield (first,) + rest


class Enumerator:
    """Exact-cost enumeration of hole fillers.

    `components` are `(name, type)` pairs available everywhere at the
    component weight; local variables come from the hole environment."""

    def __init__(self, datas: DataEnv, components: Iterable = (), weights: Weights | None = None,
                 case_depth: int = 2, max_atoms: int = 3, reserved: Iterable[str] = ()):
        self.datas = datas
        self.components = tuple(components)
        self.w = weights or Weights()
        self.case_depth = case_depth
        self.max_atoms = max_atoms
        self.reserved = set(reserved) | {n for n, _ in self.components}
        self.memo: dict = {}

    # -- public streams
    def shaped(self, env: tuple, t: Type, shape: Pattern | None, max_cost: int) -> Stream:
        shape = None if isinstance(shape, PVar) else shape
        env = tuple(env)
        return from_levels(lambda c: self.u_terms(env, t, shape, c, self.case_depth), max_cost, 1)

    def boolean(self, env: tuple, max_cost: int) -> Stream:
        env = tuple(env)
        return from_levels(lambda c: self.bool_terms(env, c, self.case_depth), max_cost, 1)

    def for_hole(self, info: HoleInfo, max_cost: int) -> Stream:
        if info.kind == "bool":
            return self.boolean(info.env, max_cost)
        return self.shaped(info.env, info.target, info.pattern, max_cost)

    # -- helpers
    def _fresh(self, env: tuple, t: Type, taken: set) -> str:
        used = self.reserved | {x for x, _ in env} | taken
        return fresh_var(_hint(t), used)

    def _heads(self, env: tuple):
        """(expr, cost, type) for locals then components not shadowed by them."""
        names = {x for x, _ in env}
        out = [(Var(x), self.w.var, t) for x, t in env]
        out += [(Var(n), self.w.component, t) for n, t in self.components if n not in names]
        return out

    def _memo(self, key, fn):
        r = self.memo.get(key)
        if r is None:
            r = fn()
            self.memo[key] = r
        return r

    def _args(self, env, arg_types, total, depth):
        """All argument tuples of total cost `total` (each >= 1)."""
        n = len(arg_types)
        out = []
        for split in _splits(total, n):
            lists = []
            for a, c in zip(arg_types, split):
                xs = self.v_terms(env, a, None, c, depth)
                if not xs:
                    break
                lists.append(xs)
            else:
                combos = [()]
                for xs in lists:
                    combos = [p + (x,) for p in combos for x in xs]
                out.extend(combos)
        return out

    def app_terms(self, env: tuple, t: Type, c: int, depth: int) -> list:
        """`x V1 .. Vn` of exact cost c whose type is exactly t."""
        return self._memo(("app", env, t, c, depth), lambda: self._app_terms(env, t, c, depth))

    def _app_terms(self, env, t, c, depth):
        out = []
        for head, hc, ht in self._heads(env):
            args, res = split_fun(ht)
            for n in range(len(args) + 1):
                rt = _result_after(ht, n)
                if rt != t:
                    continue
                rest = c - hc - n * self.w.app
                if n == 0:
                    if rest == 0:
                        out.append(head)
                    continue
                if rest < n:
                    continue
                for xs in self._args(env, args[:n], rest, depth):
                    e = head
                    for x in xs:
                        e = App(e, x)
                    out.append(e)
        return out

    def v_terms(self, env: tuple, t: Type, shape, c: int, depth: int) -> list:
        if c <= 0:
            return []
        return self._memo(("v", env, t, shape, c, depth), lambda: self._v_terms(env, t, shape, c, depth))

    def _v_terms(self, env, t, shape, c, depth):
        if isinstance(t, TBX):
            return []
        if isinstance(t, TFun):
            if shape is not None:
                return []
            x = self._fresh(env, t.arg, set())
            body = self.u_terms(env + ((x, t.arg),), t.res, None, c - self.w.lam, depth)
            return [Lam(x, b) for b in body]
        out = list(self.app_terms(env, t, c, depth))
        out.extend(self._con_terms(env, t, shape, c, depth))
        return out

    def _con_terms(self, env, t, shape, c, depth):
        if not isinstance(t, TData):
            return []
        out = []
        if literal_type_of(t):
            if shape is not None:
                if isinstance(shape, PCon) and not shape.args and c == self.w.literal:
                    out.append(Con(shape.con))
            elif c == self.w.literal:
                out.append(Con(_default_literal(t)))
            return out
        ctors = self.datas.constructors(t)
        if t == BOOL:
            ctors = sorted(ctors, key=lambda x: x[0] != "True")
        for name, arg_types in ctors:
            if shape is not None and name != shape.con:
                continue
            sub = shape.args if shape is not None else (None,) * len(arg_types)
            rest = c - self.w.con
            if not arg_types:
                if rest == 0:
                    out.append(Con(name))
                continue
            for split in _splits(rest, len(arg_types)):
                lists = []
                for a, p, k in zip(arg_types, sub, split):
                    p = None if isinstance(p, PVar) else p
                    xs = self.v_terms(env, a, p, k, depth)
                    if not xs:
                        break
                    lists.append(xs)
                else:
                    combos = [()]
                    for xs in lists:
                        combos = [q + (x,) for q in combos for x in xs]
                    out.extend(Con(name, args) for args in combos)
        return out

    def scrutinees(self, env: tuple, c: int) -> list:
        """Case scrutinees `x V1 .. Vn` of cost c with an algebraic result type."""
        return self._memo(("scrut", env, c), lambda: self._scrutinees(env, c))

    def _scrutinees(self, env, c):
        out = []
        for head, hc, ht in self._heads(env):
            args, _ = split_fun(ht)
            for n in range(len(args) + 1):
                rt = _result_after(ht, n)
                if not self._case_type(rt):
                    continue
                rest = c - hc - n * self.w.app
                if n == 0:
                    if rest == 0:
                        out.append((head, rt))
                    continue
                if rest < n:
                    continue
                for xs in self._args(env, args[:n], rest, 0):
                    e = head
                    for x in xs:
                        e = App(e, x)
                    out.append((e, rt))
        return out

    def _case_type(self, t) -> bool:
        if not isinstance(t, TData) or literal_type_of(t) or t.name not in self.datas.decls:
            return False
        ctors = self.datas.constructors(t)
        if not ctors:
            return False
        # a single nullary constructor carries no information
        return not (len(ctors) == 1 and not ctors[0][1])

    def _branches(self, env, rt):
        taken: set = set()
        out = []
        for name, arg_types in self.datas.constructors(rt):
            names = []
            for a in arg_types:
                x = self._fresh(env, a, taken)
                taken.add(x)
                names.append((x, a))
            out.append((PCon(name, tuple(PVar(x) for x, _ in names)), tuple(names)))
        return out

    def _case_terms(self, env, c, depth, body_fn):
        """Case analyses of exact cost c whose branch bodies come from body_fn."""
        out = []
        if depth <= 0:
            return out
        for cs in range(1, c):
            for scrut, rt in self.scrutinees(env, cs):
                branches = self._branches(env, rt)
                k = len(branches)
                rest = c - cs - self.w.case - (k - 1) * self.w.branch
                if rest < k:
                    continue
                for split in _splits(rest, k):
                    lists = []
                    for (p, binds), bc in zip(branches, split):
                        xs = body_fn(env + binds, bc, depth - 1)
                        if not xs:
                            break
                        lists.append(xs)
                    else:
                        combos = [()]
                        for xs in lists:
                            combos = [q + (x,) for q in combos for x in xs]
                        for bodies in combos:
                            out.append(Case(scrut, tuple(zip((p for p, _ in branches), bodies))))
        return out

    def u_terms(self, env: tuple, t: Type, shape, c: int, depth: int) -> list:
        if c <= 0:
            return []
        return self._memo(("u", env, t, shape, c, depth), lambda: self._u_terms(env, t, shape, c, depth))

    def _u_terms(self, env, t, shape, c, depth):
        out = list(self.v_terms(env, t, shape, c, depth))
        if isinstance(t, TData):
            out.extend(self._case_terms(env, c, depth,
                                        lambda e2, bc, d: self.u_terms(e2, t, shape, bc, d)))
        return out

    # -- Boolean holes: case analyses over disjunctive normal forms
    def bool_terms(self, env: tuple, c: int, depth: int) -> list:
        if c <= 0:
            return []
        return self._memo(("bool", env, c, depth), lambda: self._bool_terms(env, c, depth))

    def _bool_terms(self, env, c, depth):
        out = []
        if c == self.w.con:
            out += [Con("True"), Con("False")]
        for k in range(1, self.max_atoms + 1):
            out.extend(self.disj(env, c, k))
        out.extend(self._case_terms(env, c, depth, self.bool_terms))
        return out

    def atoms(self, env, c) -> list:
        return self.app_terms(env, BOOL, c, 0)

    def literals(self, env, c) -> list:
        out = list(self.atoms(env, c))
        out += [App(Var("not"), a) for a in self.atoms(env, c - self.w.neg)]
        return out

    def conj(self, env, c, k) -> list:
        if c <= 0 or k <= 0:
            return []
        return self._memo(("conj", env, c, k), lambda: self._conj(env, c, k))

    def _conj(self, env, c, k):
        if k == 1:
            return self.literals(env, c)
        out = []
        for c1 in range(1, c):
            rest = c - c1 - self.w.conj
            if rest <= 0:
                break
            lits = self.literals(env, c1)
            if not lits:
                continue
            tails = self.conj(env, rest, k - 1)
            out += [App(App(Var("&&"), a), b) for a in lits for b in tails]
        return out

    def disj(self, env, c, k) -> list:
        if c <= 0 or k <= 0:
            return []
        return self._memo(("disj", env, c, k), lambda: self._disj(env, c, k))

    def _disj(self, env, c, k):
        out = list(self.conj(env, c, k))
        for k1 in range(1, k):
            for c1 in range(1, c):
                rest = c - c1 - self.w.disj
                if rest <= 0:
                    break
                heads = self.conj(env, c1, k1)
                if not heads:
                    continue
                tails = self.disj(env, rest, k - k1)
                out += [App(App(Var("||"), a), b) for a in heads for b in tails]
        return out


def literal_type_of(t: Type) -> bool:
    return t == INT or t == CHAR


def _default_literal(t: TData) -> str:
    return "'a'" if t == CHAR else "0"


def _result_after(t: Type, n: int) -> Type:
    for _ in range(n):
        t = t.res
    return t

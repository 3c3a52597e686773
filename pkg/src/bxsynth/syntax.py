"""Core data model: types, datatype declarations, patterns, expressions,
holes, runtime values, residual expressions and branch traces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class BXTypeError(ValueError):
    """Raised when a BX type would wrap a function or another BX."""


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class TData:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class TFun:
    arg: "Type"
    res: "Type"

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class TBX:
    inner: "Type"

    def __post_init__(self):
        if not is_first_order(self.inner):
            raise BXTypeError(f"BX cannot wrap {show_type(self.inner)}")

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class TParam:
    """Type parameter inside a datatype declaration."""

    name: str


Type = TData | TFun | TBX | TParam

INT = TData("Int")
CHAR = TData("Char")
BOOL = TData("Bool")
NAT = TData("Nat")
UNIT = TData("Unit")


def list_of(t: Type) -> TData:
    return TData("List", (t,))


def tuple_of(*ts: Type) -> TData:
    return TData(f"Tuple{len(ts)}", tuple(ts))


STRING = list_of(CHAR)


def is_first_order(t: Type) -> bool:
    """True for sigma-types: no functions and no BX anywhere inside."""
    if isinstance(t, TData):
        return all(is_first_order(a) for a in t.args)
    return isinstance(t, TParam)


def mentions_bx(t: Type) -> bool:
    if isinstance(t, TBX):
        return True
    if isinstance(t, TFun):
        return mentions_bx(t.arg) or mentions_bx(t.res)
    if isinstance(t, TData):
        return any(mentions_bx(a) for a in t.args)
    return False


def fun_type(args: Iterable[Type], res: Type) -> Type:
    for a in reversed(list(args)):
        res = TFun(a, res)
    return res


def split_fun(t: Type) -> tuple[list[Type], Type]:
    args = []
    while isinstance(t, TFun):
        args.append(t.arg)
        t = t.res
    return args, t


def show_type(t: Type, prec: int = 0) -> str:
    if isinstance(t, TFun):
        s = f"{show_type(t.arg, 1)} -> {show_type(t.res, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, TBX):
        s = f"BX {show_type(t.inner, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(t, TParam):
        return t.name
    if t.name == "List":
        return f"[{show_type(t.args[0])}]"
    if t.name.startswith("Tuple"):
        return "(" + ", ".join(show_type(a) for a in t.args) + ")"
    if not t.args:
        return t.name
    s = t.name + " " + " ".join(show_type(a, 2) for a in t.args)
    return f"({s})" if prec > 1 else s


# ------------------------------------------------------------ datatypes


@dataclass(frozen=True)
class ConDecl:
    name: str
    args: tuple


@dataclass(frozen=True)
class DataDecl:
    name: str
    params: tuple
    constructors: tuple


def literal_type(con: str) -> TData | None:
    """Int and Char literals behave as nullary constructors of opaque types."""
    if con.startswith("'"):
        return CHAR
    if con.lstrip("-").isdigit():
        return INT
    return None


def char_lit(c: str) -> str:
    return "'" + c + "'"


def lit_char(con: str) -> str:
    return con[1:-1]


def _subst_params(t: Type, sub: Mapping[str, Type]) -> Type:
    if isinstance(t, TParam):
        return sub[t.name]
    if isinstance(t, TData):
        return TData(t.name, tuple(_subst_params(a, sub) for a in t.args))
    if isinstance(t, TFun):
        return TFun(_subst_params(t.arg, sub), _subst_params(t.res, sub))
    return TBX(_subst_params(t.inner, sub))


def _prelude() -> list[DataDecl]:
    a, b, c, d = TParam("a"), TParam("b"), TParam("c"), TParam("d")
    decls = [
        DataDecl("Bool", (), (ConDecl("False", ()), ConDecl("True", ()))),
        DataDecl("Nat", (), (ConDecl("Z", ()), ConDecl("S", (NAT,)))),
        DataDecl("List", ("a",), (ConDecl("[]", ()), ConDecl(":", (a, TData("List", (a,)))))),
        DataDecl("Either", ("a", "b"), (ConDecl("Left", (a,)), ConDecl("Right", (b,)))),
        DataDecl("Unit", (), (ConDecl("()", ()),)),
        DataDecl("Int", (), ()),
        DataDecl("Char", (), ()),
    ]
    params = [a, b, c, d]
    for n in (2, 3, 4):
        ps = params[:n]
        decls.append(DataDecl(f"Tuple{n}", tuple(p.name for p in ps),
                              (ConDecl(tuple_con(n), tuple(ps)),)))
    return decls


def tuple_con(n: int) -> str:
    return "(" + "," * (n - 1) + ")"


class DataEnv:
    """Table of datatype declarations with constructor lookup."""

    def __init__(self, decls: Iterable[DataDecl] = ()):
        self.decls: dict[str, DataDecl] = {}
        self.owner: dict[str, DataDecl] = {}
        for d in _prelude():
            self.add(d)
        for d in decls:
            self.add(d)

    def add(self, d: DataDecl) -> None:
        if d.name in self.decls:
            raise ValueError(f"duplicate datatype {d.name}")
        for c in d.constructors:
            if c.name in self.owner:
                raise ValueError(f"duplicate constructor {c.name}")
        self.decls[d.name] = d
        for c in d.constructors:
            self.owner[c.name] = d

    def user_decls(self) -> list[DataDecl]:
        builtin = {d.name for d in _prelude()}
        return [d for n, d in self.decls.items() if n not in builtin]

    def is_constructor(self, con: str) -> bool:
        return con in self.owner or literal_type(con) is not None

    def arity(self, con: str) -> int:
        if literal_type(con) is not None:
            return 0
        d = self.owner[con]
        return len(next(c for c in d.constructors if c.name == con).args)

    def datatype_of(self, con: str) -> str:
        lt = literal_type(con)
        if lt is not None:
            return lt.name
        return self.owner[con].name

    def constructors(self, t: TData) -> list[tuple[str, list[Type]]]:
        """Constructors of a concrete datatype with instantiated argument types."""
        d = self.decls[t.name]
        sub = dict(zip(d.params, t.args))
        return [(c.name, [_subst_params(a, sub) for a in c.args]) for c in d.constructors]

    def con_args(self, con: str, t: Type) -> list[Type] | None:
        """Argument types of `con` when it builds a value of type `t`."""
        if not isinstance(t, TData):
            return None
        lt = literal_type(con)
        if lt is not None:
            return [] if lt == t else None
        if t.name not in self.decls:
            return None
        for name, args in self.constructors(t):
            if name == con:
                return args
        return None

    def fresh_params(self, con: str) -> tuple[list[TParam], list[Type], TData]:
        """Uninstantiated signature of a constructor, for inference."""
        d = self.owner[con]
        c = next(c for c in d.constructors if c.name == con)
        return [TParam(p) for p in d.params], list(c.args), TData(d.name, tuple(TParam(p) for p in d.params))

    def check_type(self, t: Type) -> None:
        if isinstance(t, TData):
            if t.name not in self.decls:
                raise ValueError(f"unknown type {t.name}")
            if len(self.decls[t.name].params) != len(t.args):
                raise ValueError(f"type {t.name} expects {len(self.decls[t.name].params)} arguments")
            for a in t.args:
                self.check_type(a)
        elif isinstance(t, TFun):
            self.check_type(t.arg)
            self.check_type(t.res)
        elif isinstance(t, TBX):
            self.check_type(t.inner)


# ------------------------------------------------------------- patterns


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PCon:
    con: str
    args: tuple = ()


Pattern = PVar | PCon


def pattern_vars(p: Pattern) -> list[str]:
    if isinstance(p, PVar):
        return [p.name]
    out: list[str] = []
    for a in p.args:
        out.extend(pattern_vars(a))
    return out


def is_linear(p: Pattern) -> bool:
    vs = pattern_vars(p)
    return len(vs) == len(set(vs))


def rename_pattern(p: Pattern, sub: Mapping[str, str]) -> Pattern:
    if isinstance(p, PVar):
        return PVar(sub.get(p.name, p.name))
    return PCon(p.con, tuple(rename_pattern(a, sub) for a in p.args))


# ---------------------------------------------------------- expressions

_site_counter = itertools.count(1)
_hole_counter = itertools.count(1)


def next_site() -> int:
    return next(_site_counter)


def next_hole_id() -> int:
    return next(_hole_counter)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    param: str
    body: "Expr"


@dataclass(frozen=True)
class App:
    fun: "Expr"
    arg: "Expr"


@dataclass(frozen=True)
class Con:
    con: str
    args: tuple = ()


@dataclass(frozen=True)
class Case:
    scrut: "Expr"
    branches: tuple  # of (Pattern, Expr)


@dataclass(frozen=True)
class BBranch:
    pattern: Pattern
    body: "Expr"
    exit: "Expr"
    recon: "Expr"


@dataclass(frozen=True)
class BCase:
    scrut: "Expr"
    branches: tuple  # of BBranch
    site: int = field(default_factory=next_site, compare=False)


@dataclass(frozen=True)
class BCon:
    con: str
    args: tuple = ()


@dataclass(frozen=True)
class Lift:
    body: "Expr"


@dataclass(frozen=True, eq=False)
class HoleInfo:
    """A typed hole. `kind` is one of exit, recon, shape, generic.

    `env` lists the unidirectional variables in scope with their types;
    `pattern` is the branch pattern (recon) or required shape (shape);
    `body` is the branch body the hole belongs to (exit, recon)."""

    id: int
    kind: str
    target: Type
    env: tuple = ()
    pattern: Pattern | None = None
    body: "Expr | None" = None

    def __eq__(self, other):
        return isinstance(other, HoleInfo) and other.id == self.id

    def __hash__(self):
        return hash(self.id)


@dataclass(frozen=True)
class Hole:
    info: HoleInfo


Expr = Var | Lam | App | Con | Case | BCase | BCon | Lift | Hole


def apps(f: Expr, args: Iterable[Expr]) -> Expr:
    for a in args:
        f = App(f, a)
    return f


def lams(params: Iterable[str], body: Expr) -> Expr:
    for p in reversed(list(params)):
        body = Lam(p, body)
    return body


def spine(e: Expr) -> tuple[Expr, list[Expr]]:
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fun
    return e, args[::-1]


def children(e: Expr) -> Iterator[Expr]:
    if isinstance(e, Lam):
        yield e.body
    elif isinstance(e, App):
        yield e.fun
        yield e.arg
    elif isinstance(e, (Con, BCon)):
        yield from e.args
    elif isinstance(e, Case):
        yield e.scrut
        for _, b in e.branches:
            yield b
    elif isinstance(e, BCase):
        yield e.scrut
        for br in e.branches:
            yield br.body
            yield br.exit
            yield br.recon
    elif isinstance(e, Lift):
        yield e.body


def subterms(e: Expr) -> Iterator[Expr]:
    yield e
    for c in children(e):
        yield from subterms(c)


def holes_of(e: Expr) -> list[HoleInfo]:
    return [t.info for t in subterms(e) if isinstance(t, Hole)]


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.param}
    if isinstance(e, Case):
        out = free_vars(e.scrut)
        for p, b in e.branches:
            out |= free_vars(b) - set(pattern_vars(p))
        return out
    if isinstance(e, BCase):
        out = free_vars(e.scrut)
        for br in e.branches:
            out |= free_vars(br.body) - set(pattern_vars(br.pattern))
            out |= free_vars(br.exit) | free_vars(br.recon)
        return out
    out = set()
    for c in children(e):
        out |= free_vars(c)
    return out


def all_names(e: Expr) -> set[str]:
    out = set()
    for t in subterms(e):
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Lam):
            out.add(t.param)
        elif isinstance(t, Case):
            for p, _ in t.branches:
                out.update(pattern_vars(p))
        elif isinstance(t, BCase):
            for br in t.branches:
                out.update(pattern_vars(br.pattern))
    return out


_fresh_counter = itertools.count()


def fresh_var(hint: str = "x", used: Iterable[str] | None = None) -> str:
    """A name derived from `hint` avoiding `used`; without `used`, a globally
    fresh name that never repeats within the process."""
    if used is None:
        return f"{hint}_{next(_fresh_counter)}"
    used = set(used)
    if hint not in used:
        return hint
    for k in itertools.count():
        cand = f"{hint}{k}"
        if cand not in used:
            return cand
    raise AssertionError


def _canon(e: Expr, env: dict[str, str], counter: list[int]) -> Expr:
    def bind(names):
        new = dict(env)
        for n in names:
            new[n] = f"%{counter[0]}"
            counter[0] += 1
        return new

    def pat(p, sub):
        return rename_pattern(p, sub)

    if isinstance(e, Var):
        return Var(env.get(e.name, e.name))
    if isinstance(e, Lam):
        inner = bind([e.param])
        return Lam(inner[e.param], _canon(e.body, inner, counter))
    if isinstance(e, App):
        return App(_canon(e.fun, env, counter), _canon(e.arg, env, counter))
    if isinstance(e, Con):
        return Con(e.con, tuple(_canon(a, env, counter) for a in e.args))
    if isinstance(e, BCon):
        return BCon(e.con, tuple(_canon(a, env, counter) for a in e.args))
    if isinstance(e, Lift):
        return Lift(_canon(e.body, env, counter))
    if isinstance(e, Case):
        brs = []
        for p, b in e.branches:
            inner = bind(pattern_vars(p))
            brs.append((pat(p, inner), _canon(b, inner, counter)))
        return Case(_canon(e.scrut, env, counter), tuple(brs))
    if isinstance(e, BCase):
        brs = []
        for br in e.branches:
            ex = _canon(br.exit, env, counter)
            rc = _canon(br.recon, env, counter)
            inner = bind(pattern_vars(br.pattern))
            brs.append(BBranch(pat(br.pattern, inner), _canon(br.body, inner, counter), ex, rc))
        return BCase(_canon(e.scrut, env, counter), tuple(brs), site=0)
    return e


def canonical(e: Expr) -> Expr:
    """Rename every bound variable to a position-determined name."""
    return _canon(e, {}, [0])


def alpha_eq(a: Expr, b: Expr) -> bool:
    return canonical(a) == canonical(b)


# --------------------------------------------------------------- values


class Val:
    """First-order value: a constructor applied to first-order values."""

    __slots__ = ("con", "args", "_hash")

    def __init__(self, con: str, args: tuple = ()):
        self.con = con
        self.args = args
        self._hash = None

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Val):
            return NotImplemented
        return self.con == other.con and self.args == other.args

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.con, self.args))
        return self._hash

    def __repr__(self):
        return show_value(self)


TRUE = Val("True")
FALSE = Val("False")
NIL = Val("[]")


def vbool(b: bool) -> Val:
    return TRUE if b else FALSE


def vlist(items: Iterable[Val]) -> Val:
    out = NIL
    for x in reversed(list(items)):
        out = Val(":", (x, out))
    return out


def vnat(n: int) -> Val:
    out = Val("Z")
    for _ in range(n):
        out = Val("S", (out,))
    return out


def vint(n: int) -> Val:
    return Val(str(n))


def vchar(c: str) -> Val:
    return Val(char_lit(c))


def vstr(s: str) -> Val:
    return vlist(vchar(c) for c in s)


def vtuple(*xs: Val) -> Val:
    return Val(tuple_con(len(xs)), tuple(xs))


def list_items(v: Val) -> list[Val] | None:
    out = []
    while v.con == ":":
        out.append(v.args[0])
        v = v.args[1]
    return out if v.con == "[]" else None


def nat_value(v: Val) -> int | None:
    n = 0
    while v.con == "S":
        n += 1
        v = v.args[0]
    return n if v.con == "Z" else None


_ESCAPES = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", "'": "\\'", '"': '\\"'}


def escape_char(c: str) -> str:
    return _ESCAPES.get(c, c)


def show_value(v: Val, prec: int = 0) -> str:
    items = list_items(v)
    if items is not None:
        if items and all(x.con.startswith("'") and not x.args for x in items):
            return '"' + "".join(escape_char(lit_char(x.con)) for x in items) + '"'
        return "[" + ", ".join(show_value(x) for x in items) + "]"
    if v.con.startswith("(") and v.con != "()":
        return "(" + ", ".join(show_value(x) for x in v.args) + ")"
    if v.con.startswith("'"):
        return "'" + escape_char(lit_char(v.con)) + "'"
    if not v.args:
        return v.con
    s = v.con + " " + " ".join(show_value(a, 1) for a in v.args)
    return f"({s})" if prec > 0 else s


@dataclass(eq=False)
class Closure:
    param: str
    body: Expr
    env: dict


@dataclass(eq=False)
class Builtin:
    """A function value implemented natively, e.g. a partially applied
    constructor; `fn` receives the argument value."""

    name: str
    fn: object


# Residual expressions: first-order results of evaluating bidirectional code.


@dataclass(frozen=True)
class RVar:
    name: str


@dataclass(frozen=True)
class RBCon:
    con: str
    args: tuple


@dataclass(eq=False)
class RBranch:
    pattern: Pattern
    body: Expr
    env: dict
    exit: object
    recon: object


@dataclass(eq=False)
class RBCase:
    scrut: "Residual"
    branches: list
    site: int


@dataclass(frozen=True)
class RLift:
    value: Val


Residual = RVar | RBCon | RBCase | RLift


@dataclass(eq=False)
class HoleVal:
    """Result of reaching an unfilled hole; `env` holds the bindings there."""

    hole: HoleInfo
    env: dict


Value = Val | Closure | Builtin | Residual | HoleVal


# --------------------------------------------------------------- traces


class _Eps:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ε"

    def __reduce__(self):
        return (_Eps, ())


EPS = _Eps()


@dataclass(frozen=True)
class Br:
    scrut: "Trace"
    index: int
    body: "Trace"

    def __repr__(self):
        return f"Br({self.scrut!r},{self.index},{self.body!r})"


@dataclass(frozen=True)
class TTuple:
    items: tuple

    def __repr__(self):
        return "[" + ",".join(repr(t) for t in self.items) + "]"


Trace = _Eps | Br | TTuple


def count_br(t: Trace) -> int:
    if isinstance(t, Br):
        return 1 + count_br(t.scrut) + count_br(t.body)
    if isinstance(t, TTuple):
        return sum(count_br(x) for x in t.items)
    return 0


# ------------------------------------------------------- synthesis input


@dataclass
class Example:
    source: Val
    view: Val
    updated: Val


def _prelude_defs() -> dict:
    b, c = PVar("b"), PVar("c")
    t, f = Con("True"), Con("False")
    tp, fp = PCon("True"), PCon("False")
    return {
        "not": Lam("b", Case(Var("b"), ((tp, f), (fp, t)))),
        "&&": Lam("a", Lam("b", Case(Var("a"), ((tp, Var("b")), (fp, f))))),
        "||": Lam("a", Lam("b", Case(Var("a"), ((tp, t), (fp, Var("b")))))),
    }


# Boolean connectives available in every program; user definitions win.
PRELUDE_TYPES = {
    "not": TFun(BOOL, BOOL),
    "&&": TFun(BOOL, TFun(BOOL, BOOL)),
    "||": TFun(BOOL, TFun(BOOL, BOOL)),
}
PRELUDE_DEFS = _prelude_defs()


@dataclass
class SynthesisInput:
    datas: DataEnv
    program: dict  # name -> Expr
    types: dict  # name -> Type
    entry: Expr
    source_type: Type
    view_type: Type
    examples: list = field(default_factory=list)
    components: list = field(default_factory=list)
    name: str = "spec"
    entry_is_bx: bool = False

"""Concrete syntax for `.bxs` files: lexer, parser and pretty-printer.

Grammar sketch (top-level items start in column 1)::

    data Member = Student String String | Prof String String
    appendB : BX [Int] -> BX [Int] -> BX [Int]
    appendB xs ys = case* xs of {
        [] -> ys with \\_ -> True by \\_ _ -> [] ;
        a : x -> a :* appendB x ys with \\v -> not (null v) by \\s _ -> s }
    #entry uncurry appendB
    #example put ([1,2,3],[4,5]) [6,2] = ([6,2],[])
    #component eq

Bidirectional constructs are starred: `case*`, `C*`, `:*`, `[]*`, `(a, b)*`,
`"str"*`, and `!e` lifts a constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (
    BBranch, BCase, BCon, Case, Con, DataDecl, DataEnv, ConDecl, Expr, Hole,
    Lam, Lift, PCon, PVar, Pattern, TBX, TData, TFun, Type, Var, App, apps,
    INT, NAT, STRING, UNIT, char_lit, escape_char, holes_of,
    lams, lit_char, list_of, literal_type, show_type, spine, tuple_con,
    tuple_of,
)


class ParseError(SyntaxError):
    def __init__(self, line: int, col: int, message: str, filename: str = "<input>"):
        super().__init__(f"{filename}:{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message
        self.filename = filename


class UnfilledHole(ValueError):
    def __init__(self, hole_id: int):
        super().__init__(f"unfilled hole ?{hole_id}")
        self.hole_id = hole_id


# ---------------------------------------------------------------- lexer


@dataclass
class Tok:
    kind: str  # id con int char str sym kw dir eof
    text: str
    line: int
    col: int
    end: int = 0  # offset just past the token

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


KEYWORDS = {"case", "of", "with", "by", "data"}
_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<dir>\#[a-z]+)
  | (?P<int>-?\d+)
  | (?P<char>'(?:\\.|[^\\'])')
  | (?P<str>"(?:\\.|[^\\"])*")
  | (?P<id>[a-z_][A-Za-z0-9_']*)
  | (?P<con>[A-Z][A-Za-z0-9_']*)
  | (?P<sym>->|:\*|\[\]|&&|\|\||[\\=;{}()\[\],:!|*?])
""", re.VERBOSE)

_UNESCAPE = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"', "0": "\0"}


def _unescape(body: str) -> str:
    out, i = [], 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            out.append(_UNESCAPE.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def tokenize(text: str, filename: str = "<input>") -> list[Tok]:
    text = text.replace("\r\n", "\n")
    toks: list[Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(line, col, f"unexpected character {text[pos]!r}", filename)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int" and s.startswith("-") and toks and toks[-1].kind in ("id", "con", "int", "char", "str") \
                and toks[-1].end == pos:
            raise ParseError(line, col, "binary minus is not supported", filename)
        elif kind not in ("ws", "comment"):
            if kind == "id" and s in KEYWORDS:
                kind = "kw"
            toks.append(Tok(kind, s, line, col, m.end()))
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1, pos))
    return toks


# ----------------------------------------------------------- spec files


@dataclass
class RawExample:
    source: Expr
    view: Expr
    updated: Expr
    line: int = 0


@dataclass
class SpecFile:
    datas: DataEnv
    signatures: dict = field(default_factory=dict)
    definitions: dict = field(default_factory=dict)
    entry: Expr | None = None
    examples: list = field(default_factory=list)
    components: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    filename: str = "<input>"
    positions: dict = field(default_factory=dict)  # name -> (line, col)


_ATOM_START = {"id", "con", "int", "char", "str"}
_ATOM_SYMS = {"(", "[", "[]", "!"}


@dataclass
class _ConRef:
    name: str
    bx: bool


class Parser:
    def __init__(self, toks: list[Tok], datas: DataEnv, filename: str = "<input>"):
        self.toks = toks
        self.pos = 0
        self.datas = datas
        self.filename = filename
        self.wild = 0

    # -- token helpers
    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def at_sym(self, text: str) -> bool:
        return self.at("sym", text)

    def advance(self) -> Tok:
        t = self.peek()
        self.pos += 1
        return t

    def error(self, msg: str, tok: Tok | None = None):
        t = tok or self.peek()
        return ParseError(t.line, t.col, msg, self.filename)

    def expect(self, kind: str, text: str | None = None) -> Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            found = t.text if t.kind != "eof" else "end of input"
            raise self.error(f"expected {want}, found {found}")
        self.pos += 1
        return t

    def starred(self) -> bool:
        """Consume a `*` written immediately after the previous token."""
        t = self.peek()
        prev = self.toks[self.pos - 1]
        if t.kind == "sym" and t.text == "*" and t.line == prev.line and t.col == prev.col + len(prev.text):
            self.pos += 1
            return True
        return False

    def done(self) -> bool:
        return self.at("eof")

    # -- types
    def parse_type(self) -> Type:
        t = self.parse_btype()
        if self.at_sym("->"):
            self.advance()
            return TFun(t, self.parse_type())
        return t

    def _atype_start(self) -> bool:
        t = self.peek()
        return t.kind == "con" or (t.kind == "sym" and t.text in ("(", "[", "[]"))

    def parse_btype(self) -> Type:
        if self.at("con", "BX"):
            tok = self.advance()
            inner = self.parse_atype()
            try:
                return TBX(inner)
            except ValueError as exc:
                raise self.error(str(exc), tok)
        if self.at("con"):
            tok = self.advance()
            args = []
            while self._atype_start():
                args.append(self.parse_atype())
            return self._named_type(tok, args)
        return self.parse_atype()

    def _named_type(self, tok: Tok, args: list[Type]) -> Type:
        name = tok.text
        if name == "String" and not args:
            return STRING
        if name == "BX":
            raise self.error("BX needs an argument", tok)
        if name not in self.datas.decls:
            raise self.error(f"unknown type {name}", tok)
        t = TData(name, tuple(args))
        try:
            self.datas.check_type(t)
        except ValueError as exc:
            raise self.error(str(exc), tok)
        return t

    def parse_atype(self) -> Type:
        tok = self.peek()
        if tok.kind == "con":
            self.advance()
            if tok.text == "BX":
                raise self.error("parenthesize BX types", tok)
            return self._named_type(tok, [])
        if self.at_sym("["):
            self.advance()
            t = self.parse_type()
            self.expect("sym", "]")
            return list_of(t)
        if self.at_sym("("):
            self.advance()
            if self.at_sym(")"):
                self.advance()
                return UNIT
            ts = [self.parse_type()]
            while self.at_sym(","):
                self.advance()
                ts.append(self.parse_type())
            self.expect("sym", ")")
            if len(ts) == 1:
                return ts[0]
            if len(ts) > 4:
                raise self.error("tuples have at most 4 components", tok)
            return tuple_of(*ts)
        raise self.error(f"expected a type, found {tok.text or 'end of input'}")

    # -- patterns
    def parse_pattern(self) -> Pattern:
        left = self.parse_cpattern()
        if self.at_sym(":"):
            self.advance()
            return PCon(":", (left, self.parse_pattern()))
        return left

    def parse_cpattern(self) -> Pattern:
        if self.at("con"):
            tok = self.advance()
            if not self.datas.is_constructor(tok.text):
                raise self.error(f"unknown constructor {tok.text}", tok)
            args = []
            while self._apattern_start():
                args.append(self.parse_apattern())
            if len(args) != self.datas.arity(tok.text):
                raise self.error(f"constructor {tok.text} expects {self.datas.arity(tok.text)} arguments", tok)
            return PCon(tok.text, tuple(args))
        return self.parse_apattern()

    def _apattern_start(self) -> bool:
        t = self.peek()
        return t.kind in ("id", "con", "int", "char", "str") or (t.kind == "sym" and t.text in ("(", "[", "[]"))

    def _wildcard(self) -> PVar:
        self.wild += 1
        return PVar(f"_w{self.wild}")

    def parse_apattern(self) -> Pattern:
        tok = self.advance()
        if tok.kind == "id":
            return self._wildcard() if tok.text == "_" else PVar(tok.text)
        if tok.kind == "con":
            if not self.datas.is_constructor(tok.text):
                raise self.error(f"unknown constructor {tok.text}", tok)
            if self.datas.arity(tok.text):
                raise self.error(f"constructor {tok.text} needs arguments; parenthesize", tok)
            return PCon(tok.text)
        if tok.kind == "int":
            return PCon(tok.text)
        if tok.kind == "char":
            return PCon(char_lit(_unescape(tok.text[1:-1])))
        if tok.kind == "str":
            out: Pattern = PCon("[]")
            for c in reversed(_unescape(tok.text[1:-1])):
                out = PCon(":", (PCon(char_lit(c)), out))
            return out
        if tok.kind == "sym" and tok.text == "[]":
            return PCon("[]")
        if tok.kind == "sym" and tok.text == "[":
            items = [self.parse_pattern()]
            while self.at_sym(","):
                self.advance()
                items.append(self.parse_pattern())
            self.expect("sym", "]")
            out = PCon("[]")
            for p in reversed(items):
                out = PCon(":", (p, out))
            return out
        if tok.kind == "sym" and tok.text == "(":
            if self.at_sym(")"):
                self.advance()
                return PCon("()")
            items = [self.parse_pattern()]
            while self.at_sym(","):
                self.advance()
                items.append(self.parse_pattern())
            self.expect("sym", ")")
            if len(items) == 1:
                return items[0]
            return PCon(tuple_con(len(items)), tuple(items))
        raise self.error(f"expected a pattern, found {tok.text or 'end of input'}", tok)

    # -- expressions
    def parse_expr(self) -> Expr:
        if self.at_sym("\\"):
            self.advance()
            params = []
            while self.at("id"):
                name = self.advance().text
                params.append(self._wildcard().name if name == "_" else name)
            if not params:
                raise self.error("expected a parameter")
            self.expect("sym", "->")
            return lams(params, self.parse_expr())
        if self.at("kw", "case"):
            self.advance()
            bx = self.starred()
            scrut = self.parse_expr()
            self.expect("kw", "of")
            self.expect("sym", "{")
            branches = []
            while True:
                pat = self.parse_pattern()
                self.expect("sym", "->")
                body = self.parse_expr()
                if bx:
                    self.expect("kw", "with")
                    ex = self.parse_expr()
                    self.expect("kw", "by")
                    rc = self.parse_expr()
                    branches.append(BBranch(pat, body, ex, rc))
                else:
                    branches.append((pat, body))
                if self.at_sym(";"):
                    self.advance()
                    if self.at_sym("}"):
                        break
                    continue
                break
            self.expect("sym", "}")
            return BCase(scrut, tuple(branches)) if bx else Case(scrut, tuple(branches))
        return self.parse_or()

    def _operand(self, parse) -> Expr:
        if self.at_sym("\\") or self.at("kw", "case"):
            return self.parse_expr()
        return parse()

    def parse_or(self) -> Expr:
        left = self.parse_and()
        if self.at_sym("||"):
            self.advance()
            return apps(Var("||"), [left, self._operand(self.parse_or)])
        return left

    def parse_and(self) -> Expr:
        left = self.parse_cons()
        if self.at_sym("&&"):
            self.advance()
            return apps(Var("&&"), [left, self._operand(self.parse_and)])
        return left

    def parse_cons(self) -> Expr:
        left = self.parse_app()
        if self.at_sym(":") or self.at_sym(":*"):
            op = self.advance().text
            right = self._operand(self.parse_cons)
            return BCon(":", (left, right)) if op == ":*" else Con(":", (left, right))
        return left

    def _atom_start(self) -> bool:
        t = self.peek()
        return t.kind in _ATOM_START or (t.kind == "sym" and t.text in _ATOM_SYMS)

    def parse_app(self) -> Expr:
        head_tok = self.peek()
        head = self.parse_atom()
        args = []
        while self._atom_start():
            args.append(self.finish(self.parse_atom()))
        if isinstance(head, _ConRef):
            return self.saturate(head, args, head_tok)
        return apps(head, args)

    def saturate(self, ref: _ConRef, args: list[Expr], tok: Tok) -> Expr:
        n = self.datas.arity(ref.name)
        if len(args) > n:
            raise self.error(f"constructor {ref.name} applied to too many arguments", tok)
        extra = [f"_c{k}" for k in range(1, n - len(args) + 1)]
        full = tuple(args) + tuple(Var(x) for x in extra)
        body = BCon(ref.name, full) if ref.bx else Con(ref.name, full)
        return lams(extra, body)

    def finish(self, e) -> Expr:
        if isinstance(e, _ConRef):
            return self.saturate(e, [], self.toks[self.pos - 1])
        return e

    def parse_atom(self):
        tok = self.advance()
        if tok.kind == "id":
            if tok.text == "_":
                raise self.error("wildcard is not an expression", tok)
            return Var(tok.text)
        if tok.kind == "con":
            if not self.datas.is_constructor(tok.text):
                raise self.error(f"unknown constructor {tok.text}", tok)
            return _ConRef(tok.text, self.starred())
        if tok.kind == "int":
            return BCon(tok.text) if self.starred() else Con(tok.text)
        if tok.kind == "char":
            c = char_lit(_unescape(tok.text[1:-1]))
            return BCon(c) if self.starred() else Con(c)
        if tok.kind == "str":
            chars = _unescape(tok.text[1:-1])
            bx = self.starred()
            mk = BCon if bx else Con
            out: Expr = mk("[]")
            for c in reversed(chars):
                out = mk(":", (mk(char_lit(c)), out))
            return out
        if tok.kind == "sym":
            if tok.text == "[]":
                return BCon("[]") if self.starred() else Con("[]")
            if tok.text == "!":
                return Lift(self.finish(self.parse_atom()))
            if tok.text == "[":
                items = [self.parse_expr()]
                while self.at_sym(","):
                    self.advance()
                    items.append(self.parse_expr())
                self.expect("sym", "]")
                mk = BCon if self.starred() else Con
                out = mk("[]")
                for x in reversed(items):
                    out = mk(":", (x, out))
                return out
            if tok.text == "(":
                if self.at_sym(")"):
                    self.advance()
                    return BCon("()") if self.starred() else Con("()")
                items = [self.parse_expr()]
                while self.at_sym(","):
                    self.advance()
                    items.append(self.parse_expr())
                self.expect("sym", ")")
                if len(items) == 1:
                    if self.starred():
                        raise self.error("only tuples may be starred", tok)
                    return items[0]
                if len(items) > 4:
                    raise self.error("tuples have at most 4 components", tok)
                mk = BCon if self.starred() else Con
                return mk(tuple_con(len(items)), tuple(items))
        raise self.error(f"expected an expression, found {tok.text or 'end of input'}", tok)

    def parse_full_expr(self) -> Expr:
        e = self.parse_expr()
        if not self.done():
            raise self.error(f"unexpected {self.peek().text}")
        return e


def _split_items(toks: list[Tok]) -> list[list[Tok]]:
    items: list[list[Tok]] = []
    for t in toks[:-1]:
        if t.col == 1 or not items:
            if t.col != 1:
                raise ParseError(t.line, t.col, "top-level item must start in column 1")
            items.append([])
        items[-1].append(t)
    eof = toks[-1]
    return [it + [Tok("eof", "", eof.line, eof.col, eof.end)] for it in items]


def parse_spec(text: str, filename: str = "<input>") -> SpecFile:
    toks = tokenize(text, filename)
    if len(toks) == 1:
        raise ParseError(1, 1, "empty file", filename)
    try:
        items = _split_items(toks)
    except ParseError as exc:
        raise ParseError(exc.line, exc.col, exc.message, filename)
    datas = DataEnv()
    spec = SpecFile(datas, filename=filename)
    data_items = [it for it in items if it[0].kind == "kw" and it[0].text == "data"]
    # declare datatype names first so constructors may refer to each other
    for it in data_items:
        name = it[1]
        if name.kind != "con":
            raise ParseError(name.line, name.col, "expected a datatype name", filename)
        datas.decls.setdefault(name.text, DataDecl(name.text, (), ()))
    for it in data_items:
        p = Parser(it, datas, filename)
        p.advance()
        name = p.expect("con").text
        p.expect("sym", "=")
        ctors = []
        while True:
            c = p.expect("con")
            args = []
            while p._atype_start():
                args.append(p.parse_atype())
            ctors.append(ConDecl(c.text, tuple(args)))
            if p.at_sym("|"):
                p.advance()
                continue
            break
        if not p.done():
            raise p.error(f"unexpected {p.peek().text}")
        decl = DataDecl(name, (), tuple(ctors))
        for c in ctors:
            if c.name in datas.owner:
                raise ParseError(it[0].line, it[0].col, f"duplicate constructor {c.name}", filename)
            datas.owner[c.name] = decl
        datas.decls[name] = decl
    for it in items:
        head = it[0]
        p = Parser(it, datas, filename)
        if head.kind == "kw" and head.text == "data":
            continue
        if head.kind == "dir":
            _parse_directive(p, spec)
            continue
        if head.kind != "id":
            raise p.error(f"unexpected {head.text} at top level")
        if it[1].kind == "sym" and it[1].text == ":":
            p.advance()
            p.advance()
            t = p.parse_type()
            if not p.done():
                raise p.error(f"unexpected {p.peek().text}")
            if head.text in spec.signatures:
                raise ParseError(head.line, head.col, f"duplicate signature for {head.text}", filename)
            spec.signatures[head.text] = t
            continue
        name = p.advance().text
        params = []
        while p.at("id"):
            tok = p.advance()
            params.append(p._wildcard().name if tok.text == "_" else tok.text)
        p.expect("sym", "=")
        body = lams(params, p.parse_full_expr())
        if name in spec.definitions:
            raise ParseError(head.line, head.col, f"duplicate definition of {name}", filename)
        spec.definitions[name] = body
        spec.positions[name] = (head.line, head.col)
    return spec


def _parse_directive(p: Parser, spec: SpecFile) -> None:
    tok = p.advance()
    d = tok.text
    if d == "#entry":
        if spec.entry is not None:
            raise p.error("duplicate #entry", tok)
        spec.entry = p.parse_full_expr()
    elif d == "#example":
        p.expect("id", "put")
        s = p.finish(p.parse_atom())
        v = p.finish(p.parse_atom())
        p.expect("sym", "=")
        u = p.parse_full_expr()
        spec.examples.append(RawExample(s, v, u, tok.line))
    elif d == "#component":
        while p.at("id"):
            spec.components.append(p.advance().text)
        if not p.done():
            raise p.error(f"unexpected {p.peek().text}")
    elif d in ("#class", "#expect", "#name"):
        words = []
        while not p.done():
            words.append(p.advance().text)
        spec.meta[d[1:]] = " ".join(words)
    else:
        raise p.error(f"unknown directive {d}", tok)


def parse_expr(text: str, datas: DataEnv | None = None) -> Expr:
    toks = tokenize(text)
    return Parser(toks, datas or DataEnv()).parse_full_expr()


def parse_type(text: str, datas: DataEnv | None = None) -> Type:
    p = Parser(tokenize(text), datas or DataEnv())
    t = p.parse_type()
    if not p.done():
        raise p.error(f"unexpected {p.peek().text}")
    return t


def parse_pattern(text: str, datas: DataEnv | None = None) -> Pattern:
    p = Parser(tokenize(text), datas or DataEnv())
    pat = p.parse_pattern()
    if not p.done():
        raise p.error(f"unexpected {p.peek().text}")
    return pat


# -------------------------------------------------------------- printer


def show_pattern(p: Pattern, prec: int = 0) -> str:
    if isinstance(p, PVar):
        return p.name
    items = _pat_list(p)
    if items is not None:
        if items and all(isinstance(x, PCon) and x.con.startswith("'") for x in items):
            return '"' + "".join(escape_char(lit_char(x.con)) for x in items) + '"'
        return "[" + ", ".join(show_pattern(x) for x in items) + "]"
    if p.con == ":":
        s = f"{show_pattern(p.args[0], 1)} : {show_pattern(p.args[1], 0)}"
        return f"({s})" if prec > 0 else s
    if p.con.startswith("(") and p.con != "()":
        return "(" + ", ".join(show_pattern(x) for x in p.args) + ")"
    if not p.args:
        return _show_lit(p.con)
    s = p.con + " " + " ".join(show_pattern(a, 2) for a in p.args)
    return f"({s})" if prec > 1 else s


def _pat_list(p: Pattern):
    out = []
    while isinstance(p, PCon) and p.con == ":":
        out.append(p.args[0])
        p = p.args[1]
    if isinstance(p, PCon) and p.con == "[]" and out:
        return out
    return None


def _show_lit(con: str) -> str:
    if con.startswith("'"):
        return "'" + escape_char(lit_char(con)) + "'"
    return con


def _expr_list(e: Expr, kind):
    out = []
    while isinstance(e, kind) and e.con == ":":
        out.append(e.args[0])
        e = e.args[1]
    if isinstance(e, kind) and e.con == "[]" and out:
        return out
    return None


# operators each side may hold without parentheses
_INFIX = {"||": ({"&&"}, {"&&", "||"}), "&&": (set(), {"&&"})}


def _infix_op(e: Expr) -> str | None:
    if isinstance(e, App):
        head, args = spine(e)
        if isinstance(head, Var) and head.name in _INFIX and len(args) == 2:
            return head.name
    return None


def _operand(e: Expr, ok: set, holes: bool) -> str:
    op = _infix_op(e)
    if op is not None:
        s = show_expr(e, 0, holes)
        return s if op in ok else f"({s})"
    if isinstance(e, (Lam, Case, BCase)):
        return f"({show_expr(e, 0, holes)})"
    return show_expr(e, 0, holes)


def show_expr(e: Expr, prec: int = 0, holes: bool = False) -> str:
    """Render an expression; prec 0 = top, 1 = operand of `:`/app head, 2 = atom."""

    def go(e, prec):
        return show_expr(e, prec, holes)

    def paren(s, need):
        return f"({s})" if need else s

    if isinstance(e, Var):
        return e.name
    if isinstance(e, Hole):
        if not holes:
            raise UnfilledHole(e.info.id)
        return f"?{e.info.id}"
    if isinstance(e, Lam):
        params = []
        while isinstance(e, Lam):
            params.append(e.param)
            e = e.body
        return paren(f"\\{' '.join(params)} -> {go(e, 0)}", prec > 0)
    if isinstance(e, Case):
        brs = " ; ".join(f"{show_pattern(p)} -> {go(b, 0)}" for p, b in e.branches)
        return paren(f"case {go(e.scrut, 0)} of {{ {brs} }}", prec > 0)
    if isinstance(e, BCase):
        brs = " ; ".join(
            f"{show_pattern(b.pattern)} -> {go(b.body, 0)} with {go(b.exit, 0)} by {go(b.recon, 0)}"
            for b in e.branches)
        return paren(f"case* {go(e.scrut, 0)} of {{ {brs} }}", prec > 0)
    if isinstance(e, Lift):
        return "!" + go(e.body, 2)
    if isinstance(e, App):
        head, args = spine(e)
        if isinstance(head, Var) and head.name in _INFIX and len(args) == 2:
            left_ok, right_ok = _INFIX[head.name]
            s = f"{_operand(args[0], left_ok, holes)} {head.name} {_operand(args[1], right_ok, holes)}"
            return paren(s, prec > 0)
        s = go(head, 1) + " " + " ".join(go(a, 2) for a in args)
        return paren(s, prec > 1)
    if isinstance(e, (Con, BCon)):
        star = "*" if isinstance(e, BCon) else ""
        items = _expr_list(e, type(e))
        if items is not None:
            elem = BCon if isinstance(e, BCon) else Con
            if all(isinstance(x, elem) and x.con.startswith("'") for x in items):
                return '"' + "".join(escape_char(lit_char(x.con)) for x in items) + '"' + star
            return "[" + ", ".join(go(x, 0) for x in items) + "]" + star
        if e.con == ":":
            op = ":*" if star else ":"
            return paren(f"{go(e.args[0], 1)} {op} {go(e.args[1], 0)}", prec > 0)
        if e.con.startswith("(") and e.con != "()":
            return "(" + ", ".join(go(x, 0) for x in e.args) + ")" + star
        if not e.args:
            return _show_lit(e.con) + star
        s = e.con + star + " " + " ".join(go(a, 2) for a in e.args)
        return paren(s, prec > 1)
    raise TypeError(f"cannot print {e!r}")


def show_definition(name: str, e: Expr, holes: bool = False) -> str:
    params = []
    while isinstance(e, Lam):
        params.append(e.param)
        e = e.body
    lhs = " ".join([name] + params)
    return f"{lhs} = {show_expr(e, 0, holes)}"


def print_program(defs, types: dict | None = None, holes: bool = False) -> str:
    """Print `(name, expr)` definitions, each preceded by its signature when known."""
    if isinstance(defs, dict):
        defs = list(defs.items())
    lines = []
    for name, e in defs:
        if not holes:
            hs = holes_of(e)
            if hs:
                raise UnfilledHole(hs[0].id)
        if types and name in types:
            lines.append(f"{name} : {show_type(types[name])}")
        lines.append(show_definition(name, e, holes))
    return "\n".join(lines) + "\n"


def show_data(d: DataDecl) -> str:
    ctors = " | ".join(
        " ".join([c.name] + [_show_atype(a) for a in c.args]) for c in d.constructors)
    return f"data {d.name} = {ctors}"


def _show_atype(t: Type) -> str:
    s = show_type(t, 2)
    return s


def print_spec(spec: SpecFile) -> str:
    out = [show_data(d) for d in spec.datas.user_decls()]
    names = list(spec.definitions)
    for n in spec.signatures:
        if n not in spec.definitions:
            names.append(n)
    for n in names:
        if n in spec.signatures:
            out.append(f"{n} : {show_type(spec.signatures[n])}")
        if n in spec.definitions:
            out.append(show_definition(n, spec.definitions[n]))
    for k, v in spec.meta.items():
        out.append(f"#{k} {v}")
    if spec.entry is not None:
        out.append(f"#entry {show_expr(spec.entry)}")
    for c in spec.components:
        out.append(f"#component {c}")
    for ex in spec.examples:
        out.append(f"#example put {show_expr(ex.source, 2)} {show_expr(ex.view, 2)} = {show_expr(ex.updated)}")
    return "\n".join(out) + "\n"


# ------------------------------------------------ literal values by type


class ValueError_(ValueError):
    pass


def to_value(e: Expr, t: Type | None, datas: DataEnv):
    """Convert a literal expression to a first-order value at type `t`.

    Integer literals become Peano numerals at type Nat; without a type,
    integers stay Int literals."""
    from .syntax import Val, vnat
    if isinstance(e, Con):
        if t == NAT and literal_type(e.con) == INT:
            n = int(e.con)
            if n < 0:
                raise ValueError_(f"negative natural {n}")
            return vnat(n)
        if t is None or not isinstance(t, TData):
            if literal_type(e.con) is None and e.con not in datas.owner:
                raise ValueError_(f"unknown constructor {e.con}")
            arg_types = [None] * len(e.args)
        else:
            arg_types = datas.con_args(e.con, t)
            if arg_types is None:
                raise ValueError_(f"constructor {e.con} does not build {show_type(t)}")
        if len(arg_types) != len(e.args):
            raise ValueError_(f"constructor {e.con} arity mismatch")
        return Val(e.con, tuple(to_value(a, at, datas) for a, at in zip(e.args, arg_types)))
    if isinstance(e, Lam):
        raise ValueError_("partially applied constructor is not a value")
    raise ValueError_(f"not a first-order value: {show_expr(e, holes=True)}")

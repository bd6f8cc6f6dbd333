"""Concrete syntax for choreographies (.chor), networks (.net) and states (.state).

Choreographies::

    C ::= group ';' C | 'if' p '.' E 'then' '{' C '}' 'else' '{' C '}'
        | 'def' X '=' '{' C '}' 'in' '{' C '}' | X | '0'
    group ::= '{' elem (',' elem)* '}' | elem
    elem  ::= p '.' E '->' q '.' y  |  p '->' q '[' l ']'

Behaviours mirror this with ``q!E``, ``q?x``, ``q(+)[l]`` and
``p&{l1: B1, l2: B2}``; a network is ``p |> B`` clauses joined by ``|``.
A trailing ``; 0`` may be omitted, ``//`` starts a comment, and procedure
annotations may be written ``X[p, q]``.  Printing is canonical: group
members are sorted and singleton groups lose their braces.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .syntax import (
    BDef, BEND, BEnd, BCall, BIf, BinOp, Bool, BoolLit, Branch, Call, Com, Ctor, Def, END, End,
    Expr, If, Int, IntLit, MCom, MSel, Network, Not, Recv, Sel, SelGroup, Send, State, Str,
    StrLit, Tagged, ThetaGroup, UNIT, Unit, Value, Var, eval_expr, free_vars,
)

KEYWORDS = frozenset({"if", "then", "else", "def", "in", "true", "false", "and", "or", "not"})


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # ident, int, str, sym, eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>\|>|->|\(\+\)|\+\+|[{}()\[\],;.!?&|:=<+\-*])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    # -- token plumbing -----------------------------------------------------
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("sym", "ident", "int") and t.text == text

    def next(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.next()

    def ident(self, what: str = "identifier") -> str:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected {what}")
        self.pos += 1
        return t.text

    def eof(self):
        if self.peek().kind != "eof":
            self.error("expected end of input")

    # -- expressions --------------------------------------------------------
    def expr(self) -> Expr:
        return self._binary(0)

    _LEVELS = (("or",), ("and",), ("<", "="), ("+", "-", "++"), ("*",))

    def _binary(self, level: int) -> Expr:
        if level == len(self._LEVELS):
            return self._unary()
        left = self._binary(level + 1)
        while self.peek().text in self._LEVELS[level] and self.peek().kind in ("sym", "ident"):
            op = self.next().text
            left = BinOp(op, left, self._binary(level + 1))
        return left

    def _unary(self) -> Expr:
        if self.at("not"):
            self.next()
            return Not(self._unary())
        return self._primary()

    def _primary(self) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return IntLit(int(t.text))
        if self.at("-") and self.peek(1).kind == "int":
            self.next()
            return IntLit(-int(self.next().text))
        if t.kind == "str":
            self.next()
            return StrLit(json.loads(t.text))
        if self.at("true") or self.at("false"):
            self.next()
            return BoolLit(t.text == "true")
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        name = self.ident("expression")
        if self.at("("):
            self.next()
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.next()
                    args.append(self.expr())
            self.expect(")")
            return Ctor(name, tuple(args))
        return Var(name)

    # -- choreographies -----------------------------------------------------
    def chor(self):
        if self.at("if"):
            self.next()
            p = self.ident("process name")
            self.expect(".")
            guard = self.expr()
            self.expect("then")
            c1 = self._braced(self.chor)
            self.expect("else")
            c2 = self._braced(self.chor)
            return If(p, guard, c1, c2)
        if self.at("def"):
            self.next()
            name = self.ident("procedure name")
            procs = self._annotation()
            self.expect("=")
            body = self._braced(self.chor)
            self.expect("in")
            main = self._braced(self.chor)
            return Def(name, body, main, procs)
        if self.peek().kind == "int" and self.peek().text == "0":
            self.next()
            return END
        if self.at("{"):
            start = self.next()
            elems = []
            if not self.at("}"):
                elems.append(self._interaction())
                while self.at(","):
                    self.next()
                    elems.append(self._interaction())
            self.expect("}")
            return self._group(elems, start)
        if self.peek().kind == "ident" and (self.at(".", 1) or self.at("->", 1)):
            start = self.peek()
            return self._group([self._interaction()], start)
        name = self.ident("choreography")
        return Call(name, self._annotation())

    def _braced(self, fn):
        self.expect("{")
        t = fn()
        self.expect("}")
        return t

    def _annotation(self) -> tuple[str, ...]:
        if not self.at("["):
            return ()
        self.next()
        procs = [self.ident("process name")]
        while self.at(","):
            self.next()
            procs.append(self.ident("process name"))
        self.expect("]")
        return tuple(procs)

    def _interaction(self):
        p = self.ident("process name")
        if self.at("."):
            self.next()
            e = self.expr()
            self.expect("->")
            q = self.ident("process name")
            self.expect(".")
            return Com(p, e, q, self.ident("variable"))
        self.expect("->")
        q = self.ident("process name")
        self.expect("[")
        label = self.ident("label")
        self.expect("]")
        return Sel(p, q, label)

    def _group(self, elems, start: Token):
        if len(set(elems)) != len(elems):
            raise ParseError("duplicate element in group", start.line, start.col)
        kinds = {type(e) for e in elems}
        if len(kinds) > 1:
            raise ParseError("group mixes communications and selections", start.line, start.col)
        cont = self._cont(self.chor, END)
        if kinds == {Sel}:
            return MSel(tuple(elems), cont)
        return MCom(tuple(elems), cont)

    def _cont(self, fn, end):
        if self.at(";"):
            self.next()
            return fn()
        return end

    # -- behaviours -----------------------------------------------------------
    def behaviour(self):
        if self.at("if"):
            self.next()
            guard = self.expr()
            self.expect("then")
            b1 = self._braced(self.behaviour)
            self.expect("else")
            b2 = self._braced(self.behaviour)
            return BIf(guard, b1, b2)
        if self.at("def"):
            self.next()
            name = self.ident("procedure name")
            self.expect("=")
            body = self._braced(self.behaviour)
            self.expect("in")
            return BDef(name, body, self._braced(self.behaviour))
        if self.peek().kind == "int" and self.peek().text == "0":
            self.next()
            return BEND
        if self.at("{"):
            start = self.next()
            elems = []
            if not self.at("}"):
                elems.append(self._action())
                while self.at(","):
                    self.next()
                    elems.append(self._action())
            self.expect("}")
            return self._action_group(elems, start)
        if self.peek().kind == "ident" and self.at("&", 1):
            return self._branch()
        if self.peek().kind == "ident" and any(self.at(s, 1) for s in ("!", "?", "(+)")):
            start = self.peek()
            return self._action_group([self._action()], start)
        return BCall(self.ident("behaviour"))

    def _action(self):
        q = self.ident("process name")
        if self.at("!"):
            self.next()
            return Send(q, self.expr())
        if self.at("?"):
            self.next()
            return Recv(q, self.ident("variable"))
        self.expect("(+)")
        self.expect("[")
        label = self.ident("label")
        self.expect("]")
        return (q, label)

    def _action_group(self, elems, start: Token):
        if len(set(elems)) != len(elems):
            raise ParseError("duplicate element in group", start.line, start.col)
        sels = [e for e in elems if isinstance(e, tuple)]
        if sels and len(sels) != len(elems):
            raise ParseError("group mixes selections with sends/receives", start.line, start.col)
        cont = self._cont(self.behaviour, BEND)
        if sels:
            return SelGroup(tuple(sels), cont)
        return ThetaGroup(tuple(elems), cont)

    def _branch(self):
        p = self.ident("process name")
        self.expect("&")
        start = self.expect("{")
        branches = []
        while True:
            label = self.ident("label")
            self.expect(":")
            branches.append((label, self.behaviour()))
            if not self.at(","):
                break
            self.next()
        self.expect("}")
        labels = [lbl for lbl, _ in branches]
        if len(set(labels)) != len(labels):
            raise ParseError("duplicate branch label", start.line, start.col)
        return Branch(p, tuple(branches))

    # -- networks and states --------------------------------------------------
    def network(self) -> Network:
        procs: dict = {}
        while True:
            if self.peek().kind == "int" and self.peek().text == "0":
                self.next()
            else:
                tok = self.peek()
                p = self.ident("process name")
                self.expect("|>")
                if p in procs:
                    raise ParseError(f"duplicate process {p!r} in network", tok.line, tok.col)
                procs[p] = self.behaviour()
            if not self.at("|"):
                break
            self.next()
        return Network(procs)

    def state(self) -> State:
        cells: dict = {}
        while self.peek().kind != "eof":
            tok = self.peek()
            p = self.ident("process name")
            self.expect(".")
            x = self.ident("variable")
            self.expect("=")
            if (p, x) in cells:
                raise ParseError(f"duplicate state entry {p}.{x}", tok.line, tok.col)
            cells[(p, x)] = self._literal()
        return State(cells)

    def _literal(self) -> Value:
        if self.at("(") and self.at(")", 1):
            self.next()
            self.next()
            return UNIT
        tok = self.peek()
        e = self.expr()
        if free_vars(e):
            raise ParseError("state values must be closed literals", tok.line, tok.col)
        return eval_expr(e, {})


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    p.eof()
    return e


def parse_chor(text: str):
    p = _Parser(text)
    c = p.chor()
    p.eof()
    return c


def parse_behaviour(text: str):
    p = _Parser(text)
    b = p.behaviour()
    p.eof()
    return b


def parse_network(text: str) -> Network:
    p = _Parser(text)
    n = p.network()
    p.eof()
    return n


def parse_state(text: str) -> State:
    return _Parser(text).state()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {"or": 1, "and": 2, "<": 3, "=": 3, "+": 4, "-": 4, "++": 4, "*": 5}


def format_expr(e: Expr, prec: int = 0) -> str:
    match e:
        case IntLit(v):
            return str(v)
        case BoolLit(v):
            return "true" if v else "false"
        case StrLit(v):
            return json.dumps(v, ensure_ascii=False)
        case Var(name):
            return name
        case Ctor(name, args):
            return f"{name}({', '.join(format_expr(a) for a in args)})"
        case Not(a):
            s = "not " + format_expr(a, 6)
            return f"({s})" if prec > 6 else s
        case BinOp(op, l, r):
            level = _PREC[op]
            s = f"{format_expr(l, level)} {op} {format_expr(r, level + 1)}"
            return f"({s})" if prec > level else s
    raise TypeError(f"not an expression: {e!r}")


def format_value(v: Value) -> str:
    match v:
        case Int(n):
            return str(n)
        case Bool(b):
            return "true" if b else "false"
        case Str(s):
            return json.dumps(s, ensure_ascii=False)
        case Tagged(name, args):
            return f"{name}({', '.join(format_value(a) for a in args)})"
        case Unit():
            return "()"
    raise TypeError(f"not a value: {v!r}")


def format_com(c: Com) -> str:
    return f"{c.sender}.{format_expr(c.expr)} -> {c.receiver}.{c.var}"


def format_sel(s: Sel) -> str:
    return f"{s.sender} -> {s.receiver}[{s.label}]"


def _fmt_group(items) -> str:
    if len(items) == 1:
        return items[0]
    return "{" + ", ".join(items) + "}"


def _annot(procs) -> str:
    return f"[{', '.join(procs)}]" if procs else ""


def _chor_lines(c) -> list[str]:
    match c:
        case MCom(coms, cont):
            head = _fmt_group([format_com(x) for x in coms])
        case MSel(sels, cont):
            head = _fmt_group([format_sel(x) for x in sels])
        case If(p, guard, c1, c2):
            return ([f"if {p}.{format_expr(guard)} then {{"] + _indent(_chor_lines(c1))
                    + ["} else {"] + _indent(_chor_lines(c2)) + ["}"])
        case Def(name, body, main, procs):
            return ([f"def {name}{_annot(procs)} = {{"] + _indent(_chor_lines(body))
                    + ["} in {"] + _indent(_chor_lines(main)) + ["}"])
        case Call(name, procs):
            return [name + _annot(procs)]
        case End():
            return ["0"]
        case _:
            raise TypeError(f"not a choreography: {c!r}")
    if isinstance(cont, End):
        return [head]
    return [head + ";"] + _chor_lines(cont)


def _indent(lines: list[str]) -> list[str]:
    return ["  " + ln for ln in lines]


def print_chor(c) -> str:
    return "\n".join(_chor_lines(c)) + "\n"


def format_theta(t) -> str:
    if isinstance(t, Send):
        return f"{t.to}!{format_expr(t.expr)}"
    return f"{t.source}?{t.var}"


def format_behaviour(b) -> str:
    match b:
        case ThetaGroup(actions, cont):
            head = _fmt_group([format_theta(t) for t in actions])
        case SelGroup(choices, cont):
            head = _fmt_group([f"{q}(+)[{lbl}]" for q, lbl in choices])
        case Branch(p, branches):
            inner = ", ".join(f"{lbl}: {format_behaviour(bb)}" for lbl, bb in branches)
            return f"{p}&{{{inner}}}"
        case BIf(guard, b1, b2):
            return (f"if {format_expr(guard)} then {{{format_behaviour(b1)}}} "
                    f"else {{{format_behaviour(b2)}}}")
        case BDef(name, body, main):
            return f"def {name} = {{{format_behaviour(body)}}} in {{{format_behaviour(main)}}}"
        case BCall(name):
            return name
        case BEnd():
            return "0"
        case _:
            raise TypeError(f"not a behaviour: {b!r}")
    if isinstance(cont, BEnd):
        return head
    return f"{head}; {format_behaviour(cont)}"


def print_network(n: Network) -> str:
    if not n:
        return "0\n"
    return "\n| ".join(f"{p} |> {format_behaviour(b)}" for p, b in n.items()) + "\n"


def print_state(s: State) -> str:
    return "".join(f"{p}.{x} = {format_value(v)}\n" for (p, x), v in s.items())

"""Term languages shared by every engine.

Expressions, values, choreographies, process behaviours, networks and memory
states all live here, together with the small semantic helpers (expression
evaluation, free variables, process-name extraction) that the checkers,
engines and projection rely on.

All terms are immutable and hashable.  Grouped interactions (multicoms,
multisels, action groups) are stored as canonically sorted, duplicate-free
tuples so that structural equality ignores insertion order.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, replace
from typing import Union

Path = tuple[str, ...]

# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

BINOPS = ("+", "-", "*", "<", "=", "and", "or", "++")


@dataclass(frozen=True, slots=True)
class IntLit:
    value: int


@dataclass(frozen=True, slots=True)
class BoolLit:
    value: bool


@dataclass(frozen=True, slots=True)
class StrLit:
    value: str


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True, slots=True)
class Ctor:
    """Uninterpreted constructor application, e.g. ``priceof(t)``."""

    name: str
    args: tuple["Expr", ...] = ()


Expr = Union[IntLit, BoolLit, StrLit, Var, BinOp, Not, Ctor]

# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Int:
    value: int


@dataclass(frozen=True, slots=True)
class Bool:
    value: bool


@dataclass(frozen=True, slots=True)
class Str:
    value: str


@dataclass(frozen=True, slots=True)
class Tagged:
    name: str
    args: tuple["Value", ...] = ()


@dataclass(frozen=True, slots=True)
class Unit:
    pass


UNIT = Unit()
TRUE = Bool(True)

Value = Union[Int, Bool, Str, Tagged, Unit]


def eval_expr(e: Expr, local: Mapping[str, Value]) -> Value:
    """Evaluate ``e`` against one process's variables.

    Evaluation is total: unbound variables read as ``Unit`` and ill-typed
    operator applications produce ``Unit`` instead of failing.
    """
    match e:
        case IntLit(v):
            return Int(v)
        case BoolLit(v):
            return Bool(v)
        case StrLit(v):
            return Str(v)
        case Var(name):
            return local.get(name, UNIT)
        case Not(a):
            v = eval_expr(a, local)
            return Bool(not v.value) if isinstance(v, Bool) else UNIT
        case Ctor(name, args):
            return Tagged(name, tuple(eval_expr(a, local) for a in args))
        case BinOp(op, l, r):
            return _apply(op, eval_expr(l, local), eval_expr(r, local))
    raise TypeError(f"not an expression: {e!r}")


def _apply(op: str, a: Value, b: Value) -> Value:
    if op == "=":
        return Bool(a == b)
    if isinstance(a, Int) and isinstance(b, Int):
        if op == "+":
            return Int(a.value + b.value)
        if op == "-":
            return Int(a.value - b.value)
        if op == "*":
            return Int(a.value * b.value)
        if op == "<":
            return Bool(a.value < b.value)
    elif isinstance(a, Str) and isinstance(b, Str):
        if op == "++":
            return Str(a.value + b.value)
        if op == "<":
            return Bool(a.value < b.value)
    elif isinstance(a, Bool) and isinstance(b, Bool):
        if op == "and":
            return Bool(a.value and b.value)
        if op == "or":
            return Bool(a.value or b.value)
    return UNIT


def free_vars(e: Expr) -> frozenset[str]:
    match e:
        case Var(name):
            return frozenset((name,))
        case BinOp(_, l, r):
            return free_vars(l) | free_vars(r)
        case Not(a):
            return free_vars(a)
        case Ctor(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= free_vars(a)
            return out
    return frozenset()


# ---------------------------------------------------------------------------
# Choreographies
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Com:
    """``sender.expr -> receiver.var``"""

    sender: str
    expr: Expr
    receiver: str
    var: str


@dataclass(frozen=True, slots=True)
class Sel:
    """``sender -> receiver[label]``"""

    sender: str
    receiver: str
    label: str


def _com_key(c: Com):
    return (c.sender, c.receiver, c.var, repr(c.expr))


def _sel_key(s: Sel):
    return (s.sender, s.receiver, s.label)


def _canon(obj, name: str, key) -> None:
    object.__setattr__(obj, name, tuple(sorted(set(getattr(obj, name)), key=key)))


@dataclass(frozen=True, slots=True)
class MCom:
    coms: tuple[Com, ...]
    cont: "Choreography"

    def __post_init__(self):
        _canon(self, "coms", _com_key)


@dataclass(frozen=True, slots=True)
class MSel:
    sels: tuple[Sel, ...]
    cont: "Choreography"

    def __post_init__(self):
        _canon(self, "sels", _sel_key)


@dataclass(frozen=True, slots=True)
class If:
    proc: str
    guard: Expr
    then: "Choreography"
    else_: "Choreography"


@dataclass(frozen=True, slots=True)
class Def:
    """``def name = {body} in {main}``; ``procs`` is the annotation."""

    name: str
    body: "Choreography"
    main: "Choreography"
    procs: tuple[str, ...] = ()

    def __post_init__(self):
        _canon(self, "procs", None)


@dataclass(frozen=True, slots=True)
class Call:
    name: str
    procs: tuple[str, ...] = ()

    def __post_init__(self):
        _canon(self, "procs", None)


@dataclass(frozen=True, slots=True)
class End:
    pass


END = End()

Choreography = Union[MCom, MSel, If, Def, Call, End]


def pn_multicom(coms: Iterable[Com]) -> frozenset[str]:
    out = set()
    for c in coms:
        out.add(c.sender)
        out.add(c.receiver)
    return frozenset(out)


def tn_multisel(sels: Iterable[Sel]) -> frozenset[str]:
    return frozenset(s.receiver for s in sels)


def pn_chor(c: Choreography) -> frozenset[str]:
    """Process names in interactions, conditionals and annotations of ``c``."""
    out: set[str] = set()
    stack = [c]
    while stack:
        t = stack.pop()
        match t:
            case MCom(coms, cont):
                out |= pn_multicom(coms)
                stack.append(cont)
            case MSel(sels, cont):
                for s in sels:
                    out.add(s.sender)
                    out.add(s.receiver)
                stack.append(cont)
            case If(p, _, c1, c2):
                out.add(p)
                stack += [c1, c2]
            case Def(_, body, main, procs):
                out.update(procs)
                stack += [body, main]
            case Call(_, procs):
                out.update(procs)
    return frozenset(out)


def chor_size(c: Choreography) -> int:
    """Node count: one per constructor and one per grouped interaction."""
    match c:
        case MCom(coms, cont):
            return 1 + len(coms) + chor_size(cont)
        case MSel(sels, cont):
            return 1 + len(sels) + chor_size(cont)
        case If(_, _, c1, c2):
            return 1 + chor_size(c1) + chor_size(c2)
        case Def(_, body, main):
            return 1 + chor_size(body) + chor_size(main)
    return 1


def subterm(c, path: Path):
    """Follow ``path`` (steps: cont, then, else, body, main, or a branch label)."""
    for step in path:
        c = child(c, step)
    return c


def child(c, step: str):
    if step == "cont":
        return c.cont
    if step == "then":
        return c.then
    if step == "else":
        return c.else_
    if step == "body":
        return c.body
    if step == "main":
        return c.main
    if isinstance(c, Branch):
        return c.get(step)
    raise KeyError(step)


def format_path(path: Path) -> str:
    return "$" + "".join("." + s for s in path)


# ---------------------------------------------------------------------------
# Behaviours and networks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Send:
    """``to!expr``"""

    to: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class Recv:
    """``source?var``"""

    source: str
    var: str


Theta = Union[Send, Recv]


def _theta_key(t: Theta):
    if isinstance(t, Send):
        return (0, t.to, repr(t.expr))
    return (1, t.source, t.var)


@dataclass(frozen=True, slots=True)
class ThetaGroup:
    actions: tuple[Theta, ...]
    cont: "Behaviour"

    def __post_init__(self):
        _canon(self, "actions", _theta_key)


@dataclass(frozen=True, slots=True)
class SelGroup:
    """Outgoing selections, as ``(target, label)`` pairs."""

    choices: tuple[tuple[str, str], ...]
    cont: "Behaviour"

    def __post_init__(self):
        _canon(self, "choices", None)


@dataclass(frozen=True, slots=True)
class Branch:
    source: str
    branches: tuple[tuple[str, "Behaviour"], ...]

    def __post_init__(self):
        items = dict(self.branches)
        object.__setattr__(self, "branches", tuple(sorted(items.items(), key=lambda kv: kv[0])))

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(lbl for lbl, _ in self.branches)

    def get(self, label: str) -> "Behaviour":
        for lbl, b in self.branches:
            if lbl == label:
                return b
        raise KeyError(label)


@dataclass(frozen=True, slots=True)
class BIf:
    guard: Expr
    then: "Behaviour"
    else_: "Behaviour"


@dataclass(frozen=True, slots=True)
class BDef:
    name: str
    body: "Behaviour"
    main: "Behaviour"


@dataclass(frozen=True, slots=True)
class BCall:
    name: str


@dataclass(frozen=True, slots=True)
class BEnd:
    pass


BEND = BEnd()

Behaviour = Union[ThetaGroup, SelGroup, Branch, BIf, BDef, BCall, BEnd]


class Network(Mapping[str, Behaviour]):
    """Parallel composition of named processes, as a finite map."""

    __slots__ = ("_procs", "_hash")

    def __init__(self, procs: Mapping[str, Behaviour] | Iterable[tuple[str, Behaviour]] = ()):
        self._procs = dict(sorted(dict(procs).items()))
        self._hash = None

    def __getitem__(self, p: str) -> Behaviour:
        return self._procs[p]

    def __iter__(self) -> Iterator[str]:
        return iter(self._procs)

    def __len__(self) -> int:
        return len(self._procs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._procs.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Network):
            return self._procs == other._procs
        return NotImplemented

    def __repr__(self):
        return f"Network({self._procs!r})"

    def replace(self, updates: Mapping[str, Behaviour]) -> "Network":
        procs = dict(self._procs)
        procs.update(updates)
        return Network(procs)


# ---------------------------------------------------------------------------
# Memory states
# ---------------------------------------------------------------------------


class State(Mapping[tuple[str, str], Value]):
    """Finite map from ``(process, variable)`` to values.

    Absent cells read as ``Unit``; cells holding ``Unit`` are dropped so that
    equality is canonical.  Updates return a new state.
    """

    __slots__ = ("_cells", "_hash")

    def __init__(self, cells: Mapping[tuple[str, str], Value] | None = None):
        self._cells = {k: v for k, v in sorted((cells or {}).items()) if v != UNIT}
        self._hash = None

    def __getitem__(self, key: tuple[str, str]) -> Value:
        return self._cells[key]

    def __iter__(self):
        return iter(self._cells)

    def __len__(self):
        return len(self._cells)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._cells.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, State):
            return self._cells == other._cells
        return NotImplemented

    def __repr__(self):
        return f"State({self._cells!r})"

    def read(self, proc: str, var: str) -> Value:
        return self._cells.get((proc, var), UNIT)

    def local(self, proc: str) -> dict[str, Value]:
        return {x: v for (p, x), v in self._cells.items() if p == proc}

    def update(self, updates: Iterable[tuple[tuple[str, str], Value]]) -> "State":
        cells = dict(self._cells)
        cells.update(updates)
        return State(cells)


def eval_at(e: Expr, state: State, proc: str) -> Value:
    """Evaluate ``e`` in the context of ``proc``."""
    return eval_expr(e, _LocalView(state, proc))


class _LocalView(Mapping[str, Value]):
    __slots__ = ("_state", "_proc")

    def __init__(self, state: State, proc: str):
        self._state = state
        self._proc = proc

    def __getitem__(self, var):
        return self._state._cells[(self._proc, var)]

    def get(self, var, default=None):
        return self._state._cells.get((self._proc, var), default)

    def __iter__(self):
        return (x for (p, x) in self._state._cells if p == self._proc)

    def __len__(self):
        return sum(1 for _ in self)


# ---------------------------------------------------------------------------
# Spine navigation shared by the engines
# ---------------------------------------------------------------------------

_FIELD = {"cont": "cont", "then": "then", "else": "else_", "body": "body", "main": "main"}

STUCK = "stuck"


def find_head(term):
    """Locate the head of a choreography or behaviour.

    Walks through definitions (reducing under them) and unfolds calls at the
    head, each procedure at most once.  Returns ``(path, node, env)`` where
    ``env`` maps the procedure names in scope to their bodies, ``None`` if
    the term is terminated, or ``STUCK`` for an unguarded call loop.
    """
    env: dict = {}
    path: Path = ()
    seen: set[str] = set()
    while True:
        if isinstance(term, (Def, BDef)):
            env = {**env, term.name: term.body}
            term, path = term.main, path + ("main",)
        elif isinstance(term, (Call, BCall)):
            if term.name in seen or term.name not in env:
                return STUCK
            seen.add(term.name)
            term, path = env[term.name], path + ("unfold",)
        elif isinstance(term, (End, BEnd)):
            return None
        else:
            return path, term, env


def calls_free(term, name: str) -> bool:
    """True iff ``term`` calls ``name`` outside any redefinition of it."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, (Call, BCall)):
            if t.name == name:
                return True
        elif isinstance(t, (Def, BDef)):
            if t.name != name:
                stack += [t.body, t.main]
        elif isinstance(t, (MCom, MSel, ThetaGroup, SelGroup)):
            stack.append(t.cont)
        elif isinstance(t, (If, BIf)):
            stack += [t.then, t.else_]
        elif isinstance(t, Branch):
            stack += [b for _, b in t.branches]
    return False


def rebuild(term, path: Path, fn, env: dict | None = None):
    """Replace the subterm at ``path`` by ``fn(subterm)``.

    An ``unfold`` step replaces the call found there by the body of the
    procedure it names.
    """
    if not path:
        return fn(term)
    step, rest = path[0], path[1:]
    if step == "unfold":
        return rebuild(env[term.name], rest, fn, env)
    if step == "main":
        env = {**(env or {}), term.name: term.body}
    if isinstance(term, Branch):
        new = rebuild(term.get(step), rest, fn, env)
        return Branch(term.source, tuple((lbl, new if lbl == step else b) for lbl, b in term.branches))
    return replace(term, **{_FIELD[step]: rebuild(child(term, step), rest, fn, env)})

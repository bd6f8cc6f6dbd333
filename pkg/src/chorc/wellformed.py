"""Static checks on grouped interactions and whole choreographies.

Violations are returned as data and collected exhaustively over all pairs;
an empty list means the term is well-formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .surface import format_com, format_sel
from .syntax import Call, Com, Def, End, If, MCom, MSel, Path, Sel, free_vars, format_path

KINDS = (
    "SameChannelClash",
    "SameCellClash",
    "ReadWriteClash",
    "SelTargetClash",
    "SelfInteraction",
    "UnboundCall",
    "EmptyGroup",
    "UnguardedRecursion",
)


@dataclass(frozen=True)
class Violation:
    kind: str
    offenders: tuple = ()
    location: Path = ()

    def render(self) -> str:
        terms = ", ".join(_fmt(o) for o in self.offenders)
        return f"{format_path(self.location)}: {self.kind}: {terms}"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "offenders": [_fmt(o) for o in self.offenders],
            "location": format_path(self.location),
        }


def _fmt(o) -> str:
    if isinstance(o, Com):
        return format_com(o)
    if isinstance(o, Sel):
        return format_sel(o)
    return str(o)


def com_pair_clashes(a: Com, b: Com) -> list[str]:
    """Clash kinds between two distinct communications of one multicom."""
    kinds = []
    if a.receiver == b.receiver:
        if a.sender == b.sender:
            kinds.append("SameChannelClash")
        if a.var == b.var:
            kinds.append("SameCellClash")
    if (a.receiver == b.sender and a.var in free_vars(b.expr)) or (
        b.receiver == a.sender and b.var in free_vars(a.expr)
    ):
        kinds.append("ReadWriteClash")
    return kinds


def sel_pair_clashes(a: Sel, b: Sel) -> bool:
    return a.receiver in (b.sender, b.receiver) or b.receiver in (a.sender, a.receiver)


def check_multicom(coms, location: Path = ()) -> list[Violation]:
    coms = tuple(coms)
    out = [Violation("SelfInteraction", (c,), location) for c in coms if c.sender == c.receiver]
    for a, b in combinations(coms, 2):
        for kind in com_pair_clashes(a, b):
            out.append(Violation(kind, (a, b), location))
    return out


def check_multisel(sels, location: Path = ()) -> list[Violation]:
    sels = tuple(sels)
    out = [Violation("SelfInteraction", (s,), location) for s in sels if s.sender == s.receiver]
    for a, b in combinations(sels, 2):
        if sel_pair_clashes(a, b):
            out.append(Violation("SelTargetClash", (a, b), location))
    return out


def check_chor(c) -> list[Violation]:
    """All violations in ``c``: group conditions, scoping, empty groups and
    procedures whose body can loop through calls without interacting."""
    out: list[Violation] = []
    _walk(c, (), {}, out)
    return out


def _walk(c, path: Path, env: dict, out: list[Violation]) -> None:
    while True:
        match c:
            case MCom(coms, cont):
                if not coms:
                    out.append(Violation("EmptyGroup", (), path))
                out.extend(check_multicom(coms, path))
                c, path = cont, path + ("cont",)
            case MSel(sels, cont):
                if not sels:
                    out.append(Violation("EmptyGroup", (), path))
                out.extend(check_multisel(sels, path))
                c, path = cont, path + ("cont",)
            case If(_, _, c1, c2):
                _walk(c1, path + ("then",), env, out)
                c, path = c2, path + ("else",)
            case Def(name, body, main):
                inner = {**env, name: body}
                _walk(body, path + ("body",), inner, out)
                if _unguarded(body, inner, name):
                    out.append(Violation("UnguardedRecursion", (name,), path))
                c, env, path = main, inner, path + ("main",)
            case Call(name):
                if name not in env:
                    out.append(Violation("UnboundCall", (name,), path))
                return
            case End():
                return


def _unguarded(body, env: dict, name: str) -> bool:
    """True if unfolding from ``body`` can reach ``name`` again through head
    positions only (calls and definitions), i.e. without any interaction."""
    seen = set()
    stack = [(body, env)]
    while stack:
        c, env = stack.pop()
        match c:
            case Def(n, b, main):
                stack.append((main, {**env, n: b}))
            case Call(n):
                if n == name:
                    return True
                if n in env and n not in seen:
                    seen.add(n)
                    stack.append((env[n], env))
    return False

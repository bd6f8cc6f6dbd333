"""Brute-force structural equivalence, used to validate the concurrent engine.

The oracle rewrites a choreography anywhere inside it with the swap rules in
both directions (group split/merge, multicom/multisel swap, lifting groups
out of conditionals and definitions, conditional/conditional swap) and with
the one-way rules (unfolding, dead definitions, empty groups).  Search is
breadth-first and bounded by the number of rule applications, so ``False``
only means "not found within the bound".
"""
from __future__ import annotations

from collections import deque
from itertools import combinations

from .labels import ComL, ElseL, SelL, ThenL
from .seq import SeqConfig, normalize
from .syntax import (
    END, TRUE, Call, Def, End, If, MCom, MSel, eval_at, free_vars, pn_multicom, rebuild,
    tn_multisel,
)
from .wellformed import com_pair_clashes, sel_pair_clashes


def _coms_ok(coms) -> bool:
    return all(not com_pair_clashes(a, b) for a, b in combinations(coms, 2))


def _sels_ok(sels) -> bool:
    return all(not sel_pair_clashes(a, b) for a, b in combinations(sels, 2))


def _splits(items):
    n = len(items)
    for k in range(1, n):
        for first in combinations(items, k):
            yield first, tuple(x for x in items if x not in first)


def _com_if_ok(coms, p, guard) -> bool:
    fv = free_vars(guard)
    return not any(c.receiver == p and c.var in fv for c in coms)


def _root_rewrites(c):
    match c:
        case MCom(coms, cont):
            if not coms:
                yield cont
            for a, b in _splits(coms):
                yield MCom(a, MCom(b, cont))
            match cont:
                case MCom(coms2, rest) if not set(coms) & set(coms2) and _coms_ok(coms + coms2):
                    yield MCom(coms + coms2, rest)
                case MSel(sels, rest) if not tn_multisel(sels) & pn_multicom(coms):
                    yield MSel(sels, MCom(coms, rest))
                case If(p, g, c1, c2) if _com_if_ok(coms, p, g):
                    yield If(p, g, MCom(coms, c1), MCom(coms, c2))
                case Def(name, body, main, procs):
                    yield Def(name, body, MCom(coms, main), procs)
        case MSel(sels, cont):
            if not sels:
                yield cont
            for a, b in _splits(sels):
                yield MSel(a, MSel(b, cont))
            match cont:
                case MSel(sels2, rest) if not set(sels) & set(sels2) and _sels_ok(sels + sels2):
                    yield MSel(sels + sels2, rest)
                case MCom(coms, rest) if not tn_multisel(sels) & pn_multicom(coms):
                    yield MCom(coms, MSel(sels, rest))
                case If(p, g, c1, c2) if p not in tn_multisel(sels):
                    yield If(p, g, MSel(sels, c1), MSel(sels, c2))
                case Def(name, body, main, procs):
                    yield Def(name, body, MSel(sels, main), procs)
        case If(p, g, c1, c2):
            if isinstance(c1, MCom) and isinstance(c2, MCom) and c1.coms == c2.coms \
                    and _com_if_ok(c1.coms, p, g):
                yield MCom(c1.coms, If(p, g, c1.cont, c2.cont))
            if isinstance(c1, MSel) and isinstance(c2, MSel) and c1.sels == c2.sels \
                    and p not in tn_multisel(c1.sels):
                yield MSel(c1.sels, If(p, g, c1.cont, c2.cont))
            if isinstance(c1, If) and isinstance(c2, If) and (c1.proc, c1.guard) == (c2.proc, c2.guard):
                yield If(c1.proc, c1.guard, If(p, g, c1.then, c2.then), If(p, g, c1.else_, c2.else_))
        case Def(name, body, main, procs):
            if isinstance(main, End):
                yield END
            if isinstance(main, MCom):
                yield MCom(main.coms, Def(name, body, main.cont, procs))
            if isinstance(main, MSel):
                yield MSel(main.sels, Def(name, body, main.cont, procs))
            for path in _call_sites(main, name):
                yield Def(name, body, rebuild(main, path, lambda _: body), procs)


def _call_sites(c, name, path=()):
    match c:
        case MCom(_, cont) | MSel(_, cont):
            yield from _call_sites(cont, name, path + ("cont",))
        case If(_, _, c1, c2):
            yield from _call_sites(c1, name, path + ("then",))
            yield from _call_sites(c2, name, path + ("else",))
        case Def(n, body, main):
            if n != name:
                yield from _call_sites(body, name, path + ("body",))
                yield from _call_sites(main, name, path + ("main",))
        case Call(n) if n == name:
            yield path


def rewrites(c):
    """All terms one rule application away from ``c`` (at any position)."""
    yield from _root_rewrites(c)
    match c:
        case MCom(coms, cont):
            for k in rewrites(cont):
                yield MCom(coms, k)
        case MSel(sels, cont):
            for k in rewrites(cont):
                yield MSel(sels, k)
        case If(p, g, c1, c2):
            for k in rewrites(c1):
                yield If(p, g, k, c2)
            for k in rewrites(c2):
                yield If(p, g, c1, k)
        case Def(name, body, main, procs):
            for k in rewrites(body):
                yield Def(name, k, main, procs)
            for k in rewrites(main):
                yield Def(name, body, k, procs)


def head_reductions(c, state):
    """Head reductions of single interactions and conditionals, under
    definitions, without any rearrangement."""
    path = ()
    node = c
    while isinstance(node, Def):
        node, path = node.main, path + ("main",)
    match node:
        case MCom((com,), cont):
            v = eval_at(com.expr, state, com.sender)
            new_state = state.update((((com.receiver, com.var), v),))
            yield ComL(com.sender, v, com.receiver, com.var), rebuild(c, path, lambda _: cont), new_state
        case MSel((sel,), cont):
            yield SelL(sel.sender, sel.receiver, sel.label), rebuild(c, path, lambda _: cont), state
        case If(p, g, c1, c2):
            if eval_at(g, state, p) == TRUE:
                yield ThenL(p), rebuild(c, path, lambda _: c1), state
            else:
                yield ElseL(p), rebuild(c, path, lambda _: c2), state


def _bfs(start, bound: int):
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        c, d = frontier.popleft()
        yield c
        if d == bound:
            continue
        for k in rewrites(c):
            if k not in seen:
                seen.add(k)
                frontier.append((k, d + 1))


def equiv_oracle(c1, c2, bound: int = 6) -> bool:
    """True iff ``c2`` is reachable from ``c1`` in at most ``bound`` rewrites."""
    return any(c == c2 for c in _bfs(c1, bound))


def confirms(cfg: SeqConfig, label, result: SeqConfig, bound: int = 8) -> bool:
    """True iff some rearrangement of ``cfg`` within ``bound`` rewrites has a
    head reduction producing ``label`` and ``result`` (up to dropping empty
    groups and dead definitions)."""
    target = normalize(result.chor)
    for c in _bfs(cfg.chor, bound):
        for lbl, k, st in head_reductions(c, cfg.state):
            if lbl == label and st == result.state and normalize(k) == target:
                return True
    return False


def oracle_steps(cfg: SeqConfig, bound: int = 6):
    """Concurrent steps found by rearranging ``cfg`` with at most ``bound``
    rewrites, as ``(label, config)`` pairs (may repeat)."""
    for c in _bfs(cfg.chor, bound):
        for lbl, k, st in head_reductions(c, cfg.state):
            yield lbl, SeqConfig(normalize(k), st)

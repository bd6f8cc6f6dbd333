"""Synchronous execution of process networks.

A send fires together with the matching receive, a selection together with
a branch offering its label, and conditionals resolve locally.  Each process
only acts on its current head group; procedure calls are unfolded lazily on
the way to the head.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .labels import OUT_OF_FUEL, STUCK as STUCK_STATUS, TERMINATED, ComL, ElseL, SelL, ThenL, Trace
from .syntax import (
    STUCK, TRUE, BDef, BEnd, BIf, Branch, Expr, Network, Recv, SelGroup, Send, State,
    ThetaGroup, calls_free, eval_at, find_head, rebuild,
)


class StaleNetRedex(ValueError):
    pass


@dataclass(frozen=True)
class NetConfig:
    net: Network
    state: State = State()


@dataclass(frozen=True, slots=True)
class SyncCom:
    sender: str
    receiver: str
    expr: Expr
    var: str


@dataclass(frozen=True, slots=True)
class SyncSel:
    sender: str
    receiver: str
    label: str


@dataclass(frozen=True, slots=True)
class LocalIf:
    proc: str


def normalize_behaviour(b):
    """Drop empty groups and definitions that can never be called."""
    match b:
        case ThetaGroup(acts, cont):
            k = normalize_behaviour(cont)
            if not acts:
                return k
            return b if k is cont else ThetaGroup(acts, k)
        case SelGroup(choices, cont):
            k = normalize_behaviour(cont)
            if not choices:
                return k
            return b if k is cont else SelGroup(choices, k)
        case Branch(p, branches):
            new = tuple((lbl, normalize_behaviour(x)) for lbl, x in branches)
            return b if all(x is y for (_, x), (_, y) in zip(new, branches)) else Branch(p, new)
        case BIf(g, t, e):
            t2, e2 = normalize_behaviour(t), normalize_behaviour(e)
            return b if (t2 is t and e2 is e) else BIf(g, t2, e2)
        case BDef(name, body, main):
            m = normalize_behaviour(main)
            if isinstance(m, BEnd) or not calls_free(m, name):
                return m
            body2 = normalize_behaviour(body)
            return b if (m is main and body2 is body) else BDef(name, body2, m)
    return b


def normalize_net(n: Network) -> Network:
    out = {}
    for p, b in n.items():
        b = normalize_behaviour(b)
        if not isinstance(b, BEnd):
            out[p] = b
    return Network(out)


def is_terminated_net(n: Network) -> bool:
    """True iff every process has nothing left to do (unfolding calls if needed)."""
    return all(find_head(normalize_behaviour(b)) is None for b in n.values())


def _heads(n: Network) -> dict:
    out = {}
    for p, b in n.items():
        h = find_head(b)
        if h is not None and h is not STUCK:
            out[p] = h
    return out


def enabled_net(cfg: NetConfig) -> list:
    """Enabled rendezvous and local conditionals, in a canonical order."""
    heads = _heads(cfg.net)
    out: list = []
    for p, (_, node, _) in heads.items():
        match node:
            case ThetaGroup(acts):
                for a in acts:
                    if not isinstance(a, Send) or a.to not in heads:
                        continue
                    other = heads[a.to][1]
                    if isinstance(other, ThetaGroup):
                        for r in other.actions:
                            if isinstance(r, Recv) and r.source == p:
                                out.append(SyncCom(p, a.to, a.expr, r.var))
            case SelGroup(choices):
                for q, lbl in choices:
                    other = heads.get(q, (None, None))[1]
                    if isinstance(other, Branch) and other.source == p and lbl in other.labels:
                        out.append(SyncSel(p, q, lbl))
            case BIf():
                out.append(LocalIf(p))
    return out


def apply_net(cfg: NetConfig, r, check: bool = True):
    """Fire ``r``; returns ``(label, config)``."""
    if check and r not in enabled_net(cfg):
        raise StaleNetRedex(f"redex not enabled: {r!r}")
    net, state = cfg.net, cfg.state
    heads = _heads(net)

    def upd(p, fn):
        path, _, _ = heads[p]
        return normalize_behaviour(rebuild(net[p], path, fn))

    match r:
        case SyncCom(p, q, e, x):
            v = eval_at(e, state, p)
            label = ComL(p, v, q, x)
            send, recv = Send(q, e), Recv(p, x)
            updates = {
                p: upd(p, lambda g: ThetaGroup(tuple(a for a in g.actions if a != send), g.cont)),
                q: upd(q, lambda g: ThetaGroup(tuple(a for a in g.actions if a != recv), g.cont)),
            }
            state = state.update((((q, x), v),))
        case SyncSel(p, q, lbl):
            label = SelL(p, q, lbl)
            updates = {
                p: upd(p, lambda g: SelGroup(tuple(c for c in g.choices if c != (q, lbl)), g.cont)),
                q: upd(q, lambda g: g.get(lbl)),
            }
        case LocalIf(p):
            node = heads[p][1]
            taken = eval_at(node.guard, state, p) == TRUE
            label = ThenL(p) if taken else ElseL(p)
            updates = {p: upd(p, lambda g: g.then if taken else g.else_)}
        case _:
            raise TypeError(r)
    return label, NetConfig(normalize_net(net.replace(updates)), state)


def net_successors(cfg: NetConfig) -> list:
    return [apply_net(cfg, r, check=False) for r in enabled_net(cfg)]


def run_net(cfg: NetConfig, fuel: int = 10000, seed: int = 0):
    """Seeded run choosing uniformly among enabled redexes.

    Ends ``Stuck`` when nothing is enabled but some process still has work.
    """
    rng = random.Random(seed)
    cfg = NetConfig(normalize_net(cfg.net), cfg.state)
    labels = []
    for _ in range(fuel):
        redexes = enabled_net(cfg)
        if not redexes:
            break
        label, cfg = apply_net(cfg, rng.choice(redexes), check=False)
        labels.append(label)
    else:
        if enabled_net(cfg):
            return Trace(tuple(labels), OUT_OF_FUEL), cfg
    status = TERMINATED if is_terminated_net(cfg.net) else STUCK_STATUS
    return Trace(tuple(labels), status), cfg


def explore_net(cfg: NetConfig, max_states: int = 5000):
    """Breadth-first exploration of reachable configurations.

    Returns ``(seen, deadlocks, complete)`` where ``deadlocks`` lists the
    reachable configurations that are stuck and ``complete`` tells whether
    the whole reachable space fit in ``max_states``.
    """
    start = NetConfig(normalize_net(cfg.net), cfg.state)
    seen = {start}
    queue = deque([start])
    deadlocks = []
    while queue:
        c = queue.popleft()
        succ = net_successors(c)
        if not succ and not is_terminated_net(c.net):
            deadlocks.append(c)
        for _, nxt in succ:
            if nxt not in seen:
                if len(seen) >= max_states:
                    return seen, deadlocks, False
                seen.add(nxt)
                queue.append(nxt)
    return seen, deadlocks, True

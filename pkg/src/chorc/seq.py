"""Sequential semantics: whole groups reduce atomically at the head.

The engine is deterministic.  Terms are kept in canonical form (empty
groups and dead definitions removed everywhere) and procedure calls are
unfolded lazily, only where a reduction needs them.
"""
from __future__ import annotations

from dataclasses import dataclass

from .labels import OUT_OF_FUEL, STUCK as STUCK_STATUS, TERMINATED, ComL, GroupL, SelL, ElseL, ThenL, Trace
from .syntax import (
    STUCK, TRUE, Def, End, If, MCom, MSel, State, calls_free, eval_at, find_head, rebuild,
)


@dataclass(frozen=True)
class SeqConfig:
    chor: object
    state: State = State()


def normalize(c):
    """Remove empty groups and definitions that can never be called."""
    match c:
        case MCom(coms, cont):
            k = normalize(cont)
            if not coms:
                return k
            return c if k is cont else MCom(coms, k)
        case MSel(sels, cont):
            k = normalize(cont)
            if not sels:
                return k
            return c if k is cont else MSel(sels, k)
        case If(p, g, c1, c2):
            k1, k2 = normalize(c1), normalize(c2)
            return c if (k1 is c1 and k2 is c2) else If(p, g, k1, k2)
        case Def(name, body, main, procs):
            m = normalize(main)
            if isinstance(m, End) or not calls_free(m, name):
                return m
            b = normalize(body)
            return c if (m is main and b is body) else Def(name, b, m, procs)
    return c


def is_terminated(c) -> bool:
    """True iff ``c`` is structurally ``0`` (unfolding calls if needed)."""
    return find_head(normalize(c)) is None


def reduce_head(node, state: State):
    """Reduce a head multicom, multisel or conditional atomically."""
    match node:
        case MCom(coms, cont):
            # every expression reads the pre-state; updates land together
            sent = [(c, eval_at(c.expr, state, c.sender)) for c in coms]
            label = GroupL(tuple(ComL(c.sender, v, c.receiver, c.var) for c, v in sent))
            return label, cont, state.update(((c.receiver, c.var), v) for c, v in sent)
        case MSel(sels, cont):
            return GroupL(tuple(SelL(s.sender, s.receiver, s.label) for s in sels)), cont, state
        case If(p, guard, c1, c2):
            if eval_at(guard, state, p) == TRUE:
                return ThenL(p), c1, state
            return ElseL(p), c2, state
    raise TypeError(f"no head redex: {node!r}")


def step_seq(cfg: SeqConfig):
    """One sequential step, or ``None`` if no reduction applies."""
    chor = normalize(cfg.chor)
    head = find_head(chor)
    if head is None or head is STUCK:
        return None
    path, node, _ = head
    label, rest, state = reduce_head(node, cfg.state)
    new = normalize(rebuild(chor, path, lambda _: rest))
    return label, SeqConfig(new, state)


def run_seq(cfg: SeqConfig, fuel: int = 10000):
    """Iterate ``step_seq``; returns ``(trace, final config)``."""
    labels = []
    cfg = SeqConfig(normalize(cfg.chor), cfg.state)
    for _ in range(fuel):
        res = step_seq(cfg)
        if res is None:
            break
        label, cfg = res
        labels.append(label)
    else:
        if not is_terminated(cfg.chor):
            return Trace(tuple(labels), OUT_OF_FUEL), cfg
    status = TERMINATED if is_terminated(cfg.chor) else STUCK_STATUS
    return Trace(tuple(labels), status), cfg


def seq_chain(cfg: SeqConfig, steps: int):
    """The first ``steps`` sequential successors as ``[(label, config), ...]``."""
    out = []
    for _ in range(steps):
        res = step_seq(cfg)
        if res is None:
            break
        out.append(res)
        cfg = res[1]
    return out

"""Concurrent semantics: single interactions fire out of order.

``enabled_conc`` walks the spine of a configuration (groups, definitions and
calls on the way to the first conditional) and reports every communication,
selection or conditional that the swap rules can bring to the head:

* a communication passes an earlier multicom when the two could share a
  well-formed multicom, and an earlier multisel when none of its targets is
  involved in the communication;
* a selection passes an earlier multicom when its target is not involved in
  it, and an earlier multisel when the union is still a well-formed multisel;
* a conditional at ``p`` passes an earlier multicom when ``p`` receives into
  none of the guard's variables, and an earlier multisel that does not
  target ``p``;
* definitions are always transparent.

Conditionals are never lifted past other conditionals here; the bounded
rewrite oracle in :mod:`chorc.oracle` covers that rule.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .labels import OUT_OF_FUEL, STUCK as STUCK_STATUS, TERMINATED, ComL, ElseL, SelL, ThenL, Trace
from .seq import SeqConfig, is_terminated, normalize
from .syntax import (
    TRUE, Call, Com, Def, End, If, MCom, MSel, Path, Sel, eval_at, free_vars, rebuild,
)
from .wellformed import com_pair_clashes, sel_pair_clashes


class StaleRedex(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class FireCom:
    com: Com
    path: Path


@dataclass(frozen=True, slots=True)
class FireSel:
    sel: Sel
    path: Path


@dataclass(frozen=True, slots=True)
class FireIf:
    proc: str
    path: Path


def com_passes(eta: Com, group) -> bool:
    if isinstance(group, MCom):
        return all(eta != o and not com_pair_clashes(eta, o) for o in group.coms)
    return all(s.receiver not in (eta.sender, eta.receiver) for s in group.sels)


def sel_passes(phi: Sel, group) -> bool:
    if isinstance(group, MCom):
        return all(phi.receiver not in (c.sender, c.receiver) for c in group.coms)
    return all(phi != o and not sel_pair_clashes(phi, o) for o in group.sels)


def if_passes(proc: str, guard_vars, group) -> bool:
    if isinstance(group, MCom):
        return not any(c.receiver == proc and c.var in guard_vars for c in group.coms)
    return all(s.receiver != proc for s in group.sels)


def enabled_conc(cfg: SeqConfig) -> list:
    """Enabled redexes in spine order (deterministic, duplicate-free)."""
    out: list = []
    prior: list = []
    env: dict = {}
    unfolded: set[str] = set()
    c, path = cfg.chor, ()
    while True:
        match c:
            case MCom(coms, cont):
                out += [FireCom(x, path) for x in coms if all(com_passes(x, g) for g in prior)]
                prior.append(c)
                c, path = cont, path + ("cont",)
            case MSel(sels, cont):
                out += [FireSel(x, path) for x in sels if all(sel_passes(x, g) for g in prior)]
                prior.append(c)
                c, path = cont, path + ("cont",)
            case Def(name, body, main):
                env = {**env, name: body}
                c, path = main, path + ("main",)
            case Call(name):
                # a second unfolding is blocked by the first copy of itself
                if name in unfolded or name not in env:
                    return out
                unfolded.add(name)
                c, path = env[name], path + ("unfold",)
            case If(p, guard):
                fv = free_vars(guard)
                if all(if_passes(p, fv, g) for g in prior):
                    out.append(FireIf(p, path))
                return out
            case End():
                return out


def apply_redex(cfg: SeqConfig, r, check: bool = True):
    """Fire ``r``; returns ``(label, config)``.  Raises ``StaleRedex`` if
    ``r`` is not enabled in ``cfg``."""
    if check and r not in enabled_conc(cfg):
        raise StaleRedex(f"redex not enabled: {r!r}")
    state = cfg.state
    match r:
        case FireCom(com, path):
            v = eval_at(com.expr, state, com.sender)
            label = ComL(com.sender, v, com.receiver, com.var)
            state = state.update((((com.receiver, com.var), v),))
            fn = lambda g: MCom(tuple(x for x in g.coms if x != com), g.cont)  # noqa: E731
        case FireSel(sel, path):
            label = SelL(sel.sender, sel.receiver, sel.label)
            fn = lambda g: MSel(tuple(x for x in g.sels if x != sel), g.cont)  # noqa: E731
        case FireIf(p, path):
            node = _at(cfg.chor, path)
            taken = eval_at(node.guard, state, p) == TRUE
            label = ThenL(p) if taken else ElseL(p)
            fn = lambda n: n.then if taken else n.else_  # noqa: E731
        case _:
            raise TypeError(r)
    return label, SeqConfig(normalize(rebuild(cfg.chor, path, fn)), state)


def _at(c, path: Path):
    found = []
    rebuild(c, path, lambda n: found.append(n) or n)
    return found[0]


def successors(cfg: SeqConfig) -> list:
    return [apply_redex(cfg, r, check=False) for r in enabled_conc(cfg)]


def all_traces(cfg: SeqConfig, max_steps: int) -> set[Trace]:
    """Every label sequence of the concurrent semantics, depth-first.

    Runs cut off after ``max_steps`` are marked truncated.
    """
    out: set[Trace] = set()
    cfg = SeqConfig(normalize(cfg.chor), cfg.state)

    def dfs(c: SeqConfig, labels: tuple):
        succ = successors(c)
        if not succ:
            status = TERMINATED if is_terminated(c.chor) else STUCK_STATUS
            out.add(Trace(labels, status))
            return
        if len(labels) >= max_steps:
            out.add(Trace(labels, OUT_OF_FUEL, truncated=True))
            return
        for label, nxt in succ:
            dfs(nxt, labels + (label,))

    dfs(cfg, ())
    return out


def run_conc(cfg: SeqConfig, fuel: int = 10000, seed: int = 0):
    """Seeded run choosing uniformly among enabled redexes."""
    rng = random.Random(seed)
    cfg = SeqConfig(normalize(cfg.chor), cfg.state)
    labels = []
    for _ in range(fuel):
        redexes = enabled_conc(cfg)
        if not redexes:
            break
        label, cfg = apply_redex(cfg, rng.choice(redexes), check=False)
        labels.append(label)
    else:
        if enabled_conc(cfg):
            return Trace(tuple(labels), OUT_OF_FUEL), cfg
    status = TERMINATED if is_terminated(cfg.chor) else STUCK_STATUS
    return Trace(tuple(labels), status), cfg

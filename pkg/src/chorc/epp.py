"""EndPoint Projection: from a choreography to a network of behaviours.

Procedures are first annotated with the processes they involve (least
fixpoint over mutually recursive definitions).  Projection then follows the
choreography structure: a multicom becomes a group of sends and receives, a
multisel becomes either outgoing selections or a one-label branch, and a
conditional decided elsewhere becomes the merge of its two branch
projections.  Merge is partial; failures surface as ``ProjectionError``.
"""
from __future__ import annotations

from .surface import format_behaviour
from .syntax import (
    BCall, BDef, BEND, BEnd, BIf, Branch, Call, Def, End, If, MCom, MSel, Network, Path, Recv,
    SelGroup, Send, ThetaGroup, find_head, format_path, pn_chor,
)


class MergeError(Exception):
    def __init__(self, left, right):
        super().__init__(f"cannot merge {format_behaviour(left)} with {format_behaviour(right)}")
        self.left = left
        self.right = right


class ProjectionError(Exception):
    def __init__(self, kind: str, process: str, location: Path, detail: tuple = ()):
        self.kind = kind
        self.process = process
        self.location = location
        self.detail = detail
        msg = f"{format_path(location)}: {kind}: cannot project process {process}"
        if detail:
            msg += " (" + " vs ".join(detail) + ")"
        super().__init__(msg)


# ---------------------------------------------------------------------------
# Annotation
# ---------------------------------------------------------------------------


def annotate(c):
    """Fill every definition and call with the processes its procedure involves."""
    direct: dict[Path, set[str]] = {}
    calls: dict[Path, set[Path]] = {}
    _collect(c, (), {}, None, direct, calls)
    annot = {k: set(v) for k, v in direct.items()}
    changed = True
    while changed:
        changed = False
        for d, callees in calls.items():
            for callee in callees:
                if not annot[callee] <= annot[d]:
                    annot[d] |= annot[callee]
                    changed = True
    return _fill(c, (), {}, annot)


def _collect(c, path, env, owners, direct, calls):
    """Record, for every definition (keyed by its path), the processes
    occurring literally in its body and the definitions its body calls."""
    owners = owners or ()
    while True:
        match c:
            case MCom(coms, cont):
                for d in owners:
                    for x in coms:
                        direct[d] |= {x.sender, x.receiver}
                c, path = cont, path + ("cont",)
            case MSel(sels, cont):
                for d in owners:
                    for x in sels:
                        direct[d] |= {x.sender, x.receiver}
                c, path = cont, path + ("cont",)
            case If(p, _, c1, c2):
                for d in owners:
                    direct[d].add(p)
                _collect(c1, path + ("then",), env, owners, direct, calls)
                c, path = c2, path + ("else",)
            case Def(name, body, main):
                direct[path] = set()
                calls[path] = set()
                inner = {**env, name: path}
                _collect(body, path + ("body",), inner, owners + (path,), direct, calls)
                c, env, path = main, inner, path + ("main",)
            case Call(name):
                if name in env:
                    for d in owners:
                        calls[d].add(env[name])
                return
            case End():
                return


def _fill(c, path, env, annot):
    match c:
        case MCom(coms, cont):
            return MCom(coms, _fill(cont, path + ("cont",), env, annot))
        case MSel(sels, cont):
            return MSel(sels, _fill(cont, path + ("cont",), env, annot))
        case If(p, g, c1, c2):
            return If(p, g, _fill(c1, path + ("then",), env, annot),
                      _fill(c2, path + ("else",), env, annot))
        case Def(name, body, main):
            inner = {**env, name: path}
            procs = tuple(annot[path])
            return Def(name, _fill(body, path + ("body",), inner, annot),
                       _fill(main, path + ("main",), inner, annot), procs)
        case Call(name):
            return Call(name, tuple(annot[env[name]]) if name in env else ())
    return c


# ---------------------------------------------------------------------------
# Merge and projection
# ---------------------------------------------------------------------------


def merge(b1, b2):
    """Partial merge of two behaviours; raises ``MergeError``."""
    if b1 == b2:
        return b1
    match b1, b2:
        case Branch(p, m1), Branch(q, m2) if p == q:
            out = dict(m1)
            for lbl, b in m2:
                out[lbl] = merge(out[lbl], b) if lbl in out else b
            return Branch(p, tuple(out.items()))
        case ThetaGroup(a1, k1), ThetaGroup(a2, k2) if a1 == a2:
            return ThetaGroup(a1, _merge_at(k1, k2, b1, b2))
        case SelGroup(s1, k1), SelGroup(s2, k2) if s1 == s2:
            return SelGroup(s1, _merge_at(k1, k2, b1, b2))
        case BIf(g1, t1, e1), BIf(g2, t2, e2) if g1 == g2:
            return BIf(g1, merge(t1, t2), merge(e1, e2))
        case BDef(n1, body1, main1), BDef(n2, body2, main2) if n1 == n2:
            return BDef(n1, merge(body1, body2), merge(main1, main2))
    raise MergeError(b1, b2)


def _merge_at(k1, k2, b1, b2):
    try:
        return merge(k1, k2)
    except MergeError:
        raise MergeError(b1, b2) from None


def project_behaviour(c, r: str, path: Path = ()):
    """Behaviour of process ``r`` in the annotated choreography ``c``."""
    match c:
        case MCom(coms, cont):
            acts = []
            for x in coms:
                if x.sender == r and x.receiver == r:
                    raise ProjectionError("SelfProjection", r, path)
                if x.sender == r:
                    acts.append(Send(x.receiver, x.expr))
                elif x.receiver == r:
                    acts.append(Recv(x.sender, x.var))
            rest = project_behaviour(cont, r, path + ("cont",))
            return ThetaGroup(tuple(acts), rest) if acts else rest
        case MSel(sels, cont):
            incoming = [s for s in sels if s.receiver == r]
            rest = project_behaviour(cont, r, path + ("cont",))
            if incoming:
                # a well-formed multisel targets each process at most once
                assert len(incoming) == 1, f"{r} is targeted twice at {format_path(path)}"
                s = incoming[0]
                return Branch(s.sender, ((s.label, rest),))
            out = tuple((s.receiver, s.label) for s in sels if s.sender == r)
            return SelGroup(out, rest) if out else rest
        case If(p, g, c1, c2):
            b1 = project_behaviour(c1, r, path + ("then",))
            b2 = project_behaviour(c2, r, path + ("else",))
            if p == r:
                return BIf(g, b1, b2)
            try:
                return merge(b1, b2)
            except MergeError as e:
                raise ProjectionError(
                    "MergeConflict", r, path, (format_behaviour(e.left), format_behaviour(e.right))
                ) from None
        case Def(name, body, main, procs):
            m = project_behaviour(main, r, path + ("main",))
            if r not in procs:
                return m
            if isinstance(m, BEnd):
                return BEND
            return BDef(name, project_behaviour(body, r, path + ("body",)), m)
        case Call(name, procs):
            return BCall(name) if r in procs else BEND
        case End():
            return BEND
    raise TypeError(f"not a choreography: {c!r}")


def project(c) -> Network:
    """Annotate ``c`` and project every process occurring in it."""
    c = annotate(c)
    return Network({r: project_behaviour(c, r) for r in sorted(pn_chor(c))})


def is_projectable(c) -> bool:
    try:
        project(c)
    except ProjectionError:
        return False
    return True


# ---------------------------------------------------------------------------
# Pruning
# ---------------------------------------------------------------------------


def _live(n: Network) -> dict:
    return {p: b for p, b in n.items() if find_head(b) is not None}


def prunes(small: Network, big: Network) -> bool:
    """True iff ``small`` equals ``big`` up to branches ``big`` offers that
    ``small`` has dropped (terminated processes are ignored)."""
    s, b = _live(small), _live(big)
    if s.keys() != b.keys():
        return False
    return all(prunes_behaviour(s[p], b[p]) for p in s)


def prunes_behaviour(small, big) -> bool:
    return _le(small, big, {}, {}, set())


def _envkey(env: dict):
    return tuple(sorted(env.items(), key=lambda kv: kv[0]))


def _le(s, b, es: dict, eb: dict, assumed: set) -> bool:
    if s == b:
        return True
    key = (s, b, _envkey(es), _envkey(eb))
    if key in assumed:
        # coinductive hypothesis: we are back at a pair under examination
        return True
    assumed.add(key)
    ok = _le_step(s, b, es, eb, assumed)
    if not ok:
        assumed.discard(key)
    return ok


def _le_step(s, b, es, eb, assumed) -> bool:
    if isinstance(s, BDef) and isinstance(b, BDef) and s.name == b.name:
        es2, eb2 = {**es, s.name: s.body}, {**eb, b.name: b.body}
        return _le(s.body, b.body, es2, eb2, assumed) and _le(s.main, b.main, es2, eb2, assumed)
    if isinstance(b, BDef):
        return _le(s, b.main, es, {**eb, b.name: b.body}, assumed)
    if isinstance(s, BDef):
        return _le(s.main, b, {**es, s.name: s.body}, eb, assumed)
    if isinstance(b, BCall) and b.name in eb:
        return _le(s, eb[b.name], es, eb, assumed)
    if isinstance(s, BCall) and s.name in es:
        return _le(es[s.name], b, es, eb, assumed)
    match s, b:
        case ThetaGroup(a1, k1), ThetaGroup(a2, k2):
            return a1 == a2 and _le(k1, k2, es, eb, assumed)
        case SelGroup(c1, k1), SelGroup(c2, k2):
            return c1 == c2 and _le(k1, k2, es, eb, assumed)
        case Branch(p, m1), Branch(q, _):
            return p == q and s.labels <= b.labels and all(
                _le(bb, b.get(lbl), es, eb, assumed) for lbl, bb in m1)
        case BIf(g1, t1, e1), BIf(g2, t2, e2):
            return g1 == g2 and _le(t1, t2, es, eb, assumed) and _le(e1, e2, es, eb, assumed)
        case BEnd(), BEnd():
            return True
    return False

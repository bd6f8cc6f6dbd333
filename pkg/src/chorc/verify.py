"""Random choreographies and executable checks of the correctness results.

Every check takes a corpus of ``Instance`` values (a choreography, a start
state and the seed that produced them) and returns a ``CheckReport``.  All
searches are bounded; a search that runs out of room is reported as
inconclusive, never as a failure.
"""
from __future__ import annotations

import random
import time
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from itertools import combinations

from .conc import run_conc, successors
from .epp import ProjectionError, annotate, project, prunes
from .labels import STUCK, TERMINATED, atoms, format_label
from .network import NetConfig, apply_net, enabled_net, explore_net, net_successors, run_net
from .oracle import confirms, oracle_steps
from .seq import SeqConfig, normalize, run_seq, step_seq
from .surface import parse_network, print_chor, print_network, print_state
from .syntax import (
    END, BinOp, Bool, Call, Com, Def, If, Int, IntLit, MCom, MSel, Sel, State, Var, pn_chor,
)
from .wellformed import check_chor, com_pair_clashes, sel_pair_clashes

PROCS = ("p", "q", "r", "s", "t", "u", "v", "w")
VARS = ("x", "y", "z")

DEFAULT_WEIGHTS = {"mcom": 5.0, "msel": 1.5, "if": 2.0, "def": 1.0, "call": 1.0, "end": 0.5}


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 4
    max_group_size: int = 4
    processes: int = 5
    weights: tuple = tuple(DEFAULT_WEIGHTS.items())
    require_projectable: bool = True
    resample_budget: int = 200

    def __post_init__(self):
        if self.processes < 2 or self.processes > len(PROCS):
            raise ValueError(f"process pool must be between 2 and {len(PROCS)}")
        if any(w < 0 for _, w in self.weights):
            raise ValueError("weights must be nonnegative")


class GenerationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.procs = PROCS[: cfg.processes]
        self.kinds, self.w = zip(*cfg.weights)
        self.fresh = 0

    def expr(self):
        r = self.rng.random()
        x = Var(self.rng.choice(VARS))
        if r < 0.5:
            return x
        if r < 0.7:
            return IntLit(self.rng.randrange(4))
        return BinOp("+", x, IntLit(1))

    def guard(self):
        x = Var(self.rng.choice(VARS))
        r = self.rng.random()
        if r < 0.5:
            return x
        if r < 0.8:
            return BinOp("<", x, IntLit(self.rng.randrange(1, 4)))
        return BinOp("=", x, IntLit(self.rng.randrange(3)))

    def pair(self):
        return tuple(self.rng.sample(self.procs, 2))

    def coms(self):
        out: list[Com] = []
        for _ in range(self.rng.randint(1, self.cfg.max_group_size)):
            p, q = self.pair()
            c = Com(p, self.expr(), q, self.rng.choice(VARS))
            if c not in out and all(not com_pair_clashes(c, o) for o in out):
                out.append(c)
        return tuple(out)

    def sels(self):
        out: list[Sel] = []
        for _ in range(self.rng.randint(1, self.cfg.max_group_size)):
            p, q = self.pair()
            s = Sel(p, q, self.rng.choice(("L", "R")))
            if s not in out and all(not sel_pair_clashes(s, o) for o in out):
                out.append(s)
        return tuple(out)

    def group(self, cont):
        if self.rng.random() < 0.8:
            return MCom(self.coms(), cont)
        return MSel(self.sels(), cont)

    def chor(self, depth: int, scope: tuple):
        if depth <= 0:
            if scope and self.rng.random() < 0.5:
                return Call(self.rng.choice(scope))
            return END
        kinds = [k for k in self.kinds if k != "call" or scope]
        weights = [w for k, w in zip(self.kinds, self.w) if k != "call" or scope]
        kind = self.rng.choices(kinds, weights)[0]
        if kind == "mcom":
            return MCom(self.coms(), self.chor(depth - 1, scope))
        if kind == "msel":
            return MSel(self.sels(), self.chor(depth - 1, scope))
        if kind == "if":
            return If(self.rng.choice(self.procs), self.guard(),
                      self.chor(depth - 1, scope), self.chor(depth - 1, scope))
        if kind == "def":
            name = f"X{self.fresh}"
            self.fresh += 1
            inner = scope + (name,)
            # bodies start with an interaction, so recursion is guarded
            body = self.group(self.chor(depth - 2, inner))
            return Def(name, body, self.chor(depth - 1, inner))
        if kind == "call":
            return Call(self.rng.choice(scope))
        return END


def broadcast(c):
    """Let the decider of every conditional tell every other process involved
    in its branches which branch was taken (``L`` or ``R``)."""
    match c:
        case MCom(coms, cont):
            return MCom(coms, broadcast(cont))
        case MSel(sels, cont):
            return MSel(sels, broadcast(cont))
        case If(p, g, c1, c2):
            c1, c2 = broadcast(c1), broadcast(c2)
            others = sorted((pn_chor(c1) | pn_chor(c2)) - {p})
            if not others:
                return If(p, g, c1, c2)
            return If(p, g, MSel(tuple(Sel(p, t, "L") for t in others), c1),
                      MSel(tuple(Sel(p, t, "R") for t in others), c2))
        case Def(name, body, main, procs):
            return Def(name, broadcast(body), broadcast(main), procs)
    return c


def gen_chor(cfg: GenConfig):
    """A well-formed choreography; projectable if ``cfg.require_projectable``."""
    rng = random.Random(cfg.seed)
    for _ in range(cfg.resample_budget):
        c = _Gen(cfg, rng).chor(cfg.max_depth, ())
        c = normalize(c)
        if cfg.require_projectable:
            # annotations first so that calls count towards the involved processes
            c = annotate(broadcast(annotate(c)))
        if check_chor(c):
            continue
        if cfg.require_projectable:
            try:
                project(c)
            except ProjectionError:
                continue
        return c
    raise GenerationError(f"no suitable choreography within {cfg.resample_budget} samples")


def random_state(rng: random.Random, procs) -> State:
    cells = {}
    for p in sorted(procs):
        for x in VARS:
            r = rng.random()
            if r < 0.5:
                cells[(p, x)] = Int(rng.randrange(4))
            elif r < 0.85:
                cells[(p, x)] = Bool(rng.random() < 0.5)
    return State(cells)


@dataclass(frozen=True)
class Instance:
    seed: int
    gen: GenConfig
    chor: object
    state: State
    projectable: bool

    @property
    def cfg(self) -> SeqConfig:
        return SeqConfig(self.chor, self.state)

    def describe(self) -> str:
        return f"seed {self.seed}\n{print_chor(self.chor)}{print_state(self.state)}"


def make_instance(gen: GenConfig) -> Instance:
    c = gen_chor(gen)
    state = random_state(random.Random(gen.seed ^ 0x5EED), pn_chor(c))
    try:
        project(c)
        ok = True
    except ProjectionError:
        ok = False
    return Instance(gen.seed, gen, c, state, ok)


def build_corpus(n: int = 500, seed: int = 0, depth: int = 4, group: int = 4,
                 processes: int = 5) -> list[Instance]:
    """``n`` instances; four out of five are generated projectable."""
    out = []
    for i in range(n):
        gen = GenConfig(seed=seed + i, max_depth=depth, max_group_size=group,
                        processes=processes, require_projectable=(i % 5 != 0))
        out.append(make_instance(gen))
    return out


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class Failure:
    seed: object
    counterexample: str
    detail: str

    def to_json(self) -> dict:
        return {"seed": self.seed, "counterexample": self.counterexample, "detail": self.detail}


@dataclass
class CheckReport:
    name: str
    instances: int = 0
    failures: list[Failure] = field(default_factory=list)
    inconclusive: list[Failure] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "CheckReport") -> "CheckReport":
        return CheckReport(self.name, self.instances + other.instances,
                           self.failures + other.failures,
                           self.inconclusive + other.inconclusive,
                           self.elapsed + other.elapsed)

    def render(self) -> str:
        verdict = "ok" if self.ok else "FAILED"
        lines = [f"{self.name}: {verdict} ({self.instances} instances, "
                 f"{len(self.failures)} failures, {len(self.inconclusive)} inconclusive, "
                 f"{self.elapsed:.1f}s)"]
        for tag, items in (("failure", self.failures), ("inconclusive", self.inconclusive)):
            for f in items:
                lines.append(f"  {tag} (seed {f.seed}): {f.detail}")
                lines += ["    " + ln for ln in f.counterexample.splitlines()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "property": self.name,
            "instances": self.instances,
            "failures": [f.to_json() for f in self.failures],
            "inconclusive": [f.to_json() for f in self.inconclusive],
            "elapsed": round(self.elapsed, 3),
        }


def _run_check(name: str, corpus, one) -> CheckReport:
    """Apply ``one(inst)`` to each instance; it returns ``None``, or
    ``("fail" | "inconclusive", detail)``.  Failures are shrunk."""
    start = time.perf_counter()
    rep = CheckReport(name)
    for inst in corpus:
        rep.instances += 1
        res = one(inst)
        if res is None:
            continue
        tag, detail = res
        if tag == "fail":
            small = shrink(inst, lambda i: (r := one(i)) is not None and r[0] == "fail")
            if small is not inst:
                detail = one(small)[1]
            rep.failures.append(Failure(inst.seed, small.describe(), detail))
        else:
            rep.inconclusive.append(Failure(inst.seed, inst.describe(), detail))
    rep.elapsed = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# Shrinking
# ---------------------------------------------------------------------------


def _smaller(c):
    """Candidate terms obtained by deleting one piece of ``c``."""
    match c:
        case MCom(coms, cont):
            yield cont
            if len(coms) > 1:
                for x in coms:
                    yield MCom(tuple(o for o in coms if o != x), cont)
            for k in _smaller(cont):
                yield MCom(coms, k)
        case MSel(sels, cont):
            yield cont
            if len(sels) > 1:
                for x in sels:
                    yield MSel(tuple(o for o in sels if o != x), cont)
            for k in _smaller(cont):
                yield MSel(sels, k)
        case If(p, g, c1, c2):
            yield c1
            yield c2
            for k in _smaller(c1):
                yield If(p, g, k, c2)
            for k in _smaller(c2):
                yield If(p, g, c1, k)
        case Def(name, body, main, procs):
            yield main
            for k in _smaller(body):
                yield Def(name, k, main, procs)
            for k in _smaller(main):
                yield Def(name, body, k, procs)
        case Call():
            yield END


def shrink(inst: Instance, fails, budget: int = 200) -> Instance:
    """Greedy subterm deletion preserving well-formedness and the failure."""
    cur = inst
    tries = 0
    improved = True
    while improved and tries < budget:
        improved = False
        for cand in _smaller(cur.chor):
            tries += 1
            if tries >= budget:
                break
            if check_chor(cand):
                continue
            nxt = replace(cur, chor=cand, projectable=_projectable(cand))
            if inst.projectable and not nxt.projectable:
                continue
            if fails(nxt):
                cur, improved = nxt, True
                break
    return cur


def _projectable(c) -> bool:
    try:
        project(c)
        return True
    except ProjectionError:
        return False


# ---------------------------------------------------------------------------
# Progress
# ---------------------------------------------------------------------------

WALK_FUEL = 60
WALK_SEEDS = (0, 1, 2)


def net_deadlocks(net, state: State, max_states: int = 2000) -> list:
    """Reachable stuck configurations of a network (bounded exploration)."""
    _, dead, _ = explore_net(NetConfig(net, state), max_states)
    return dead


def _progress_one(inst: Instance):
    trace, _ = run_seq(inst.cfg, WALK_FUEL)
    if trace.status == STUCK:
        return "fail", f"sequential run stuck after {len(trace.labels)} steps"
    for seed in WALK_SEEDS:
        trace, _ = run_conc(inst.cfg, WALK_FUEL, seed)
        if trace.status == STUCK:
            return "fail", f"concurrent run (seed {seed}) stuck after {len(trace.labels)} steps"
    if inst.projectable:
        net = project(inst.chor)
        for seed in WALK_SEEDS:
            trace, _ = run_net(NetConfig(net, inst.state), WALK_FUEL, seed)
            if trace.status == STUCK:
                return "fail", f"network run (seed {seed}) stuck after {len(trace.labels)} steps"
        dead = net_deadlocks(net, inst.state)
        if dead:
            return "fail", "reachable deadlock:\n" + print_network(dead[0].net)
    return None


DEADLOCK_CONTROL = "p |> q?x; q!x\n| q |> p?y; p!y\n"


def check_progress(corpus, control: str | None = DEADLOCK_CONTROL) -> CheckReport:
    """Terminated-or-reducible along sequential, concurrent and network
    runs.  ``control`` is a network that must be found deadlocked."""
    rep = _run_check("progress", corpus, _progress_one)
    if control is not None:
        rep.instances += 1
        if not net_deadlocks(parse_network(control), State()):
            rep.failures.append(Failure("control", control, "negative control not flagged as stuck"))
    return rep


# ---------------------------------------------------------------------------
# Confluence
# ---------------------------------------------------------------------------


def default_bound(inst: Instance) -> int:
    return 2 * max(2, _max_group(inst.chor))


def _max_group(c) -> int:
    match c:
        case MCom(coms, cont):
            return max(len(coms), _max_group(cont))
        case MSel(sels, cont):
            return max(len(sels), _max_group(cont))
        case If(_, _, c1, c2):
            return max(_max_group(c1), _max_group(c2))
        case Def(_, body, main):
            return max(_max_group(body), _max_group(main))
    return 0


def _reach_layers(cfg: SeqConfig, depth: int):
    """Yield the sets of configurations reachable in at most 0, 1, ... steps."""
    seen = {cfg}
    frontier = [cfg]
    yield seen
    for _ in range(depth):
        nxt = []
        for c in frontier:
            for _, k in successors(c):
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
        yield seen


def joinable(c1: SeqConfig, c2: SeqConfig, bound: int) -> bool:
    for s1, s2 in zip(_reach_layers(c1, bound), _reach_layers(c2, bound)):
        if not s1.isdisjoint(s2):
            return True
    return False


def _reachable(cfg: SeqConfig, limit: int) -> list[SeqConfig]:
    cfg = SeqConfig(normalize(cfg.chor), cfg.state)
    seen = {cfg}
    queue = deque([cfg])
    out = []
    while queue and len(out) < limit:
        c = queue.popleft()
        out.append(c)
        for _, k in successors(c):
            if k not in seen:
                seen.add(k)
                queue.append(k)
    return out


CONFLUENCE_CONFIGS = 40


def _confluence_one(inst: Instance, bound: int | None = None):
    bound = bound or default_bound(inst)
    for cfg in _reachable(inst.cfg, CONFLUENCE_CONFIGS):
        succ = successors(cfg)
        for (l1, k1), (l2, k2) in combinations(succ, 2):
            if k1 == k2:
                continue
            if not joinable(k1, k2, bound):
                if bound < 4 * default_bound(inst):
                    return _confluence_one(inst, 2 * bound)
                return "fail", (f"after {_fmt_labels((l1,))} and {_fmt_labels((l2,))} "
                                f"no join within {bound} steps from\n{print_chor(cfg.chor)}")
    return None


def check_confluence(corpus) -> CheckReport:
    return _run_check("confluence", corpus, _confluence_one)


def _fmt_labels(labels) -> str:
    return ", ".join(format_label(lbl) for lbl in labels)


# ---------------------------------------------------------------------------
# Sequential vs concurrent
# ---------------------------------------------------------------------------

SEQ_STEPS = 12


def conc_replays(cfg: SeqConfig, label, target: SeqConfig) -> bool:
    """Can the atoms of a sequential ``label`` be fired one at a time under
    the concurrent semantics to reach exactly ``target``?"""
    goal = SeqConfig(normalize(target.chor), target.state)

    def dfs(c: SeqConfig, bag: Counter) -> bool:
        if not +bag:
            return c == goal
        for lbl, k in successors(c):
            if bag[lbl] > 0:
                bag[lbl] -= 1
                if dfs(k, bag):
                    return True
                bag[lbl] += 1
        return False

    return dfs(SeqConfig(normalize(cfg.chor), cfg.state), Counter(atoms(label)))


def _seq_states(cfg: SeqConfig, steps: int) -> set[SeqConfig]:
    out = set()
    for _ in range(steps):
        res = step_seq(cfg)
        if res is None:
            break
        cfg = res[1]
        out.add(cfg)
    return out


def closes_to_seq(origin: SeqConfig, after: SeqConfig, bound: int) -> bool:
    """Is some configuration reachable from ``after`` by at most ``bound``
    concurrent steps also reachable from ``origin`` by 1..``bound``
    sequential steps?"""
    targets = _seq_states(origin, bound)
    for layer in _reach_layers(after, bound):
        if not layer.isdisjoint(targets):
            return True
    return False


def _seq_conc_one(inst: Instance):
    bound = default_bound(inst)
    cfg = SeqConfig(normalize(inst.chor), inst.state)
    for _ in range(SEQ_STEPS):
        res = step_seq(cfg)
        if res is None:
            break
        label, nxt = res
        if not conc_replays(cfg, label, nxt):
            return "fail", f"sequential step {_fmt_labels((label,))} not replayed concurrently"
        for lbl, k in successors(cfg):
            if not (closes_to_seq(cfg, k, bound) or closes_to_seq(cfg, k, 2 * bound)):
                return "inconclusive", (f"concurrent step {_fmt_labels((lbl,))} not closed "
                                        f"within {2 * bound} steps")
        cfg = nxt
    return None


def check_seq_conc(corpus) -> CheckReport:
    return _run_check("seq-conc", corpus, _seq_conc_one)


# ---------------------------------------------------------------------------
# Projection correspondence
# ---------------------------------------------------------------------------

EPP_STEPS = 12
ORACLE_FALLBACK_BOUND = 6


def _net_runs(ncfg: NetConfig, bag: Counter):
    """Network configurations reachable by firing exactly the labels in ``bag``."""
    out = []
    seen = set()

    def dfs(n: NetConfig, bag: Counter):
        if (n, tuple(sorted(bag.items(), key=repr))) in seen:
            return
        seen.add((n, tuple(sorted(bag.items(), key=repr))))
        if not +bag:
            out.append(n)
            return
        for r in enabled_net(n):
            lbl, k = apply_net(n, r, check=False)
            if bag[lbl] > 0:
                bag[lbl] -= 1
                dfs(k, bag)
                bag[lbl] += 1

    dfs(ncfg, bag)
    return out


def _net_matches_conc(cfg: SeqConfig, ncfg: NetConfig):
    """Every network step is mirrored by a concurrent step with the same
    label, whose projection the network result prunes to."""
    conc = successors(cfg)
    for lbl, n2 in net_successors(ncfg):
        def match(steps):
            return any(l2 == lbl and k.state == n2.state and _prunes_proj(k.chor, n2.net)
                       for l2, k in steps)
        # the production enumerator never lifts out of conditionals
        if not (match(conc) or match(oracle_steps(cfg, ORACLE_FALLBACK_BOUND))):
            return f"network step {_fmt_labels((lbl,))} has no matching choreography step"
    return None


def _prunes_proj(c, net) -> bool:
    try:
        return prunes(project(c), net)
    except ProjectionError:
        return False


def _epp_one(inst: Instance):
    if not inst.projectable:
        return None
    cfg = SeqConfig(normalize(inst.chor), inst.state)
    ncfg = NetConfig(project(cfg.chor), cfg.state)
    for _ in range(EPP_STEPS):
        err = _net_matches_conc(cfg, ncfg)
        if err:
            return "fail", err
        res = step_seq(cfg)
        if res is None:
            break
        label, nxt = res
        cands = [n for n in _net_runs(ncfg, Counter(atoms(label)))
                 if n.state == nxt.state and _prunes_proj(nxt.chor, n.net)]
        if not cands:
            return "fail", f"sequential step {_fmt_labels((label,))} not simulated by the network"
        cfg, ncfg = nxt, cands[0]
    dead = net_deadlocks(project(inst.chor), inst.state)
    if dead:
        return "fail", "reachable deadlock:\n" + print_network(dead[0].net)
    # final states agree on terminating runs
    trace, final = run_seq(inst.cfg, 200)
    if trace.status == TERMINATED:
        for seed in WALK_SEEDS:
            ntrace, nfinal = run_net(NetConfig(project(inst.chor), inst.state), 400, seed)
            if ntrace.status != TERMINATED or nfinal.state != final.state:
                return "fail", f"network run (seed {seed}) ends {ntrace.status} in a different state"
    return None


def check_epp(corpus) -> CheckReport:
    rep = _run_check("epp", [i for i in corpus if i.projectable], _epp_one)
    return rep


# ---------------------------------------------------------------------------
# Oracle validation on small terms
# ---------------------------------------------------------------------------

ORACLE_PROCS = ("p", "q", "r")
ORACLE_STATE = State({("p", "x"): Bool(True), ("q", "x"): Bool(False), ("r", "x"): Bool(True)})


def _small_groups():
    coms = [Com(a, Var("x"), b, y) for a in ORACLE_PROCS for b in ORACLE_PROCS if a != b
            for y in ("x", "y")]
    sels = [Sel(a, b, "L") for a in ORACLE_PROCS for b in ORACLE_PROCS if a != b]
    groups = []
    for k in (1, 2, 3, 4):
        for g in combinations(coms, k):
            if all(not com_pair_clashes(a, b) for a, b in combinations(g, 2)):
                groups.append(("com", g))
        for g in combinations(sels, k):
            if all(not sel_pair_clashes(a, b) for a, b in combinations(g, 2)):
                groups.append(("sel", g))
    return groups


def enumerate_chors(max_size: int = 6):
    """Every well-formed choreography over three processes with at most
    ``max_size`` nodes (see ``chor_size``); one procedure name ``X``."""
    groups = _small_groups()
    memo: dict = {}

    def terms(n: int, in_scope: bool):
        # all terms of size exactly n
        key = (n, in_scope)
        if key in memo:
            return memo[key]
        out = []
        if n == 1:
            out.append(END)
            if in_scope:
                out.append(Call("X"))
        for kind, g in groups:
            rest = n - 1 - len(g)
            if rest >= 1:
                for k in terms(rest, in_scope):
                    out.append(MCom(g, k) if kind == "com" else MSel(g, k))
        for p in ORACLE_PROCS:
            for a in range(1, n - 1):
                for c1 in terms(a, in_scope):
                    for c2 in terms(n - 1 - a, in_scope):
                        out.append(If(p, Var("x"), c1, c2))
        if not in_scope:
            for a in range(1, n - 1):
                for body in terms(a, True):
                    if not isinstance(body, (MCom, MSel)):
                        continue
                    for main in terms(n - 1 - a, True):
                        out.append(Def("X", body, main))
        memo[key] = out
        return out

    for n in range(1, max_size + 1):
        for c in terms(n, False):
            if not check_chor(c):
                yield c


def _oracle_one(c, bound: int):
    cfg = SeqConfig(c, ORACLE_STATE)
    norm = SeqConfig(normalize(c), ORACLE_STATE)
    for label, k in successors(norm):
        if not confirms(cfg, label, k, bound):
            return f"{_fmt_labels((label,))} not confirmed"
    return None


def check_oracle(max_size: int = 6, bound: int = 8) -> CheckReport:
    start = time.perf_counter()
    rep = CheckReport("oracle")
    for c in enumerate_chors(max_size):
        rep.instances += 1
        err = _oracle_one(c, bound)
        if err:
            rep.failures.append(Failure("enum", print_chor(c), err))
    rep.elapsed = time.perf_counter() - start
    return rep


PROPS = {
    "progress": check_progress,
    "confluence": check_confluence,
    "seq-conc": check_seq_conc,
    "epp": check_epp,
}


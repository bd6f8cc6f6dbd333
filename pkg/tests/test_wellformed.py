from itertools import combinations

from hypothesis import given, strategies as st

from chorc.surface import parse_chor
from chorc.syntax import Com, END, If, MCom, Sel, Var, IntLit
from chorc.wellformed import check_chor, check_multicom, check_multisel

from conftest import chor


def kinds(vs):
    return sorted(v.kind for v in vs)


def pairs(vs):
    return {(v.kind, frozenset(v.offenders)) for v in vs}


INTERFERING = parse_chor("{p.x -> q.x, p.y -> q.y, r.x -> q.y, q.y -> s.x}").coms
c1 = Com("p", Var("x"), "q", "x")
c2 = Com("p", Var("y"), "q", "y")
c3 = Com("r", Var("x"), "q", "y")
c4 = Com("q", Var("y"), "s", "x")


def test_interfering_multicom():
    vs = check_multicom(INTERFERING)
    assert {v.kind for v in vs} == {"SameChannelClash", "SameCellClash", "ReadWriteClash"}
    got = pairs(vs)
    assert ("SameChannelClash", frozenset({c1, c2})) in got
    assert ("SameCellClash", frozenset({c2, c3})) in got
    assert ("ReadWriteClash", frozenset({c3, c4})) in got
    # q also receives into y from p and then sends y
    assert ("ReadWriteClash", frozenset({c2, c4})) in got
    assert len(vs) == 4


def test_exchange_and_singleton_clean():
    assert check_multicom(chor("exchange.chor").coms) == []
    assert check_multicom([c1]) == []


def test_interfering_multisel():
    vs = check_multisel([Sel("p", "q", "l"), Sel("r", "q", "l2"), Sel("q", "s", "l")])
    assert len(vs) >= 2 and {v.kind for v in vs} == {"SelTargetClash"}
    assert check_multisel([Sel("p", "q", "L")]) == []
    assert check_multisel([Sel("p", "q", "L"), Sel("p", "r", "L")]) == []


def test_self_interaction():
    assert kinds(check_multicom([Com("p", Var("x"), "p", "y")])) == ["SelfInteraction"]
    assert kinds(check_multisel([Sel("p", "p", "L")])) == ["SelfInteraction"]


def test_check_chor():
    assert check_chor(chor("crawler.chor")) == []
    assert check_chor(chor("exchange.chor")) == []
    assert kinds(check_chor(parse_chor("X"))) == ["UnboundCall"]
    assert kinds(check_chor(MCom((), END))) == ["EmptyGroup"]
    assert kinds(check_chor(parse_chor("def X = {X} in {X}"))) == ["UnguardedRecursion"]
    assert check_chor(parse_chor("def X = {p.x -> q.y; X} in {X}")) == []


def test_violations_under_conditional():
    c = If("r", Var("b"), END, MCom(INTERFERING, END))
    vs = check_chor(c)
    assert len(vs) == 4
    assert {v.location for v in vs} == {("else",)}
    assert vs[0].render().startswith("$.else: ")


procs = st.sampled_from("pqrs")
coms = st.builds(Com, procs, st.sampled_from([Var("x"), Var("y"), IntLit(1)]), procs,
                 st.sampled_from("xy"))
sels = st.builds(Sel, procs, procs, st.sampled_from("LR"))


@given(st.lists(coms, max_size=5, unique=True))
def test_multicom_subset_closed(group):
    if check_multicom(group):
        return
    for k in range(len(group)):
        for sub in combinations(group, k):
            assert check_multicom(sub) == []


@given(st.lists(sels, max_size=5, unique=True))
def test_multisel_subset_closed_and_targets_unique(group):
    if check_multisel(group):
        return
    targets = [s.receiver for s in group]
    assert len(targets) == len(set(targets))
    for k in range(len(group)):
        for sub in combinations(group, k):
            assert check_multisel(sub) == []


@given(st.lists(coms, max_size=5, unique=True), st.randoms())
def test_check_is_order_insensitive(group, rnd):
    shuffled = list(group)
    rnd.shuffle(shuffled)
    norm = lambda vs: {(v.kind, frozenset(v.offenders)) for v in vs}  # noqa: E731
    assert norm(check_multicom(group)) == norm(check_multicom(shuffled))


@given(st.lists(coms, min_size=2, max_size=5, unique=True))
def test_wellformed_multicom_writes_distinct_cells(group):
    if not check_multicom(group):
        cells = [(c.receiver, c.var) for c in group]
        assert len(cells) == len(set(cells))

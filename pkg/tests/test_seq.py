from chorc.labels import OUT_OF_FUEL, TERMINATED, ComL, ElseL, GroupL, ThenL
from chorc.seq import SeqConfig, is_terminated, normalize, run_seq, step_seq
from chorc.surface import parse_chor, parse_state
from chorc.syntax import END, Def, Int, MCom, MSel, State
from chorc.verify import build_corpus

from conftest import chor, state


def test_normalize():
    assert normalize(Def("X", parse_chor("p.x -> q.y; X"), END)) == END
    body = parse_chor("p.x -> q.y")
    assert normalize(MCom((), body)) == body
    c = chor("remark1.chor")
    assert normalize(c) == c
    assert normalize(normalize(MCom((), MSel((), body)))) == normalize(MCom((), MSel((), body)))


def test_is_terminated():
    assert is_terminated(END)
    assert is_terminated(Def("X", parse_chor("p.x -> q.y; X"), END))
    assert not is_terminated(parse_chor("p.x -> q.y"))


def test_multicom_is_atomic():
    cfg = SeqConfig(parse_chor("{p.x -> q.u, q.x -> p.v}"), parse_state("p.x = 1\nq.x = 2"))
    label, nxt = step_seq(cfg)
    assert isinstance(label, GroupL) and len(label.items) == 2
    assert nxt.state.read("q", "u") == Int(1)
    assert nxt.state.read("p", "v") == Int(2)
    assert nxt.chor == END


def test_exchange_reads_pre_state():
    # both sides overwrite the variable the other side reads
    cfg = SeqConfig(parse_chor("{p.x -> q.x, q.x -> p.x}"), parse_state("p.x = 1\nq.x = 2"))
    _, nxt = step_seq(cfg)
    assert nxt.state.read("q", "x") == Int(1) and nxt.state.read("p", "x") == Int(2)


def test_conditional():
    cfg = SeqConfig(parse_chor("if p.(1 < 2) then {p.x -> q.y} else {q.x -> p.y}"))
    label, nxt = step_seq(cfg)
    assert label == ThenL("p")
    assert nxt.chor == parse_chor("p.x -> q.y")
    # non-boolean guards take the else branch
    label, _ = step_seq(SeqConfig(parse_chor("if p.(1 + 1) then {0} else {q.x -> p.y}")))
    assert label == ElseL("p")


def test_single_unfold_per_step():
    c = chor("loop.chor")
    label, nxt = step_seq(SeqConfig(c, parse_state("p.x = 7")))
    assert label == GroupL((ComL("p", Int(7), "q", "y"),))
    assert nxt.chor == c
    assert nxt.state.read("q", "y") == Int(7)


def test_run_seq():
    trace, _ = run_seq(SeqConfig(chor("crawler.chor")), 10)
    assert trace.status == TERMINATED and len(trace.labels) == 2
    trace, _ = run_seq(SeqConfig(END), 10)
    assert trace.status == TERMINATED and trace.labels == ()
    trace, _ = run_seq(SeqConfig(chor("loop.chor")), 5)
    assert trace.status == OUT_OF_FUEL and len(trace.labels) == 5


def test_selections_keep_state():
    cfg = SeqConfig(chor("remark1.chor"), parse_state("p.e = true\np.x = 4"))
    _, after_if = step_seq(cfg)
    _, after_sel = step_seq(after_if)
    assert after_sel.state == after_if.state == cfg.state


def test_progress_and_determinism_on_corpus():
    for inst in build_corpus(60, seed=11):
        cfg = inst.cfg
        for _ in range(15):
            res = step_seq(cfg)
            assert res == step_seq(cfg)
            if res is None:
                assert is_terminated(cfg.chor)
                break
            cfg = res[1]


def test_atomic_golden():
    _, final = run_seq(SeqConfig(chor("atomic.chor"), state("atomic.state")))
    assert final.state == State({("p", "x"): Int(1), ("q", "x"): Int(2),
                                 ("q", "u"): Int(1), ("p", "v"): Int(2)})

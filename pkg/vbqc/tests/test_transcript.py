import json

import pytest

from transcript import COUNTER_KEYS, Transcript


def _exchange(t: Transcript, vertices):
    t.send_states(vertices)
    for v in vertices[:-1]:
        t.send_delta(v, (1, 0, 2))
        t.receive_outcome(v, 3)


def test_counters_for_one_localising_run():
    t = Transcript()
    _exchange(t, [0, 1, 2, 3])
    assert t.counters == {
        "quantum_states": 4,
        "dits_to_prover": 9,
        "dits_to_verifier": 3,
        "messages": 4 + 2 * 3,
        "rounds": 1 + 3,
    }


def test_outcome_needs_its_delta():
    t = Transcript()
    t.send_states([0, 1])
    with pytest.raises(RuntimeError):
        t.receive_outcome(0, 1)
    t.send_delta(0, (0, 0, 0))
    with pytest.raises(RuntimeError):
        t.receive_outcome(1, 1)


def test_abe_messages():
    t = Transcript(phase="abe")
    t.receive_measurements("toffoli_outcomes", [0, 1, 2], [1, 2, 3, 4, 0, 1, 2, 3, 4])
    t.send_correction((1, 0, 4))
    t.receive_measurements("final_outcomes", [0], [2, 2, 2])
    assert t.counters["dits_to_verifier"] == 12
    assert t.counters["dits_to_prover"] == 3
    assert t.counters["messages"] == 3
    assert t.counters["rounds"] == 2
    assert t.messages[1].round == t.messages[0].round


def test_extend_renumbers_rounds():
    a = Transcript()
    _exchange(a, [0, 1])
    b = Transcript()
    _exchange(b, [5, 6, 7])
    a.extend(b)
    assert a.messages[-1].round == 2 + 3
    assert a.messages[-1].counters == a.counters
    assert a.counters["quantum_states"] == 5
    assert set(a.outcomes()) == {0, 5, 6}
    assert a.deltas()[6] == [1, 0, 2]


def test_jsonl_log(tmp_path):
    t = Transcript()
    _exchange(t, [0, 1])
    path = t.to_jsonl(tmp_path / "logs" / "run.jsonl")
    lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert [line["kind"] for line in lines] == ["state", "state", "delta", "outcome"]
    assert set(lines[-1]["counters"]) == set(COUNTER_KEYS)

import json
from fractions import Fraction

import pytest

from grsse.channels import NoiseModel
from grsse.codec import Codec
from grsse.codes import code_by_name, hamming_code
from grsse.planfile import FORMAT, decode_number, encode_number, load_plan, plan_key, plan_to_json, save_plan
from grsse.planner import SURVIVAL_FLOOR, CodeSchedule, plan_grsse


def test_number_roundtrip():
    for x in (Fraction(3, 7), Fraction(0), 1, 0.1, 1e-300):
        y = decode_number(encode_number(x))
        assert y == x and type(y) is (Fraction if isinstance(x, (int, Fraction)) else float)


@pytest.mark.parametrize("backend,channel", [("exact", NoiseModel.bsc(7, Fraction(1, 10))),
                                             ("float", NoiseModel.bsc(7, 0.1))])
def test_plan_roundtrip_preserves_codec(tmp_path, backend, channel):
    plan = plan_grsse(channel, CodeSchedule([hamming_code()], cap=30), backend)
    path = tmp_path / "plan.json"
    save_plan(plan, path)
    loaded = load_plan(path)
    assert json.loads(path.read_text())["header"]["format"] == FORMAT
    assert loaded.p_L == plan.p_L and loaded.backend == plan.backend
    assert [it.gamma for it in loaded.iterations] == [it.gamma for it in plan.iterations]
    assert [it.terminal for it in loaded.iterations] == [it.terminal for it in plan.iterations]
    a, b = Codec(plan), Codec(loaded)
    for seed in range(50):
        assert a.encode_packed(seed, seed) == b.encode_packed(seed, seed)


def test_mixed_schedule_roundtrip(tmp_path):
    codes = [code_by_name(nm, 24) for nm in ("trivial:24", "golay", "parity:24")]
    plan = plan_grsse(NoiseModel.ball(24, 2), CodeSchedule(codes), "float")
    path = tmp_path / "p.json"
    save_plan(plan, path)
    loaded = load_plan(path)
    assert loaded.schedule.names == plan.schedule.names
    assert loaded.schedule.candidates == plan.schedule.candidates
    assert plan_to_json(loaded) == plan_to_json(plan)


def test_plan_key_depends_on_inputs():
    sch = CodeSchedule([hamming_code()])
    a = plan_key(NoiseModel.bsc(7, 0.1), sch, "float", SURVIVAL_FLOOR)
    assert a == plan_key(NoiseModel.bsc(7, 0.1), CodeSchedule([hamming_code()]), "float", SURVIVAL_FLOOR)
    assert a != plan_key(NoiseModel.bsc(7, 0.2), sch, "float", SURVIVAL_FLOOR)
    assert a != plan_key(NoiseModel.bsc(7, 0.1), sch, "exact", SURVIVAL_FLOOR)


def test_rejects_unknown_format(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"header": {"format": "other/9"}}))
    with pytest.raises(ValueError):
        load_plan(path)

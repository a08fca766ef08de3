import json
import random

import pytest

from grsse.bitcodes import MalformedPrefix
from grsse.cli import main, pack_bitstream, read_blocks, unpack_bitstream, write_blocks


def test_block_io_roundtrip():
    rng = random.Random(0)
    blocks = [rng.getrandbits(24) for _ in range(10)]
    data = write_blocks(blocks, 24, 2)
    assert len(data) == 30
    assert read_blocks(data, 24, 2) == blocks
    # symbol 0 is the first bit on the wire
    assert write_blocks([1], 8, 2) == b"\x80"
    tern = [rng.randrange(3 ** 5) for _ in range(4)]
    assert read_blocks(write_blocks(tern, 5, 3), 5, 3) == tern
    with pytest.raises(ValueError):
        read_blocks(b"\x01\x02", 4, 3)
    with pytest.raises(ValueError):
        read_blocks(b"\x01", 7, 2)


def test_bitstream_padding():
    for bits in ("", "1", "0101100", "10101010", "1" * 19):
        assert unpack_bitstream(pack_bitstream(bits)) == bits
    with pytest.raises(MalformedPrefix):
        unpack_bitstream(b"")
    with pytest.raises(MalformedPrefix):
        unpack_bitstream(b"\x00\x09")


def test_codes_list(capsys):
    assert main(["codes", "list", "--n", "24", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {"golay", "complete:24"} <= {r["name"] for r in rows}
    assert main(["codes", "list", "--n", "7"]) == 0
    assert "hamming" in capsys.readouterr().out


def test_plan_encode_decode_roundtrip(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    assert main(["plan", "--channel", "ball", "--n", "24", "--w", "3", "--codes", "golay",
                 "--out", str(plan)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["iterations"] >= 1 and summary["rate_huffman"] < 1
    rng = random.Random(5)
    blocks = [rng.getrandbits(24) for _ in range(200)]
    src, msg, out = tmp_path / "x.bin", tmp_path / "m.bin", tmp_path / "y.bin"
    src.write_bytes(write_blocks(blocks, 24, 2))
    assert main(["encode", "--plan", str(plan), "--seed", "0x2a", "--in", str(src), "--out", str(msg)]) == 0
    assert main(["decode", "--plan", str(plan), "--seed", "42", "--in", str(msg), "--out", str(out)]) == 0
    ys = read_blocks(out.read_bytes(), 24, 2)
    assert len(ys) == 200
    assert all(bin(x ^ y).count("1") <= 3 for x, y in zip(blocks, ys))
    # a different seed decodes to something else
    assert main(["decode", "--plan", str(plan), "--seed", "43", "--in", str(msg), "--out", str(out)]) in (0, 2)


def test_decode_needs_block_count_for_empty_messages(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    # the trivial code with a noise law equal to the uniform proposal accepts at once: empty messages
    assert main(["plan", "--channel", "bsc", "--n", "4", "--alpha", "1/2", "--codes", "trivial",
                 "--out", str(plan)]) == 0
    src, msg, out = tmp_path / "x.bin", tmp_path / "m.bin", tmp_path / "y.bin"
    src.write_bytes(bytes([0xA5, 0x3C]))
    assert main(["encode", "--plan", str(plan), "--seed", "1", "--in", str(src), "--out", str(msg)]) == 0
    with pytest.raises(SystemExit):
        main(["decode", "--plan", str(plan), "--seed", "1", "--in", str(msg), "--out", str(out)])
    assert main(["decode", "--plan", str(plan), "--seed", "1", "--in", str(msg), "--out", str(out),
                 "--blocks", "4"]) == 0
    assert len(out.read_bytes()) == 2


def test_bounds_command(capsys):
    assert main(["bounds", "--channel", "ball", "--n", "24", "--w", "3", "--code", "golay"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["comm_bound"] == pytest.approx(20.0506, abs=1e-4)


def test_sweep_command(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"channel": "bsc", "n": 7, "grid": [0.05], "schedule": ["hamming"],
                                "cap": 40}))
    out = tmp_path / "s.csv"
    assert main(["sweep", "--spec", str(spec), "--out", str(out), "--trials", "100"]) == 0
    assert out.read_text().startswith("param,")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"channel": "bsc", "n": 7, "grid": [2.0]}))
    assert main(["sweep", "--spec", str(bad), "--trials", "0"]) == 1


def test_errors_exit_with_status_2(tmp_path, capsys):
    assert main(["plan", "--channel", "ball", "--n", "24", "--w", "3", "--codes", "nonsense",
                 "--out", str(tmp_path / "p.json")]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["encode", "--plan", str(tmp_path / "missing.json"), "--seed", "0",
                 "--in", "x", "--out", "y"]) == 2

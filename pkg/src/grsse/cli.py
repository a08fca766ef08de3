"""Command line interface: ``grsse codes|plan|encode|decode|bounds|sweep``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import planner
from .bitcodes import MalformedPrefix
from .bounds import theorem1_bounds
from .channels import NoiseModel, capacity, type_distribution
from .codec import Codec, derive_seed
from .codes import code_by_name, describe, registry_codes
from .gf import pack, unpack
from .planfile import load_plan, save_plan
from .sweep import SweepSpec, any_flags, emit_csv, mixed_ladder, run_sweep


def _number(text: str):
    return Fraction(text) if "/" in text else float(text)


def _add_channel_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--channel", required=True,
                   choices=["bsc", "q-ary-symmetric", "ball", "hamming-ball", "constant-weight"])
    p.add_argument("--n", type=int, default=24)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--alpha", type=_number, help="crossover probability, e.g. 11/100 or 0.11")
    p.add_argument("--w", type=int, help="weight parameter of ball and constant-weight channels")


def _channel(args, exact=None) -> NoiseModel:
    if args.channel in ("bsc", "q-ary-symmetric"):
        if args.alpha is None:
            raise SystemExit("--alpha is required for the symmetric channel")
        return NoiseModel("q-ary-symmetric", args.n, args.q, alpha=args.alpha, exact=exact)
    if args.w is None:
        raise SystemExit("--w is required for ball and constant-weight channels")
    return NoiseModel(args.channel, args.n, args.q, w=args.w, exact=exact)


def _seed(text: str) -> int:
    return int(text, 0)


# ---------------------------------------------------------------------------
# block IO


def read_blocks(data: bytes, n: int, q: int) -> list:
    """Split input bytes into packed n-symbol blocks."""
    if q == 2:
        total = len(data) * 8
        value = int.from_bytes(data, "big")
        count = total // n
        if value & ((1 << (total - count * n)) - 1):
            raise ValueError(f"input has {total - count * n} trailing bits that do not form a block")
        blocks = []
        for b in range(count):
            chunk = (value >> (total - (b + 1) * n)) & ((1 << n) - 1)
            # the first bit of the chunk is symbol 0
            blocks.append(int(format(chunk, f"0{n}b")[::-1], 2))
        return blocks
    if len(data) % n:
        raise ValueError(f"input length {len(data)} is not a multiple of n = {n}")
    if any(b >= q for b in data):
        raise ValueError(f"input byte out of range for q = {q}")
    return [pack(data[i:i + n], q) for i in range(0, len(data), n)]


def write_blocks(blocks: list, n: int, q: int) -> bytes:
    if q == 2:
        bits = "".join(format(b, f"0{n}b")[::-1] for b in blocks)
        bits += "0" * (-len(bits) % 8)
        return int(bits, 2).to_bytes(len(bits) // 8, "big") if bits else b""
    return bytes(d for b in blocks for d in unpack(b, n, q))


def pack_bitstream(bits: str) -> bytes:
    pad = -len(bits) % 8
    bits += "0" * pad
    body = int(bits, 2).to_bytes(len(bits) // 8, "big") if bits else b""
    return body + bytes([pad])


def unpack_bitstream(data: bytes) -> str:
    if not data:
        raise MalformedPrefix("empty message file")
    pad = data[-1]
    body = data[:-1]
    if pad > 7 or (pad and not body):
        raise MalformedPrefix("bad padding trailer")
    bits = format(int.from_bytes(body, "big"), f"0{len(body) * 8}b") if body else ""
    return bits[:len(bits) - pad]


# ---------------------------------------------------------------------------
# commands


def cmd_codes(args) -> int:
    rows = [describe(c) for c in registry_codes(args.n, args.q)]
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"{'name':<16}{'n':>4}{'k':>4}{'d':>5}{'eff_d':>7}{'type_sets':>11}")
    for r in rows:
        print(f"{r['name']:<16}{r['n']:>4}{r['k']:>4}{str(r['d']):>5}{r['effective_d']:>7}{r['type_sets']:>11}")
    return 0


def _schedule(args) -> planner.CodeSchedule:
    if args.codes == "mixed":
        codes = mixed_ladder(args.n, args.q)
    else:
        codes = [code_by_name(nm, args.n, args.q) for nm in args.codes.split(",")]
    return planner.CodeSchedule(codes, _number(args.epsilon), args.cap)


def cmd_plan(args) -> int:
    exact = False if args.backend == "float" else None
    channel = _channel(args, exact)
    plan = planner.plan_grsse(channel, _schedule(args), args.backend)
    save_plan(plan, args.out)
    summary = {
        "out": str(args.out),
        "backend": plan.backend,
        "iterations": len(plan),
        "expected_log2_L": plan.expected_log2_L(),
        "rate_huffman": planner.expected_rate(plan, "huffman"),
        "rate_elias_gamma": planner.expected_rate(plan, "elias-gamma"),
        "capacity_per_symbol": capacity(type_distribution(channel)) / channel.n,
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_encode(args) -> int:
    plan = load_plan(args.plan)
    codec = Codec(plan, args.coder)
    blocks = read_blocks(Path(args.inp).read_bytes(), plan.n, plan.q)
    parts = []
    for b, x in enumerate(blocks):
        _, _, msg = codec.encode_packed(x, derive_seed(args.seed, b))
        parts.append(msg.bits)
    bits = "".join(parts)
    Path(args.out).write_bytes(pack_bitstream(bits))
    print(json.dumps({"blocks": len(blocks), "bits": len(bits),
                      "bits_per_symbol": len(bits) / max(1, len(blocks) * plan.n)}))
    return 0


def _messages_can_be_empty(codec: Codec) -> bool:
    """Only a one-word Huffman code has an empty prefix; the payload is then empty when k = 0."""
    if codec.coder != "huffman" or len(codec.huffman.codebook) != 1:
        return False
    (only,) = codec.huffman.codebook
    return codec.plan.code_at(only).k == 0


def cmd_decode(args) -> int:
    plan = load_plan(args.plan)
    codec = Codec(plan, args.coder)
    bits = unpack_bitstream(Path(args.inp).read_bytes())
    if args.blocks is None and _messages_can_be_empty(codec):
        raise SystemExit("messages can be empty under this plan; pass --blocks")
    out, pos = [], 0
    while (args.blocks is None and pos < len(bits)) or (args.blocks is not None and len(out) < args.blocks):
        y, nxt = codec.decode_at(bits, pos, derive_seed(args.seed, len(out)))
        out.append(y)
        pos = nxt
    if pos != len(bits):
        raise MalformedPrefix("trailing bits after the last message")
    Path(args.out).write_bytes(write_blocks(out, plan.n, plan.q))
    return 0


def cmd_bounds(args) -> int:
    channel = _channel(args)
    code = code_by_name(args.code, args.n, args.q)
    print(json.dumps(theorem1_bounds(channel, code).as_dict(), indent=2))
    return 0


def cmd_sweep(args) -> int:
    obj = json.loads(Path(args.spec).read_text())
    if args.trials is not None:
        obj["trials"] = args.trials
    if args.workers is not None:
        obj["workers"] = args.workers
    rows = run_sweep(SweepSpec.from_json(obj))
    text = emit_csv(rows, args.out)
    if args.out is None:
        sys.stdout.write(text)
    flagged = [(r.param, r.flags) for r in rows if r.flags]
    for param, flags in flagged:
        print(f"flagged {param}: {','.join(flags)}", file=sys.stderr)
    return 1 if any_flags(rows) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grsse", description="Channel simulation with rejection-sampled syndrome encoders.")
    sub = ap.add_subparsers(dest="command", required=True)

    codes = sub.add_parser("codes", help="inspect the code registry")
    codes_sub = codes.add_subparsers(dest="action", required=True)
    lst = codes_sub.add_parser("list", help="list registry codes for a block length")
    lst.add_argument("--n", type=int, default=24)
    lst.add_argument("--q", type=int, default=2)
    lst.add_argument("--json", action="store_true")
    lst.set_defaults(func=cmd_codes)

    pl = sub.add_parser("plan", help="plan acceptance masses and write a plan file")
    _add_channel_args(pl)
    pl.add_argument("--codes", default="mixed", help="comma-separated code names, or 'mixed'")
    pl.add_argument("--epsilon", default="1e-9")
    pl.add_argument("--cap", type=int, default=planner.DEFAULT_CAP)
    pl.add_argument("--backend", choices=planner.BACKENDS, default="auto")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plan)

    for name, func, help_ in (("encode", cmd_encode, "encode input blocks into a message file"),
                              ("decode", cmd_decode, "decode a message file into output blocks")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--plan", required=True)
        p.add_argument("--seed", type=_seed, required=True)
        p.add_argument("--in", dest="inp", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--coder", choices=["huffman", "elias-gamma"], default="huffman")
        if name == "decode":
            p.add_argument("--blocks", type=int, help="number of blocks (needed when messages can be empty)")
        p.set_defaults(func=func)

    bd = sub.add_parser("bounds", help="print the performance bounds for a channel and code")
    _add_channel_args(bd)
    bd.add_argument("--code", required=True)
    bd.set_defaults(func=cmd_bounds)

    sw = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    sw.add_argument("--spec", required=True)
    sw.add_argument("--out")
    sw.add_argument("--trials", type=int)
    sw.add_argument("--workers", type=int)
    sw.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, MalformedPrefix, OSError) as exc:
        print(f"grsse: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

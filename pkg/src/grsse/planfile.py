"""JSON form of a plan.

Rationals are written as "num/den" strings and binary64 values as JSON
numbers (Python's shortest round-trip repr), so a plan reloads bit for bit.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .channels import NoiseModel
from .codes import LinearCode, code_by_name, code_from_json
from .planner import CodeSchedule, IterationPlan, KappaPlan

FORMAT = "grsse-plan/1"


def encode_number(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    return float(x)


def decode_number(x):
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def _code_record(code: LinearCode) -> dict:
    return {
        "name": code.name,
        "H": code.H.to_json(),
        "std_col_perm": list(code.standard.col_perm.perm),
        "typesets": [[list(p) for p in t] for t in code.cosets.tsd.typesets],
    }


def _load_code(rec: dict, n: int, q: int) -> LinearCode:
    try:
        code = code_by_name(rec["name"], n, q)
    except (KeyError, ValueError, OSError):
        code = code_from_json(rec["H"], rec["name"])
    if code.H.to_json() != rec["H"]:
        raise ValueError(f"code {rec['name']!r} does not match the stored parity-check matrix")
    return code


def schedule_header(channel: NoiseModel, schedule: CodeSchedule, backend: str, survival_floor) -> dict:
    """The inputs that determine a plan; also the cache key material."""
    return {
        "format": FORMAT,
        "channel": channel.spec(),
        "codes": schedule.names[:schedule.candidates],
        "epsilon": encode_number(schedule.epsilon),
        "cap": schedule.cap,
        "backend": backend,
        "survival_floor": survival_floor,
    }


def plan_key(channel: NoiseModel, schedule: CodeSchedule, backend: str, survival_floor) -> str:
    header = schedule_header(channel, schedule, backend, survival_floor)
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def plan_to_json(plan: KappaPlan) -> dict:
    if not plan.terminal:
        raise ValueError("only terminal plans can be written")
    header = schedule_header(plan.channel, plan.schedule, plan.backend, plan.survival_floor)
    header["plan_backend"] = plan.backend
    header["code_details"] = [_code_record(c) for c in plan.codes]
    return {
        "header": header,
        "iterations": [
            {
                "code_index": it.code_index,
                "F": encode_number(it.accept_prob),
                "terminal": it.terminal,
                "gamma": [[tid, list(p), encode_number(m)] for tid, p, m in it.gamma],
            }
            for it in plan.iterations
        ],
        "p_L": [encode_number(x) for x in plan.p_L],
    }


def plan_from_json(obj) -> KappaPlan:
    if isinstance(obj, str):
        obj = json.loads(obj)
    header = obj.get("header") if isinstance(obj, dict) else None
    if not isinstance(header, dict) or header.get("format") != FORMAT:
        raise ValueError("not a grsse plan file of a supported format")
    exact = header["plan_backend"] == "exact"
    channel = NoiseModel.from_spec(header["channel"], exact=exact or None)
    n, q = channel.n, channel.q
    records = header["code_details"]
    codes = [_load_code(r, n, q) for r in records]
    candidates = len(header["codes"])
    schedule = CodeSchedule(codes[:candidates], decode_number(header["epsilon"]), header["cap"])
    if schedule.names != [c.name for c in codes]:
        raise ValueError("stored codes do not match the schedule")
    iterations = [
        IterationPlan(
            rec["code_index"],
            tuple((tid, tuple(p), decode_number(m)) for tid, p, m in rec["gamma"]),
            decode_number(rec["F"]),
            bool(rec["terminal"]),
        )
        for rec in obj["iterations"]
    ]
    p_L = [decode_number(x) for x in obj["p_L"]]
    survival = 0 if exact else 0.0
    return KappaPlan(channel, schedule, header["plan_backend"], iterations, p_L, survival,
                     header["survival_floor"])


def save_plan(plan: KappaPlan, path) -> None:
    Path(path).write_text(json.dumps(plan_to_json(plan), separators=(",", ":")) + "\n")


def load_plan(path) -> KappaPlan:
    return plan_from_json(json.loads(Path(path).read_text()))

"""Parameter sweeps: plan each grid point, evaluate rates and bounds, and optionally
measure them by Monte Carlo encode/decode round trips.

Sweep specification (JSON object)::

    {
      "channel": "bsc" | "ball" | "constant-weight",
      "n": 24, "q": 2,
      "grid": [0.02, "1/10", ...],      # α values (bsc) or w values (ball, constant-weight)
      "schedule": "mixed" | ["golay"] | ["trivial:24", "golay", ...],
      "epsilon": 1e-9, "cap": 20000,
      "coder": "huffman" | "elias-gamma",
      "trials": 10000, "seed": 0,
      "backend": "float" | "exact" | "auto",
      "workers": 1,
      "cache_dir": null
    }

Only ``channel``, ``n`` and ``grid`` are required.  ``schedule: "mixed"``
selects the registry ladder for the block length.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .bounds import theorem1_bounds
from .channels import NoiseModel, capacity, type_distribution
from .codec import Codec, derive_seed
from .codes import code_by_name
from .cosets import BudgetExceeded
from .gf import packed_sub, packed_weight
from .planfile import load_plan, plan_key, save_plan
from .planner import DEFAULT_CAP, SURVIVAL_FLOOR, CodeSchedule, expected_rate, plan_grsse

RATE_TOLERANCE = 1e-12
STDERR_WINDOW = 4.0


def mixed_ladder(n: int, q: int = 2) -> list:
    """Registry codes for the mixed rule, in decreasing effective distance."""
    if q == 2 and n == 24:
        names = ["trivial:24", "repetition:24", "3*hamming:8", "golay", "parity:24", "complete:24"]
    elif q == 2 and n % 24 == 0:
        r = n // 24
        names = [f"trivial:{n}", f"repetition:{n}", f"{r}*golay", f"parity:{n}", f"complete:{n}"]
    else:
        names = [f"trivial:{n}", f"repetition:{n}", f"parity:{n}", f"complete:{n}"]
    return [code_by_name(nm, n, q) for nm in names]


def _parse_param(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


@dataclass
class SweepSpec:
    channel: str
    n: int
    grid: list
    q: int = 2
    schedule: object = "mixed"
    epsilon: float = 1e-9
    cap: int = DEFAULT_CAP
    coder: str = "huffman"
    trials: int = 10000
    seed: int = 0
    backend: str = "float"
    workers: int = 1
    cache_dir: str | None = None
    survival_floor: float = SURVIVAL_FLOOR

    def __post_init__(self):
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if not self.grid:
            raise ValueError("grid must be nonempty")
        self.grid = [_parse_param(v) for v in self.grid]
        self.epsilon = _parse_param(self.epsilon)

    @classmethod
    def from_json(cls, obj) -> "SweepSpec":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
        return cls(**obj)

    def model(self, param) -> NoiseModel:
        exact = None if self.backend != "float" else False
        if self.channel in ("bsc", "q-ary-symmetric", "symmetric"):
            return NoiseModel("q-ary-symmetric", self.n, self.q, alpha=param, exact=exact)
        return NoiseModel(self.channel, self.n, self.q, w=int(param), exact=exact)

    def build_schedule(self) -> CodeSchedule:
        if self.schedule == "mixed":
            codes = mixed_ladder(self.n, self.q)
        else:
            names = [self.schedule] if isinstance(self.schedule, str) else list(self.schedule)
            codes = [code_by_name(nm, self.n, self.q) for nm in names]
        return CodeSchedule(codes, self.epsilon, self.cap)


@dataclass
class SweepRow:
    param: object
    capacity: float
    analytic_rate: float | None = None
    empirical_rate: float | None = None
    empirical_stderr: float | None = None
    mean_distortion: float | None = None
    max_distortion: int | None = None
    comm_bound: float | None = None
    expected_log2_L: float | None = None
    plan_iterations: int | None = None
    mean_L: float | None = None
    max_L: int | None = None
    above_raw: bool | None = None
    flags: list = field(default_factory=list)
    error: str | None = None


COLUMNS = [f.name for f in fields(SweepRow)]


def _plan(spec: SweepSpec, model: NoiseModel, schedule: CodeSchedule):
    if spec.cache_dir:
        key = plan_key(model, schedule, spec.backend, spec.survival_floor)
        path = Path(spec.cache_dir) / f"{key}.json"
        if path.exists():
            return load_plan(path)
        plan = plan_grsse(model, schedule, spec.backend, spec.survival_floor)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        save_plan(plan, tmp)
        tmp.replace(path)
        return plan
    return plan_grsse(model, schedule, spec.backend, spec.survival_floor)


def _pure_exact(schedule: CodeSchedule) -> bool:
    """One candidate code whose true distance is what the rule used."""
    return schedule.candidates == 1 and schedule.codes[0].distance_is_exact


def run_point(spec: SweepSpec, index: int) -> SweepRow:
    param = spec.grid[index]
    try:
        model = spec.model(param)
        schedule = spec.build_schedule()
        cap = capacity(type_distribution(model)) / spec.n
    except (ValueError, KeyError) as exc:
        return SweepRow(param, math.nan, error=str(exc), flags=["invalid"])
    row = SweepRow(param, cap)
    try:
        plan = _plan(spec, model, schedule)
    except BudgetExceeded as exc:
        row.error = str(exc)
        row.flags.append("budget")
        return row
    rate = expected_rate(plan, spec.coder)
    row.analytic_rate = rate
    row.expected_log2_L = plan.expected_log2_L()
    row.plan_iterations = len(plan)
    row.above_raw = rate >= math.log2(spec.q)
    if rate < cap - RATE_TOLERANCE:
        row.flags.append("below-capacity")
    if _pure_exact(schedule):
        report = theorem1_bounds(model, schedule.codes[0])
        row.comm_bound = report.comm_bound / spec.n
        if rate > row.comm_bound + RATE_TOLERANCE:
            row.flags.append("above-comm-bound")
    if spec.trials:
        _monte_carlo(spec, index, plan, row)
    return row


def _monte_carlo(spec: SweepSpec, index: int, plan, row: SweepRow) -> None:
    n, q = spec.n, spec.q
    codec = Codec(plan, spec.coder)
    point_seed = derive_seed(spec.seed, index)
    inputs = random.Random(point_seed)
    bits, dists, Ls = [], [], []
    mismatches = 0
    for t in range(spec.trials):
        x = inputs.randrange(q ** n)
        seed = derive_seed(point_seed, t)
        y, L, msg = codec.encode_packed(x, seed)
        y2, _ = codec.decode_at(msg.bits, 0, seed)
        mismatches += y2 != y
        bits.append(len(msg.bits))
        dists.append(packed_weight(packed_sub(y, x, n, q), n, q))
        Ls.append(L)
    T = spec.trials
    mean_bits = math.fsum(bits) / T
    var = math.fsum((b - mean_bits) ** 2 for b in bits) / (T - 1) if T > 1 else 0.0
    row.empirical_rate = mean_bits / n
    row.empirical_stderr = math.sqrt(var / T) / n
    row.mean_distortion = math.fsum(dists) / T / n
    row.max_distortion = max(dists)
    row.mean_L = math.fsum(Ls) / T
    row.max_L = max(Ls)
    if mismatches:
        row.flags.append("decode-mismatch")
    if spec.channel == "ball" and row.max_distortion > int(row.param):
        row.flags.append("distortion")
    if spec.channel == "constant-weight" and any(d != int(row.param) for d in dists):
        row.flags.append("distortion")
    window = STDERR_WINDOW * row.empirical_stderr
    if q == 2 and abs(row.empirical_rate - row.analytic_rate) > max(window, RATE_TOLERANCE):
        # for q > 2 the wire carries ⌈log2 q⌉ bits per symbol, above the analytic log2 q
        row.flags.append("rate-mismatch")


def run_sweep(spec: SweepSpec) -> list:
    indices = range(len(spec.grid))
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(run_point, [spec] * len(spec.grid), indices))
    return [run_point(spec, i) for i in indices]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ";".join(v)
    return str(v)


def emit_csv(rows, out=None) -> str:
    """RFC 4180 CSV in :data:`COLUMNS` order; also written to ``out`` when given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([_cell(getattr(r, c)) for c in COLUMNS])
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text, newline="")
    return text


def any_flags(rows) -> bool:
    return any(r.flags for r in rows)

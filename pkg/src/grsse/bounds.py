"""Closed-form performance bounds and a reference greedy rejection sampler."""
from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .channels import NoiseModel, capacity, tail_weight_probability, type_distribution
from .codes import INF, LinearCode

# (1 + 1/e)·log2(e), the greedy rejection sampling overhead constant
ETA = (1.0 + math.exp(-1.0)) * math.log2(math.e)


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    capacity: float
    eta: float
    tail: float
    elogl_bound: float
    comm_bound: float

    @property
    def capacity_per_symbol(self) -> float:
        return self.capacity / self.n

    @property
    def comm_bound_per_symbol(self) -> float:
        return self.comm_bound / self.n

    def as_dict(self) -> dict:
        out = asdict(self)
        out["capacity_per_symbol"] = self.capacity_per_symbol
        out["comm_bound_per_symbol"] = self.comm_bound_per_symbol
        return out


def theorem1_bounds(channel: NoiseModel, code: LinearCode) -> BoundReport:
    """Bounds on E[log2 L] and on the expected message length for a pure schedule.

    Uses the code's true minimum distance.
    """
    if (channel.n, channel.q) != (code.n, code.q):
        raise ValueError("channel and code disagree on (n, q)")
    d = code.distance
    if d is None:
        raise ValueError(f"distance of {code.name} is unknown")
    dist = type_distribution(channel)
    c = capacity(dist)
    tail = 0.0 if d == INF else float(tail_weight_probability(dist, Fraction(d) / 2))
    payload = code.k * math.log2(code.q)
    elogl = c - (1.0 - tail) * payload + ETA + 1.0
    if elogl + 1.0 <= 0:
        raise ValueError("bound argument is not positive")
    comm = c + tail * payload + math.log2(elogl + 1.0) + ETA + 3.0
    return BoundReport(code.n, code.k, c, ETA, tail, elogl, comm)


def lemma2_bound(dkl: float, theta: float) -> float:
    """dkl − log2 θ + η: the E[log2 L] bound for per-iteration acceptance at least θ·(greedy)."""
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if dkl < 0:
        raise ValueError("KL divergence is nonnegative")
    return dkl - math.log2(theta) + ETA


def kl_divergence_bits(target, proposal) -> float:
    total = 0.0
    for p, q in zip(target, proposal):
        if p > 0:
            if q <= 0:
                raise ValueError("target is not absolutely continuous w.r.t. the proposal")
            total += p * math.log2(p / q)
    return total


# ---------------------------------------------------------------------------
# greedy rejection sampling


class GreedyRejectionPlan:
    """Per-iteration acceptance probabilities a_i(x) = min{r_i(x), Q(x)} / Q(x).

    ``r_i`` is the target conditioned on no acceptance before iteration i.
    Iterations are planned on demand; once an iteration accepts with
    probability one the schedule stops growing.
    """

    def __init__(self, target, proposal):
        self.target = np.asarray(target, dtype=float)
        self.proposal = np.asarray(proposal, dtype=float)
        if self.target.shape != self.proposal.shape or self.target.ndim != 1:
            raise ValueError("target and proposal must be 1-D pmfs of equal size")
        for name, v in (("target", self.target), ("proposal", self.proposal)):
            if (v < 0).any() or abs(v.sum() - 1) > 1e-9:
                raise ValueError(f"{name} is not a pmf")
        if ((self.target > 0) & (self.proposal <= 0)).any():
            raise ValueError("target is not absolutely continuous w.r.t. the proposal")
        self._residual = self.target.copy()
        self.accept: list = []
        self.done = False

    def extend(self, count: int) -> None:
        while len(self.accept) < count and not self.done:
            r, q = self._residual, self.proposal
            taken = np.minimum(r, q)
            f = taken.sum()
            with np.errstate(divide="ignore", invalid="ignore"):
                a = np.where(q > 0, taken / q, 0.0)
            if f >= 1.0 - 1e-12:
                a = np.where(q > 0, r / q, 0.0)  # flush what is left
                self.done = True
            self.accept.append(a)
            if not self.done:
                r = np.maximum(r - taken, 0.0)
                self._residual = r / r.sum()

    def acceptance(self, i: int) -> np.ndarray:
        """Acceptance vector of iteration i (1-based); reuses the last one past a finished plan."""
        self.extend(i)
        return self.accept[min(i, len(self.accept)) - 1]


def grs_reference(target, proposal, seed) -> tuple[int, int]:
    """One greedy rejection sampling run; returns (sample index, iteration count L)."""
    plan = GreedyRejectionPlan(target, proposal)
    rng = random.Random(seed)
    cum = np.cumsum(plan.proposal)
    i = 0
    while True:
        i += 1
        x = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        x = min(x, len(cum) - 1)
        if rng.random() < plan.acceptance(i)[x]:
            return x, i


def grs_reference_batch(target, proposal, runs: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """``runs`` independent runs at once; returns (samples, iteration counts)."""
    plan = GreedyRejectionPlan(target, proposal)
    rng = np.random.default_rng(seed)
    samples = np.full(runs, -1, dtype=np.int64)
    counts = np.zeros(runs, dtype=np.int64)
    active = np.arange(runs)
    i = 0
    while active.size:
        i += 1
        x = rng.choice(len(plan.proposal), size=active.size, p=plan.proposal)
        hit = rng.random(active.size) < plan.acceptance(i)[x]
        done = active[hit]
        samples[done] = x[hit]
        counts[done] = i
        active = active[~hit]
    return samples, counts

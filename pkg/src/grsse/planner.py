"""Greedy acceptance planning: one max flow per iteration over type sets and types.

Each iteration pairs the current residual noise law (over types) with the
type-set distribution of the chosen code and routes as much probability as
possible from type sets to the types they contain.  The flow gives the
acceptance masses γ, the acceptance probability F and the next residual.
"""
from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bitcodes import HuffmanCode, elias_gamma_length
from .channels import NoiseModel, TypeDistribution, tail_weight_probability, type_distribution
from .codes import INF, LinearCode, complete_code
from .cosets import TypeSetDistribution
from .gf import all_types, type_class_size

DEFAULT_CAP = 20000
DEFAULT_EPSILON = 1e-9
EXACT_ITERATION_LIMIT = 512
FLOAT_TERMINAL_SLACK = 1e-12
SURVIVAL_FLOOR = 1e-18
BACKENDS = ("exact", "float", "auto")


# ---------------------------------------------------------------------------
# max flow


def max_flow(source_caps: Sequence, sink_caps: Sequence, adjacency: Sequence[Sequence[int]]):
    """Maximum flow on a bipartite network with uncapacitated middle edges.

    ``source_caps[t]`` caps the flow into left node t, ``sink_caps[p]`` the
    flow out of right node p, and ``adjacency[t]`` lists the right nodes
    reachable from t.  Works on any ordered field (``Fraction`` or ``float``).

    A greedy pass fills right nodes in index order, each from left nodes in
    index order; Edmonds–Karp augmentations then make the flow maximum.
    Both passes visit nodes in index order, so the result is deterministic.

    Returns (total, flows) with ``flows`` mapping (t, p) to a positive amount.
    """
    n_left, n_right = len(source_caps), len(sink_caps)
    zero = 0 * (source_caps[0] if n_left else 0)
    left_rem = list(source_caps)
    right_rem = list(sink_caps)
    flows: dict = {}
    into = [[] for _ in range(n_right)]  # left neighbours of each right node, in order
    for t in range(n_left):
        for p in adjacency[t]:
            into[p].append(t)

    for p in range(n_right):
        for t in into[p]:
            if right_rem[p] <= 0:
                break
            amount = min(left_rem[t], right_rem[p])
            if amount > 0:
                left_rem[t] -= amount
                right_rem[p] -= amount
                flows[(t, p)] = flows.get((t, p), zero) + amount

    while True:
        path = _augmenting_path(left_rem, right_rem, flows, adjacency, into)
        if path is None:
            break
        # path alternates left, right, left, ..., right
        bottleneck = min(left_rem[path[0]], right_rem[path[-1]])
        for j in range(2, len(path), 2):
            bottleneck = min(bottleneck, flows[(path[j], path[j - 1])])
        left_rem[path[0]] -= bottleneck
        right_rem[path[-1]] -= bottleneck
        for j in range(0, len(path) - 1, 2):
            key = (path[j], path[j + 1])
            flows[key] = flows.get(key, zero) + bottleneck
        for j in range(2, len(path), 2):
            key = (path[j], path[j - 1])
            flows[key] -= bottleneck
            if flows[key] <= 0:
                del flows[key]

    flows = {k: v for k, v in flows.items() if v > 0}
    total = sum(flows.values(), zero)
    return total, flows


def _augmenting_path(left_rem, right_rem, flows, adjacency, into):
    """Shortest src→sink path in the residual graph, as alternating node ids."""
    parent_left: dict = {}
    parent_right: dict = {}
    queue = deque()
    for t, rem in enumerate(left_rem):
        if rem > 0:
            parent_left[t] = None
            queue.append(t)
    while queue:
        t = queue.popleft()
        for p in adjacency[t]:
            if p in parent_right:
                continue
            parent_right[p] = t
            if right_rem[p] > 0:
                path = [p]
                while True:
                    tt = parent_right[path[-1]]
                    path.append(tt)
                    back = parent_left[tt]
                    if back is None:
                        break
                    path.append(back)
                return path[::-1]
            for t2 in into[p]:
                if t2 not in parent_left and flows.get((t2, p), 0) > 0:
                    parent_left[t2] = p
                    queue.append(t2)
    return None


# ---------------------------------------------------------------------------
# one iteration


@dataclass(frozen=True)
class IterationPlan:
    """Acceptance masses of one iteration.

    ``gamma`` lists (typeset id, type, mass) with positive mass, ordered by
    type set then type.  ``residual`` is the noise law the iteration targets
    and ``residual_next`` the law left for later iterations.  Plans read
    back from disk carry neither.
    """

    code_index: int
    gamma: tuple
    accept_prob: object
    terminal: bool
    residual: TypeDistribution | None = None
    residual_next: TypeDistribution | None = None

    def gamma_by_typeset(self) -> dict:
        out: dict = {}
        for tid, p, mass in self.gamma:
            out.setdefault(tid, []).append((p, mass))
        return out

    def accepted_mass(self, p) -> object:
        return sum((m for _, pp, m in self.gamma if pp == p), 0 * self.accept_prob)


def _ordered_types(n: int, q: int) -> list:
    return all_types(n, q)


def plan_iteration(residual: TypeDistribution, tsd: TypeSetDistribution, code_index: int = 0,
                   force_terminal: bool = False) -> IterationPlan:
    """Maximize the acceptance probability for one code against ``residual``.

    ``force_terminal`` treats an acceptance within 1e−12 of one as complete
    (binary64 plans only); callers normally leave it off.
    """
    if (residual.n, residual.q) != (tsd.n, tsd.q):
        raise ValueError("residual and code disagree on (n, q)")
    exact = residual.exact and tsd.exact
    types = _ordered_types(residual.n, residual.q)
    type_index = {p: j for j, p in enumerate(types)}
    conv = (lambda x: x) if exact else float
    source = [conv(x) for x in tsd.probs]
    sink = [conv(residual[p]) for p in types]
    adjacency = [sorted(type_index[p] for p in t) for t in tsd.typesets]
    total, flows = max_flow(source, sink, adjacency)
    gamma = tuple((tid, types[j], m) for (tid, j), m in sorted(flows.items()))
    if exact:
        accept = total
        done = accept == 1
    else:
        accept = min(float(total), 1.0)
        done = accept == 1.0 or (force_terminal and 1.0 - accept <= FLOAT_TERMINAL_SLACK)
    left = list(sink)
    for (_, j), m in flows.items():
        left[j] -= m
    if not exact and all(x <= 0 for x in left):
        # every type fully served; the shortfall from one is rounding
        done = True
    if done:
        return IterationPlan(code_index, gamma, accept, True, residual)
    scale = 1 - accept
    if exact:
        nxt = {p: left[j] / scale for j, p in enumerate(types)}
    else:
        clamped = [min(max(x / scale, 0.0), 1.0) for x in left]
        norm = math.fsum(clamped)
        nxt = {p: clamped[j] / norm for j, p in enumerate(types)}
    return IterationPlan(code_index, gamma, accept, False, residual,
                         TypeDistribution(residual.n, residual.q, nxt))


def beta_mixture_bound(residual: TypeDistribution, code: LinearCode, beta) -> object:
    """Acceptance of the proposal that mixes coset leaders (weight β) with uniform noise.

    Σ_p min{residual(p), β·leader_mass(p) + (1−β)·N_p·q^{−n}}, where
    leader_mass(p) is the fraction of cosets whose leader has type p.  The
    greedy plan can never accept less than this.
    """
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    leaders = code.cosets.leader_type_counts()
    cosets = code.q ** code.m
    vectors = code.q ** code.n
    exact = residual.exact and isinstance(beta, (int, Fraction))
    total = Fraction(0) if exact else 0.0
    for p, r in residual.mass.items():
        if r <= 0:
            continue
        proposal = Fraction(beta) * Fraction(leaders.get(p, 0), cosets) \
            + (1 - Fraction(beta)) * Fraction(type_class_size(p), vectors)
        total += min(r, proposal) if exact else min(float(r), float(proposal))
    return total


# ---------------------------------------------------------------------------
# schedules and plans


@dataclass
class CodeSchedule:
    """Candidate codes in decreasing effective distance, plus the selection threshold.

    If no candidate is the complete code, one is appended so the iteration
    cap has something to fall back on; the selection rule never picks it.
    """

    codes: list
    epsilon: float | Fraction = DEFAULT_EPSILON
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not self.codes:
            raise ValueError("schedule needs at least one code")
        n, q = self.codes[0].n, self.codes[0].q
        if any((c.n, c.q) != (n, q) for c in self.codes):
            raise ValueError("all codes in a schedule must share (n, q)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.cap < 1:
            raise ValueError("cap must be at least 1")
        dists = [c.effective_distance for c in self.codes]
        if any(not a > b for a, b in zip(dists, dists[1:])):
            raise ValueError(f"effective distances must strictly decrease, got {dists}")
        self.candidates = len(self.codes)
        idx = [i for i, c in enumerate(self.codes) if c.k == c.n]
        if idx:
            self.complete_index = idx[0]
        else:
            self.codes = list(self.codes) + [complete_code(n, q)]
            self.complete_index = len(self.codes) - 1

    @property
    def n(self) -> int:
        return self.codes[0].n

    @property
    def q(self) -> int:
        return self.codes[0].q

    @property
    def names(self) -> list:
        return [c.name for c in self.codes]

    def select(self, residual: TypeDistribution) -> int:
        """Largest j with P(wt ≥ d̃_j/2) ≤ ε; the first code when none qualifies."""
        chosen = 0
        eps = self.epsilon if residual.exact else float(self.epsilon)
        for j, code in enumerate(self.codes[:self.candidates]):
            d = code.effective_distance
            if d == INF:
                tail = 0
            else:
                tail = tail_weight_probability(residual, Fraction(d) / 2)
            if tail <= eps:
                chosen = j
        return chosen


@dataclass
class KappaPlan:
    """A sequence of planned iterations with the law of the accepting index L.

    ``p_L[i]`` is the probability that iteration i+1 accepts; iterations are
    1-based in :meth:`iteration`, matching L.
    """

    channel: NoiseModel
    schedule: CodeSchedule
    backend: str
    iterations: list = field(default_factory=list)
    p_L: list = field(default_factory=list)
    survival: object = 1
    survival_floor: float = SURVIVAL_FLOOR

    @property
    def codes(self) -> list:
        return self.schedule.codes

    @property
    def n(self) -> int:
        return self.schedule.n

    @property
    def q(self) -> int:
        return self.schedule.q

    @property
    def terminal(self) -> bool:
        return bool(self.iterations) and self.iterations[-1].terminal

    def __len__(self):
        return len(self.iterations)

    def iteration(self, index: int) -> IterationPlan:
        if not 1 <= index <= len(self.iterations):
            raise IndexError(f"plan has no iteration {index}")
        return self.iterations[index - 1]

    def code_at(self, index: int) -> LinearCode:
        return self.codes[self.iteration(index).code_index]

    def k_sequence(self) -> list:
        return [self.codes[it.code_index].k for it in self.iterations]

    def expected_log2_L(self) -> float:
        return math.fsum(float(p) * math.log2(i + 1) for i, p in enumerate(self.p_L))

    def expected_iterations(self) -> float:
        return math.fsum(float(p) * (i + 1) for i, p in enumerate(self.p_L))

    def output_type_law(self) -> dict:
        """Σ_i S_i·Σ_t γ_{i,t,p} for every type p: the law of the output noise type."""
        out: dict = {}
        s = 1
        for it in self.iterations:
            for _, p, m in it.gamma:
                out[p] = out.get(p, 0) + s * m
            s = s * (1 - it.accept_prob)
        return out


# ---------------------------------------------------------------------------
# the planner


class _Planner:
    """Stateful iteration generator shared by eager and lazy plans."""

    def __init__(self, channel: NoiseModel, schedule: CodeSchedule, exact: bool,
                 survival_floor: float = SURVIVAL_FLOOR):
        dist = type_distribution(channel)
        if not exact:
            dist = dist.to_float()
        elif not dist.exact:
            raise ValueError("exact backend needs a rational channel")
        self.exact = exact
        self.schedule = schedule
        self.residual = dist
        self.survival = Fraction(1) if exact else 1.0
        self.floor = survival_floor
        self.done = False
        self._tsd = {}

    def tsd(self, j: int) -> TypeSetDistribution:
        if j not in self._tsd:
            t = self.schedule.codes[j].cosets.tsd
            self._tsd[j] = t if self.exact else t.to_float()
        return self._tsd[j]

    def step(self, index: int) -> tuple[IterationPlan, object]:
        """Plan iteration ``index`` (1-based); returns the plan and p_L(index)."""
        if self.done:
            raise RuntimeError("plan already terminal")
        sch = self.schedule
        forced = index >= sch.cap or (not self.exact and self.survival < self.floor)
        j = sch.complete_index if forced else sch.select(self.residual)
        it = plan_iteration(self.residual, self.tsd(j), j)
        if not it.terminal and not self.exact and 1.0 - it.accept_prob <= FLOAT_TERMINAL_SLACK:
            # leftover mass below float resolution: hand it to the complete code next
            self.floor = math.inf
        mass = self.survival * it.accept_prob
        if it.terminal:
            self.done = True
            self.survival = 0 * self.survival
        else:
            self.survival = self.survival * (1 - it.accept_prob)
            self.residual = it.residual_next
        return it, mass


def _resolve_backend(channel: NoiseModel, backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}")
    if backend == "exact" and not channel.exact:
        raise ValueError("exact backend needs a rational channel")
    if backend == "auto":
        return "auto" if channel.exact else "float"
    return backend


def plan_grsse(channel: NoiseModel, schedule: CodeSchedule, backend: str = "auto",
               survival_floor: float = SURVIVAL_FLOOR) -> KappaPlan:
    """Run the planner until an iteration accepts with probability one.

    ``auto`` plans with rationals and restarts in binary64 if more than
    512 iterations are needed.  ``survival_floor`` applies to binary64 plans:
    once P(L > i) drops below it the complete code closes the plan.
    """
    if (channel.n, channel.q) != (schedule.n, schedule.q):
        raise ValueError("channel and schedule disagree on (n, q)")
    mode = _resolve_backend(channel, backend)
    if mode in ("exact", "auto"):
        limit = EXACT_ITERATION_LIMIT if mode == "auto" else None
        plan = _run(channel, schedule, True, survival_floor, limit)
        if plan is not None:
            return plan
    return _run(channel, schedule, False, survival_floor, None)


def _run(channel, schedule, exact, floor, limit) -> KappaPlan | None:
    planner = _Planner(channel, schedule, exact, floor)
    plan = KappaPlan(channel, schedule, "exact" if exact else "float", survival_floor=floor)
    i = 0
    while not planner.done:
        i += 1
        if limit is not None and i > limit:
            return None
        it, mass = planner.step(i)
        plan.iterations.append(it)
        plan.p_L.append(mass)
    plan.survival = planner.survival
    return plan


class LazyKappaPlan(KappaPlan):
    """A plan whose iterations are computed when first requested.

    Readers of already-planned iterations never block; extension is
    serialized by a lock.
    """

    def __init__(self, channel: NoiseModel, schedule: CodeSchedule, backend: str = "float",
                 survival_floor: float = SURVIVAL_FLOOR):
        mode = _resolve_backend(channel, backend)
        super().__init__(channel, schedule, "exact" if mode == "exact" else "float",
                         survival_floor=survival_floor)
        self._planner = _Planner(channel, schedule, self.backend == "exact", survival_floor)
        self._lock = threading.Lock()

    def iteration(self, index: int) -> IterationPlan:
        if index < 1:
            raise IndexError("iterations are 1-based")
        if index > len(self.iterations):
            with self._lock:
                while len(self.iterations) < index and not self._planner.done:
                    it, mass = self._planner.step(len(self.iterations) + 1)
                    self.iterations.append(it)
                    self.p_L.append(mass)
                self.survival = self._planner.survival
        return super().iteration(index)

    def materialize(self) -> KappaPlan:
        """Plan every remaining iteration and return an ordinary plan."""
        while not self._planner.done:
            self.iteration(len(self.iterations) + 1)
        return KappaPlan(self.channel, self.schedule, self.backend, list(self.iterations),
                         list(self.p_L), self.survival, self.survival_floor)


# ---------------------------------------------------------------------------
# rates


def index_code_lengths(plan: KappaPlan, coder: str) -> list:
    """Codeword length of each iteration index under the chosen prefix code."""
    if coder == "huffman":
        book = HuffmanCode(plan.p_L)
        return [len(book.codebook.get(i + 1, "")) for i in range(len(plan.p_L))]
    if coder == "elias-gamma":
        return [elias_gamma_length(i + 1) for i in range(len(plan.p_L))]
    raise ValueError(f"unknown index coder {coder!r}")


def expected_rate(plan: KappaPlan, coder: str = "huffman") -> float:
    """Expected bits per symbol: (E|code(L)| + E[k_L]·log2 q) / n."""
    if not plan.terminal:
        raise ValueError("expected rate needs a terminal plan")
    lengths = index_code_lengths(plan, coder)
    ks = plan.k_sequence()
    logq = math.log2(plan.q)
    bits = math.fsum(float(p) * (lengths[i] + ks[i] * logq) for i, p in enumerate(plan.p_L))
    return bits / plan.n

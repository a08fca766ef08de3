import math
import random
from fractions import Fraction
from math import comb

import networkx as nx
import numpy as np
import pytest
from scipy.optimize import linprog

from grsse.channels import NoiseModel, TypeDistribution, type_distribution
from grsse.codes import code_by_name, complete_code, golay_code, hamming_code, repetition_code, trivial_code
from grsse.gf import all_types, type_class_size
from grsse.planner import (
    CodeSchedule,
    IterationPlan,
    KappaPlan,
    LazyKappaPlan,
    beta_mixture_bound,
    expected_rate,
    max_flow,
    plan_grsse,
    plan_iteration,
)
from grsse.bounds import ETA


def random_bipartite(rng, n_left, n_right, density=0.4):
    src = [rng.randint(0, 20) for _ in range(n_left)]
    snk = [rng.randint(0, 20) for _ in range(n_right)]
    adj = [sorted(p for p in range(n_right) if rng.random() < density) for _ in range(n_left)]
    return src, snk, adj


def networkx_max_flow(src, snk, adj):
    g = nx.DiGraph()
    for t, c in enumerate(src):
        g.add_edge("s", ("L", t), capacity=c)
        for p in adj[t]:
            g.add_edge(("L", t), ("R", p))
    for p, c in enumerate(snk):
        g.add_edge(("R", p), "t", capacity=c)
    g.add_node("s")
    g.add_node("t")
    return nx.maximum_flow_value(g, "s", "t")


@pytest.mark.parametrize("seed", range(40))
def test_max_flow_matches_networkx(seed):
    rng = random.Random(seed)
    src, snk, adj = random_bipartite(rng, rng.randint(1, 8), rng.randint(1, 10))
    total, flows = max_flow(src, snk, adj)
    assert total == networkx_max_flow(src, snk, adj)
    for (t, p), f in flows.items():
        assert f > 0 and p in adj[t]
    for t, c in enumerate(src):
        assert sum(f for (tt, _), f in flows.items() if tt == t) <= c
    for p, c in enumerate(snk):
        assert sum(f for (_, pp), f in flows.items() if pp == p) <= c


def test_max_flow_fractions_and_determinism():
    rng = random.Random(3)
    src, snk, adj = random_bipartite(rng, 6, 8, 0.5)
    fs = [Fraction(c, 7) for c in src]
    gs = [Fraction(c, 11) for c in snk]
    a = max_flow(fs, gs, adj)
    b = max_flow(fs, gs, adj)
    assert a == b
    assert a[0] == Fraction(networkx_max_flow([c * 11 for c in src], [c * 7 for c in snk], adj), 77)


def lp_acceptance(residual, tsd):
    """max Σγ subject to per-typeset and per-type capacities, via scipy."""
    types = all_types(residual.n, residual.q)
    edges = [(ti, j) for ti, t in enumerate(tsd.typesets) for j, p in enumerate(types) if p in t]
    A, b = [], []
    for ti, cap in enumerate(tsd.probs):
        A.append([1.0 if e[0] == ti else 0.0 for e in edges])
        b.append(float(cap))
    for j, p in enumerate(types):
        A.append([1.0 if e[1] == j else 0.0 for e in edges])
        b.append(float(residual[p]))
    res = linprog(-np.ones(len(edges)), A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    return -res.fun


def random_residual(rng, n, q=2):
    types = all_types(n, q)
    w = [rng.random() ** 3 for _ in types]
    s = math.fsum(w)
    mass = {p: x / s for p, x in zip(types, w)}
    # renormalize the last entry so the float sum is as close to 1 as possible
    last = types[-1]
    mass[last] = 1.0 - math.fsum(v for p, v in mass.items() if p != last)
    return TypeDistribution(n, q, mass)


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("name,n", [("hamming", 7), ("hamming:8", 8), ("repetition", 6), ("2*repetition:3", 6)])
def test_iteration_matches_linear_program(seed, name, n):
    rng = random.Random(seed)
    code = code_by_name(name, n)
    residual = random_residual(rng, n)
    it = plan_iteration(residual, code.cosets.tsd.to_float())
    assert it.accept_prob == pytest.approx(lp_acceptance(residual, code.cosets.tsd), abs=1e-12)
    # flow respects the bipartite structure
    by_set = it.gamma_by_typeset()
    for tid, entries in by_set.items():
        assert all(p in code.cosets.tsd.typesets[tid] for p, _ in entries)
        assert math.fsum(m for _, m in entries) <= float(code.cosets.tsd.probs[tid]) + 1e-15


def test_complete_code_accepts_everything():
    dist = type_distribution(NoiseModel.bsc(5, Fraction(1, 3)))
    it = plan_iteration(dist, complete_code(5).cosets.tsd)
    assert it.terminal and it.accept_prob == 1
    assert all(it.accepted_mass(p) == dist[p] for p in all_types(5, 2))


def test_repetition_ball_single_iteration():
    dist = type_distribution(NoiseModel.ball(3, 1))
    it = plan_iteration(dist, repetition_code(3).cosets.tsd)
    assert it.terminal and it.accept_prob == 1
    assert it.gamma == ((0, (3, 0), Fraction(1, 4)), (1, (2, 1), Fraction(3, 4)))


def test_trivial_code_is_greedy_rejection_sampling():
    n = 6
    dist = type_distribution(NoiseModel.bsc(n, Fraction(1, 10)))
    it = plan_iteration(dist, trivial_code(n).cosets.tsd)
    uniform = {p: Fraction(type_class_size(p), 2 ** n) for p in all_types(n, 2)}
    assert it.accept_prob == sum(min(dist[p], uniform[p]) for p in uniform)
    for p in uniform:
        left = dist[p] - min(dist[p], uniform[p])
        assert it.residual_next[p] == left / (1 - it.accept_prob)


def test_golay_ball_first_iteration(golay):
    dist = type_distribution(NoiseModel.ball(24, 3))
    it = plan_iteration(dist, golay.cosets.tsd)
    # type sets 0..3 hold weights 0..3 with 1, 24, 276, 2024 cosets, all below the residual
    assert it.accept_prob == Fraction(2325, 4096)
    for w in range(4):
        assert it.accepted_mass((24 - w, w)) == Fraction(comb(24, w), 4096)


def test_golay_beta_half_bound(golay):
    dist = type_distribution(NoiseModel.ball(24, 3))
    bound = beta_mixture_bound(dist, golay, Fraction(1, 2))
    expected = sum(min(Fraction(comb(24, w), 2325),
                       comb(24, w) * (Fraction(1, 2 ** 13) + Fraction(1, 2 ** 25))) for w in range(4))
    assert bound == expected
    assert float(bound) == pytest.approx(0.2838828, abs=1e-7)


def test_beta_bound_special_cases(golay):
    dist = type_distribution(NoiseModel.bsc(24, Fraction(1, 20)))
    zero = beta_mixture_bound(dist, golay, 0)
    assert zero == sum(min(dist[p], Fraction(type_class_size(p), 2 ** 24)) for p in all_types(24, 2))
    point = TypeDistribution(24, 2, {(24, 0): Fraction(1)})
    beta = Fraction(1, 3)
    # the zero vector leads one of the 2^12 cosets
    assert beta_mixture_bound(point, golay, beta) == beta / 2 ** 12 + (1 - beta) / 2 ** 24
    assert beta_mixture_bound(point, complete_code(24), beta) == beta + (1 - beta) / 2 ** 24
    with pytest.raises(ValueError):
        beta_mixture_bound(point, golay, 2)


@pytest.mark.parametrize("channel", [NoiseModel.ball(7, 2), NoiseModel.bsc(7, Fraction(1, 8)),
                                     NoiseModel.constant_weight(7, 3)])
def test_exact_plan_reconstructs_channel(channel):
    schedule = CodeSchedule([hamming_code()], cap=64)
    plan = plan_grsse(channel, schedule, "exact")
    assert plan.terminal and plan.backend == "exact"
    assert sum(plan.p_L) == 1
    assert plan.output_type_law() == {p: v for p, v in type_distribution(channel).mass.items() if v}
    # the per-iteration β = 1/2 witness never beats the flow
    for it in plan.iterations:
        code = plan.codes[it.code_index]
        assert it.accept_prob >= beta_mixture_bound(it.residual, code, Fraction(1, 2))


def test_survival_telescopes():
    channel = NoiseModel.bsc(8, Fraction(1, 5))
    plan = plan_grsse(channel, CodeSchedule([trivial_code(8)], cap=40), "exact")
    s = Fraction(1)
    for it, p in zip(plan.iterations, plan.p_L):
        assert p == s * it.accept_prob
        s *= 1 - it.accept_prob
    assert s == 0 and plan.survival == 0


def test_cap_forces_complete_code():
    # weight-1 noise on a code whose type sets never cover it fully keeps a constant residual
    plan = plan_grsse(NoiseModel.ball(7, 1), CodeSchedule([hamming_code(extended=False)], cap=5), "exact")
    assert len(plan) <= 5
    plan6 = plan_grsse(NoiseModel.ball(6, 1), CodeSchedule([code_by_name("2*repetition:3", 6)], cap=4), "exact")
    assert len(plan6) == 4
    assert plan6.iteration(4).code_index == plan6.schedule.complete_index
    assert sum(plan6.p_L) == 1


def test_golay_ball_plan_within_bound(golay):
    plan = plan_grsse(NoiseModel.ball(24, 3), CodeSchedule([golay]))
    capacity = 24 - math.log2(2325)
    assert plan.expected_log2_L() <= capacity - 12 + ETA + 1
    assert plan.iteration(1).accept_prob == pytest.approx(2325 / 4096, rel=1e-15)
    assert all(it.code_index == 0 for it in plan.iterations[:-1])
    assert math.fsum(plan.p_L) == pytest.approx(1.0, abs=1e-12)


def test_noiseless_channel_mixed_schedule():
    codes = [code_by_name(nm, 24) for nm in ("trivial:24", "golay", "complete:24")]
    plan = plan_grsse(NoiseModel.ball(24, 0), CodeSchedule(codes))
    assert plan.terminal and sum(plan.p_L) == 1
    # the rule picks the largest code whose tail is small: the complete code
    assert plan.k_sequence() == [24]
    assert expected_rate(plan) == 1.0


def test_mixed_rule_selection():
    codes = [code_by_name(nm, 24) for nm in ("trivial:24", "golay", "parity:24")]
    sch = CodeSchedule(codes, epsilon=Fraction(1, 10**9))
    assert sch.candidates == 3 and sch.names[-1] == "complete:24"
    ball3 = type_distribution(NoiseModel.ball(24, 3))
    assert sch.select(ball3) == 1
    assert sch.select(type_distribution(NoiseModel.ball(24, 0))) == 2
    assert sch.select(type_distribution(NoiseModel.ball(24, 12))) == 0


def test_expected_rate_examples(golay):
    channel = NoiseModel.ball(24, 3)
    sch = CodeSchedule([golay])
    its = [IterationPlan(0, (), Fraction(1, 2), False), IterationPlan(0, (), Fraction(1, 2), False),
           IterationPlan(0, (), Fraction(1), True)]
    plan = KappaPlan(channel, sch, "exact", its, [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    assert expected_rate(plan) == pytest.approx(0.5625, abs=1e-15)
    assert expected_rate(plan, "elias-gamma") == pytest.approx((0.5 + 0.75 + 0.75 + 12) / 24, abs=1e-15)
    only = plan_grsse(NoiseModel.bsc(24, Fraction(1, 10)), CodeSchedule([complete_code(24)]))
    assert len(only) == 1 and expected_rate(only) == 1.0
    open_plan = KappaPlan(channel, sch, "exact", its[:1], [Fraction(1, 2)])
    with pytest.raises(ValueError):
        expected_rate(open_plan)
    with pytest.raises(IndexError):
        plan.iteration(4)


def test_lazy_plan_matches_eager(golay):
    channel = NoiseModel.ball(24, 2)
    sch = CodeSchedule([golay, code_by_name("parity:24", 24)])
    eager = plan_grsse(channel, sch, "float")
    lazy = LazyKappaPlan(channel, sch, "float")
    assert lazy.iteration(3).gamma == eager.iteration(3).gamma
    assert len(lazy) == 3
    full = lazy.materialize()
    assert full.p_L == eager.p_L
    assert [it.gamma for it in full.iterations] == [it.gamma for it in eager.iterations]


def test_auto_backend():
    assert plan_grsse(NoiseModel.ball(3, 1), CodeSchedule([repetition_code(3)])).backend == "exact"
    assert plan_grsse(NoiseModel.bsc(6, 0.1), CodeSchedule([trivial_code(6)]), "auto").backend == "float"
    with pytest.raises(ValueError):
        plan_grsse(NoiseModel.bsc(6, 0.1), CodeSchedule([trivial_code(6)]), "exact")
    with pytest.raises(ValueError):
        plan_grsse(NoiseModel.bsc(6, 0.1), CodeSchedule([trivial_code(6)]), "fast")


def test_float_and_exact_plans_agree():
    channel = NoiseModel.bsc(7, Fraction(1, 10))
    sch = CodeSchedule([hamming_code()], cap=30)
    exact = plan_grsse(channel, sch, "exact")
    approx = plan_grsse(channel, sch, "float")
    assert len(approx) <= len(exact)
    for a, b in zip(approx.p_L, exact.p_L):
        assert a == pytest.approx(float(b), abs=1e-12)


def test_schedule_validation():
    with pytest.raises(ValueError):
        CodeSchedule([])
    with pytest.raises(ValueError):
        CodeSchedule([hamming_code(), repetition_code(7)])
    with pytest.raises(ValueError):
        CodeSchedule([golay_code(), hamming_code()])
    with pytest.raises(ValueError):
        CodeSchedule([golay_code()], epsilon=0)
    with pytest.raises(ValueError):
        CodeSchedule([golay_code()], cap=0)
    with pytest.raises(ValueError):
        plan_grsse(NoiseModel.ball(7, 1), CodeSchedule([golay_code()]))

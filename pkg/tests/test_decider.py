import random

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nupbrlab.decider import deflator_from_densities, nupbr_check, predictable_fv_check, verify_verdict
from nupbrlab.harness import ModelGenParams, gen_model, random_nupbr_process, random_staircase
from nupbrlab.prob import FiniteProbSpace, Filtration, Partition, reweight
from nupbrlab.process import Process, stop

import oracle

seeds = st.integers(0, 10**9)


def _random_adapted(rng, F, n, lo=-2, hi=2):
    rows = [[mpq(0)] * n]
    for t in range(1, F.horizon + 1):
        row = list(rows[-1])
        for b in F[t].blocks:
            x = rng.randint(lo, hi)
            for w in b:
                row[w] += x
        rows.append(row)
    return Process(rows)


def _oracle_args(m):
    return [oracle.frac(x) for x in m.space.probs], [P.blocks for P in m.F.partitions]


def test_e1_plain_holds_with_unit_densities(e1):
    v = nupbr_check(e1.assets, e1.F, e1.space)
    assert v.holds
    assert all(q == 1 for row in v.densities.values for q in row)
    assert verify_verdict(v, e1.assets, e1.F, e1.space)


def test_e1_stopped_under_g_has_witness(e1):
    enl = e1.enlargement
    X = stop(e1.assets[0], e1.tau)
    v = nupbr_check(X, enl.G, e1.space)
    assert not v.holds
    assert v.witness.t == 1 and v.witness.atom == (0,)
    assert v.witness.h == (1,)
    assert verify_verdict(v, X, enl.G, e1.space)
    assert v.witness.is_admissible(X, e1.space)


@given(seeds)
def test_one_asset_matches_sign_oracle(seed):
    rng = random.Random(seed)
    m = gen_model(ModelGenParams(n_outcomes=8, horizon=3, seed=seed))
    X = _random_adapted(rng, m.F, m.n_outcomes)
    v = nupbr_check(X, m.F, m.space)
    p, parts = _oracle_args(m)
    assert v.holds == oracle.nupbr_1d(p, parts, [[oracle.frac(x) for x in r] for r in X.values])
    assert verify_verdict(v, X, m.F, m.space)


@given(seeds)
def test_two_assets_match_planar_oracle(seed):
    rng = random.Random(seed)
    m = gen_model(ModelGenParams(n_outcomes=8, horizon=3, seed=seed))
    X1 = _random_adapted(rng, m.F, m.n_outcomes)
    X2 = _random_adapted(rng, m.F, m.n_outcomes)
    v = nupbr_check((X1, X2), m.F, m.space)
    p, parts = _oracle_args(m)
    fr = lambda X: [[oracle.frac(x) for x in r] for r in X.values]  # noqa: E731
    assert v.holds == oracle.nupbr_2d(p, parts, fr(X1), fr(X2))
    assert verify_verdict(v, (X1, X2), m.F, m.space)


@given(seeds)
def test_generated_nupbr_processes_pass(seed):
    rng = random.Random(seed)
    m = gen_model(ModelGenParams(n_outcomes=8, horizon=3, seed=seed))
    X = random_nupbr_process(rng, m.F, m.space, 2)
    v = nupbr_check(X, m.F, m.space)
    assert v.holds
    Y, theta = deflator_from_densities(v, X, m.F)
    assert all(0 < th <= 1 for row in theta.values for th in row)
    assert verify_verdict(v, X, m.F, m.space)


@given(seeds)
def test_verdict_is_invariant_under_relabelling_and_equivalent_change(seed):
    rng = random.Random(seed)
    m = gen_model(ModelGenParams(n_outcomes=8, horizon=3, seed=seed))
    v = nupbr_check(m.assets, m.F, m.space).holds
    perm = list(range(m.n_outcomes))
    rng.shuffle(perm)
    m2 = m.relabel(perm)
    assert nupbr_check(m2.assets, m2.F, m2.space).holds == v
    raw = [mpq(rng.randint(1, 5)) for _ in range(m.n_outcomes)]
    norm = m.space.expectation(raw)
    Q = reweight(m.space, [x / norm for x in raw])
    assert nupbr_check(m.assets, m.F, Q).holds == v


def test_absolutely_continuous_measure_checks_support_only():
    F = Filtration((Partition.trivial(3), Partition.discrete(3)))
    P = FiniteProbSpace(["1/3", "1/3", "1/3"])
    X = Process([[0, 0, 0], [1, 2, -1]])
    assert nupbr_check(X, F, P).holds
    Q = reweight(P, ["3/2", "3/2", "0"])
    v = nupbr_check(X, F, Q)
    assert not v.holds
    assert verify_verdict(v, X, F, Q)


def test_predictable_processes_are_nupbr_iff_constant():
    rng = random.Random(2)
    for _ in range(100):
        m = gen_model(ModelGenParams(n_outcomes=8, horizon=3, seed=rng.randrange(10**6)))
        A = random_staircase(rng, m.F)
        assert predictable_fv_check(A, m.F, m.space)
    F = Filtration((Partition.trivial(2), Partition.discrete(2)))
    with pytest.raises(ValueError):
        predictable_fv_check(Process([[0, 0], [1, 0]]), F, FiniteProbSpace(["1/2", "1/2"]))


def test_non_adapted_input_is_refused(e1):
    with pytest.raises(ValueError):
        nupbr_check(Process([[0, 1], [0, 1]]), e1.F, e1.space)


def test_deflator_needs_a_passing_verdict(e1):
    X = stop(e1.assets[0], e1.tau)
    v = nupbr_check(X, e1.enlargement.G, e1.space)
    with pytest.raises(ValueError):
        deflator_from_densities(v, X, e1.enlargement.G)

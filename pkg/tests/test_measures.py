import random
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nupbrlab.harness import ModelGenParams, gen_model, random_predictable_time, random_xi
from nupbrlab.measures import (
    DensityMeasure,
    PredictableTime,
    qf_after,
    qg_after,
    qg_before,
    qprime,
    qt,
    qtilde,
    qtilde_prime,
    single_jump,
    verify_prop_after,
    verify_prop_before,
)
from nupbrlab.model import Model
from nupbrlab.randomtime import INF, RandomTime

import oracle

seeds = st.integers(0, 10**9)


def test_e1_densities(e1):
    enl = e1.enlargement
    T = PredictableTime.constant(2, 1)
    assert qt(enl, T).density == (2, 0)
    assert qtilde(enl, T).density == (2, 0)
    assert qprime(enl, T).density == (0, 2)
    assert qtilde_prime(enl, T).density == (0, 2)
    assert qf_after(enl, T).density == (0, 2)
    assert qg_before(enl, T).density == (1, 1)
    assert qg_after(enl, T).density == (1, 1)


def test_e1_single_jump_propositions(e1):
    enl = e1.enlargement
    T = PredictableTime.constant(2, 1)
    assert verify_prop_before(enl, T, (1, -1)).as_tuple() == (False, False, False)
    assert verify_prop_after(enl, T, (1, -1)).as_tuple() == (False, False, False)
    assert verify_prop_before(enl, T, (0, 0)).as_tuple() == (True, True, True)
    assert verify_prop_after(enl, T, (0, 0)).as_tuple() == (True, True, True)


def test_predictable_time_validation(e1):
    with pytest.raises(ValueError):
        PredictableTime((0, 1))
    with pytest.raises(ValueError):
        PredictableTime((2, 2)).validate(e1.F)
    from nupbrlab.prob import Filtration, Partition
    F = Filtration((Partition.trivial(2), Partition.discrete(2), Partition.discrete(2)))
    with pytest.raises(ValueError):
        PredictableTime((1, 2)).validate(F)
    PredictableTime((2, 2)).validate(F)
    PredictableTime((INF, INF)).validate(F)


def test_density_measure_validation(e1):
    with pytest.raises(ValueError):
        DensityMeasure("x", e1.space, (3, -1))
    with pytest.raises(ValueError):
        DensityMeasure("x", e1.space, (1, 2))
    assert DensityMeasure("x", e1.space, (2, 0)).support == frozenset({0})


def test_xi_must_be_known_at_t(e1):
    from nupbrlab.prob import Filtration, Partition
    F = Filtration((Partition.trivial(2), Partition.trivial(2)))
    m = Model(e1.space, F, (single_jump(PredictableTime((1, 1)), (0, 0), 1),), RandomTime((1, 0)))
    with pytest.raises(ValueError):
        verify_prop_before(m.enlargement, PredictableTime((1, 1)), (1, -1))


def test_guards_when_conditioning_event_is_null():
    m = gen_model(ModelGenParams(n_outcomes=6, horizon=2, seed=3))
    m0 = Model(m.space, m.F, m.assets, RandomTime.constant(m.n_outcomes, 0))
    T = PredictableTime.constant(m.n_outcomes, 1)
    # Z_0 = 0 everywhere, so the ratio and the indicator densities fall back to 1
    assert qtilde(m0.enlargement, T).density == (1,) * m.n_outcomes
    assert qt(m0.enlargement, T).density == (1,) * m.n_outcomes
    minf = Model(m.space, m.F, m.assets, RandomTime.constant(m.n_outcomes, INF))
    assert qtilde_prime(minf.enlargement, T).density == (1,) * m.n_outcomes
    assert qprime(minf.enlargement, T).density == (1,) * m.n_outcomes


def test_after_measures_need_honest_time():
    rng = random.Random(0)
    for _ in range(200):
        m = gen_model(ModelGenParams(n_outcomes=8, horizon=3, seed=rng.randrange(10**6)))
        if not m.enlargement.honest:
            T = PredictableTime.constant(m.n_outcomes, 1)
            with pytest.raises(ValueError):
                qg_after(m.enlargement, T)
            with pytest.raises(ValueError):
                qf_after(m.enlargement, T)
            return
    pytest.fail("no dishonest time generated")


@given(seeds)
def test_tilde_and_plain_measures_share_null_sets(seed):
    rng = random.Random(seed)
    m = gen_model(ModelGenParams(n_outcomes=9, horizon=3, seed=seed, force_before_set=seed % 2 == 0))
    T = random_predictable_time(rng, m.F)
    enl = m.enlargement
    assert qtilde(enl, T).support == qt(enl, T).support
    assert qtilde_prime(enl, T).support == qprime(enl, T).support


def _oracle_martingale_under(m, dens, X, parts):
    q = [oracle.frac(p) * oracle.frac(d) for p, d in zip(m.space.probs, dens)]
    return oracle.is_martingale(q, parts, [[oracle.frac(v) for v in row] for row in X.values])


def _oracle_zero_given_prev(m, T, xi, event, guard):
    p = [oracle.frac(x) for x in m.space.probs]
    for t in range(1, m.horizon + 1):
        ws = [w for w in range(m.n_outcomes) if T[w] == t]
        vals = [oracle.frac(xi[w]) if event(t, w) else Fraction(0) for w in range(m.n_outcomes)]
        proj = oracle.cond_exp(p, vals, m.F[t - 1].blocks)
        if any(proj[w] != 0 for w in ws if guard(t, w)):
            return False
    return True


@given(seeds, st.sampled_from(["free", "zero", "mean_zero", "split", "good"]))
def test_prop_before_against_oracle(seed, mode):
    rng = random.Random(seed)
    m = gen_model(ModelGenParams(n_outcomes=9, horizon=3, seed=seed, force_before_set=seed % 2 == 0))
    T = random_predictable_time(rng, m.F)
    xi = random_xi(rng, m, T, mode, "before")
    M = single_jump(T, xi, m.horizon)
    parts = [P.blocks for P in m.F.partitions]
    p = [oracle.frac(x) for x in m.space.probs]
    if not oracle.is_martingale(p, parts, [[oracle.frac(v) for v in r] for r in M.values]):
        with pytest.raises(ValueError):
            verify_prop_before(m.enlargement, T, xi)
        return
    rep = verify_prop_before(m.enlargement, T, xi)
    Zt = m.enlargement.azema.Ztilde
    assert rep.a == _oracle_martingale_under(m, qt(m.enlargement, T).density, M, parts)
    assert rep.b == _oracle_zero_given_prev(m, T, xi, lambda t, w: Zt[t][w] == 0, lambda t, w: True)
    assert rep


@given(seeds, st.sampled_from(["free", "zero", "mean_zero", "split", "good"]))
def test_prop_after_against_oracle(seed, mode):
    rng = random.Random(seed)
    m = gen_model(ModelGenParams(n_outcomes=9, horizon=3, seed=seed, honest_only=True,
                                 force_after_set=seed % 2 == 0))
    T = random_predictable_time(rng, m.F)
    xi = random_xi(rng, m, T, mode, "after")
    rep = verify_prop_after(m.enlargement, T, xi)
    Z, Zt = m.enlargement.azema.Z, m.enlargement.azema.Ztilde
    assert rep.b == _oracle_zero_given_prev(
        m, T, xi, lambda t, w: Zt[t][w] < 1, lambda t, w: Z[t - 1][w] < 1)
    assert rep


def test_single_jump_shape():
    X = single_jump(PredictableTime((1, INF)), (3, 5), 2)
    assert X.values == ((0, 0), (3, 0), (3, 0))
    assert X[2][0] == mpq(3)

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nupbrlab.prob import (
    AbsContSpace,
    FiniteProbSpace,
    Filtration,
    FiltrationError,
    Partition,
    ProbSpace,
    conditional_probability,
    format_rational,
    parse_rational,
    refine_check,
    reweight,
    to_rational,
)

from oracle import cond_exp as oracle_cond_exp


def test_parse_and_format_round_trip():
    assert parse_rational("3/6") == mpq(1, 2)
    assert parse_rational(" -4 ") == mpq(-4)
    assert format_rational(mpq(-4)) == "-4/1"
    assert parse_rational(format_rational(mpq(-7, 3))) == mpq(-7, 3)


@pytest.mark.parametrize("text", ["0.5", "1e3", "1/0", "", "a/b", "1/-2"])
def test_parse_rejects_inexact_or_malformed(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        to_rational(0.5)


def test_partition_is_canonical_and_validated():
    P = Partition(((2, 0), (1,)))
    assert P.blocks == ((0, 2), (1,))
    assert P.block_of(2) == (0, 2)
    with pytest.raises(FiltrationError):
        Partition(((0, 1), (1, 2)))
    with pytest.raises(FiltrationError):
        Partition(((0,), (2,)))


def test_filtration_must_refine():
    coarse, fine = Partition.trivial(3), Partition(((0, 1), (2,)))
    assert refine_check([coarse, fine])
    chk = refine_check([fine, Partition(((0, 2), (1,)))])
    assert not chk and chk.detail[0] == 1
    with pytest.raises(FiltrationError):
        Filtration((fine, coarse))


def test_children_groups_finer_blocks():
    F = Partition(((0, 1, 2), (3,)))
    G = Partition(((0,), (1, 2), (3,)))
    assert F.children(G) == [[(0,), (1, 2)], [(3,)]]


def test_space_validation():
    with pytest.raises(ValueError):
        ProbSpace(["1/2", "1/3"])
    with pytest.raises(ValueError):
        ProbSpace(["3/2", "-1/2"])
    with pytest.raises(ValueError):
        FiniteProbSpace(["1", "0"])
    assert ProbSpace(["1", "0"]).null_set == frozenset({1})


def test_cond_exp_is_none_on_null_blocks():
    sp = ProbSpace(["1", "0", "0"])
    out = sp.cond_exp([5, 7, 9], Partition(((0,), (1, 2))))
    assert out == [5, None, None]


def test_reweight_kinds():
    sp = FiniteProbSpace(["1/4", "3/4"])
    assert isinstance(reweight(sp, ["2", "2/3"]), FiniteProbSpace)
    q = reweight(sp, ["4", "0"])
    assert isinstance(q, AbsContSpace) and q.probs == (1, 0)
    with pytest.raises(ValueError):
        reweight(sp, ["1", "2"])
    with pytest.raises(ValueError):
        reweight(sp, ["5", "-1/3"])


weights = st.lists(st.integers(1, 9), min_size=2, max_size=7)


@st.composite
def space_and_partitions(draw):
    w = draw(weights)
    n = len(w)
    total = sum(w)
    probs = [Fraction(x, total) for x in w]
    labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    fine_labels = [(a, draw(st.integers(0, 1))) for a in labels]
    coarse = Partition(tuple(tuple(i for i in range(n) if labels[i] == k) for k in set(labels)))
    fine = Partition(tuple(tuple(i for i in range(n) if fine_labels[i] == k) for k in set(fine_labels)))
    values = draw(st.lists(st.integers(-20, 20), min_size=n, max_size=n))
    return probs, coarse, fine, values


@given(space_and_partitions())
def test_cond_exp_matches_oracle(data):
    probs, coarse, fine, X = data
    sp = FiniteProbSpace(probs)
    assert sp.cond_exp(X, fine) == oracle_cond_exp(probs, X, fine.blocks)


@given(space_and_partitions())
def test_tower_property(data):
    probs, coarse, fine, X = data
    sp = FiniteProbSpace(probs)
    assert sp.cond_exp(sp.cond_exp(X, fine), coarse) == sp.cond_exp(X, coarse)
    assert sp.expectation(sp.cond_exp(X, coarse)) == sp.expectation(X)


@given(space_and_partitions(), st.integers(-5, 5), st.integers(-5, 5))
def test_linearity(data, a, b):
    probs, coarse, fine, X = data
    sp = FiniteProbSpace(probs)
    Y = list(reversed(X))
    lhs = sp.cond_exp([a * x + b * y for x, y in zip(X, Y)], fine)
    rhs = [a * u + b * v for u, v in zip(sp.cond_exp(X, fine), sp.cond_exp(Y, fine))]
    assert lhs == rhs


@given(space_and_partitions(), st.lists(st.integers(1, 6), min_size=7, max_size=7))
def test_bayes_rule(data, raw):
    probs, coarse, fine, X = data
    sp = FiniteProbSpace(probs)
    dens = raw[: len(probs)]
    norm = sp.expectation(dens)
    D = [mpq(d) / norm for d in dens]
    Q = reweight(sp, D)
    lhs = Q.cond_exp(X, coarse)
    num = sp.cond_exp([d * x for d, x in zip(D, X)], coarse)
    den = sp.cond_exp(D, coarse)
    assert lhs == [a / b for a, b in zip(num, den)]


def test_conditional_probability():
    sp = FiniteProbSpace(["1/4", "1/4", "1/2"])
    assert conditional_probability([0], Partition(((0, 1), (2,))), sp) == [mpq(1, 2), mpq(1, 2), 0]

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oddcycle.game import (
    ClassicalStrategy,
    GameSizeError,
    Query,
    QueryKind,
    brute_force_optimum,
    check_n,
    constant_strategy,
    enumerate_queries,
    mixture_win_probability,
    omega_c,
    omega_c_exact,
    parity_strategy,
    strategy_win_probability,
    wins,
)

odd_n = st.integers(min_value=1, max_value=40).map(lambda k: 2 * k + 1)


def naive_optimum(n):
    # independent oracle: every pair of colourings, plain Python
    queries = [(j, j, True) for j in range(n)] + [(j, (j + 1) % n, False) for j in range(n)]
    best = 0
    for ca in itertools.product((0, 1), repeat=n):
        for cb in itertools.product((0, 1), repeat=n):
            score = sum((ca[s] == cb[t]) == same for s, t, same in queries)
            best = max(best, score)
    return Fraction(best, 2 * n)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_brute_force_matches_naive_enumeration(n):
    value, strategy = brute_force_optimum(n)
    assert value == naive_optimum(n)
    assert strategy_win_probability(strategy, n) == value


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_brute_force_is_one_minus_one_over_2n(n):
    value, _ = brute_force_optimum(n)
    assert value == Fraction(2 * n - 1, 2 * n) == omega_c_exact(n)


def test_brute_force_cap():
    with pytest.raises(ValueError, match="limited"):
        brute_force_optimum(11)


@pytest.mark.parametrize("n", [4, 2, 1, 0, -3])
def test_bad_sizes_rejected(n):
    with pytest.raises(GameSizeError, match="n must be odd|n must be"):
        check_n(n)


def test_even_message():
    with pytest.raises(GameSizeError, match="n must be odd"):
        check_n(6)


@given(odd_n)
def test_queries_canonical(n):
    qs = enumerate_queries(n)
    assert len(qs) == 2 * n == len(set(qs))
    assert qs[0::2] == [Query(j, j, QueryKind.SAME) for j in range(n)]
    assert qs[1::2] == [Query(j, (j + 1) % n, QueryKind.ADJACENT) for j in range(n)]


@given(odd_n)
def test_parity_strategy_loses_only_wraparound(n):
    strat = parity_strategy(n)
    assert strategy_win_probability(strat, n) == omega_c_exact(n)
    assert omega_c(n) == pytest.approx(1 - 1 / (2 * n), abs=1e-15)


@given(odd_n, st.integers(0, 1))
def test_constant_strategy_wins_half(n, bit):
    assert strategy_win_probability(constant_strategy(n, bit), n) == Fraction(1, 2)


@given(odd_n, st.data())
def test_no_deterministic_strategy_beats_classical(n, data):
    ca = tuple(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    cb = tuple(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    assert strategy_win_probability(ClassicalStrategy(ca, cb), n) <= omega_c_exact(n)


@given(odd_n, st.data())
def test_mixture_bounded_and_linear(n, data):
    k = data.draw(st.integers(1, 4))
    strats = [
        ClassicalStrategy(tuple(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))),
                          tuple(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))))
        for _ in range(k)
    ]
    weights = [data.draw(st.integers(1, 9)) for _ in range(k)]
    value = mixture_win_probability(strats, weights, n)
    assert value <= float(omega_c_exact(n)) + 1e-12
    exact = sum(Fraction(w, sum(weights)) * strategy_win_probability(s, n) for s, w in zip(strats, weights))
    assert value == pytest.approx(float(exact), abs=1e-12)


def test_mixture_rejects_bad_weights():
    s = parity_strategy(3)
    with pytest.raises(ValueError):
        mixture_win_probability([s], [-1.0], 3)
    with pytest.raises(ValueError):
        mixture_win_probability([s, s], [1.0], 3)


def test_wins_rule():
    same, adj = Query(0, 0, QueryKind.SAME), Query(0, 1, QueryKind.ADJACENT)
    assert wins(same, 1, 1) and wins(same, 0, 0) and not wins(same, 0, 1)
    assert wins(adj, 0, 1) and wins(adj, 1, 0) and not wins(adj, 1, 1)

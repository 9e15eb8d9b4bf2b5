import random

import pytest
from hypothesis import given, settings, strategies as st

from latin_trades.circulant import expand_base_row, parse_base_row
from latin_trades.compose import (ComposeError, cyclic_trade, delete_diagonal, direct_sum,
                                  mod6_family, mod6_two_way, partition_intercalates, product,
                                  select_layers, sum_over_ols)
from latin_trades.mols import idempotent_mols, orthogonal_pair
from latin_trades.trade import Trade, verify_trade

from figures import B_13_11, FIGURE_1B, FIGURE_2
from pools import base_trades, random_trade, shuffle


def test_cyclic():
    t = cyclic_trade(3, 5)
    assert verify_trade(t).ok and t.params == (3, 5, 5)
    with pytest.raises(ComposeError):
        cyclic_trade(4, 3)


def symbol_relabeling(t, u):
    """The symbol bijection taking t onto u cell by cell, or None."""
    if set(t.cells) != set(u.cells):
        return None
    sym = {}
    for c, e in t.cells.items():
        for a, b in zip(e, u.cells[c]):
            if sym.setdefault(a, b) != b:
                return None
    return sym if len(set(sym.values())) == len(sym) else None


def test_cyclic_matches_figure_2():
    fig = Trade.from_rows(FIGURE_2)
    assert cyclic_trade(3, 3).cells == fig.cells
    assert symbol_relabeling(cyclic_trade(3, 3), fig) is not None
    # relabeling cannot turn i + j into the figure's j - i layers
    plus = Trade(3, 3, {(i, j): tuple((i + j + r) % 3 for r in range(3))
                        for i in range(3) for j in range(3)})
    assert symbol_relabeling(plus, fig) is None


def test_cyclic_rows_shift():
    t = cyclic_trade(4, 6)
    for (i, j), e in t.cells.items():
        for r in range(1, 4):
            assert e[r] == t.cells[((i + r) % 6, j)][0]


def test_delete_diagonal_example():
    t = delete_diagonal(idempotent_mols(5, 3), 3)
    assert t.params == (3, 4, 5) and verify_trade(t).ok


def test_product_example():
    t = product(cyclic_trade(2, 3), cyclic_trade(2, 3))
    assert t.params == (4, 9, 9) and verify_trade(t).ok


def test_sum_over_ols_example():
    b = expand_base_row(parse_base_row(FIGURE_1B, 7))
    assert b.params == (3, 5, 7)
    parts = [cyclic_trade(3, 3), None, cyclic_trade(3, 3)]
    t = sum_over_ols(parts, 3, orthogonal_pair(3))
    assert t.params == (3, 6, 9) and verify_trade(t).ok


def test_sum_over_ols_errors():
    with pytest.raises(ComposeError):
        sum_over_ols([cyclic_trade(3, 3)] * 6, 3, orthogonal_pair(5))
    with pytest.raises(ComposeError):
        sum_over_ols([None, None, None], 3, orthogonal_pair(3))
    with pytest.raises(ComposeError):
        sum_over_ols([cyclic_trade(3, 3), cyclic_trade(2, 3), None], 3, orthogonal_pair(3))
    a, b = orthogonal_pair(3)
    with pytest.raises(ComposeError):
        sum_over_ols([cyclic_trade(3, 3)] * 3, 3, (a, a))


def test_direct_sum_errors():
    with pytest.raises(ComposeError):
        direct_sum(cyclic_trade(3, 3), cyclic_trade(2, 3))
    with pytest.raises(ComposeError):
        direct_sum(cyclic_trade(3, 3), cyclic_trade(3, 4))


def test_select_layers():
    t = product(cyclic_trade(2, 2), cyclic_trade(2, 3))
    u = select_layers(t, [0, 1, 2])
    assert u.params == (3, 6, 6) and verify_trade(u).ok
    with pytest.raises(ComposeError):
        select_layers(t, [0])
    with pytest.raises(ComposeError):
        select_layers(t, [0, 7])


@pytest.mark.parametrize("m", [7, 13, 19, 25, 31, 37, 43])
def test_mod6_family(m):
    b = mod6_family(m)
    t = expand_base_row(b)
    assert t.params == (3, m - 2, m)
    assert verify_trade(t).ok


def test_mod6_matches_printed_rows():
    assert mod6_family(13) == parse_base_row(B_13_11, 13)
    assert mod6_family(7) == parse_base_row(FIGURE_1B, 7)


def test_mod6_bad_order():
    with pytest.raises(ComposeError):
        mod6_two_way(9)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10 ** 9))
def test_direct_sum_closure(seed):
    rng = random.Random(seed)
    mu = rng.choice([2, 3])
    t = random_trade(rng, mu, 20)
    same = [u for u in base_trades(mu, 40 - t.m) if u.k == t.k]
    u = shuffle(rng.choice(same), rng)
    s = direct_sum(t, u)
    assert s.params == (mu, t.k, t.m + u.m)
    assert verify_trade(s).ok


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10 ** 9))
def test_product_closure(seed):
    rng = random.Random(seed)
    t = random_trade(rng, 2, 6)
    u = random_trade(rng, rng.choice([2, 3]), 40 // t.m)
    p = product(t, u)
    assert p.params == (t.mu * u.mu, t.k * u.k, t.m * u.m)
    assert verify_trade(p).ok


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10 ** 9))
def test_sum_over_ols_closure(seed):
    rng = random.Random(seed)
    l = rng.choice([3, 4, 5, 7, 8])
    p = rng.randint(3, 40 // l)
    pool = [t for t in base_trades(3, p) if t.m == p]
    if not pool:
        pool = [cyclic_trade(3, p)]
    parts = [shuffle(rng.choice(pool), rng) if rng.random() < 0.7 else None for _ in range(l)]
    if all(x is None for x in parts):
        parts[0] = pool[0]
    t = sum_over_ols(parts, p, orthogonal_pair(l))
    k = sum(x.k for x in parts if x is not None)
    assert t.params == (3, k, l * p)
    assert verify_trade(t).ok


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10 ** 9))
def test_delete_diagonal_closure(seed):
    rng = random.Random(seed)
    q = rng.choice([4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37])
    mu = rng.randint(2, min(4, q - 2))
    t = delete_diagonal(idempotent_mols(q, mu), mu)
    assert t.params == (mu, q - 1, q)
    assert verify_trade(t).ok


def test_partition_simple():
    t = direct_sum(cyclic_trade(3, 3), cyclic_trade(3, 3))
    part = partition_intercalates(t)
    assert len(part) == 2
    assert all(verify_trade(b.trade).ok for b in part.blocks)


def test_partition_rejects_k_ne_mu():
    with pytest.raises(ComposeError):
        partition_intercalates(cyclic_trade(3, 4))

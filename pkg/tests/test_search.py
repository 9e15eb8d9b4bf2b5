import random

import pytest

from latin_trades.circulant import expand_base_row, verify_base_row
from latin_trades.search import (FIRST_ROW_CONFIGS, SearchBudget, SearchError,
                                 empty_cell_distributions, hunt_base_row, label_search_347,
                                 load_checkpoint, save_checkpoint, search_base_row,
                                 search_trade, solve_fixed_sets, _Meter)
from latin_trades.trade import verify_trade


def _base_row_exists_brute(mu, k, m):
    """Oracle: try every circulant trade by expanding candidate base rows."""
    import itertools
    from latin_trades.circulant import BaseRow
    from latin_trades.trade import TradeError
    tuples = [t for t in itertools.permutations(range(1, m + 1), mu)]
    for cols in itertools.combinations(range(2, m + 1), k - 1):
        cols = (1,) + cols
        for entries in itertools.product(tuples, repeat=k):
            try:
                b = BaseRow.of(m, list(zip(entries, cols)))
            except (ValueError, TradeError):
                continue
            if verify_base_row(b).ok:
                return True
    return False


@pytest.mark.parametrize("mu, k, m", [(2, 2, 3), (2, 2, 4), (2, 3, 4), (3, 3, 4), (2, 3, 5)])
def test_base_row_search_against_brute_force(mu, k, m):
    out = search_base_row(mu, k, m)
    assert (out.verdict == "FOUND") == _base_row_exists_brute(mu, k, m)


@pytest.mark.parametrize("mu, k, m, verdict", [
    (3, 5, 7, "FOUND"), (3, 3, 3, "FOUND"), (3, 4, 6, "NONE"), (3, 4, 7, "NONE"),
    (3, 3, 6, "FOUND"), (3, 5, 8, "FOUND"), (3, 4, 9, "NONE"), (3, 4, 10, "FOUND"),
])
def test_base_row_search(mu, k, m, verdict):
    out = search_base_row(mu, k, m)
    assert out.verdict == verdict
    if out.witness is not None:
        assert verify_base_row(out.witness).ok
        assert expand_base_row(out.witness).params == (mu, k, m)
    assert out.stats["wall_time"] >= 0 and out.nodes > 0


def test_base_row_checkpoint_resume(tmp_path):
    full = search_base_row(3, 4, 7)
    part = search_base_row(3, 4, 7, SearchBudget(nodes=50))
    assert part.verdict == "TIMEOUT" and part.checkpoint
    path = tmp_path / "ck.json"
    save_checkpoint(path, part)
    rest = search_base_row(3, 4, 7, checkpoint=load_checkpoint(path))
    assert rest.verdict == full.verdict == "NONE"


def test_base_row_jobs_deterministic():
    a = search_base_row(3, 5, 9, SearchBudget(jobs=1))
    b = search_base_row(3, 5, 9, SearchBudget(jobs=4))
    assert a.verdict == b.verdict == "FOUND"
    assert str(a.witness) == str(b.witness)


@pytest.mark.parametrize("k, m", [(5, 7), (9, 11), (14, 17), (17, 31), (4, 10)])
def test_hunt_finds(k, m):
    out = hunt_base_row(3, k, m, SearchBudget(seconds=30), seed=1)
    assert out.verdict == "FOUND"
    assert verify_base_row(out.witness).ok
    assert expand_base_row(out.witness).params == (3, k, m)


def test_hunt_cannot_refute():
    out = hunt_base_row(3, 4, 6, SearchBudget(nodes=3000), seed=0)
    assert out.verdict == "TIMEOUT"


def test_solve_fixed_sets_rejects_bad_sums():
    meter = _Meter(SearchBudget(nodes=10000))
    # S, A, D whose sums are incompatible admit no bijections
    assert solve_fixed_sets(3, 7, [0, 1, 2, 3], [0, 1, 2, 3], [0, 1, 2, 4],
                            random.Random(0), meter) is None


@pytest.mark.parametrize("mu, k, m, verdict", [
    (3, 3, 3, "FOUND"), (3, 3, 4, "NONE"), (3, 3, 6, "FOUND"), (3, 4, 4, "FOUND"),
    (3, 4, 5, "FOUND"), (2, 2, 3, "NONE"), (2, 3, 4, "FOUND"), (3, 3, 5, "NONE"),
])
def test_trade_search(mu, k, m, verdict):
    out = search_trade(mu, k, m)
    assert out.verdict == verdict
    if out.witness is not None:
        assert verify_trade(out.witness).ok and out.witness.params == (mu, k, m)


def test_trade_search_346_none():
    out = search_trade(3, 4, 6)
    assert out.verdict == "NONE"
    assert out.stats["shapes"] > 0


@pytest.mark.parametrize("mu, k, m", [(3, 3, 3), (3, 3, 4), (2, 2, 3), (2, 3, 3), (2, 3, 4),
                                      (2, 3, 5), (2, 2, 4)])
def test_symmetry_agreement(mu, k, m):
    a = search_trade(mu, k, m, symmetry=True)
    b = search_trade(mu, k, m, symmetry=False)
    assert a.verdict == b.verdict
    assert b.nodes >= a.nodes


@pytest.mark.slow
def test_symmetry_agreement_335():
    assert search_trade(3, 3, 5, symmetry=False).verdict == search_trade(3, 3, 5).verdict == "NONE"


@pytest.mark.slow
def test_k_equals_mu_needs_divisibility_m7():
    assert search_trade(3, 3, 7).verdict == "NONE"


@pytest.mark.parametrize("prunes", [(), ("balance",), ("counts",), ("balance", "counts", "frequency")])
def test_prunes_sound(prunes):
    for mu, k, m in [(3, 3, 3), (3, 3, 4), (2, 3, 4), (3, 4, 5), (2, 2, 3)]:
        base = search_trade(mu, k, m)
        alt = search_trade(mu, k, m, prunes=prunes)
        assert alt.verdict == base.verdict, (mu, k, m, prunes)


def test_proof346_prune_agrees():
    out = search_trade(3, 4, 6, prunes=("balance", "counts", "frequency", "proof346"))
    assert out.verdict == "NONE"


def test_unknown_prune():
    with pytest.raises(SearchError):
        search_trade(3, 3, 3, prunes=("magic",))


def test_trade_checkpoint_resume(tmp_path):
    part = search_trade(3, 4, 6, SearchBudget(nodes=20000))
    assert part.verdict == "TIMEOUT"
    if part.checkpoint is None:
        pytest.skip("budget ran out during shape enumeration")
    path = tmp_path / "ck.json"
    save_checkpoint(path, part)
    rest = search_trade(3, 4, 6, checkpoint=load_checkpoint(path))
    assert rest.verdict == "NONE"


def test_trade_timeout_in_shapes():
    out = search_trade(3, 9, 12, SearchBudget(nodes=10))
    assert out.verdict == "TIMEOUT" and out.stats["shapes"] is None


def test_trade_jobs_deterministic():
    a = search_trade(3, 4, 6, SearchBudget(jobs=1))
    b = search_trade(3, 4, 6, SearchBudget(jobs=3))
    assert a.verdict == b.verdict == "NONE"
    for mu, k, m in [(3, 4, 5), (2, 3, 5)]:
        c = search_trade(mu, k, m, SearchBudget(jobs=1))
        d = search_trade(mu, k, m, SearchBudget(jobs=3))
        assert c.verdict == d.verdict == "FOUND"
        assert c.witness.cells == d.witness.cells


def test_bad_params():
    with pytest.raises(SearchError):
        search_trade(3, 2, 5)
    with pytest.raises(SearchError):
        search_base_row(3, 6, 5)


def test_empty_cell_distributions():
    d = empty_cell_distributions()
    assert len(d) == 36
    assert len(FIRST_ROW_CONFIGS) == 3
    assert len(set(d)) == 36
    for cells in d:
        assert len(cells) == 28
        for x in range(7):
            assert sum(1 for r, _ in cells if r == x) == 4
            assert sum(1 for _, c in cells if c == x) == 4


def test_label_search_347():
    res = label_search_347()
    assert res.cases == 108 and res.distributions == 36 and res.configurations == 3
    assert res.solutions == 0


def test_label_search_without_union_bound_finds_labellings():
    res = label_search_347(union_bound=False, stop_at=1)
    assert res.solutions > 0 and res.example is not None

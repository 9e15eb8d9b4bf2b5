"""Random valid trades for property tests."""

import random

from latin_trades.circulant import expand_base_row
from latin_trades.compose import cyclic_trade, delete_diagonal
from latin_trades.mols import idempotent_mols
from latin_trades.planner import catalog
from latin_trades.trade import Trade


def shuffle(t: Trade, rng: random.Random) -> Trade:
    m = t.m
    return t.relabel(rows=rng.sample(range(m), m), cols=rng.sample(range(m), m),
                     symbols=rng.sample(range(m), m), layers=rng.sample(range(t.mu), t.mu))


def project(t: Trade, mu: int) -> Trade:
    return Trade(mu, t.m, {c: e[:mu] for c, e in t.cells.items()})


def base_trades(mu: int, max_m: int) -> list[Trade]:
    """A mixed pool of (mu, k, m) trades with m <= max_m (mu in 2..4)."""
    out = [cyclic_trade(mu, k) for k in range(max(mu, 2), min(max_m, 9) + 1)]
    for q in (5, 7, 8, 9):
        if q <= max_m and q - 2 >= mu:
            out.append(delete_diagonal(idempotent_mols(q, mu), mu))
    if mu <= 3:
        for e in catalog():
            m = e.m if e.m is not None else e.m_min
            if m <= max_m:
                out.append(project(expand_base_row(e.instantiate(m)), mu))
    return out


def random_trade(rng: random.Random, mu: int, max_m: int) -> Trade:
    return shuffle(rng.choice(base_trades(mu, max_m)), rng)

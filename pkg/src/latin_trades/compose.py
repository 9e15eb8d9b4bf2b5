"""Composition constructions for homogeneous Latin trades."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circulant import BaseRow
from .mols import LatinSquare, MolsSet, verify_orthogonal
from .trade import Trade, verify_trade


class ComposeError(ValueError):
    pass


def cyclic_trade(mu: int, k: int) -> Trade:
    """Layer r is the cyclic square j - i - (r - 1) mod k.

    Each layer is the previous one with its rows shifted down by one.
    """
    if mu < 2:
        raise ComposeError("mu must be at least 2")
    if k < mu:
        raise ComposeError(f"cyclic trade needs k >= mu, got k={k}, mu={mu}")
    cells = {(i, j): tuple((j - i - r) % k for r in range(mu))
             for i in range(k) for j in range(k)}
    return Trade(mu, k, cells)


def delete_diagonal(s: MolsSet, mu: int) -> Trade:
    """Superpose mu idempotent MOLS of order n and drop the diagonal."""
    if len(s.squares) < mu:
        raise ComposeError(f"need {mu} squares, got {len(s.squares)}")
    squares = s.squares[:mu]
    if not all(sq.is_idempotent() for sq in squares):
        raise ComposeError("delete_diagonal needs idempotent squares")
    n = s.n
    cells = {(i, j): tuple(sq.grid[i][j] for sq in squares)
             for i in range(n) for j in range(n) if i != j}
    return Trade(mu, n, cells)


def direct_sum(t: Trade, u: Trade) -> Trade:
    """Block-diagonal sum; u is shifted by t.m in rows, columns and symbols."""
    if t.mu != u.mu:
        raise ComposeError(f"mu mismatch: {t.mu} vs {u.mu}")
    if t.k != u.k:
        raise ComposeError(f"k mismatch: {t.k} vs {u.k}")
    d = t.m
    cells = dict(t.cells)
    for (i, j), e in u.cells.items():
        cells[(i + d, j + d)] = tuple(s + d for s in e)
    return Trade(t.mu, t.m + u.m, cells)


def product(t: Trade, u: Trade) -> Trade:
    """Replace each symbol x of t by a copy of u on symbol band x.

    Output layers are ordered lexicographically by (layer of t, layer of u).
    """
    m2 = u.m
    cells = {}
    for (i1, j1), e1 in t.cells.items():
        for (i2, j2), e2 in u.cells.items():
            cells[(i1 * m2 + i2, j1 * m2 + j2)] = tuple(
                x * m2 + y for x in e1 for y in e2)
    return Trade(t.mu * u.mu, t.m * m2, cells)


def select_layers(t: Trade, layers: Sequence[int]) -> Trade:
    """Keep the given 0-based layers; any two or more layers of a trade form a trade."""
    if len(layers) < 2 or len(set(layers)) != len(layers):
        raise ComposeError(f"need at least two distinct layers, got {list(layers)}")
    if any(not 0 <= r < t.mu for r in layers):
        raise ComposeError(f"layer index out of range for mu={t.mu}: {list(layers)}")
    return Trade(len(layers), t.m, {c: tuple(e[r] for r in layers) for c, e in t.cells.items()})


def sum_over_ols(parts: Sequence[Trade | None], p: int,
                 pair: tuple[LatinSquare, LatinSquare]) -> Trade:
    """Fill the superposition of an orthogonal pair with the given parts.

    Block (x, y) carrying the symbol pair (e, f) receives ``parts[f]`` with its
    symbols moved into band e.  ``None`` parts are empty (k = 0).
    """
    l1, l2 = pair
    l = len(parts)
    if l in (2, 6):
        raise ComposeError(f"no orthogonal pair of order {l}")
    if l1.n != l or l2.n != l:
        raise ComposeError(f"orthogonal pair has order {l1.n}, expected {l}")
    if not verify_orthogonal(l1, l2):
        raise ComposeError("the supplied squares are not orthogonal")
    present = [t for t in parts if t is not None]
    if not present:
        raise ComposeError("at least one part must be non-empty")
    mu = present[0].mu
    for t in present:
        if t.mu != mu:
            raise ComposeError(f"mu mismatch among parts: {t.mu} vs {mu}")
        if t.m != p:
            raise ComposeError(f"part of order {t.m} where {p} was expected")
    cells = {}
    for x in range(l):
        for y in range(l):
            t = parts[l2.grid[x][y]]
            if t is None:
                continue
            band = l1.grid[x][y] * p
            for (i, j), e in t.cells.items():
                cells[(x * p + i, y * p + j)] = tuple(band + s for s in e)
    return Trade(mu, l * p, cells)


def mod6_two_way(m: int) -> list[tuple[tuple[int, int], int]]:
    """The 2-way base row with k = m - 2 for m = 1 (mod 6), as (symbols, column)."""
    if m < 7 or m % 6 != 1:
        raise ComposeError(f"m must be 1 mod 6 and at least 7, got {m}")
    h = (m + 3) // 2
    items = []
    for i in range((m - 13) // 6 + 1):
        items += [
            ((6 * i + 2, 6 * i + 3), 3 * i + 1),
            ((6 * i + 4, 6 * i + 2), 3 * i + 2),
            ((6 * i + 3, 6 * i + 4), 3 * i + 3),
            ((6 * i + 5, 6 * i + 6), h + 3 * i + 1),
            ((6 * i + 7, 6 * i + 5), h + 3 * i + 2),
            ((6 * i + 6, 6 * i + 7), h + 3 * i + 3),
        ]
    t = (m - 7) // 2
    items += [
        ((m - 5, m - 4), t + 1),
        ((m - 2, m - 5), t + 2),
        ((m - 4, m), t + 3),
        ((1, m - 2), t + 4),
        ((m, 1), t + 5),
    ]
    return items


def mod6_family(m: int) -> BaseRow:
    """3-way base row for (3, m-2, m): the cell in column i gains symbol 2i - 1 (mod m)."""
    items = sorted(mod6_two_way(m), key=lambda it: it[1])
    out = []
    for i, (syms, col) in enumerate(items, start=1):
        first = (2 * i - 2) % m + 1
        out.append(((first,) + syms, col))
    return BaseRow.of(m, out)


@dataclass(frozen=True)
class Intercalate:
    rows: tuple[int, ...]      # 1-based
    cols: tuple[int, ...]      # 1-based
    trade: Trade               # compacted to a (mu, mu, mu) trade


@dataclass(frozen=True)
class IntercalatePartition:
    blocks: tuple[Intercalate, ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> dict:
        return {"blocks": [
            {"rows": list(b.rows), "cols": list(b.cols), "trade": b.trade.to_dict()}
            for b in self.blocks
        ]}


def partition_intercalates(t: Trade) -> IntercalatePartition:
    """Split a (mu, mu, m) trade into m/mu disjoint mu-intercalates."""
    mu = t.mu
    if t.k != mu:
        raise ComposeError(f"partition needs k = mu, got k={t.k}, mu={mu}")
    rep = verify_trade(t)
    if not rep.ok:
        raise ComposeError(f"input is not a valid trade: {rep.violations[0].detail}")
    by_row: dict[int, list[int]] = {}
    by_col: dict[int, list[int]] = {}
    for (i, j) in t.cells:
        by_row.setdefault(i, []).append(j)
        by_col.setdefault(j, []).append(i)
    remaining = set(t.cells)
    blocks = []
    while remaining:
        i = min(r for r, _ in remaining)
        cols = sorted(by_row[i])
        rows = sorted(by_col[cols[0]])
        symbols = {s for j in cols for s in t.cells[(i, j)]}
        block = [(r, c) for r in rows for c in cols]
        for cell in block:
            if cell not in remaining:
                raise ComposeError(f"structural contradiction at cell ({cell[0] + 1},{cell[1] + 1})")
            if not set(t.cells[cell]) <= symbols:
                raise ComposeError(f"cell ({cell[0] + 1},{cell[1] + 1}) leaves the block's symbol set")
        remaining.difference_update(block)
        sym_index = {s: n for n, s in enumerate(sorted(symbols))}
        sub = Trade(mu, mu, {
            (rows.index(r), cols.index(c)): tuple(sym_index[s] for s in t.cells[(r, c)])
            for r, c in block
        })
        if not verify_trade(sub).ok:
            raise ComposeError("extracted block is not an intercalate")
        blocks.append(Intercalate(tuple(r + 1 for r in rows), tuple(c + 1 for c in cols), sub))
    return IntercalatePartition(tuple(blocks))

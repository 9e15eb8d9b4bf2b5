"""Backtracking searches: circulant base rows, whole trades, and the (3,4,7) label relaxation.

All searches report FOUND / NONE / TIMEOUT.  NONE is only returned after the
(symmetry-reduced) space has been exhausted without hitting a budget limit;
FOUND witnesses are re-verified independently before being returned.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .circulant import BaseRow, expand_base_row, verify_base_row
from .trade import Trade, verify_trade


class SearchError(ValueError):
    pass


class _OutOfBudget(Exception):
    pass


@dataclass
class SearchBudget:
    nodes: int | None = None
    seconds: float | None = None
    jobs: int = 1


@dataclass
class SearchOutcome:
    verdict: str                      # FOUND | NONE | TIMEOUT
    witness: BaseRow | Trade | None = None
    nodes: int = 0
    checkpoint: list | None = None    # unexplored prefixes, TIMEOUT only
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict, "nodes": self.nodes, **self.stats}
        if self.witness is not None:
            d["witness"] = self.witness.to_dict()
        if self.checkpoint is not None:
            d["checkpoint"] = self.checkpoint
        return d


class _Meter:
    """Node counter with a budget; raises _OutOfBudget when a limit is hit."""

    def __init__(self, budget: SearchBudget | None):
        self.budget = budget or SearchBudget()
        self.nodes = 0
        self.start = time.monotonic()
        self.depths: dict[int, int] = {}

    def tick(self, depth: int = 0) -> None:
        self.nodes += 1
        self.depths[depth] = self.depths.get(depth, 0) + 1
        b = self.budget
        if b.nodes is not None and self.nodes > b.nodes:
            raise _OutOfBudget
        if b.seconds is not None and (self.nodes & 255) == 0 \
                and time.monotonic() - self.start > b.seconds:
            raise _OutOfBudget

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def stats(self, verdict: str) -> dict:
        return {"verdict": verdict, "nodes": self.nodes, "wall_time": round(self.elapsed(), 3),
                "depth_histogram": {str(d): c for d, c in sorted(self.depths.items())}}


def _run_prefixes(prefixes: list, solve_one, meter: _Meter, jobs: int = 1):
    """Run independent subtrees in order; returns (witness, unexplored prefixes)."""
    if jobs > 1 and len(prefixes) > 1:
        return _run_parallel(prefixes, solve_one, meter, jobs)
    for n, pre in enumerate(prefixes):
        try:
            w = solve_one(pre, meter)
        except _OutOfBudget:
            return None, prefixes[n:]
        if w is not None:
            return w, []
    return None, []


def _run_parallel(prefixes, solve_one, meter, jobs):
    from concurrent.futures import ThreadPoolExecutor

    # subtrees are independent; results are merged in prefix order so the
    # reported witness does not depend on scheduling
    results: dict[int, object] = {}
    pending: list[int] = []

    def job(n):
        try:
            return n, solve_one(prefixes[n], meter), False
        except _OutOfBudget:
            return n, None, True

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for n, w, timed_out in pool.map(job, range(len(prefixes))):
            if timed_out:
                pending.append(n)
            else:
                results[n] = w
    for n in range(len(prefixes)):
        if n in pending:
            return None, [prefixes[i] for i in range(n, len(prefixes)) if i not in results or i in pending]
        if results.get(n) is not None:
            return results[n], []
    return None, []


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _rot(mask: int, c: int, m: int) -> int:
    """{(d + c) mod m : d in mask}."""
    c %= m
    full = (1 << m) - 1
    return ((mask << c) | (mask >> (m - c))) & full if c else mask


# ---------------------------------------------------------------------------
# base rows: exhaustive search


def _check_params(mu: int, k: int, m: int) -> None:
    if mu < 2 or not (m >= k >= mu):
        raise SearchError(f"need m >= k >= mu >= 2, got mu={mu}, k={k}, m={m}")


def _base_row_from(mu, m, items) -> BaseRow:
    return BaseRow.of(m, [(tuple(a + 1 for a in syms), c + 1) for c, syms in items])


def _first_items(mu: int, m: int) -> list[tuple[int, ...]]:
    """Symbol tuples for the column-1 item: first symbol 0, the rest increasing."""
    return [(0,) + rest for rest in itertools.combinations(range(1, m), mu - 1)]


def search_base_row(mu: int, k: int, m: int, budget: SearchBudget | None = None,
                    checkpoint: list | None = None) -> SearchOutcome:
    """Exhaustive DFS for a base row of a (mu, k, m) circulant trade.

    Columns are taken in increasing order with column 1 always used (shift);
    symbols are translated so the column-1 item starts with 1, and layers
    are ordered by that item's symbols.
    """
    _check_params(mu, k, m)
    meter = _Meter(budget)
    prefixes = checkpoint if checkpoint is not None else [list(t) for t in _first_items(mu, m)]

    def solve_one(first, meter):
        first = tuple(first)
        used = [1 << a for a in first]
        dused = [1 << (a % m) for a in first]
        uA = 0
        uD = 0
        for r in range(mu):
            uA |= used[r]
            dused[r] = 1 << first[r]
            uD |= dused[r]
        if _popcount(uA) > k:
            return None
        items = [(0, first)]
        if _dfs_base(mu, k, m, 1, items, used, dused, uA, uD, meter):
            return _base_row_from(mu, m, items)
        return None

    witness, rest = _run_prefixes(prefixes, solve_one, meter, (budget or SearchBudget()).jobs)
    return _finish(witness, rest, meter, check=_check_base_row)


def _check_base_row(b: BaseRow) -> bool:
    return verify_base_row(b).ok and verify_trade(expand_base_row(b)).ok


def _finish(witness, rest, meter, check) -> SearchOutcome:
    if witness is not None:
        if not check(witness):
            raise SearchError("search produced a witness that fails verification")
        return SearchOutcome("FOUND", witness, meter.nodes, stats=meter.stats("FOUND"))
    if rest:
        return SearchOutcome("TIMEOUT", None, meter.nodes, checkpoint=[list(p) for p in rest],
                             stats=meter.stats("TIMEOUT"))
    return SearchOutcome("NONE", None, meter.nodes, stats=meter.stats("NONE"))


def _dfs_base(mu, k, m, col, items, used, dused, uA, uD, meter) -> bool:
    meter.tick(len(items))
    n = len(items)
    if n == k:
        return _popcount(uA) == k and _popcount(uD) == k
    need = k - n
    if m - col < need:
        return False
    # every layer must still be able to pick up the union's missing symbols
    for r in range(mu):
        if _popcount(uA & ~used[r]) > need or _popcount(uD & ~dused[r]) > need:
            return False
    full = (1 << m) - 1
    a_room = _popcount(uA) < k
    d_room = _popcount(uD) < k

    def options(r, c, taken):
        allowed = full & ~used[r] & ~taken
        if not a_room:
            allowed &= uA
        dfree = full & ~dused[r]
        if not d_room:
            dfree &= uD
        return allowed & _rot(dfree, c, m)

    def place(r, c, taken, chosen):
        if r == mu:
            yield tuple(chosen)
            return
        for a in _bits(options(r, c, taken)):
            chosen.append(a)
            yield from place(r + 1, c, taken | (1 << a), chosen)
            chosen.pop()

    for c in range(col, m - need + 1):
        for syms in list(place(0, c, 0, [])):
            nu = list(used)
            nd = list(dused)
            nA, nD = uA, uD
            for r, a in enumerate(syms):
                nu[r] |= 1 << a
                nd[r] |= 1 << ((a - c) % m)
                nA |= 1 << a
                nD |= 1 << ((a - c) % m)
            if _popcount(nA) > k or _popcount(nD) > k:
                continue
            items.append((c, syms))
            if _dfs_base(mu, k, m, c + 1, items, nu, nd, nA, nD, meter):
                return True
            items.pop()
    return False


# ---------------------------------------------------------------------------
# base rows: randomized hunting with fixed column / symbol / difference sets


def _random_sets(rng: random.Random, k: int, m: int):
    """Random k-sets S (containing 0), A, D with sum(A) - sum(S) = sum(D) (mod m)."""
    for _ in range(1000):
        S = {0} | set(rng.sample(range(1, m), k - 1))
        A = set(rng.sample(range(m), k))
        D = set(rng.sample(range(m), k))
        target = (sum(A) - sum(S)) % m
        gap = (target - sum(D)) % m
        if gap == 0:
            return S, A, D
        swaps = [(x, (x + gap) % m) for x in D if (x + gap) % m not in D]
        if swaps:
            x, y = rng.choice(swaps)
            D = (D - {x}) | {y}
            return S, A, D
    raise SearchError("could not draw compatible sets")


def solve_fixed_sets(mu: int, m: int, S, A, D, rng: random.Random | None,
                     meter: _Meter, node_limit: int | None = None):
    """Find mu pointwise-distinct bijections S -> A whose differences biject onto D."""
    cols = sorted(S)
    k = len(cols)
    full_a = sum(1 << a for a in A)
    full_d = sum(1 << d for d in D)
    used = [0] * mu          # symbols taken per layer
    dused = [0] * mu         # differences taken per layer
    assign = {}              # (c, r) -> symbol
    cell_taken = {c: 0 for c in cols}
    start = meter.nodes

    def dom(c, r):
        return (full_a & ~used[r] & ~cell_taken[c]
                & _rot(full_d & ~dused[r], c, m))

    def dfs() -> bool:
        meter.tick(len(assign))
        if node_limit is not None and meter.nodes - start > node_limit:
            raise _OutOfBudget
        if len(assign) == mu * k:
            return True
        best = None
        best_n = 10 ** 9
        for r in range(mu):
            for c in cols:
                if (c, r) in assign:
                    continue
                d = dom(c, r)
                n = _popcount(d)
                if n < best_n:
                    best, best_n = (c, r, d), n
                    if n == 0:
                        return False
            # each free symbol / difference of this layer needs a home
            free_a = full_a & ~used[r]
            free_d = full_d & ~dused[r]
            reach_a = 0
            reach_d = 0
            for c in cols:
                if (c, r) not in assign:
                    d = dom(c, r)
                    reach_a |= d
                    reach_d |= _rot(d, -c, m)
            if free_a & ~reach_a or free_d & ~reach_d:
                return False
        c, r, d = best
        vals = list(_bits(d))
        if rng is not None:
            rng.shuffle(vals)
        for a in vals:
            assign[(c, r)] = a
            used[r] |= 1 << a
            dused[r] |= 1 << ((a - c) % m)
            cell_taken[c] |= 1 << a
            if dfs():
                return True
            del assign[(c, r)]
            used[r] &= ~(1 << a)
            dused[r] &= ~(1 << ((a - c) % m))
            cell_taken[c] &= ~(1 << a)
        return False

    if not dfs():
        return None
    return [(c, tuple(assign[(c, r)] for r in range(mu))) for c in cols]


def hunt_base_row(mu: int, k: int, m: int, budget: SearchBudget | None = None,
                  seed: int = 0, restart_nodes: int = 4000, sets=None) -> SearchOutcome:
    """Randomized restarts over (S, A, D) choices; can find but never refute."""
    _check_params(mu, k, m)
    rng = random.Random(seed)
    meter = _Meter(budget)
    while True:
        try:
            S, A, D = sets(rng, k, m) if sets is not None else _random_sets(rng, k, m)
            items = solve_fixed_sets(mu, m, S, A, D, rng, meter, restart_nodes)
        except _OutOfBudget:
            b = meter.budget
            if (b.nodes is not None and meter.nodes > b.nodes) or \
                    (b.seconds is not None and meter.elapsed() > b.seconds):
                return SearchOutcome("TIMEOUT", None, meter.nodes, stats=meter.stats("TIMEOUT"))
            continue
        if items is not None:
            w = _base_row_from(mu, m, items)
            return _finish(w, [], meter, check=_check_base_row)
        if budget is not None and budget.seconds is not None and meter.elapsed() > budget.seconds:
            return SearchOutcome("TIMEOUT", None, meter.nodes, stats=meter.stats("TIMEOUT"))


# ---------------------------------------------------------------------------
# whole trades: shapes first, then entries

PRUNES = frozenset({"balance", "counts", "frequency", "proof346"})


def _shapes(k: int, m: int, symmetry: bool, meter: _Meter) -> Iterator[tuple[int, ...]]:
    """0/1 matrices (row bitmasks, bit j = column j) with k ones per row and column.

    With symmetry on, row 1 is {1..k} and rows are non-increasing under the
    ordering that makes {1..k} maximal; isomorphic shapes are then dropped
    for m <= 7.
    """
    subsets = [sum(1 << j for j in cs) for cs in itertools.combinations(range(m), k)]
    # key: lexicographically smallest column set first
    order = sorted(subsets, key=lambda s: [j for j in _bits(s)])
    rank = {s: n for n, s in enumerate(order)}
    seen = set()
    perms = list(itertools.permutations(range(m))) if symmetry and m <= 7 else None

    def canon(rows):
        best = None
        for p in perms:
            key = tuple(sorted(rank[sum(1 << p[j] for j in _bits(r))] for r in rows))
            if best is None or key < best:
                best = key
        return best

    def rec(rows, colcount, lo):
        meter.tick(len(rows))
        i = len(rows)
        if i == m:
            if perms is not None:
                key = canon(rows)
                if key in seen:
                    return
                seen.add(key)
            yield tuple(rows)
            return
        left = m - i
        for n in range(lo, len(order)):
            s = order[n]
            ok = True
            for j in _bits(s):
                if colcount[j] >= k:
                    ok = False
                    break
            if not ok:
                continue
            cc = list(colcount)
            for j in _bits(s):
                cc[j] += 1
            # every column still needs room
            if any(k - cc[j] > left - 1 for j in range(m)):
                continue
            rows.append(s)
            yield from rec(rows, cc, n if symmetry else 0)
            rows.pop()

    if symmetry:
        first = order[0]
        cc = [1 if first >> j & 1 else 0 for j in range(m)]
        yield from rec([first], cc, 0)
    else:
        yield from rec([], [0] * m, 0)


class _EntrySolver:
    """Fill a fixed shape with mu layers of symbols."""

    def __init__(self, mu, k, m, shape, symmetry, prunes, meter):
        self.mu, self.k, self.m = mu, k, m
        self.symmetry = symmetry
        self.balance = "balance" in prunes
        self.counts = "counts" in prunes
        # with mu = k - 1 every full cell misses exactly one row symbol, and no
        # symbol may be missed twice in a line (it would then appear < mu times)
        self.frequency = "frequency" in prunes and mu == k - 1
        self.meter = meter
        self.cells = [(i, j) for i in range(m) for j in _bits(shape[i])]
        self.row_cells = {i: [c for c in self.cells if c[0] == i] for i in range(m)}
        self.col_cells = {j: [c for c in self.cells if c[1] == j] for j in range(m)}
        self.full = (1 << m) - 1
        z = lambda: [[0] * m for _ in range(mu)]  # noqa: E731
        self.rowused, self.colused, self.count = z(), z(), z()
        self.symrow, self.symcol = z(), z()       # rows / columns holding a symbol, per layer
        self.urow = [0] * m                        # unions over layers
        self.ucol = [0] * m
        self.srow = [0] * m
        self.scol = [0] * m
        self.saturated = [0] * mu                  # symbols already placed k times
        self.cellused = {c: 0 for c in self.cells}
        self.assign: dict[tuple[int, int, int], int] = {}
        self.row_free = [[k] * m for _ in range(mu)]
        self.col_free = [[k] * m for _ in range(mu)]
        self.ever = 0                              # symbols used anywhere

    def _refresh(self, i, j, s):
        mu = self.mu
        u = v = w = x = 0
        for r in range(mu):
            u |= self.rowused[r][i]
            v |= self.colused[r][j]
            w |= self.symrow[r][s]
            x |= self.symcol[r][s]
        self.urow[i], self.ucol[j], self.srow[s], self.scol[s] = u, v, w, x

    def set(self, i, j, r, s):
        self.assign[(i, j, r)] = s
        b = 1 << s
        self.rowused[r][i] |= b
        self.colused[r][j] |= b
        self.cellused[(i, j)] |= b
        self.count[r][s] += 1
        if self.count[r][s] == self.k:
            self.saturated[r] |= b
        self.symrow[r][s] |= 1 << i
        self.symcol[r][s] |= 1 << j
        self.row_free[r][i] -= 1
        self.col_free[r][j] -= 1
        self._refresh(i, j, s)

    def unset(self, i, j, r, s):
        del self.assign[(i, j, r)]
        b = ~(1 << s)
        self.rowused[r][i] &= b
        self.colused[r][j] &= b
        self.cellused[(i, j)] &= b
        self.count[r][s] -= 1
        self.saturated[r] &= b
        self.symrow[r][s] &= ~(1 << i)
        self.symcol[r][s] &= ~(1 << j)
        self.row_free[r][i] += 1
        self.col_free[r][j] += 1
        self._refresh(i, j, s)

    def consistent(self, i, j, s) -> bool:
        k = self.k
        if (self.urow[i].bit_count() > k or self.ucol[j].bit_count() > k
                or self.srow[s].bit_count() > k or self.scol[s].bit_count() > k):
            return False
        if self.balance:
            for r in range(self.mu):
                # symbols the union demands must still fit in this layer's free slots
                if (self.urow[i] & ~self.rowused[r][i]).bit_count() > self.row_free[r][i]:
                    return False
                if (self.ucol[j] & ~self.colused[r][j]).bit_count() > self.col_free[r][j]:
                    return False
                left = k - self.count[r][s]
                if (self.srow[s] & ~self.symrow[r][s]).bit_count() > left:
                    return False
                if (self.scol[s] & ~self.symcol[r][s]).bit_count() > left:
                    return False
        if self.frequency:
            if not self._missing_distinct(self.row_cells[i], self.urow[i]):
                return False
            if not self._missing_distinct(self.col_cells[j], self.ucol[j]):
                return False
        return True

    def _missing_distinct(self, line, union) -> bool:
        if union.bit_count() < self.k:
            return True
        seen = 0
        for c in line:
            used = self.cellused[c]
            if used.bit_count() == self.mu:
                miss = union & ~used
                if seen & miss:
                    return False
                seen |= miss
        return True

    def solve(self) -> dict | None:
        k = self.k
        if self.symmetry:
            # row 1, layer 1 reads 1..k left to right
            i0 = self.cells[0][0]
            for n, (i, j) in enumerate(c for c in self.cells if c[0] == i0):
                self.set(i, j, 0, n)
            self.ever = (1 << k) - 1
        if self._dfs():
            return dict(self.assign)
        return None

    def _blocked(self):
        """Per row / column, symbols already confined to k other rows / columns."""
        k, m = self.k, self.m
        brow = [0] * m
        bcol = [0] * m
        for s in range(m):
            rows = self.srow[s]
            if rows.bit_count() >= k:
                out = self.full & ~rows
                for i in _bits(out):
                    brow[i] |= 1 << s
            cols = self.scol[s]
            if cols.bit_count() >= k:
                out = self.full & ~cols
                for j in _bits(out):
                    bcol[j] |= 1 << s
        return brow, bcol

    def _dfs(self) -> bool:
        self.meter.tick(len(self.assign))
        mu, k = self.mu, self.k
        if len(self.assign) == len(self.cells) * mu:
            return self._final_ok()
        brow, bcol = self._blocked()
        best = None
        best_n = 10 ** 9
        for (i, j) in self.cells:
            base = self.full & ~self.cellused[(i, j)] & ~brow[i] & ~bcol[j]
            if self.urow[i].bit_count() >= k:
                base &= self.urow[i]
            if self.ucol[j].bit_count() >= k:
                base &= self.ucol[j]
            reach = self.cellused[(i, j)]
            for r in range(mu):
                if (i, j, r) in self.assign:
                    continue
                d = base & ~self.rowused[r][i] & ~self.colused[r][j]
                if self.counts:
                    d &= ~self.saturated[r]
                reach |= d
                n = d.bit_count()
                if n < best_n:
                    best, best_n = (i, j, r, d), n
            if best_n == 0 or reach.bit_count() < mu:
                return False
        i, j, r, d = best
        fresh_taken = False
        first_cell = self.cells[0]
        for s in _bits(d):
            if self.symmetry:
                if not (self.ever >> s & 1):
                    # unused symbols are interchangeable: try only the smallest
                    if fresh_taken:
                        continue
                    fresh_taken = True
                if (i, j) == first_cell and mu >= 3:
                    # layers 2..mu ordered by their symbol in the first cell
                    prev = self.assign.get((i, j, r - 1)) if r >= 2 else None
                    nxt = self.assign.get((i, j, r + 1)) if 1 <= r < mu - 1 else None
                    if (prev is not None and s < prev) or (nxt is not None and s > nxt):
                        continue
            was = self.ever
            self.ever |= 1 << s
            self.set(i, j, r, s)
            if self.consistent(i, j, s) and self._dfs():
                return True
            self.unset(i, j, r, s)
            self.ever = was
        return False

    def _final_ok(self) -> bool:
        for r in range(self.mu):
            if any(c != self.k for c in self.count[r]):
                return False
        for i in range(self.m):
            if len({self.rowused[r][i] for r in range(self.mu)}) != 1:
                return False
            if len({self.colused[r][i] for r in range(self.mu)}) != 1:
                return False
        return True


def search_trade(mu: int, k: int, m: int, budget: SearchBudget | None = None,
                 symmetry: bool = True, prunes: Iterable[str] = ("balance", "counts"),
                 checkpoint: list | None = None) -> SearchOutcome:
    """Exhaustive search for a (mu, k, m) trade.

    Shapes (k-regular 0/1 matrices) are enumerated first, isomorph-reduced
    when symmetry is on; each shape is then filled cell by cell,
    most-constrained variable first, with the symbols of row 1 in layer 1
    fixed and unused symbols treated as interchangeable.
    """
    _check_params(mu, k, m)
    prunes = frozenset(prunes)
    unknown = prunes - PRUNES
    if unknown:
        raise SearchError(f"unknown prunes {sorted(unknown)}")
    meter = _Meter(budget)
    try:
        shapes = [list(s) for s in _shapes(k, m, symmetry, meter)] if checkpoint is None \
            else checkpoint
    except _OutOfBudget:
        out = SearchOutcome("TIMEOUT", None, meter.nodes, checkpoint=None,
                            stats=meter.stats("TIMEOUT"))
        out.stats["shapes"] = None
        return out
    if "proof346" in prunes and (mu, k, m) == (3, 4, 6):
        shapes = [s for s in shapes if _transversal_empty_ok(s)]

    def solve_one(shape, meter):
        solver = _EntrySolver(mu, k, m, shape, symmetry, prunes, meter)
        sol = solver.solve()
        if sol is None:
            return None
        cells = {}
        for (i, j, r), s in sol.items():
            cells.setdefault((i, j), [0] * mu)[r] = s
        return Trade(mu, m, cells)

    witness, rest = _run_prefixes(shapes, solve_one, meter, (budget or SearchBudget()).jobs)
    out = _finish(witness, rest, meter, check=lambda t: verify_trade(t).ok and t.k == k)
    out.stats["shapes"] = len(shapes)
    return out


def _transversal_empty_ok(shape) -> bool:
    """(3,4,6) shape filter: every 4x4 sub-block with 12 cells has an empty transversal.

    In a (3,4,6) trade the cells holding any fixed symbol fill a 4x4 block
    minus a transversal, and the transversal cells are empty.  So some 4x4
    row/column block must contain exactly 12 filled cells.
    """
    m = len(shape)
    for rows in itertools.combinations(range(m), 4):
        for cols in itertools.combinations(range(m), 4):
            n = sum(1 for i in rows for j in cols if shape[i] >> j & 1)
            if n == 12:
                return True
    return False


# ---------------------------------------------------------------------------
# the (3,4,7) label relaxation

ROW5_PAIRS = list(itertools.combinations(range(4), 2))


def empty_cell_distributions() -> list[frozenset[tuple[int, int]]]:
    """Filled-cell patterns of a putative (3,4,7) trade, 0-based (row, col).

    Symbol 1 fills the 4x4 block minus the anti-diagonal transversal; the
    lower-right 3x3 block has its single empty cell at (5,5); column 5 takes
    two of rows 1-4 and columns 6, 7 one each (the lower row to column 6),
    and symmetrically for row 5 and rows 6, 7.
    """
    base = {(i, j) for i in range(4) for j in range(4) if i + j != 3}
    base |= {(i, j) for i in range(4, 7) for j in range(4, 7) if (i, j) != (4, 4)}
    out = []
    for rpair in ROW5_PAIRS:
        rrest = [i for i in range(4) if i not in rpair]
        for cpair in ROW5_PAIRS:
            crest = [j for j in range(4) if j not in cpair]
            cells = set(base)
            cells |= {(i, 4) for i in rpair}
            cells |= {(rrest[0], 5), (rrest[1], 6)}
            cells |= {(4, j) for j in cpair}
            cells |= {(5, crest[0]), (6, crest[1])}
            out.append(frozenset(cells))
    return out


FIRST_ROW_CONFIGS = [
    ((0, 1, 2), (0, 1, 3), (0, 2, 3)),   # 123, 124, 134 on the first row's L-cells
    ((0, 1, 3), (0, 2, 3), (0, 1, 2)),   # 124, 134, 123
    ((0, 2, 3), (0, 1, 3), (0, 1, 2)),   # 134, 124, 123
]


@dataclass
class LabelSearchResult:
    solutions: int
    cases: int
    distributions: int
    configurations: int
    nodes_per_case: list[dict]
    example: dict | None = None

    def to_dict(self) -> dict:
        return {"solutions": self.solutions, "cases": self.cases,
                "distributions": self.distributions, "configurations": self.configurations,
                "nodes": sum(c["nodes"] for c in self.nodes_per_case),
                "nodes_per_case": self.nodes_per_case, "example": self.example}


def label_search_347(union_bound: bool = True, stop_at: int | None = None) -> LabelSearchResult:
    """Count row/column labellings that a (3,4,7) trade would induce.

    Labels are 4-subsets of {1..7}: rows/columns 1-4 contain 1, the others
    do not; row 1 is {1,2,3,4}; the columns of row 1's filled cells contain
    the given 3-sets ({2,3,4} for its cell outside the block); every symbol is
    in exactly four row labels and four column labels; and for each filled
    cell the row and column labels have a union of at most five symbols.
    """
    dists = empty_cell_distributions()
    if len(dists) != 36:
        raise SearchError(f"expected 36 distributions, derived {len(dists)}")
    labels = [frozenset(c) for c in itertools.combinations(range(7), 4)]
    masks = [sum(1 << s for s in lab) for lab in labels]
    with_one = [x for x in masks if x & 1]
    without_one = [x for x in masks if not x & 1]
    total = 0
    per_case = []
    example = None
    for dn, cells in enumerate(dists):
        row1_cols = sorted(j for (i, j) in cells if i == 0)
        inner = [j for j in row1_cols if j < 4]
        outer = [j for j in row1_cols if j >= 4]
        for cn, config in enumerate(FIRST_ROW_CONFIGS):
            forced = {j: sum(1 << s for s in sets) for j, sets in zip(inner, config)}
            forced[outer[0]] = 0b1110  # {2,3,4}
            nodes = [0]
            found = _label_dfs(cells, forced, with_one, without_one, masks, union_bound,
                               nodes, stop_at)
            total += found[0]
            if found[1] is not None and example is None:
                example = {"distribution": dn, "configuration": cn, **found[1]}
            per_case.append({"distribution": dn, "configuration": cn,
                             "nodes": nodes[0], "solutions": found[0]})
            if stop_at is not None and total >= stop_at:
                return LabelSearchResult(total, len(per_case), len(dists),
                                         len(FIRST_ROW_CONFIGS), per_case, example)
    return LabelSearchResult(total, len(per_case), len(dists), len(FIRST_ROW_CONFIGS),
                             per_case, example)


def _label_dfs(cells, forced, with_one, without_one, masks, union_bound, nodes, stop_at):
    """MRV search over the 13 free labels; returns (solution count, first solution)."""
    n = 7
    lab = {("r", 0): 0b1111}
    nbrs = {}
    for i in range(n):
        nbrs[("r", i)] = [("c", j) for j in range(n) if (i, j) in cells]
        nbrs[("c", i)] = [("r", j) for j in range(n) if (j, i) in cells]
    free = [("r", i) for i in range(1, n)] + [("c", j) for j in range(n)]
    pools = {}
    for v in free:
        pool = with_one if v[1] < 4 else without_one
        if v[0] == "c" and v[1] in forced:
            pool = [x for x in pool if x & forced[v[1]] == forced[v[1]]]
        pools[v] = pool
    cnt = {"r": [0] * n, "c": [0] * n}
    for sym in _bits(0b1111):
        cnt["r"][sym] += 1
    left = {"r": n - 1, "c": n}
    count = [0]
    first = [None]

    def options(v):
        side = cnt[v[0]]
        out = []
        for x in pools[v]:
            if any(side[sym] >= 4 for sym in _bits(x)):
                continue
            if union_bound and any(w in lab and (x | lab[w]).bit_count() > 5 for w in nbrs[v]):
                continue
            out.append(x)
        return out

    def rec():
        nodes[0] += 1
        if stop_at is not None and count[0] >= stop_at:
            return
        open_vars = [v for v in free if v not in lab]
        if not open_vars:
            count[0] += 1
            if first[0] is None:
                first[0] = {"rows": [sorted(q + 1 for q in _bits(lab[("r", i)])) for i in range(n)],
                            "cols": [sorted(q + 1 for q in _bits(lab[("c", j)])) for j in range(n)]}
            return
        # each symbol needs exactly four labels on each side
        for side in "rc":
            if any(4 - c > left[side] for c in cnt[side]):
                return
        best, best_opts = None, None
        for v in open_vars:
            opts = options(v)
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = v, opts
                if not opts:
                    return
        side = best[0]
        for x in best_opts:
            lab[best] = x
            left[side] -= 1
            for sym in _bits(x):
                cnt[side][sym] += 1
            rec()
            for sym in _bits(x):
                cnt[side][sym] -= 1
            left[side] += 1
            del lab[best]

    rec()
    return count[0], first[0]


def save_checkpoint(path, outcome: SearchOutcome) -> None:
    with open(path, "w") as fh:
        json.dump(outcome.checkpoint or [], fh)


def load_checkpoint(path) -> list:
    with open(path) as fh:
        return json.load(fh)

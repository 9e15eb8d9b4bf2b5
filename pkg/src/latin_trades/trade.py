"""Trade data model and verification of the homogeneous Latin trade axioms.

Rows, columns and symbols are stored 0-based; every external format
(JSON, rendered grids, public accessors taking ``one_based=True``) is 1-based.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

MAX_VIOLATIONS = 1000


class TradeError(ValueError):
    """Raised for structurally malformed trades (bad indices, bad mu)."""


@dataclass(frozen=True)
class Violation:
    rule: str
    location: str
    detail: str

    def to_dict(self) -> dict:
        return {"rule": self.rule, "location": self.location, "detail": self.detail}


@dataclass
class VerificationReport:
    violations: list[Violation] = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, location: str, detail: str) -> None:
        if len(self.violations) >= MAX_VIOLATIONS:
            self.truncated = True
            return
        self.violations.append(Violation(rule, location, detail))

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "truncated": self.truncated,
            "violations": [v.to_dict() for v in self.violations],
        }


# rule names used in reports
SHAPE = "SHAPE"
DISTINCT = "DISTINCT-ENTRIES"
LATIN = "LATIN-PER-LAYER"
ROW_BALANCE = "ROW-BALANCE"
COL_BALANCE = "COL-BALANCE"
HOMOGENEITY = "HOMOGENEITY"
EMPTY_LINE = "NO-EMPTY-LINES"
VOLUME = "VOLUME"


class Trade:
    """A mu-way partial Latin square collection on an m x m grid.

    ``cells`` maps 0-based ``(row, col)`` to a tuple of ``mu`` 0-based symbols,
    entry ``r`` belonging to layer ``r``.  Instances are treated as immutable.
    """

    __slots__ = ("mu", "m", "_cells", "_hash")

    def __init__(self, mu: int, m: int, cells: Mapping[tuple[int, int], Iterable[int]]):
        if mu < 2:
            raise TradeError(f"mu must be at least 2, got {mu}")
        if m < 0:
            raise TradeError(f"order must be non-negative, got {m}")
        store: dict[tuple[int, int], tuple[int, ...]] = {}
        for (i, j), entries in cells.items():
            entries = tuple(entries)
            if not (0 <= i < m and 0 <= j < m):
                raise TradeError(f"cell ({i + 1},{j + 1}) outside the {m}x{m} grid")
            if len(entries) != mu:
                raise TradeError(
                    f"cell ({i + 1},{j + 1}) has {len(entries)} entries, expected {mu}"
                )
            for s in entries:
                if not 0 <= s < m:
                    raise TradeError(f"cell ({i + 1},{j + 1}) symbol {s + 1} outside 1..{m}")
            store[(i, j)] = entries
        self.mu = mu
        self.m = m
        self._cells = dict(sorted(store.items()))
        self._hash = None

    @property
    def cells(self) -> Mapping[tuple[int, int], tuple[int, ...]]:
        return self._cells

    @property
    def volume(self) -> int:
        return len(self._cells)

    @property
    def k(self) -> int:
        """Filled cells in the first row (the homogeneity degree if the trade is valid)."""
        return sum(1 for (i, _) in self._cells if i == 0)

    @property
    def params(self) -> tuple[int, int, int]:
        return (self.mu, self.k, self.m)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trade):
            return NotImplemented
        return self.mu == other.mu and self.m == other.m and self._cells == other._cells

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.mu, self.m, tuple(self._cells.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Trade(mu={self.mu}, k={self.k}, m={self.m}, volume={self.volume})"

    def entry(self, row: int, col: int) -> tuple[int, ...] | None:
        """1-based lookup; returns 1-based entries or None for an empty cell."""
        e = self._cells.get((row - 1, col - 1))
        return None if e is None else tuple(s + 1 for s in e)

    def layer(self, r: int) -> dict[tuple[int, int], int]:
        """Layer ``r`` (1-based) as a 1-based map ``(row, col) -> symbol``."""
        if not 1 <= r <= self.mu:
            raise IndexError(f"layer {r} outside 1..{self.mu}")
        return {(i + 1, j + 1): e[r - 1] + 1 for (i, j), e in self._cells.items()}

    # transformations used by tests and by the searchers

    def relabel(self, rows=None, cols=None, symbols=None, layers=None) -> "Trade":
        """Apply 0-based permutations (sequences) to rows, columns, symbols, layers."""
        ident = range(self.m)
        rows = rows if rows is not None else ident
        cols = cols if cols is not None else ident
        symbols = symbols if symbols is not None else ident
        layers = layers if layers is not None else range(self.mu)
        out = {}
        for (i, j), e in self._cells.items():
            out[(rows[i], cols[j])] = tuple(symbols[e[layers[r]]] for r in range(self.mu))
        return Trade(self.mu, self.m, out)

    def transpose(self) -> "Trade":
        return Trade(self.mu, self.m, {(j, i): e for (i, j), e in self._cells.items()})

    def rotate_layers(self) -> "Trade":
        return Trade(self.mu, self.m, {c: e[1:] + e[:1] for c, e in self._cells.items()})

    # JSON

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "m": self.m,
            "k": self.k,
            "cells": [
                {"row": i + 1, "col": j + 1, "entries": [s + 1 for s in e]}
                for (i, j), e in self._cells.items()
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Trade":
        try:
            mu, m = int(data["mu"]), int(data["m"])
            cells = {}
            for c in data["cells"]:
                key = (int(c["row"]) - 1, int(c["col"]) - 1)
                if key in cells:
                    raise TradeError(f"duplicate cell ({key[0] + 1},{key[1] + 1})")
                cells[key] = [int(s) - 1 for s in c["entries"]]
        except (KeyError, TypeError) as exc:
            raise TradeError(f"malformed trade JSON: {exc!r}") from exc
        return cls(mu, m, cells)

    @classmethod
    def from_json(cls, text: str) -> "Trade":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_rows(cls, rows: list[list[tuple[int, ...] | None]]) -> "Trade":
        """Build from a dense 1-based grid; ``None`` marks an empty cell."""
        m = len(rows)
        cells = {}
        mu = None
        for i, row in enumerate(rows):
            for j, e in enumerate(row):
                if e is not None:
                    mu = len(e)
                    cells[(i, j)] = [s - 1 for s in e]
        return cls(mu or 2, m, cells)


def layer(t: Trade, r: int) -> dict[tuple[int, int], int]:
    return t.layer(r)


def verify_trade(t: Trade) -> VerificationReport:
    """Check every homogeneous-trade axiom and collect all violations."""
    rep = VerificationReport()
    mu, m = t.mu, t.m
    cells = t.cells

    for (i, j), e in cells.items():
        if len(set(e)) != mu:
            rep.add(DISTINCT, f"cell ({i + 1},{j + 1})",
                    f"entries {[s + 1 for s in e]} are not pairwise distinct")

    # symbol occurrences per (layer, line)
    row_syms = [defaultdict(list) for _ in range(mu)]
    col_syms = [defaultdict(list) for _ in range(mu)]
    row_fill: Counter = Counter()
    col_fill: Counter = Counter()
    sym_count = [Counter() for _ in range(mu)]
    for (i, j), e in cells.items():
        row_fill[i] += 1
        col_fill[j] += 1
        for r, s in enumerate(e):
            row_syms[r][i].append(s)
            col_syms[r][j].append(s)
            sym_count[r][s] += 1

    for r in range(mu):
        for kind, table in (("row", row_syms[r]), ("column", col_syms[r])):
            for line, syms in sorted(table.items()):
                if len(set(syms)) != len(syms):
                    dup = sorted(s + 1 for s, c in Counter(syms).items() if c > 1)
                    rep.add(LATIN, f"layer {r + 1} {kind} {line + 1}",
                            f"symbols {dup} repeated")

    for rule, kind, table in ((ROW_BALANCE, "row", row_syms), (COL_BALANCE, "column", col_syms)):
        lines = set(table[0])
        for line in sorted(lines):
            base = set(table[0][line])
            for r in range(1, mu):
                other = set(table[r][line])
                if other != base:
                    rep.add(rule, f"{kind} {line + 1}",
                            f"layer {r + 1} set {sorted(s + 1 for s in other)} != "
                            f"layer 1 set {sorted(s + 1 for s in base)}")

    k = t.k
    for kind, fill in (("row", row_fill), ("column", col_fill)):
        for line in range(m):
            c = fill.get(line, 0)
            if c == 0:
                rep.add(EMPTY_LINE, f"{kind} {line + 1}", "no filled cell")
            elif c != k:
                rep.add(HOMOGENEITY, f"{kind} {line + 1}", f"{c} filled cells, expected k={k}")
    for r in range(mu):
        for s in range(m):
            c = sym_count[r].get(s, 0)
            if c != k:
                rep.add(HOMOGENEITY, f"layer {r + 1} symbol {s + 1}",
                        f"appears {c} times, expected k={k}")

    if len(cells) != k * m:
        rep.add(VOLUME, "trade", f"volume {len(cells)} != k*m = {k * m}")
    return rep


def render_grid(t: Trade) -> str:
    """Layer-1 symbol followed by the other layers, '/'-separated; '•' marks empty."""
    if t.m == 0:
        return ""
    width = max(len("/".join(str(s + 1) for s in e)) for e in t.cells.values()) if t.cells else 1
    lines = []
    for i in range(t.m):
        parts = []
        for j in range(t.m):
            e = t.cells.get((i, j))
            text = "•" if e is None else "/".join(str(s + 1) for s in e)
            parts.append(text.rjust(width))
        lines.append(" ".join(parts))
    return "\n".join(lines)

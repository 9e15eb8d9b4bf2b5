"""Circulant trades: base rows, their verification and diagonal expansion."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .trade import Trade, TradeError, VerificationReport


class BaseRowError(ValueError):
    def __init__(self, message: str, report: VerificationReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class BaseRow:
    """A first row ``{(a_1..a_mu)_c}``; symbols and columns are 1-based.

    ``entries`` holds ``(symbols, column)`` pairs sorted by column.
    """

    m: int
    mu: int
    entries: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "entries",
            tuple(sorted(((tuple(s), int(c)) for s, c in self.entries), key=lambda e: (e[1], e[0]))),
        )

    @classmethod
    def of(cls, m: int, items: Iterable[tuple[Sequence[int], int]]) -> "BaseRow":
        items = [(tuple(s), c) for s, c in items]
        if not items:
            raise BaseRowError("a base row needs at least one entry")
        return cls(m, len(items[0][0]), tuple(items))

    @property
    def k(self) -> int:
        return len(self.entries)

    def with_order(self, m: int) -> "BaseRow":
        """Same entries read at another order (parametric families)."""
        return BaseRow(m, self.mu, self.entries)

    def shift(self, d: int = 1) -> "BaseRow":
        m = self.m
        return BaseRow(m, self.mu, tuple(
            (tuple((s - 1 + d) % m + 1 for s in syms), (c - 1 + d) % m + 1)
            for syms, c in self.entries
        ))

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "m": self.m,
            "entries": [{"symbols": list(s), "col": c} for s, c in self.entries],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "BaseRow":
        try:
            entries = tuple((tuple(int(x) for x in e["symbols"]), int(e["col"]))
                            for e in data["entries"])
            return cls(int(data["m"]), int(data["mu"]), entries)
        except (KeyError, TypeError) as exc:
            raise BaseRowError(f"malformed base-row JSON: {exc!r}") from exc

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def __str__(self) -> str:
        body = ",".join(f"({','.join(map(str, s))})_{c}" for s, c in self.entries)
        return "{" + body + "}"


def parse_base_row(text: str, m: int) -> BaseRow:
    """Parse the compact notation ``{(1,3,2)_1,(3,2,5)_2,...}``."""
    import re

    items = []
    for syms, col in re.findall(r"\(([\d,\s]+)\)_\{?(\d+)\}?", text):
        items.append((tuple(int(x) for x in syms.split(",")), int(col)))
    return BaseRow.of(m, items)


def verify_base_row(b: BaseRow) -> VerificationReport:
    """Check a base row against the circulant conditions.

    (i) symbols within an item distinct, (ii) columns distinct, (iii) every
    layer uses the same first-row symbol set, (iv) every layer uses the same
    set of differences ``a_r - c (mod m)``.  Each layer's k symbols and k
    differences must also be distinct, otherwise the expansion repeats a
    symbol in a row or column.
    """
    m, mu = b.m, b.mu
    for syms, c in b.entries:
        if len(syms) != mu:
            raise BaseRowError(f"item {syms}_{c} does not have {mu} symbols")
        if not 1 <= c <= m or any(not 1 <= s <= m for s in syms):
            raise BaseRowError(f"item {syms}_{c} has a value outside 1..{m}")

    rep = VerificationReport()
    for syms, c in b.entries:
        if len(set(syms)) != mu:
            rep.add("(i) distinct symbols", f"column {c}", f"symbols {list(syms)} repeat")
    cols = [c for _, c in b.entries]
    if len(set(cols)) != len(cols):
        dup = sorted({c for c in cols if cols.count(c) > 1})
        rep.add("(ii) distinct columns", "base row", f"columns {dup} repeat")

    k = b.k
    row_sets, diff_sets = [], []
    for r in range(mu):
        row = [syms[r] for syms, _ in b.entries]
        diff = [(syms[r] - c) % m for syms, c in b.entries]
        if len(set(row)) != k:
            rep.add("(iii) row symbol set", f"layer {r + 1}",
                    f"first-row symbols {row} are not distinct")
        if len(set(diff)) != k:
            rep.add("(iv) column symbol set", f"layer {r + 1}",
                    f"differences {diff} (mod {m}) are not distinct")
        row_sets.append(set(row))
        diff_sets.append(set(diff))
    for r in range(1, mu):
        if row_sets[r] != row_sets[0]:
            rep.add("(iii) row symbol set", f"layer {r + 1}",
                    f"{sorted(row_sets[r])} != layer 1 {sorted(row_sets[0])}")
        if diff_sets[r] != diff_sets[0]:
            rep.add("(iv) column symbol set", f"layer {r + 1}",
                    f"{sorted(diff_sets[r])} != layer 1 {sorted(diff_sets[0])} (mod {m})")
    return rep


def expand_base_row(b: BaseRow, check: bool = True) -> Trade:
    """Shift the base row along the diagonals: cell (1+i, c+i) gets a_r + i (mod m)."""
    if check:
        rep = verify_base_row(b)
        if not rep.ok:
            raise BaseRowError(f"invalid base row {b}: {rep.violations[0].detail}", rep)
    m = b.m
    cells = {}
    for i in range(m):
        for syms, c in b.entries:
            key = (i, (c - 1 + i) % m)
            if key in cells:
                raise TradeError(f"expansion collides at cell ({key[0] + 1},{key[1] + 1})")
            cells[key] = tuple((s - 1 + i) % m for s in syms)
    return Trade(b.mu, m, cells)

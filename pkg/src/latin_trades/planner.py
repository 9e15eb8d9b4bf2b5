"""Existence planning for (3, k, m) trades with executable construction recipes."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .circulant import BaseRow, expand_base_row, parse_base_row
from .compose import (cyclic_trade, delete_diagonal, direct_sum, mod6_family, product,
                      select_layers, sum_over_ols)
from .mols import (MolsError, MolsSet, idempotent_mols, macneish_product, orthogonal_pair)
from .trade import Trade, verify_trade

CERT_ENV = "LATIN_TRADES_CERTS"

NONEXISTENT_TABLE = {
    (4, 6): "Proposition (3,4,6): there is no (3,4,6) Latin trade",
    (4, 7): "Proposition (3,4,7): there is no (3,4,7) Latin trade",
}
OPEN_TABLE = {
    (4, 11): "open case: existence of a (3,4,11) Latin trade is unresolved",
    (5, 6): "open case: existence of a (3,5,6) Latin trade is unresolved",
}
KHOM_CITATION = "Corollary khom: a (mu,mu,m) trade exists if and only if mu | m"


class PlanError(ValueError):
    pass


class ExecutionError(RuntimeError):
    def __init__(self, message: str, path: tuple[int, ...]):
        super().__init__(f"{message} (at recipe node {list(path)})")
        self.path = path


# catalog


@dataclass(frozen=True)
class CatalogEntry:
    k: int
    name: str
    base_row: BaseRow          # read at its own order, or at m_min for families
    provenance: str
    m: int | None = None       # fixed order
    m_min: int | None = None   # parametric family: valid for every m >= m_min

    @property
    def parametric(self) -> bool:
        return self.m_min is not None

    def covers(self, m: int) -> bool:
        return m == self.m if self.m is not None else m >= self.m_min

    def instantiate(self, m: int) -> BaseRow:
        if not self.covers(m):
            raise PlanError(f"{self.name} does not cover m={m}")
        return self.base_row.with_order(m)

    def to_dict(self) -> dict:
        d = {"k": self.k, "name": self.name, "provenance": self.provenance,
             "base_row": self.base_row.to_dict()["entries"]}
        if self.parametric:
            d["m_min"] = self.m_min
        else:
            d["m"] = self.m
        return d


@lru_cache(maxsize=None)
def _load_catalog() -> tuple[CatalogEntry, ...]:
    text = resources.files("latin_trades.data").joinpath("catalog.json").read_text()
    out = []
    for e in json.loads(text)["entries"]:
        order = e.get("m", e.get("m_min"))
        out.append(CatalogEntry(
            k=e["k"], name=e["name"], base_row=parse_base_row(e["base_row"], order),
            provenance=e["provenance"], m=e.get("m"), m_min=e.get("m_min"),
        ))
    return tuple(out)


def catalog() -> list[CatalogEntry]:
    return list(_load_catalog())


def catalog_lookup(k: int, m: int) -> CatalogEntry | None:
    fixed = [e for e in _load_catalog() if e.k == k and e.m == m]
    if fixed:
        return fixed[0]
    for e in _load_catalog():
        if e.k == k and e.parametric and e.covers(m):
            return e
    return None


# decomposition over a numerical semigroup


def decompose(m: int, parts: Iterable[int]) -> list[int] | None:
    """Write m as a non-negative combination of ``parts`` (sorted list) or None."""
    parts = sorted({p for p in parts if p >= 1}, reverse=True)
    if m < 0 or not parts:
        return None
    choice = [0] * (m + 1)
    ok = [False] * (m + 1)
    ok[0] = True
    for n in range(1, m + 1):
        for p in parts:
            if p <= n and ok[n - p]:
                ok[n], choice[n] = True, p
                break
    if not ok[m]:
        return None
    out, n = [], m
    while n:
        out.append(choice[n])
        n -= choice[n]
    return sorted(out)


# recipes


@dataclass
class Recipe:
    kind: str
    mu: int
    k: int
    m: int
    params: dict = field(default_factory=dict)
    children: list["Recipe | None"] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "mu": self.mu, "k": self.k, "m": self.m,
            "params": self.params,
            "children": [None if c is None else c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Recipe":
        return cls(d["kind"], d["mu"], d["k"], d["m"], dict(d.get("params", {})),
                   [None if c is None else cls.from_dict(c) for c in d.get("children", [])])

    def describe(self, indent: int = 0) -> str:
        pad = "  " * indent
        extra = ", ".join(f"{k}={v}" for k, v in self.params.items()
                          if k not in ("base_row", "trade"))
        line = f"{pad}{self.kind}({self.mu},{self.k},{self.m}){' ' + extra if extra else ''}"
        lines = [line]
        for c in self.children:
            lines.append(f"{pad}  EMPTY" if c is None else c.describe(indent + 1))
        return "\n".join(lines)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children if c is not None)


def _idempotent_set(q: int, mu: int) -> MolsSet:
    """mu idempotent MOLS of order q: a field, or a MacNeish product of fields."""
    factors = idempotent_factors(q, mu)
    if factors is None:
        raise MolsError(f"no {mu} idempotent MOLS of order {q} available")
    acc = None
    for f in factors:
        part = idempotent_mols(f, mu)
        acc = part if acc is None else macneish_product(acc, part)
    return acc


def idempotent_factors(q: int, mu: int) -> list[int] | None:
    """Prime-power factorisation of q if each factor gives mu idempotent MOLS."""
    out, n, d = [], q, 2
    while n > 1:
        if n % d == 0:
            f = 1
            while n % d == 0:
                n //= d
                f *= d
            out.append(f)
        d += 1
    if not out or any(f - 2 < mu for f in out):
        return None
    return out


def execute(r: Recipe, _path: tuple[int, ...] = ()) -> Trade:
    """Build the trade a recipe describes and check it against the declared parameters.

    A node whose params carry ``layers`` is built with ``source_mu`` layers
    and then cut down to the listed (0-based) ones.
    """
    try:
        if "layers" in r.params:
            src = Recipe(r.kind, r.params["source_mu"], r.k, r.m, r.params, r.children)
            t = select_layers(_execute_node(src, _path), r.params["layers"])
        else:
            t = _execute_node(r, _path)
    except ExecutionError:
        raise
    except Exception as exc:  # noqa: BLE001 - any sub-construction failure aborts with its path
        raise ExecutionError(f"{r.kind} failed: {exc}", _path) from exc
    if t.params != (r.mu, r.k, r.m):
        raise ExecutionError(f"{r.kind} produced {t.params}, declared {(r.mu, r.k, r.m)}", _path)
    rep = verify_trade(t)
    if not rep.ok:
        raise ExecutionError(f"{r.kind} output fails verification: {rep.violations[0].rule}", _path)
    return t


def _execute_node(r: Recipe, path) -> Trade:
    kids = [None if c is None else execute(c, path + (n,)) for n, c in enumerate(r.children)]
    kind = r.kind
    if kind == "CYCLIC":
        return cyclic_trade(r.mu, r.k)
    if kind == "CATALOG":
        entry = next((e for e in _load_catalog() if e.name == r.params["entry"]), None)
        if entry is None:
            raise PlanError(f"unknown catalog entry {r.params['entry']}")
        return expand_base_row(entry.instantiate(r.m))
    if kind == "MOD6":
        return expand_base_row(mod6_family(r.m))
    if kind == "SEARCH_FOUND":
        if "base_row" in r.params:
            return expand_base_row(BaseRow.from_dict(r.params["base_row"]))
        return Trade.from_dict(r.params["trade"])
    if kind == "DELETE_DIAGONAL":
        return delete_diagonal(_idempotent_set(r.params["q"], r.mu), r.mu)
    if kind == "DIRECT_SUM":
        acc = kids[0]
        for t in kids[1:]:
            acc = direct_sum(acc, t)
        return acc
    if kind == "PRODUCT":
        return product(kids[0], kids[1])
    if kind == "SUM_OVER_OLS":
        return sum_over_ols(kids, r.params["p"], orthogonal_pair(r.params["l"]))
    raise PlanError(f"unknown recipe kind {kind}")


# existence status


@dataclass
class ExistenceStatus:
    verdict: str                 # EXISTS | NONEXISTENT | UNKNOWN
    k: int
    m: int
    recipe: Recipe | None = None
    reason: str = ""
    annotations: list[str] = field(default_factory=list)
    trade: Trade | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict, "mu": 3, "k": self.k, "m": self.m}
        if self.recipe is not None:
            d["recipe"] = self.recipe.to_dict()
        if self.reason:
            d["reason"] = self.reason
        if self.annotations:
            d["annotations"] = self.annotations
        return d


def paper_claims_exists(k: int, m: int) -> bool:
    """Whether the main existence theorem asserts a (3, k, m) trade (m >= k >= 3)."""
    if k == 3:
        return m % 3 == 0
    if k == 4 and m not in (6, 7, 11):
        return True
    if k == 5 and m != 6:
        return True
    if 6 <= k <= 13 or k == 15:
        return True
    if k >= 4 and m >= k * k:
        return True
    if m % 5 == 0 and m != 30:
        return True
    if m % 7 == 0 and m != 42 and (k, m) != (4, 7):
        return True
    return False


# certificate store


def _store_dirs() -> list[Path]:
    dirs = [Path(str(resources.files("latin_trades.data").joinpath("certificates")))]
    extra = os.environ.get(CERT_ENV)
    if extra:
        dirs += [Path(p) for p in extra.split(os.pathsep) if p]
    return dirs


def load_certificates(dirs: Sequence[Path] | None = None) -> dict[tuple[int, int], dict]:
    """Read ``mu3_k{K}_m{M}.json`` files; each holds a base row or a trade."""
    import re

    out = {}
    for d in (dirs if dirs is not None else _store_dirs()):
        if not d.is_dir():
            continue
        for f in sorted(d.glob("mu3_k*_m*.json")):
            mt = re.fullmatch(r"mu3_k(\d+)_m(\d+)\.json", f.name)
            if mt:
                out[(int(mt.group(1)), int(mt.group(2)))] = json.loads(f.read_text())
    return out


def save_certificate(directory: Path, k: int, m: int, witness: BaseRow | Trade) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"mu3_k{k}_m{m}.json"
    path.write_text(witness.to_json())
    return path


# planner


class Planner:
    """Decides existence of (3, k, m) trades and produces verified recipes."""

    MU = 3
    BITRADE_SEARCH_MAX_M = 5

    def __init__(self, certificates: dict[tuple[int, int], dict] | None = None,
                 search_budget: float = 0.0):
        self.certificates = load_certificates() if certificates is None else certificates
        self.search_budget = search_budget
        self._cache: dict[tuple[int, int], Recipe | None] = {}
        self._atomic_cache: dict[tuple[int, int], Recipe | None] = {}
        self._bitrades: dict[tuple[int, int], Recipe | None] = {}

    # leaves

    def _leaf(self, k: int, m: int) -> Recipe | None:
        mu = self.MU
        if k == m:
            return Recipe("CYCLIC", mu, k, m, {"mu": mu, "k": k})
        entry = catalog_lookup(k, m)
        if entry is not None:
            return Recipe("CATALOG", mu, k, m, {"entry": entry.name,
                                                 "provenance": entry.provenance})
        if m % 6 == 1 and m >= 7 and k == m - 2:
            return Recipe("MOD6", mu, k, m, {"m": m})
        cert = self.certificates.get((k, m))
        if cert is not None:
            key = "base_row" if "entries" in cert else "trade"
            return Recipe("SEARCH_FOUND", mu, k, m, {"source": "certificate-store", key: cert})
        if m == k + 1 and idempotent_factors(m, mu) is not None:
            return Recipe("DELETE_DIAGONAL", mu, k, m, {"q": m, "mu": mu})
        return None

    def _sum_over_ols(self, k: int, m: int) -> Recipe | None:
        for l in range(3, m // 3 + 1):
            if m % l or l == 6:
                continue
            p = m // l
            if p < 3:
                continue
            avail = sorted({j for j in range(3, p + 1) if self.build(j, p) is not None},
                           reverse=True)
            combo = _bounded_combo(k, l, avail)
            if combo is None:
                continue
            children = [self.build(j, p) if j else None for j in combo]
            return Recipe("SUM_OVER_OLS", self.MU, k, m, {"l": l, "p": p}, children)
        return None

    def bitrade(self, k: int, m: int) -> Recipe | None:
        """A (2, k, m) recipe: cyclic, two layers of a 3-way recipe, or a small search."""
        key = (k, m)
        if key in self._bitrades:
            return self._bitrades[key]
        r = None
        if k == m:
            r = Recipe("CYCLIC", 2, k, m, {"mu": 2, "k": k})
        elif k >= 3 and self.build(k, m) is not None:
            r = _project(self.build(k, m), [0, 1])
        else:
            from .search import SearchBudget, search_base_row, search_trade

            out = search_base_row(2, k, m, SearchBudget(nodes=20000))
            if out.verdict == "FOUND":
                r = Recipe("SEARCH_FOUND", 2, k, m, {"source": "base-row-search",
                                                      "base_row": out.witness.to_dict()})
            elif m <= self.BITRADE_SEARCH_MAX_M:
                out = search_trade(2, k, m, SearchBudget(seconds=10))
                if out.verdict == "FOUND":
                    r = Recipe("SEARCH_FOUND", 2, k, m, {"source": "trade-search",
                                                          "trade": out.witness.to_dict()})
        self._bitrades[key] = r
        return r

    def _product(self, k: int, m: int) -> Recipe | None:
        """Three layers of the product of two bitrades (4-way, then cut down)."""
        for m1 in range(2, m // 2 + 1):
            if m % m1:
                continue
            m2 = m // m1
            if m1 > m2:
                break
            for k1 in range(2, m1 + 1):
                if k % k1:
                    continue
                k2 = k // k1
                if not 2 <= k2 <= m2:
                    continue
                a, b = self.bitrade(k1, m1), self.bitrade(k2, m2)
                if a is None or b is None:
                    continue
                return Recipe("PRODUCT", self.MU, k, m,
                              {"layers": [0, 1, 2], "source_mu": 4}, [a, b])
        return None

    def atomic(self, k: int, m: int) -> Recipe | None:
        """A recipe that is not itself a direct sum."""
        key = (k, m)
        if key not in self._atomic_cache:
            self._atomic_cache[key] = None
            self._atomic_cache[key] = (self._leaf(k, m) or self._sum_over_ols(k, m)
                                       or self._product(k, m))
        return self._atomic_cache[key]

    def build(self, k: int, m: int) -> Recipe | None:
        """Constructive route to a (3, k, m) trade, ignoring search; memoized."""
        key = (k, m)
        if key in self._cache:
            return self._cache[key]
        self._cache[key] = None  # guards recursion
        r = None
        if m >= k >= 3:
            if k == 3:
                if m % 3 == 0:
                    r = self._direct_sum([Recipe("CYCLIC", self.MU, 3, 3, {"mu": 3, "k": 3})] * (m // 3))
            else:
                r = self._leaf(k, m)
                if r is None:
                    atoms = [n for n in range(k, m - k + 1) if self.atomic(k, n) is not None]
                    parts = decompose(m, atoms)
                    if parts is not None:
                        r = self._direct_sum([self.atomic(k, n) for n in reversed(parts)])
                if r is None:
                    r = self._sum_over_ols(k, m)
                if r is None:
                    r = self._product(k, m)
        self._cache[key] = r
        return r

    def _direct_sum(self, parts: list[Recipe]) -> Recipe:
        if len(parts) == 1:
            return parts[0]
        return Recipe("DIRECT_SUM", self.MU, parts[0].k, sum(p.m for p in parts),
                      {"orders": [p.m for p in parts]}, list(parts))

    def plan(self, k: int, m: int, execute_recipe: bool = True) -> ExistenceStatus:
        if k < 3:
            raise PlanError(f"k must be at least 3, got {k}")
        if m < k:
            raise PlanError(f"m must be at least k, got m={m} < k={k}")
        if k == 3:
            if m % 3:
                return ExistenceStatus("NONEXISTENT", k, m, reason=KHOM_CITATION)
        elif (k, m) in NONEXISTENT_TABLE:
            return ExistenceStatus("NONEXISTENT", k, m, reason=NONEXISTENT_TABLE[(k, m)])
        elif (k, m) in OPEN_TABLE and (k, m) not in self.certificates:
            return ExistenceStatus("UNKNOWN", k, m, reason=OPEN_TABLE[(k, m)])
        recipe = self.build(k, m)
        if recipe is None and self.search_budget > 0:
            recipe = self._search(k, m)
        if recipe is None:
            notes = ["paper-claims-exists"] if paper_claims_exists(k, m) else []
            return ExistenceStatus("UNKNOWN", k, m, reason="no implemented construction reaches this case",
                                   annotations=notes)
        status = ExistenceStatus("EXISTS", k, m, recipe=recipe)
        if execute_recipe:
            status.trade = execute(recipe)
        return status

    def _search(self, k: int, m: int) -> Recipe | None:
        """Bounded fallback: randomized hunting, then the exhaustive base-row DFS."""
        from .search import SearchBudget, hunt_base_row, search_base_row

        half = self.search_budget / 2
        out = hunt_base_row(self.MU, k, m, SearchBudget(seconds=half), seed=k * 1000 + m)
        if out.verdict != "FOUND":
            out = search_base_row(self.MU, k, m, SearchBudget(seconds=half))
        if out.verdict != "FOUND":
            return None
        recipe = Recipe("SEARCH_FOUND", self.MU, k, m, {"source": "base-row-search",
                                                         "base_row": out.witness.to_dict()})
        self._cache[(k, m)] = recipe
        return recipe


def _project(r: Recipe, layers: list[int]) -> Recipe:
    """The same construction restricted to some of its layers."""
    if r.kind == "CYCLIC":
        return Recipe("CYCLIC", len(layers), r.k, r.m, {"mu": len(layers), "k": r.k})
    params = dict(r.params)
    if "layers" in params:
        layers = [params["layers"][i] for i in layers]
    else:
        params["source_mu"] = r.mu
    params["layers"] = layers
    return Recipe(r.kind, len(layers), r.k, r.m, params, r.children)


def _bounded_combo(k: int, l: int, avail: list[int]) -> list[int] | None:
    """l values from {0} U avail summing to k, at least one non-zero (largest first)."""
    if k <= 0 or not avail:
        return None
    # reach[c][s]: using c non-zero parts reach sum s
    best: dict[tuple[int, int], int] = {}

    def solve(c: int, s: int) -> bool:
        if s == 0:
            return True
        if c == 0:
            return False
        key = (c, s)
        if key in best:
            return best[key] >= 0
        best[key] = -1
        for a in avail:
            if a <= s and solve(c - 1, s - a):
                best[key] = a
                return True
        return False

    if not solve(l, k):
        return None
    out, c, s = [], l, k
    while s:
        a = best[(c, s)]
        out.append(a)
        c, s = c - 1, s - a
    return out + [0] * (l - len(out))


_default: Planner | None = None


def default_planner() -> Planner:
    global _default
    if _default is None:
        _default = Planner()
    return _default


def plan(k: int, m: int) -> ExistenceStatus:
    return default_planner().plan(k, m)

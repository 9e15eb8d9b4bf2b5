"""Latin squares, finite-field MOLS, idempotent MOLS and orthogonal pairs.

Squares are stored 0-based (symbols 0..n-1); JSON I/O is 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence

MAX_ORDER = 70
MAX_FIELD = 64

# monic irreducible polynomials, coefficients from x^0 upward
IRREDUCIBLE = {
    4: (2, (1, 1, 1)),
    8: (2, (1, 1, 0, 1)),
    9: (3, (1, 0, 1)),
    16: (2, (1, 1, 0, 0, 1)),
    25: (5, (2, 0, 1)),
    27: (3, (1, 2, 0, 1)),
    32: (2, (1, 0, 1, 0, 0, 1)),
    49: (7, (1, 0, 1)),
    64: (2, (1, 1, 0, 0, 0, 0, 1)),
}


class MolsError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``q == p**e`` or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not _is_prime(p):
                return None
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            return (p, e) if r == 1 else None
    return None


@dataclass(frozen=True)
class FiniteField:
    """GF(q) with elements 0..q-1 (base-p digit vectors for extension fields)."""

    q: int
    p: int
    add: tuple[tuple[int, ...], ...]
    mul: tuple[tuple[int, ...], ...]

    def neg(self, a: int) -> int:
        return self.add[a].index(0)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.mul[a].index(1)


@lru_cache(maxsize=None)
def finite_field(q: int) -> FiniteField:
    pe = prime_power(q)
    if pe is None:
        raise MolsError(f"{q} is not a prime power")
    p, e = pe
    if e == 1:
        add = tuple(tuple((a + b) % p for b in range(p)) for a in range(p))
        mul = tuple(tuple((a * b) % p for b in range(p)) for a in range(p))
        return FiniteField(q, p, add, mul)
    if q not in IRREDUCIBLE:
        raise MolsError(f"no irreducible polynomial tabulated for q={q}")
    _, poly = IRREDUCIBLE[q]

    def digits(a):
        return [(a // p**i) % p for i in range(e)]

    def value(ds):
        return sum(d * p**i for i, d in enumerate(ds))

    def pmul(a, b):
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(digits(a)):
            if x:
                for j, y in enumerate(digits(b)):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by the monic modulus, highest degree first
        for d in range(2 * e - 2, e - 1, -1):
            c = prod[d]
            if c:
                for i in range(e + 1):
                    prod[d - e + i] = (prod[d - e + i] - c * poly[i]) % p
        return value(prod[:e])

    add = tuple(tuple(value([(x + y) % p for x, y in zip(digits(a), digits(b))])
                      for b in range(q)) for a in range(q))
    mul = tuple(tuple(pmul(a, b) for b in range(q)) for a in range(q))
    return FiniteField(q, p, add, mul)


@dataclass(frozen=True)
class LatinSquare:
    grid: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.grid)

    def __getitem__(self, ij):
        i, j = ij
        return self.grid[i][j]

    def is_latin(self) -> bool:
        n = self.n
        full = set(range(n))
        return (all(len(r) == n and set(r) == full for r in self.grid)
                and all({self.grid[i][j] for i in range(n)} == full for j in range(n)))

    def is_idempotent(self) -> bool:
        return all(self.grid[i][i] == i for i in range(self.n))

    def to_dict(self) -> dict:
        return {"n": self.n, "rows": [[s + 1 for s in r] for r in self.grid]}

    @classmethod
    def from_dict(cls, data) -> "LatinSquare":
        sq = cls(tuple(tuple(int(s) - 1 for s in r) for r in data["rows"]))
        if sq.n != int(data["n"]):
            raise MolsError("row count does not match n")
        return sq

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "LatinSquare":
        return cls(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class MolsSet:
    n: int
    squares: tuple[LatinSquare, ...]

    def __len__(self) -> int:
        return len(self.squares)

    def certify(self) -> bool:
        if not all(s.n == self.n and s.is_latin() for s in self.squares):
            return False
        sq = self.squares
        return all(verify_orthogonal(sq[a], sq[b])
                   for a in range(len(sq)) for b in range(a + 1, len(sq)))


def verify_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    if a.n != b.n:
        raise MolsError(f"order mismatch: {a.n} vs {b.n}")
    n = a.n
    pairs = {(a.grid[i][j], b.grid[i][j]) for i in range(n) for j in range(n)}
    return len(pairs) == n * n


def _check_field_order(q: int) -> FiniteField:
    if not 2 <= q <= MAX_FIELD:
        raise MolsError(f"field order {q} outside the supported range 2..{MAX_FIELD}")
    return finite_field(q)


def field_mols(q: int) -> MolsSet:
    """The q-1 squares L_a(i, j) = a*i + j over GF(q), a != 0."""
    if q < 3:
        raise MolsError("field_mols needs q >= 3")
    f = _check_field_order(q)
    squares = tuple(
        LatinSquare(tuple(tuple(f.add[f.mul[a][i]][j] for j in range(q)) for i in range(q)))
        for a in range(1, q)
    )
    return MolsSet(q, squares)


def idempotent_mols(q: int, count: int) -> MolsSet:
    """``count`` idempotent MOLS of order q from L_a with a not in {0, -1}.

    Row i of L_a maps through a*i + j; the diagonal i -> (a+1)*i is a
    bijection whenever a != -1, and then relabeling symbols along the
    diagonal makes the square idempotent.  Relabeling each square on its own
    keeps orthogonality.
    """
    if q < 4:
        raise MolsError("idempotent_mols needs q >= 4")
    f = _check_field_order(q)
    minus_one = f.neg(1)
    usable = [a for a in range(1, q) if a != minus_one]
    if count > len(usable) or count < 0:
        raise MolsError(f"at most {len(usable)} idempotent squares of order {q} from this construction")
    out = []
    for a in usable[:count]:
        grid = [[f.add[f.mul[a][i]][j] for j in range(q)] for i in range(q)]
        relabel = {grid[i][i]: i for i in range(q)}
        out.append(LatinSquare(tuple(tuple(relabel[s] for s in row) for row in grid)))
    return MolsSet(q, tuple(out))


def macneish_product(a: MolsSet, b: MolsSet) -> MolsSet:
    """Componentwise product on index pairs; symbol (x, y) -> x*b.n + y."""
    if not a.squares or not b.squares:
        raise MolsError("macneish_product needs non-empty inputs")
    n1, n2 = a.n, b.n
    out = []
    for s, t in zip(a.squares, b.squares):
        grid = tuple(
            tuple(s.grid[i1][j1] * n2 + t.grid[i2][j2] for j1 in range(n1) for j2 in range(n2))
            for i1 in range(n1) for i2 in range(n2)
        )
        out.append(LatinSquare(grid))
    return MolsSet(n1 * n2, tuple(out))


def _odd_pair(n: int) -> tuple[LatinSquare, LatinSquare]:
    a = LatinSquare(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))
    b = LatinSquare(tuple(tuple((i - j) % n for j in range(n)) for i in range(n)))
    return a, b


@lru_cache(maxsize=None)
def _pair_tables() -> dict[int, tuple[LatinSquare, LatinSquare]]:
    text = resources.files("latin_trades.data").joinpath("orthogonal_pairs.json").read_text()
    tables = {}
    for entry in json.loads(text):
        a = LatinSquare.from_dict(entry["squares"][0])
        b = LatinSquare.from_dict(entry["squares"][1])
        if not (a.is_latin() and b.is_latin() and verify_orthogonal(a, b)):
            raise MolsError(f"embedded pair of order {a.n} fails certification")
        tables[a.n] = (a, b)
    return tables


def _factor_pairs(n: int) -> list[int]:
    """Split n into prime-power factors."""
    out, d = [], 2
    while n > 1:
        if n % d == 0:
            q = 1
            while n % d == 0:
                n //= d
                q *= d
            out.append(q)
        d += 1
    return out


@lru_cache(maxsize=None)
def orthogonal_pair(l: int) -> tuple[LatinSquare, LatinSquare]:
    """A certified pair of orthogonal Latin squares of order l (l != 2, 6)."""
    if l in (2, 6):
        raise MolsError(f"no pair of orthogonal Latin squares of order {l} exists")
    if l < 1 or l > MAX_ORDER:
        raise MolsError(f"order {l} outside the supported range 1..{MAX_ORDER}")
    if l == 1:
        one = LatinSquare(((0,),))
        pair = (one, one)
    elif l % 2 == 1:
        pair = _odd_pair(l)
    elif prime_power(l) is not None:
        s = field_mols(l).squares
        pair = (s[0], s[1])
    elif l % 4 == 0:
        acc = None
        for q in _factor_pairs(l):
            part = MolsSet(q, orthogonal_pair(q))
            acc = part if acc is None else macneish_product(acc, part)
        pair = (acc.squares[0], acc.squares[1])
    else:
        tables = _pair_tables()
        if l in tables:
            pair = tables[l]
        else:
            # l = 2 (mod 4): odd part times a tabulated 2 (mod 4) order
            pair = None
            for base in sorted(tables):
                if l % base == 0 and (l // base) % 2 == 1:
                    acc = macneish_product(MolsSet(base, tables[base]),
                                           MolsSet(l // base, orthogonal_pair(l // base)))
                    pair = (acc.squares[0], acc.squares[1])
                    break
            if pair is None:
                raise MolsError(f"no orthogonal pair of order {l} available")
    if not verify_orthogonal(*pair):
        raise MolsError(f"orthogonal pair of order {l} failed certification")
    return pair

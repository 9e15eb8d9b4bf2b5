"""Offline generator for the embedded orthogonal-pair tables (orders 2 mod 4).

Squares of order n = g + x are built on Z_g plus x fixed points.  Away from
the fixed points A(i, j) = i + a*(j - i) and B(i, j) = i + b*(j - i); three
(or x) diagonals of each square are redirected to the fixed points and the
displaced values are moved to the border rows/columns.  Only the choice of
redirected diagonals and border permutations is searched.

Usage: python scripts/gen_orthogonal_pairs.py > src/latin_trades/data/orthogonal_pairs.json
"""

from collections import Counter
import json
import random
import sys
from math import gcd

from latin_trades.mols import LatinSquare, orthogonal_pair, verify_orthogonal

ORDERS = [10, 14, 18, 22, 26, 34, 38, 46, 58, 62]


def unit(v, g):
    return gcd(v % g, g) == 1


def attempt(n, x, rng, tries=200000):
    g = n - x
    mults = [(a, b) for a in range(2, g) for b in range(2, g)
             if a != b and all(unit(v, g) for v in (a, a - 1, b, b - 1, b - a))]
    if not mults:
        return None
    corner_a, corner_b = orthogonal_pair(x)
    for _ in range(tries):
        a, b = rng.choice(mults)
        ds = rng.sample(range(g), 2 * x)
        da, db = ds[:x], ds[x:]
        need = Counter(((b - a) * d) % g for d in da + db)
        # relabelling the fixed points lets the A-side border orders be fixed
        beta = [(a * d) % g for d in da]
        gamma = [((a - 1) * d) % g for d in da]
        mb = [(b * d) % g for d in db]
        gb = [((b - 1) * d) % g for d in db]
        hit = match(beta + gamma, [mb] * x + [gb] * x, x, g, need)
        if hit is not None:
            beta2, gamma2 = hit[:x], hit[x:]
            return build(g, x, a, b, da, db, beta, gamma, beta2, gamma2,
                         corner_a, corner_b)
    return None


def match(left, pools, x, g, need):
    """Pair each left value with an unused pool value so the differences hit ``need``."""
    chosen = []
    used = [set(), set()]

    def rec(i):
        if i == len(left):
            return True
        side = 0 if i < x else 1
        for t, v in enumerate(pools[i]):
            d = (v - left[i]) % g
            if t in used[side] or need[d] == 0:
                continue
            need[d] -= 1
            used[side].add(t)
            chosen.append(v)
            if rec(i + 1):
                return True
            chosen.pop()
            used[side].discard(t)
            need[d] += 1
        return False

    return list(chosen) if rec(0) else None


def build(g, x, a, b, da, db, beta, gamma, beta2, gamma2, ca, cb):
    n = g + x

    def square(mult, dinf, bet, gam, corner):
        grid = [[None] * n for _ in range(n)]
        for i in range(g):
            for j in range(g):
                d = (j - i) % g
                grid[i][j] = g + dinf.index(d) if d in dinf else (i + mult * d) % g
            for s in range(x):
                grid[i][g + s] = (i + bet[s]) % g
                grid[g + s][i] = (i + gam[s]) % g
        for s in range(x):
            for t in range(x):
                grid[g + s][g + t] = g + corner.grid[s][t]
        return LatinSquare.from_rows(grid)

    return square(a, da, beta, gamma, ca), square(b, db, beta2, gamma2, cb)


def main():
    rng = random.Random(20240601)
    out = []
    for n in ORDERS:
        pair = None
        for x in (3, 5, 7):
            if n - x < 5:
                continue
            pair = attempt(n, x, rng)
            if pair:
                break
        if pair is None:
            print(f"order {n}: not found", file=sys.stderr)
            continue
        A, B = pair
        assert A.is_latin() and B.is_latin() and verify_orthogonal(A, B)
        print(f"order {n}: found with x={x}", file=sys.stderr)
        out.append({"n": n, "squares": [A.to_dict(), B.to_dict()]})
    json.dump(out, sys.stdout, separators=(",", ":"))


if __name__ == "__main__":
    main()

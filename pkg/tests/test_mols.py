import itertools

import pytest

from latin_trades.mols import (MAX_FIELD, IRREDUCIBLE, LatinSquare, MolsError, MolsSet,
                               field_mols, finite_field, idempotent_mols, macneish_product,
                               orthogonal_pair, prime_power, verify_orthogonal)

FIELDS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64]


def brute_orthogonal(a, b):
    n = a.n
    return len({(a.grid[i][j], b.grid[i][j]) for i in range(n) for j in range(n)}) == n * n


@pytest.mark.parametrize("q", FIELDS)
def test_field_axioms(q):
    f = finite_field(q)
    els = range(q)
    for a in els:
        assert f.add[0][a] == a and f.mul[1][a] == a
        if a:
            assert sorted(f.mul[a][b] for b in els) == list(els)
    # distributivity and associativity on a sample grid
    sample = list(els)[: min(q, 9)]
    for a, b, c in itertools.product(sample, repeat=3):
        assert f.mul[a][f.add[b][c]] == f.add[f.mul[a][b]][f.mul[a][c]]
        assert f.mul[f.mul[a][b]][c] == f.mul[a][f.mul[b][c]]
        assert f.add[f.add[a][b]][c] == f.add[a][f.add[b][c]]


def test_prime_power():
    assert prime_power(27) == (3, 3)
    assert prime_power(12) is None
    assert prime_power(1) is None
    with pytest.raises(MolsError):
        finite_field(6)
    assert max(IRREDUCIBLE) == MAX_FIELD


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_field_mols_complete(q):
    s = field_mols(q)
    assert len(s) == q - 1
    for a, b in itertools.combinations(s.squares, 2):
        assert brute_orthogonal(a, b)


def test_field_mols_small_q():
    with pytest.raises(MolsError):
        field_mols(2)
    with pytest.raises(MolsError):
        field_mols(10)


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 13])
def test_idempotent(q):
    s = idempotent_mols(q, q - 2)
    assert len(s) == q - 2
    assert all(sq.is_idempotent() and sq.is_latin() for sq in s.squares)
    assert s.certify()
    with pytest.raises(MolsError):
        idempotent_mols(q, q - 1)


def test_idempotent_needs_q4():
    with pytest.raises(MolsError):
        idempotent_mols(3, 1)


def test_macneish():
    s = macneish_product(idempotent_mols(5, 3), idempotent_mols(7, 3))
    assert s.n == 35 and len(s) == 3
    assert s.certify()
    assert all(sq.is_idempotent() for sq in s.squares)


@pytest.mark.parametrize("l", [n for n in range(3, 71) if n not in (6, 46, 58, 62)])
def test_orthogonal_pair(l):
    a, b = orthogonal_pair(l)
    assert a.n == b.n == l
    assert a.is_latin() and b.is_latin()
    assert brute_orthogonal(a, b) and verify_orthogonal(a, b)


@pytest.mark.parametrize("l", [2, 6, 46, 71])
def test_orthogonal_pair_errors(l):
    with pytest.raises(MolsError):
        orthogonal_pair(l)


def test_verify_orthogonal_negative():
    a = LatinSquare.from_rows([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert not verify_orthogonal(a, a)
    assert not MolsSet(3, (a, a)).certify()


def test_square_json():
    a = orthogonal_pair(10)[0]
    assert LatinSquare.from_dict(a.to_dict()) == a

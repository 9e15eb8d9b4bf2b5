"""Independent oracles."""


def representable(m: int, parts) -> bool:
    """Brute force: try every count vector for the given parts."""
    parts = sorted(set(parts), reverse=True)

    def rec(i, left):
        if left == 0:
            return True
        if i == len(parts):
            return False
        p = parts[i]
        return any(rec(i + 1, left - c * p) for c in range(left // p + 1))

    return rec(0, m)


def theorem_claims(k: int, m: int) -> bool:
    """Cells (m >= k >= 3) the main existence theorem asserts, read clause by clause."""
    if k == 3:
        return m % 3 == 0  # the remaining clauses implicitly assume k >= 4
    clauses = [
        k == 4 and m not in (6, 7, 11),
        k == 5 and m != 6,
        6 <= k <= 13,
        k == 15,
        m >= k * k,
        m % 5 == 0 and m != 30,
        m % 7 == 0 and m != 42 and (k, m) != (4, 7),
    ]
    return any(clauses)


def expected_verdict(k: int, m: int) -> str:
    """Verdict expected from the planner once certificates are included."""
    if k == 3:
        return "EXISTS" if m % 3 == 0 else "NONEXISTENT"
    if (k, m) in {(4, 6), (4, 7)}:
        return "NONEXISTENT"
    if (k, m) in {(4, 11), (5, 6)}:
        return "UNKNOWN"
    return "EXISTS"

"""Exact rational linear feasibility via a Phase-I simplex.

Solves {x >= 0 : A x = b} over the rationals.  Bland's rule makes the
pivot sequence deterministic and cycling-free; all arithmetic is
``Fraction``, so feasibility answers are exact.  Problem sizes here are
tiny (a handful of rows, a dozen columns), so no effort is spent on
sparsity or revised-simplex bookkeeping.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_nonneg_equalities(rows: list[list[Fraction]],
                            rhs: list[Fraction]) -> list[Fraction] | None:
    """Return some x >= 0 with rows . x = rhs, or None if infeasible."""
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])

    # normalize to b >= 0, then append one artificial per row
    tab = []
    for i in range(m):
        row = [Fraction(v) for v in rows[i]]
        b = Fraction(rhs[i])
        if b < 0:
            row = [-v for v in row]
            b = -b
        tab.append(row + [ONE if j == i else ZERO for j in range(m)] + [b])

    basis = [n + i for i in range(m)]
    total = n + m

    # objective: minimize the sum of artificials; reduced costs start as
    # the negated column sums over the constraint rows
    cost = [ZERO] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            cost[j] -= tab[i][j]
    for i in range(m):
        cost[n + i] += ONE

    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        ratio = None
        leave = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                r = tab[i][total] / a
                if ratio is None or r < ratio or (r == ratio
                                                  and basis[i] < basis[leave]):
                    ratio, leave = r, i
        if leave is None:
            # the phase-one objective is bounded below by zero, so an
            # unbounded ray cannot occur; defensive guard only
            return None
        _pivot(tab, cost, basis, leave, enter, total)

    if -cost[total] != 0:  # optimal artificial mass is positive
        return None

    x = [ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][total]
        elif tab[i][total] != 0:
            return None  # degenerate artificial stuck at positive level
    return x


def _pivot(tab, cost, basis, leave, enter, total):
    piv = tab[leave][enter]
    tab[leave] = [v / piv for v in tab[leave]]
    for i in range(len(tab)):
        if i != leave and tab[i][enter] != 0:
            f = tab[i][enter]
            tab[i] = [v - f * w for v, w in zip(tab[i], tab[leave])]
    if cost[enter] != 0:
        f = cost[enter]
        for j in range(total + 1):
            cost[j] -= f * tab[leave][j]
    basis[leave] = enter

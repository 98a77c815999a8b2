"""Linear algebra over GF(2) on Python integers used as bit rows."""

from __future__ import annotations

from typing import Sequence


def independent_subset(rows: Sequence[int]) -> list[int]:
    """Indices of a greedy (first-come) maximal independent subset of ``rows``."""
    basis: dict[int, int] = {}
    keep = []
    for i, r in enumerate(rows):
        for piv in sorted(basis, reverse=True):
            if r >> piv & 1:
                r ^= basis[piv]
        if r:
            basis[r.bit_length() - 1] = r
            keep.append(i)
    return keep


def rank(rows: Sequence[int]) -> int:
    return len(independent_subset(rows))


class RightInverse:
    """Solve ``<row_i, v> = b_i`` for full-row-rank ``rows``.

    ``<r, v>`` is the parity of ``r & v``.  Solutions set only pivot columns of
    the reduced row-echelon form, so results are deterministic.
    """

    def __init__(self, rows: Sequence[int]):
        m = len(rows)
        # Each entry: (reduced row, combination of original rows as an m-bit mask).
        work = [(r, 1 << i) for i, r in enumerate(rows)]
        reduced: list[tuple[int, int, int]] = []  # (pivot, row, combo)
        for r, combo in work:
            for piv, row, c in reduced:
                if r >> piv & 1:
                    r ^= row
                    combo ^= c
            if r == 0:
                raise ValueError("rows are linearly dependent")
            piv = r.bit_length() - 1
            # Keep full RREF: clear the new pivot from earlier rows.
            reduced = [
                (p, row ^ r, c ^ combo) if row >> piv & 1 else (p, row, c)
                for p, row, c in reduced
            ]
            reduced.append((piv, r, combo))
        self.m = m
        self._reduced = reduced

    def solve(self, b: int) -> int:
        """Return ``v`` with ``<rows[i], v> = bit i of b``."""
        v = 0
        for piv, _row, combo in self._reduced:
            if (combo & b).bit_count() % 2:
                v |= 1 << piv
        return v

"""Brute-force DWBC enumeration, the independent check on the determinant formula.

Edge conventions
----------------
Horizontal edge ``h[i][j]`` sits to the left of vertex ``(i, j)`` in row ``i``
(``j = 0..N``); it is ``+1`` when the arrow points right.  Vertical edge
``v[i][j]`` sits above vertex ``(i, j)`` (``i = 0..N``); it is ``+1`` when
the arrow points down.

Domain walls: top arrows point down into the lattice, bottom arrows point
up, left arrows point left and right arrows point right (both outwards).

Vertex types (left, right, top, bottom arrows)::

    1  R R D D   a        4  L L D D   b
    2  L L U U   a        5  R L U D   c   (horizontal in, vertical out)
    3  R R U U   b        6  L R D U   c   (horizontal out, vertical in)

Only the class partition {a, a, b, b, c, c} enters ``Z_N``; swapping which
straight-through pair is called ``a`` maps ``x`` to ``-x``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

MAX_N = 6

R, L = 1, -1
D, U = 1, -1

# (left, right, top, bottom) -> type
VERTEX_TYPES = {
    (R, R, D, D): 1,
    (L, L, U, U): 2,
    (R, R, U, U): 3,
    (L, L, D, D): 4,
    (R, L, U, D): 5,
    (L, R, D, U): 6,
}
VERTEX_CLASS = {1: "a", 2: "a", 3: "b", 4: "b", 5: "c", 6: "c"}


@dataclass(frozen=True)
class VertexType:
    tag: int
    left: int
    right: int
    top: int
    bottom: int

    @property
    def weight_class(self) -> str:
        return VERTEX_CLASS[self.tag]

    def arrows_in(self) -> int:
        return (self.left == R) + (self.right == L) + (self.top == D) + (self.bottom == U)


VERTICES = tuple(VertexType(t, *k) for k, t in VERTEX_TYPES.items())


@dataclass(frozen=True)
class Configuration:
    N: int
    horizontal_edges: tuple  # N rows of N+1 entries
    vertical_edges: tuple  # N+1 rows of N entries
    counts: tuple = field(default=())  # n_1..n_6

    @property
    def class_counts(self) -> tuple[int, int, int]:
        n = self.counts
        return n[0] + n[1], n[2] + n[3], n[4] + n[5]

    def vertex_type(self, i: int, j: int) -> int:
        h, v = self.horizontal_edges, self.vertical_edges
        return VERTEX_TYPES[(h[i][j], h[i][j + 1], v[i][j], v[i + 1][j])]

    def to_asm(self) -> tuple:
        """Alternating sign matrix: +1 at type-6 vertices, -1 at type-5."""
        return tuple(
            tuple({6: 1, 5: -1}.get(self.vertex_type(i, j), 0) for j in range(self.N))
            for i in range(self.N)
        )

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "horizontal_edges": [list(r) for r in self.horizontal_edges],
            "vertical_edges": [list(r) for r in self.vertical_edges],
            "counts": list(self.counts),
        }


def _check_n(N: int, cap: int) -> None:
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > cap:
        raise ValueError(
            f"brute-force enumeration refused for N={N}: cap is {cap} "
            f"(the configuration count grows like the ASM numbers)"
        )


def _row_completions(above: tuple, N: int):
    """Yield (horizontal row, vertical row below, types) for one lattice row."""

    def rec(j, left, hs, below, types):
        if j == N:
            if left == R:  # right boundary points out of the lattice
                yield tuple(hs), tuple(below), tuple(types)
            return
        top = above[j]
        for right in (R, L):
            for bottom in (D, U):
                tag = VERTEX_TYPES.get((left, right, top, bottom))
                if tag is None:
                    continue
                hs.append(right)
                below.append(bottom)
                types.append(tag)
                yield from rec(j + 1, right, hs, below, types)
                hs.pop()
                below.pop()
                types.pop()

    yield from rec(0, L, [L], [], [])


def enumerate_configs(N: int, cap: int = MAX_N) -> list[Configuration]:
    """Every DWBC configuration of the ``N x N`` lattice, by row-wise backtracking."""
    _check_n(N, cap)
    out = []
    bottom_boundary = (U,) * N

    def rec(i, above, hrows, vrows, counts):
        if i == N:
            if above == bottom_boundary:
                out.append(
                    Configuration(
                        N=N,
                        horizontal_edges=tuple(hrows),
                        vertical_edges=tuple(vrows),
                        counts=tuple(counts[t] for t in range(1, 7)),
                    )
                )
            return
        for hrow, below, types in _row_completions(above, N):
            c = counts.copy()
            c.update(types)
            rec(i + 1, below, hrows + [hrow], vrows + [below], c)

    top = (D,) * N
    rec(0, top, [], [top], Counter())
    return out


def enumerate_asms(N: int) -> list[tuple]:
    """Alternating sign matrices generated directly (no arrows involved)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = []

    def rows_for(colsum):
        # row entries in {-1,0,1}; row partial sums in {0,1}; column sums stay in {0,1}
        def rec(j, partial, row):
            if j == N:
                if partial == 1:
                    yield tuple(row)
                return
            for e in (0, 1, -1):
                p = partial + e
                cs = colsum[j] + e
                if p not in (0, 1) or cs not in (0, 1):
                    continue
                row.append(e)
                yield from rec(j + 1, p, row)
                row.pop()

        yield from rec(0, 0, [])

    def rec(i, colsum, rows):
        if i == N:
            if all(c == 1 for c in colsum):
                out.append(tuple(rows))
            return
        for row in rows_for(colsum):
            rec(i + 1, [c + e for c, e in zip(colsum, row)], rows + [row])

    rec(0, [0] * N, [])
    return out


def class_histogram(N: int, cap: int = MAX_N) -> Counter:
    """Multiset of (n_a, n_b, n_c) over all configurations."""
    return Counter(cfg.class_counts for cfg in enumerate_configs(N, cap))


def partition_bruteforce(N: int, a, b, c, cap: int = MAX_N) -> Fraction:
    """Sum over configurations of ``a^{n_a} b^{n_b} c^{n_c}``, exact."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if min(a, b, c) <= 0:
        raise ValueError("weights must be positive")
    total = Fraction(0)
    for (na, nb, nc), mult in class_histogram(N, cap).items():
        total += mult * a**na * b**nb * c**nc
    return total


def partition_six_weights(N: int, w: tuple, cap: int = MAX_N) -> Fraction:
    """``Z_N`` for six independent weights ``w_1..w_6`` (rational)."""
    w = [Fraction(v) for v in w]
    total = Fraction(0)
    for cfg in enumerate_configs(N, cap):
        term = Fraction(1)
        for wi, ni in zip(w, cfg.counts):
            term *= wi**ni
        total += term
    return total


@dataclass(frozen=True)
class ConservationReport:
    N: int
    rows: tuple  # (n_1..n_6, n_5 - n_6, n_c) per configuration
    n5_minus_n6: frozenset
    nc_values: frozenset

    @property
    def constant(self) -> bool:
        return len(self.n5_minus_n6) == 1

    @property
    def nc_parity(self) -> frozenset:
        return frozenset(v % 2 for v in self.nc_values)


def conservation_report(N: int, cap: int = MAX_N) -> ConservationReport:
    """Check that ``n_5 - n_6`` does not depend on the configuration."""
    rows = []
    for cfg in enumerate_configs(N, cap):
        n = cfg.counts
        rows.append(n + (n[4] - n[5], n[4] + n[5]))
    return ConservationReport(
        N=N,
        rows=tuple(rows),
        n5_minus_n6=frozenset(r[6] for r in rows),
        nc_values=frozenset(r[7] for r in rows),
    )

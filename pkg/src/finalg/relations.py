"""Binary and quaternary relations as immutable bitsets.

A BinRel over U x V stores membership in one Python int, bit a*n_right + b.
A QuadRel over A x A x B x B reuses that layout with the two coordinate
pairs packed mixed-radix: bit ((a1*nA + a2)*nB + b1)*nB + b2, i.e. it is the
binary relation between the pair universes A^2 and B^2.  Composition works
row-by-row with OR of precomputed row masks.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

from .errors import SignatureError


def _row_masks(bits: int, n_left: int, n_right: int) -> list[int]:
    full = (1 << n_right) - 1
    return [(bits >> (a * n_right)) & full for a in range(n_left)]


@dataclass(frozen=True)
class BinRel:
    n_left: int
    n_right: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (self.n_left * self.n_right):
            raise SignatureError("relation bits outside the given rectangle")

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_pairs(n_left: int, n_right: int, pairs: Iterable[tuple[int, int]]) -> "BinRel":
        bits = 0
        for a, b in pairs:
            if not (0 <= a < n_left and 0 <= b < n_right):
                raise SignatureError(f"pair ({a},{b}) outside {n_left}x{n_right}")
            bits |= 1 << (a * n_right + b)
        return BinRel(n_left, n_right, bits)

    @staticmethod
    def identity(n: int) -> "BinRel":
        bits = 0
        for a in range(n):
            bits |= 1 << (a * n + a)
        return BinRel(n, n, bits)

    @staticmethod
    def full(n_left: int, n_right: int) -> "BinRel":
        return BinRel(n_left, n_right, (1 << (n_left * n_right)) - 1)

    # -- queries -----------------------------------------------------------

    def __contains__(self, pair: tuple[int, int]) -> bool:
        a, b = pair
        return bool((self.bits >> (a * self.n_right + b)) & 1)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __len__(self) -> int:
        return self.bits.bit_count()

    def pairs(self) -> Iterator[tuple[int, int]]:
        bits = self.bits
        while bits:
            low = bits & -bits
            i = low.bit_length() - 1
            yield divmod(i, self.n_right)
            bits ^= low

    def row(self, a: int) -> int:
        return (self.bits >> (a * self.n_right)) & ((1 << self.n_right) - 1)

    def is_subset(self, other: "BinRel") -> bool:
        self._check_shape(other)
        return self.bits & ~other.bits == 0

    def _check_shape(self, other: "BinRel") -> None:
        if (self.n_left, self.n_right) != (other.n_left, other.n_right):
            raise SignatureError("relation shapes differ")

    # -- boolean algebra ---------------------------------------------------

    def union(self, other: "BinRel") -> "BinRel":
        self._check_shape(other)
        return BinRel(self.n_left, self.n_right, self.bits | other.bits)

    def intersection(self, other: "BinRel") -> "BinRel":
        self._check_shape(other)
        return BinRel(self.n_left, self.n_right, self.bits & other.bits)

    def difference(self, other: "BinRel") -> "BinRel":
        self._check_shape(other)
        return BinRel(self.n_left, self.n_right, self.bits & ~other.bits)

    # -- relational calculus -----------------------------------------------

    def converse(self) -> "BinRel":
        bits = 0
        for a, b in self.pairs():
            bits |= 1 << (b * self.n_left + a)
        return BinRel(self.n_right, self.n_left, bits)

    def compose(self, other: "BinRel") -> "BinRel":
        """(a,c) related iff some b has (a,b) here and (b,c) there."""
        if self.n_right != other.n_left:
            raise SignatureError("relations do not compose")
        rows = _row_masks(other.bits, other.n_left, other.n_right)
        bits = 0
        for a in range(self.n_left):
            mids = self.row(a)
            out = 0
            while mids:
                low = mids & -mids
                out |= rows[low.bit_length() - 1]
                mids ^= low
            bits |= out << (a * other.n_right)
        return BinRel(self.n_left, other.n_right, bits)

    def is_reflexive(self) -> bool:
        return self.n_left == self.n_right and BinRel.identity(self.n_left).is_subset(self)

    def is_symmetric(self) -> bool:
        return self.n_left == self.n_right and self.bits == self.converse().bits

    def is_transitive(self) -> bool:
        return self.n_left == self.n_right and self.compose(self).is_subset(self)

    def transitive_closure(self) -> "BinRel":
        if self.n_left != self.n_right:
            raise SignatureError("transitive closure needs a square relation")
        cur = self
        while True:
            nxt = cur.union(cur.compose(cur))
            if nxt.bits == cur.bits:
                return cur
            cur = nxt

    def equivalence_closure(self) -> "BinRel":
        return self.union(self.converse()).union(BinRel.identity(self.n_left)).transitive_closure()

    def image(self, subset: int) -> int:
        """OR of rows selected by a left-side bitmask."""
        out = 0
        while subset:
            low = subset & -subset
            out |= self.row(low.bit_length() - 1)
            subset ^= low
        return out

    # -- text format -------------------------------------------------------

    def format(self) -> str:
        return ",".join(f"({a},{b})" for a, b in sorted(self.pairs()))

    @staticmethod
    def parse(text: str, n_left: int, n_right: int | None = None) -> "BinRel":
        """Parse "(0,1),(2,3)"; whitespace is ignored, "" is empty."""
        if n_right is None:
            n_right = n_left
        stripped = re.sub(r"\s+", "", text)
        if not stripped:
            return BinRel(n_left, n_right, 0)
        if not re.fullmatch(r"(\(\d+,\d+\))(,\(\d+,\d+\))*", stripped):
            raise SignatureError(f"malformed pair list: {text!r}")
        pairs = [(int(a), int(b)) for a, b in re.findall(r"\((\d+),(\d+)\)", stripped)]
        return BinRel.from_pairs(n_left, n_right, pairs)


def union_all(rels: Iterable[BinRel]) -> BinRel:
    rels = list(rels)
    if not rels:
        raise SignatureError("union of no relations")
    return reduce(BinRel.union, rels)


@dataclass(frozen=True)
class QuadRel:
    """Subset of A x A x B x B, stored as a BinRel between pair universes."""

    n_a: int
    n_b: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (self.n_a * self.n_a * self.n_b * self.n_b):
            raise SignatureError("quad bits outside the given box")

    @staticmethod
    def from_quads(n_a: int, n_b: int, quads: Iterable[tuple[int, int, int, int]]) -> "QuadRel":
        bits = 0
        for a1, a2, b1, b2 in quads:
            if not (0 <= a1 < n_a and 0 <= a2 < n_a and 0 <= b1 < n_b and 0 <= b2 < n_b):
                raise SignatureError(f"quad ({a1},{a2},{b1},{b2}) outside {n_a}^2 x {n_b}^2")
            bits |= 1 << (((a1 * n_a + a2) * n_b + b1) * n_b + b2)
        return QuadRel(n_a, n_b, bits)

    def _as_binrel(self) -> BinRel:
        return BinRel(self.n_a * self.n_a, self.n_b * self.n_b, self.bits)

    def __contains__(self, quad: tuple[int, int, int, int]) -> bool:
        a1, a2, b1, b2 = quad
        return bool((self.bits >> (((a1 * self.n_a + a2) * self.n_b + b1) * self.n_b + b2)) & 1)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __len__(self) -> int:
        return self.bits.bit_count()

    def quads(self) -> Iterator[tuple[int, int, int, int]]:
        for left, right in self._as_binrel().pairs():
            a1, a2 = divmod(left, self.n_a)
            b1, b2 = divmod(right, self.n_b)
            yield (a1, a2, b1, b2)

    def is_subset(self, other: "QuadRel") -> bool:
        if (self.n_a, self.n_b) != (other.n_a, other.n_b):
            raise SignatureError("quad shapes differ")
        return self.bits & ~other.bits == 0

    def union(self, other: "QuadRel") -> "QuadRel":
        if (self.n_a, self.n_b) != (other.n_a, other.n_b):
            raise SignatureError("quad shapes differ")
        return QuadRel(self.n_a, self.n_b, self.bits | other.bits)

    def intersection(self, other: "QuadRel") -> "QuadRel":
        if (self.n_a, self.n_b) != (other.n_a, other.n_b):
            raise SignatureError("quad shapes differ")
        return QuadRel(self.n_a, self.n_b, self.bits & other.bits)

    # -- projections and trace ---------------------------------------------

    def pr12(self) -> BinRel:
        bits = 0
        for left in range(self.n_a * self.n_a):
            if self._as_binrel().row(left):
                bits |= 1 << left
        return BinRel(self.n_a, self.n_a, bits)

    def pr34(self) -> BinRel:
        bits = 0
        for _, right in self._as_binrel().pairs():
            bits |= 1 << right
        return BinRel(self.n_b, self.n_b, bits)

    def trace(self) -> BinRel:
        """Pairs (a,b) with (a,a,b,b) inside."""
        pairs = []
        for a in range(self.n_a):
            for b in range(self.n_b):
                if (a, a, b, b) in self:
                    pairs.append((a, b))
        return BinRel.from_pairs(self.n_a, self.n_b, pairs)

    # -- calculus ----------------------------------------------------------

    def converse(self) -> "QuadRel":
        """Flip sides: (a1,a2,b1,b2) becomes (b1,b2,a1,a2)."""
        flipped = self._as_binrel().converse()
        return QuadRel(self.n_b, self.n_a, flipped.bits)

    def compose(self, other: "QuadRel") -> "QuadRel":
        """Join on the shared middle pair universe."""
        if self.n_b != other.n_a:
            raise SignatureError("quad relations do not compose")
        out = self._as_binrel().compose(other._as_binrel())
        return QuadRel(self.n_a, other.n_b, out.bits)

    def swap12(self) -> "QuadRel":
        return QuadRel.from_quads(self.n_a, self.n_b,
                                  ((a2, a1, b1, b2) for a1, a2, b1, b2 in self.quads()))

    def swap34(self) -> "QuadRel":
        return QuadRel.from_quads(self.n_a, self.n_b,
                                  ((a1, a2, b2, b1) for a1, a2, b1, b2 in self.quads()))

    def sorted_quads(self) -> list[tuple[int, int, int, int]]:
        return sorted(self.quads())

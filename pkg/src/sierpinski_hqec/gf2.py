"""GF(2) linear algebra on Python integers used as packed bit rows.

Bit ``i`` of an integer is coordinate ``i`` of the vector. Python integers are
arbitrary width, so a 486-bit configuration at level 5 is a single object and
XOR is one word-parallel operation.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def popcount(v: int) -> int:
    return v.bit_count()


def parity(v: int) -> int:
    return v.bit_count() & 1


def bits_of(v: int) -> list[int]:
    """Indices of the set bits of ``v`` in increasing order."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


class EchelonBasis:
    """Row-echelon basis with optional tracking of input combinations.

    Every stored row has a distinct leading (highest) bit. ``combo`` records
    which inserted vectors were XORed together to produce the row, so that
    solving ``sum c_i v_i = target`` is a reduction.
    """

    __slots__ = ("_rows", "_combos", "_count")

    def __init__(self, vectors: Iterable[int] = ()) -> None:
        self._rows: dict[int, int] = {}
        self._combos: dict[int, int] = {}
        self._count = 0
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def rows(self) -> list[int]:
        return [self._rows[p] for p in sorted(self._rows)]

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(remainder, combo)`` after eliminating leading bits."""
        combo = 0
        while v:
            p = v.bit_length() - 1
            row = self._rows.get(p)
            if row is None:
                return v, combo
            v ^= row
            combo ^= self._combos[p]
        return 0, combo

    def add(self, v: int) -> int:
        """Insert ``v``; return 0 if independent, else the dependency combo.

        The dependency combo includes the bit of ``v`` itself, so it is a
        nonzero kernel vector of the map ``i -> v_i``.
        """
        own = 1 << self._count
        self._count += 1
        rem, combo = self.reduce(v)
        if rem:
            p = rem.bit_length() - 1
            self._rows[p] = rem
            self._combos[p] = combo ^ own
            return 0
        return combo ^ own

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def solve(self, target: int) -> int | None:
        """Combination of inserted vectors summing to ``target``, or None."""
        rem, combo = self.reduce(target)
        return combo if rem == 0 else None


def rank(vectors: Iterable[int]) -> int:
    return EchelonBasis(vectors).rank


def kernel_and_image(images: Sequence[int]) -> tuple[list[int], list[int]]:
    """Kernel and image bases of the map ``e_i -> images[i]``.

    Kernel vectors are bit masks over the input indices.
    """
    basis = EchelonBasis()
    kernel = []
    for v in images:
        dep = basis.add(v)
        if dep:
            kernel.append(dep)
    return kernel, basis.rows()


def kernel(images: Sequence[int]) -> list[int]:
    return kernel_and_image(images)[0]


def nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of ``{x : r.x = 0 for every row r}`` over ``ncols`` coordinates."""
    images = []
    for j in range(ncols):
        col = 0
        for i, r in enumerate(rows):
            if (r >> j) & 1:
                col |= 1 << i
        images.append(col)
    return kernel(images)


def reduced_min(v: int, basis_rows: Sequence[int]) -> int:
    """Least coset representative of ``v`` modulo ``span(basis_rows)``.

    Ordering treats bit 0 as the most significant position, so the result is
    the lexicographically least vector when coordinates are read in index
    order.
    """
    rows: dict[int, int] = {}
    for r in basis_rows:
        while r:
            p = (r & -r).bit_length() - 1
            if p in rows:
                r ^= rows[p]
            else:
                rows[p] = r
                break
    # full reduction so that every pivot appears in exactly one row
    for p in sorted(rows, reverse=True):
        for q in rows:
            if q != p and (rows[q] >> p) & 1:
                rows[q] ^= rows[p]
    for p in sorted(rows):
        if (v >> p) & 1:
            v ^= rows[p]
    return v


def span(vectors: Sequence[int]) -> list[int]:
    """All elements of the span; only for small dimension."""
    basis = EchelonBasis(vectors).rows()
    out = [0]
    for b in basis:
        out += [x ^ b for x in out]
    return out


def restrict(v: int, mask: int) -> int:
    return v & mask


def annihilator(vectors: Iterable[int], ncols: int) -> list[int]:
    """Basis of vectors orthogonal (dot product) to all ``vectors``."""
    return nullspace(list(vectors), ncols)


def intersect(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Basis of ``span(a) & span(b)`` from the kernel of ``[a | b]``."""
    # x in both iff x = sum s_i a_i = sum t_j b_j, i.e. (s,t) in kernel
    images = list(a) + list(b)
    n_a = len(a)
    out = EchelonBasis()
    for combo in kernel(images):
        x = 0
        for i in bits_of(combo & ((1 << n_a) - 1)):
            x ^= a[i]
        if x:
            out.add(x)
    return out.rows()

"""The cube {0,1}^n, sign assignments and the cube cochain complex.

Vertices are int bitmasks with bit ``i`` for coordinate ``i`` (0-based).
An edge is keyed by ``(u, i)``: it runs from ``u`` (bit ``i`` clear) to
``u | 1 << i``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .homology import IntChainComplex, IntMatrix

__all__ = [
    "CubeVertex",
    "SignAssignment",
    "standard_sign",
    "verify_sign",
    "gauge",
    "random_gauge",
    "cube_edges",
    "cube_complex",
    "count_maximal_chains",
]


@dataclass(frozen=True, order=True)
class CubeVertex:
    bits: int
    n: int

    @property
    def weight(self) -> int:
        return bin(self.bits).count("1")

    def as_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.n))

    @classmethod
    def from_bits(cls, bits) -> "CubeVertex":
        bits = list(bits)
        return cls(sum(int(b) << i for i, b in enumerate(bits)), len(bits))


def cube_edges(n: int) -> Iterator[tuple[int, int]]:
    for u in range(1 << n):
        for i in range(n):
            if not (u >> i) & 1:
                yield (u, i)


def _popcount(x: int) -> int:
    return bin(x).count("1")


class SignAssignment:
    """A 1-cochain on the cube with values in Z/2."""

    def __init__(self, n: int, values: Optional[dict] = None, rule: Optional[Callable] = None):
        self.n = n
        self._values = values
        self._rule = rule

    def __call__(self, u: int, i: int) -> int:
        if self._values is not None:
            return self._values[(u, i)]
        return self._rule(u, i)

    def values(self) -> dict[tuple[int, int], int]:
        return {e: self(*e) for e in cube_edges(self.n)}

    def sign(self, u: int, i: int) -> int:
        """(-1)^{s(edge)} as an int."""
        return -1 if self(u, i) else 1


def standard_sign(n: int) -> SignAssignment:
    """s_0(u, i) = (u_0 + ... + u_{i-1}) mod 2."""
    return SignAssignment(n, rule=lambda u, i: _popcount(u & ((1 << i) - 1)) & 1)


def verify_sign(s: SignAssignment) -> bool:
    """True iff every 2-face of the cube has boundary sum 1 mod 2."""
    n = s.n
    for u in range(1 << n):
        for i in range(n):
            if (u >> i) & 1:
                continue
            for j in range(i + 1, n):
                if (u >> j) & 1:
                    continue
                tot = s(u, i) + s(u | 1 << i, j) + s(u, j) + s(u | 1 << j, i)
                if tot % 2 != 1:
                    return False
    return True


def gauge(s: SignAssignment, t: dict[int, int]) -> SignAssignment:
    """s + δt for a vertex 0-cochain ``t`` (missing vertices count 0)."""
    vals = {}
    for u, i in cube_edges(s.n):
        vals[(u, i)] = (s(u, i) + t.get(u, 0) + t.get(u | 1 << i, 0)) % 2
    return SignAssignment(s.n, values=vals)


def random_gauge(s: SignAssignment, seed: int) -> SignAssignment:
    rng = random.Random(seed)
    return gauge(s, {u: rng.randint(0, 1) for u in range(1 << s.n)})


def cube_complex(n: int, s: SignAssignment) -> IntChainComplex:
    """Free complex on vertices of {0,1}^n graded by weight, δu = Σ (-1)^s(u,i) (u + e_i)."""
    by_w: dict[int, list[int]] = {}
    for u in range(1 << n):
        by_w.setdefault(_popcount(u), []).append(u)
    index = {w: {u: k for k, u in enumerate(us)} for w, us in by_w.items()}
    diffs = {}
    for w in range(n):
        rows = index[w + 1]
        m = IntMatrix(len(by_w[w + 1]), len(by_w[w]))
        for col, u in enumerate(by_w[w]):
            for i in range(n):
                if not (u >> i) & 1:
                    m.add(rows[u | 1 << i], col, s.sign(u, i))
        diffs[w] = m
    dims = {w: len(us) for w, us in by_w.items()}
    return IntChainComplex(dims, diffs)


def count_maximal_chains(n: int) -> int:
    """Number of maximal chains from the bottom to the top vertex, by recursion."""
    counts = {0: 1}
    for u in range(1, 1 << n):
        counts[u] = sum(counts[u & ~(1 << i)] for i in range(n) if (u >> i) & 1)
    return counts[(1 << n) - 1]

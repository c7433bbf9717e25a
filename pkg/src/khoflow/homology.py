"""Exact integer linear algebra: sparse matrices, Smith normal form, homology.

All arithmetic uses Python ints, so entries never overflow. Sparse
elimination first removes unit pivots (chosen with a Markowitz-style
fill-in tiebreak); whatever is left is usually tiny and goes through a dense
Smith normal form.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping, Optional, Sequence

__all__ = [
    "IntMatrix",
    "HomologyGroup",
    "IntChainComplex",
    "SNFResult",
    "NotThin",
    "WedgeSummand",
    "smith_normal_form",
    "invariant_factors",
    "rank",
    "rank_mod_p",
    "homology_from_ranks",
    "parse_ring",
    "is_prime",
    "moore_decomposition",
    "format_wedge",
    "table_to_json",
    "table_from_json",
]


class IntMatrix:
    """A sparse integer matrix stored as a list of row dictionaries."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Optional[list[dict[int, int]]] = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else [dict() for _ in range(nrows)]

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]]) -> "IntMatrix":
        data = [list(r) for r in data]
        ncols = len(data[0]) if data else 0
        return cls(len(data), ncols, [{j: v for j, v in enumerate(r) if v} for r in data])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(nrows, ncols)

    def add(self, r: int, c: int, v: int) -> None:
        row = self.rows[r]
        nv = row.get(c, 0) + v
        if nv:
            row[c] = nv
        else:
            row.pop(c, None)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.rows[r].get(c, 0)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                yield i, j, v

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not any(self.rows)

    def transpose(self) -> "IntMatrix":
        t = IntMatrix(self.ncols, self.nrows)
        for i, j, v in self.entries():
            t.rows[j][i] = v
        return t

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = IntMatrix(self.nrows, other.ncols)
        for i, row in enumerate(self.rows):
            acc: dict[int, int] = {}
            for k, a in row.items():
                for j, b in other.rows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            out.rows[i] = {j: v for j, v in acc.items() if v}
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        cmap = {c: k for k, c in enumerate(cols)}
        out = IntMatrix(len(rows), len(cols))
        for k, r in enumerate(rows):
            out.rows[k] = {cmap[c]: v for c, v in self.rows[r].items() if c in cmap}
        return out

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.rows == other.rows

    def __repr__(self):
        return f"IntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


# -- elimination ---------------------------------------------------------


def _eliminate_units(rows: list[dict[int, int]], modulus: Optional[int] = None) -> tuple[int, list[dict]]:
    """Pivot on unit entries until none remain.

    Returns the number of pivots and the remaining nonzero rows. With a
    prime ``modulus`` every nonzero entry is a unit, so this computes the
    rank mod p outright.
    """
    rows = [dict(r) for r in rows if r]
    if modulus is not None:
        rows = [{c: v % modulus for c, v in r.items() if v % modulus} for r in rows]
        rows = [r for r in rows if r]
    cols: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            cols.setdefault(c, set()).add(i)
    alive = set(range(len(rows)))
    pivots = 0
    progress = True
    while progress and alive:
        progress = False
        for i in sorted(alive, key=lambda k: len(rows[k])):
            if i not in alive:
                continue
            r = rows[i]
            if not r:
                alive.discard(i)
                continue
            best = None
            for c, v in r.items():
                if modulus is not None or v in (1, -1):
                    cost = len(cols[c])
                    if best is None or cost < best[0]:
                        best = (cost, c, v)
                        if cost == 1:
                            break
            if best is None:
                continue
            _, c, p = best
            pinv = pow(p, -1, modulus) if modulus is not None else p
            for k in list(cols[c]):
                if k == i:
                    continue
                rk = rows[k]
                f = rk[c] * pinv
                for cc, vv in r.items():
                    nv = rk.get(cc, 0) - f * vv
                    if modulus is not None:
                        nv %= modulus
                    if nv:
                        if cc not in rk:
                            cols.setdefault(cc, set()).add(k)
                        rk[cc] = nv
                    else:
                        if cc in rk:
                            del rk[cc]
                            cols[cc].discard(k)
                if not rk:
                    alive.discard(k)
            for cc in r:
                cols[cc].discard(i)
            rows[i] = {}
            alive.discard(i)
            pivots += 1
            progress = True
    return pivots, [rows[i] for i in sorted(alive) if rows[i]]


def _dense_snf(A: list[list[int]], track: bool = False):
    """Dense Smith normal form. Returns (D, U, V) with U·A·V = D when tracking."""
    m = len(A)
    n = len(A[0]) if m else 0
    A = [row[:] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        if f:
            A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
            if track:
                U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        if f:
            for row in A:
                row[dst] += f * row[src]
            if track:
                for row in V:
                    row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % A[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            if track:
                U[t] = [-a for a in U[t]]
        t += 1
    return A, U, V


@dataclass
class SNFResult:
    factors: tuple[int, ...]
    U: Optional[list[list[int]]] = None
    V: Optional[list[list[int]]] = None
    D: Optional[list[list[int]]] = None


def invariant_factors(M: IntMatrix) -> tuple[int, ...]:
    """Nonzero invariant factors d_1 | d_2 | ... of ``M``."""
    units, rest = _eliminate_units(M.rows)
    factors = [1] * units
    if rest:
        cols = sorted({c for r in rest for c in r})
        cmap = {c: k for k, c in enumerate(cols)}
        dense = [[0] * len(cols) for _ in rest]
        for i, r in enumerate(rest):
            for c, v in r.items():
                dense[i][cmap[c]] = v
        D, _, _ = _dense_snf(dense)
        factors.extend(D[k][k] for k in range(min(len(D), len(cols))) if D[k][k])
    return tuple(sorted(factors))


def smith_normal_form(M, transforms: bool = False) -> SNFResult:
    """Smith normal form of an integer matrix (IntMatrix or nested lists).

    Without ``transforms`` only the invariant factors are computed, using
    sparse elimination. With ``transforms`` a dense computation returns
    unimodular U, V with U·M·V = D.
    """
    if not isinstance(M, IntMatrix):
        M = IntMatrix.from_dense(M) if len(M) else IntMatrix(0, 0)
    if not transforms:
        return SNFResult(invariant_factors(M))
    D, U, V = _dense_snf(M.to_dense(), track=True)
    k = min(M.nrows, M.ncols)
    return SNFResult(tuple(D[i][i] for i in range(k) if D[i][i]), U, V, D)


def rank(M: IntMatrix) -> int:
    return len(invariant_factors(M))


def rank_mod_p(M: IntMatrix, p: int) -> int:
    n, rest = _eliminate_units(M.rows, modulus=p)
    assert not rest
    return n


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def parse_ring(text: str) -> tuple[str, int]:
    """Parse 'Z', 'Q' or 'F_p' (also 'Fp', 'Z/p', 'GF(p)') into (kind, p)."""
    t = text.strip().upper().replace(" ", "")
    if t == "Z":
        return ("Z", 0)
    if t == "Q":
        return ("Q", 0)
    m = re.fullmatch(r"(?:F_?|Z/|GF\()(\d+)\)?", t)
    if not m:
        raise ValueError(f"unknown ring {text!r}; use Z, Q or F_p")
    p = int(m.group(1))
    if not is_prime(p):
        raise ValueError(f"F_{p}: {p} is not prime")
    return ("F", p)


@dataclass(frozen=True)
class HomologyGroup:
    """Z^free_rank ⊕ ⊕ Z/d. Over a field only ``free_rank`` (the dimension) is used."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " ⊕ ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, d) -> "HomologyGroup":
        return cls(d["free"], tuple(d["torsion"]))


def _torsion_chain(factors: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(d for d in factors if d > 1))


class IntChainComplex:
    """A cochain complex of free abelian groups.

    ``dims[i]`` is the rank in degree ``i``; ``diffs[i]`` is the matrix of
    δ^i: C^i -> C^{i+1} (shape dims[i+1] x dims[i]).
    """

    def __init__(self, dims: Mapping[int, int], diffs: Mapping[int, IntMatrix]):
        self.dims = {i: d for i, d in dims.items()}
        self.diffs = dict(diffs)
        self._factors: dict[int, tuple[int, ...]] = {}

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def dim(self, i: int) -> int:
        return self.dims.get(i, 0)

    def diff(self, i: int) -> IntMatrix:
        m = self.diffs.get(i)
        if m is None:
            return IntMatrix(self.dim(i + 1), self.dim(i))
        return m

    def factors(self, i: int) -> tuple[int, ...]:
        if i not in self._factors:
            self._factors[i] = invariant_factors(self.diff(i))
        return self._factors[i]

    def d_squared_zero(self) -> bool:
        for i in self.degrees():
            a, b = self.diff(i), self.diff(i + 1)
            if a.nrows and b.ncols and not (b @ a).is_zero():
                return False
        return True

    def homology(self, i: int) -> HomologyGroup:
        r_out = len(self.factors(i))
        inc = self.factors(i - 1)
        return HomologyGroup(self.dim(i) - r_out - len(inc), _torsion_chain(inc))

    def homology_mod_p(self, i: int, p: int) -> int:
        return self.dim(i) - rank_mod_p(self.diff(i), p) - rank_mod_p(self.diff(i - 1), p)

    def all_homology(self) -> dict[int, HomologyGroup]:
        return {i: self.homology(i) for i in self.degrees()}


def homology_from_ranks(dim: int, rank_out: int, factors_in: Sequence[int]) -> HomologyGroup:
    return HomologyGroup(dim - rank_out - len(factors_in), _torsion_chain(factors_in))


# -- Moore-space decomposition --------------------------------------------


class NotThin(ValueError):
    pass


@dataclass(frozen=True, order=True)
class WedgeSummand:
    """One wedge summand: a sphere (free Z) or a Moore space for Z/m.

    ``degree`` is the cohomological degree i carrying the group, ``quantum``
    the grading j.
    """

    kind_order: int
    quantum: int
    degree: int
    order: int = 0  # m for Moore summands

    @property
    def kind(self) -> str:
        return "sphere" if self.kind_order == 0 else "moore"

    def __str__(self):
        sub = _script("_", self.quantum)
        if self.kind == "sphere":
            if self.degree >= 0:
                return f"S{_script('^', self.degree)}{sub}"
            return f"Σ{_script('^', self.degree)}S^0{sub}"
        shift = self.degree - 2
        base = "RP²" if self.order == 2 else f"M(Z/{self.order})"
        pre = "" if shift == 0 else f"Σ{_script('^', shift)}"
        return f"{pre}{base}{sub}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "i": self.degree, "j": self.quantum, "order": self.order or None}


def _script(mark: str, k: int) -> str:
    s = str(k)
    return f"{mark}{s}" if len(s) == 1 else f"{mark}{{{s}}}"


def infer_sigma(table: Mapping[tuple[int, int], HomologyGroup]) -> int:
    nz = {(i, j): g for (i, j), g in table.items() if not g.is_zero()}
    tors = {2 * i - j for (i, j), g in nz.items() if g.torsion}
    if len(tors) > 1:
        raise NotThin(f"torsion on several diagonals {sorted(tors)}")
    if tors:
        return tors.pop() - 1
    diags = sorted({2 * i - j for i, j in nz})
    if not diags:
        return 0
    if len(diags) == 1:
        return diags[0] - 1
    if len(diags) == 2 and diags[1] - diags[0] == 2:
        return diags[0] + 1
    raise NotThin(f"homology occupies diagonals 2i-j in {diags}")


def moore_decomposition(
    table: Mapping[tuple[int, int], HomologyGroup], sigma: Optional[int] = None
) -> list[WedgeSummand]:
    """Wedge of spheres and Moore spaces realizing a thin homology table."""
    if sigma is None:
        sigma = infer_sigma(table)
    out = []
    for (i, j), g in sorted(table.items()):
        if g.is_zero():
            continue
        diag = 2 * i - j
        if diag not in (sigma - 1, sigma + 1):
            raise NotThin(f"group at (i,j)=({i},{j}) lies on diagonal {diag}, not {sigma}±1")
        if g.torsion and diag != sigma + 1:
            raise NotThin(f"torsion at (i,j)=({i},{j}) lies off the diagonal {sigma + 1}")
        out.extend(WedgeSummand(0, j, i) for _ in range(g.free_rank))
        out.extend(WedgeSummand(1, j, i, d) for d in g.torsion)
    return sorted(out)


def format_wedge(summands: Sequence[WedgeSummand]) -> str:
    if not summands:
        return "pt"
    return " ∨ ".join(str(s) for s in summands)


# -- JSON tables ------------------------------------------------------------


def table_to_json(table: Mapping[tuple[int, int], HomologyGroup]) -> list[dict]:
    return [
        {"i": i, "j": j, **g.to_json()} for (i, j), g in sorted(table.items()) if not g.is_zero()
    ]


def table_from_json(data) -> dict[tuple[int, int], HomologyGroup]:
    if isinstance(data, str):
        data = json.loads(data)
    return {(d["i"], d["j"]): HomologyGroup(d["free"], tuple(d["torsion"])) for d in data}

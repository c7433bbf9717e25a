"""Resolution configurations: circles with ordered surgery arcs.

A configuration is stored combinatorially. Each circle is a cyclic
sequence of *sites*; a site is a pair ``(label, k)`` naming a point where an
arc ends or where a parallel translate of an old arc runs along the circle.
Every site carries a side bit: ``True`` when, traversing the circle in its
stored direction, the arc attached at that site leaves to the left.

The sites of a circle determine it, so circles are identified by the
frozenset of their sites. Surgery removes the two endpoint sites of an arc
and inserts two new translate sites named by ``rot``; with this naming,
surgering a resolution of a diagram at crossing ``c`` produces exactly the
site names of the resolution with crossing ``c`` flipped to 1.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .pd import LinkDiagram

__all__ = [
    "Site",
    "Arc",
    "ResolutionConfig",
    "LabeledConfig",
    "DecoratedConfig",
    "LengthMismatch",
    "NonPlanarSurgery",
    "PLUS",
    "MINUS",
    "rot",
    "resolve",
    "resolve_circles",
    "surgery",
    "diff",
    "intersect",
    "dual",
    "core",
    "is_basic",
    "leaves",
    "coleaves",
    "prec",
    "precedes",
]

Site = tuple[int, int]

PLUS = 1
MINUS = -1

_ROT = {0: 2, 2: 1, 1: 3, 3: 0}


class LengthMismatch(ValueError):
    pass


class NonPlanarSurgery(ValueError):
    pass


def rot(site: Site) -> Site:
    return (site[0], _ROT[site[1]])


@dataclass(frozen=True)
class Arc:
    label: int
    ends: tuple[Site, Site]

    def dual(self) -> "Arc":
        return Arc(self.label, (rot(self.ends[0]), rot(self.ends[1])))


def _reverse(circle):
    return tuple((s, not left) for s, left in reversed(circle))


def _normal(circle):
    """Canonical rotation/direction of a cyclic (site, left) sequence."""
    if not circle:
        return circle
    best = None
    for cand in (circle, _reverse(circle)):
        i = min(range(len(cand)), key=lambda k: cand[k][0])
        r = cand[i:] + cand[:i]
        if best is None or r < best:
            best = r
    return best


class ResolutionConfig:
    """Circles ``Z(D)`` plus a totally ordered tuple of arcs ``A(D)``."""

    __slots__ = ("circles", "arcs", "_where", "__dict__")

    def __init__(self, circles: Iterable[Sequence[tuple[Site, bool]]], arcs: Iterable[Arc] = ()):
        circ = tuple(_normal(tuple((tuple(s), bool(l)) for s, l in c)) for c in circles)
        circ = tuple(sorted(circ, key=lambda c: c[0][0] if c else (10**18, 0)))
        self.circles: tuple[tuple[tuple[Site, bool], ...], ...] = circ
        self.arcs: tuple[Arc, ...] = tuple(arcs)
        where = {}
        for ci, c in enumerate(circ):
            for pos, (s, _) in enumerate(c):
                if s in where:
                    raise ValueError(f"site {s} appears twice")
                where[s] = (ci, pos)
        self._where = where
        for a in self.arcs:
            p, q = a.ends
            if p == q or p not in where or q not in where:
                raise ValueError(f"arc {a.label} endpoints {a.ends} are not distinct sites")

    # -- basic data -------------------------------------------------------
    @property
    def index(self) -> int:
        return len(self.arcs)

    def __len__(self):
        return len(self.circles)

    @cached_property
    def circle_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(s for s, _ in c) for c in self.circles)

    @cached_property
    def _set_index(self) -> dict:
        return {z: i for i, z in enumerate(self.circle_sets)}

    def circle_of(self, site: Site) -> int:
        return self._where[site][0]

    def circle_set_of(self, site: Site) -> frozenset:
        return self.circle_sets[self._where[site][0]]

    def side(self, site: Site) -> bool:
        ci, pos = self._where[site]
        return self.circles[ci][pos][1]

    def has_site(self, site: Site) -> bool:
        return site in self._where

    def arc(self, label: int) -> Arc:
        for a in self.arcs:
            if a.label == label:
                return a
        raise KeyError(label)

    @property
    def arc_labels(self) -> tuple[int, ...]:
        return tuple(a.label for a in self.arcs)

    def key(self):
        return (self.circles, tuple((a.label, tuple(sorted(a.ends))) for a in self.arcs))

    def __eq__(self, other):
        return isinstance(other, ResolutionConfig) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"ResolutionConfig({len(self.circles)} circles, arcs={list(self.arc_labels)})"

    # -- operations -------------------------------------------------------
    def surgery(self, labels: Iterable[int]) -> "ResolutionConfig":
        labels = set(labels.label if isinstance(labels, Arc) else labels)
        circles = [list(c) for c in self.circles]
        for a in self.arcs:
            if a.label in labels:
                circles = _surger_one(circles, a)
        return ResolutionConfig(circles, [a for a in self.arcs if a.label not in labels])

    def full_surgery(self) -> "ResolutionConfig":
        return self.surgery(self.arc_labels)

    s = full_surgery

    def dual(self) -> "ResolutionConfig":
        top = self.full_surgery()
        return ResolutionConfig(top.circles, [a.dual() for a in reversed(self.arcs)])

    def diff(self, other: "ResolutionConfig") -> "ResolutionConfig":
        theirs = set(other.circle_sets)
        keep = [c for c, z in zip(self.circles, self.circle_sets) if z not in theirs]
        arcs = [a for a in self.arcs if not any(other.has_site(p) for p in a.ends)]
        return ResolutionConfig(keep, arcs)

    def intersect(self, other: "ResolutionConfig") -> "ResolutionConfig":
        return self.diff(self.diff(other))

    def core(self) -> "ResolutionConfig":
        used = {self.circle_of(p) for a in self.arcs for p in a.ends}
        return ResolutionConfig([c for i, c in enumerate(self.circles) if i in used], self.arcs)

    def is_basic(self) -> bool:
        return len(self.core().circles) == len(self.circles)

    def restrict(self, labels: Iterable[int]) -> "ResolutionConfig":
        """Keep all circles but only the listed arcs."""
        labels = set(labels)
        return ResolutionConfig(self.circles, [a for a in self.arcs if a.label in labels])

    def degrees(self) -> list[int]:
        deg = [0] * len(self.circles)
        for a in self.arcs:
            for p in a.ends:
                deg[self.circle_of(p)] += 1
        return deg

    def leaves(self) -> set[frozenset]:
        """Circles that are leaves of the graph G(D) (a self-loop counts twice)."""
        return {z for z, d in zip(self.circle_sets, self.degrees()) if d == 1}

    def coleaves(self) -> set[int]:
        """Labels of arcs whose dual arc has an endpoint on a leaf of the dual."""
        d = self.dual()
        lv = d.leaves()
        return {a.label for a in d.arcs if any(d.circle_set_of(p) in lv for p in a.ends)}

    def is_ladybug(self) -> bool:
        if len(self.circles) != 1 or len(self.arcs) != 2:
            return False
        return _linked(self, self.arcs[0], self.arcs[1])

    # -- isomorphism ------------------------------------------------------
    def canonical_form(self):
        """A relabeling-invariant key: equal iff isomorphic with arcs matched by order."""
        pos = {a.label: i for i, a in enumerate(self.arcs)}
        best = None
        endpoints = [a.ends for a in self.arcs]
        for flips in itertools.product((0, 1), repeat=len(endpoints)):
            name = {}
            for i, (p, q) in enumerate(endpoints):
                if flips[i]:
                    p, q = q, p
                name[p] = (i, 0)
                name[q] = (i, 1)
            forms = []
            for c in self.circles:
                seq = tuple((name[s], l) for s, l in c if s in name)
                forms.append(_cyc_min(seq))
            forms.sort()
            f = tuple(forms)
            if best is None or f < best:
                best = f
        return best

    def isomorphic(self, other: "ResolutionConfig") -> bool:
        return self.canonical_form() == other.canonical_form()

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "circles": [[[list(s), l] for s, l in c] for c in self.circles],
            "arcs": [{"label": a.label, "ends": [list(p) for p in a.ends]} for a in self.arcs],
        }

    @classmethod
    def from_json(cls, data) -> "ResolutionConfig":
        if isinstance(data, str):
            data = json.loads(data)
        circles = [[(tuple(s), l) for s, l in c] for c in data["circles"]]
        arcs = [Arc(a["label"], (tuple(a["ends"][0]), tuple(a["ends"][1]))) for a in data["arcs"]]
        return cls(circles, arcs)


def _cyc_min(seq):
    """Minimal rotation/reflection of a cyclic sequence of (site, side) pairs."""
    if not seq:
        return ()
    cands = []
    rev = tuple((s, not l) for s, l in reversed(seq))
    for cand in (seq, rev):
        for i in range(len(cand)):
            cands.append(cand[i:] + cand[:i])
    return min(cands)


def _linked(D: ResolutionConfig, a: Arc, b: Arc) -> bool:
    """Whether the endpoints of two arcs on one circle alternate."""
    ci = D.circle_of(a.ends[0])
    if any(D.circle_of(p) != ci for p in a.ends + b.ends):
        return False
    pos = [D._where[p][1] for p in a.ends]
    lo, hi = min(pos), max(pos)
    inside = [lo < D._where[p][1] < hi for p in b.ends]
    return inside[0] != inside[1]


def _surger_one(circles: list[list], arc: Arc) -> list[list]:
    p, q = arc.ends
    where = {}
    for ci, c in enumerate(circles):
        for pos, (s, _) in enumerate(c):
            where[s] = (ci, pos)
    ci, _ = where[p]
    cj, _ = where[q]

    def oriented(c, site):
        # rotate so that ``site`` comes first and the arc is on its left
        for k, (s, left) in enumerate(c):
            if s == site:
                if not left:
                    c = [(t, not l) for t, l in reversed(c)]
                    k = len(c) - 1 - k
                return c[k:] + c[:k]
        raise KeyError(site)

    rest = [c for k, c in enumerate(circles) if k not in (ci, cj)]
    if ci != cj:
        c1 = oriented(circles[ci], p)
        c2 = oriented(circles[cj], q)
        merged = c1[1:] + [(rot(p), False)] + c2[1:] + [(rot(q), False)]
        return rest + [merged]
    c = oriented(circles[ci], p)
    k = next(k for k, (s, _) in enumerate(c) if s == q)
    if not c[k][1]:
        raise NonPlanarSurgery(f"arc {arc.label} meets its circle from both sides")
    first = c[1:k] + [(rot(q), False)]
    second = c[k + 1:] + [(rot(p), False)]
    return rest + [first, second]


def surgery(D: ResolutionConfig, arcs: Iterable) -> ResolutionConfig:
    return D.surgery(a.label if isinstance(a, Arc) else a for a in arcs)


def diff(D: ResolutionConfig, E: ResolutionConfig) -> ResolutionConfig:
    return D.diff(E)


def intersect(D: ResolutionConfig, E: ResolutionConfig) -> ResolutionConfig:
    return D.intersect(E)


def dual(D: ResolutionConfig) -> ResolutionConfig:
    return D.dual()


def core(D: ResolutionConfig) -> ResolutionConfig:
    return D.core()


def is_basic(D: ResolutionConfig) -> bool:
    return D.is_basic()


def leaves(D: ResolutionConfig) -> set[frozenset]:
    return D.leaves()


def coleaves(D: ResolutionConfig) -> set[int]:
    return D.coleaves()


# -- resolutions of a diagram ----------------------------------------------

_PAIRS = {0: {0: 1, 1: 0, 2: 3, 3: 2}, 1: {0: 3, 3: 0, 1: 2, 2: 1}}


def site_name(c: int, bit: int, slot: int) -> Site:
    """The site at crossing ``c`` on the resolved strand through ``slot``."""
    if bit == 0:
        return (c, 0 if slot in (0, 1) else 1)
    return (c, 2 if slot in (0, 3) else 3)


def resolve_circles(diagram: LinkDiagram, v: int) -> list[tuple[tuple[Site, bool], ...]]:
    """Kauffman-state circles of resolution ``v`` (bit ``c`` = crossing ``c``)."""
    n = diagram.n
    seen = set()
    circles = []
    for c0 in range(n):
        for s0 in range(4):
            if (c0, s0) in seen:
                continue
            circle = []
            c, s = c0, s0
            while (c, s) not in seen:
                bit = (v >> c) & 1
                t = _PAIRS[bit][s]
                seen.add((c, s))
                seen.add((c, t))
                circle.append((site_name(c, bit, s), t == (s + 1) % 4))
                c, s = diagram.other_end(c, t)
            circles.append(tuple(circle))
    for m in range(diagram.loops):
        circles.append((((-1 - m, 0), True),))
    return circles


def resolve(diagram: LinkDiagram, v) -> ResolutionConfig:
    """The configuration D_L(v): resolution circles plus an arc at each 0-crossing.

    ``v`` is either an int bitmask (bit ``c`` for crossing ``c``) or a
    sequence of n bits.
    """
    n = diagram.n
    if not isinstance(v, int):
        v = list(v)
        if len(v) != n:
            raise LengthMismatch(f"resolution vector has length {len(v)}, diagram has {n} crossings")
        v = sum(int(b) << i for i, b in enumerate(v))
    elif v < 0 or v >> n:
        raise LengthMismatch(f"bitmask {v} does not fit {n} crossings")
    arcs = [Arc(c, ((c, 0), (c, 1))) for c in range(n) if not (v >> c) & 1]
    return ResolutionConfig(resolve_circles(diagram, v), arcs)


# -- labeled and decorated configurations -----------------------------------


class LabeledConfig:
    """A configuration with each circle labeled PLUS or MINUS."""

    __slots__ = ("config", "labels", "_key")

    def __init__(self, config: ResolutionConfig, labels):
        if not isinstance(labels, dict):
            labels = dict(zip(config.circle_sets, labels))
        if set(labels) != set(config.circle_sets):
            raise ValueError("labeling must cover every circle exactly once")
        for val in labels.values():
            if val not in (PLUS, MINUS):
                raise ValueError(f"bad label {val!r}")
        self.config = config
        self.labels = labels
        self._key = (config.key(), frozenset(labels.items()))

    def label_tuple(self) -> tuple[int, ...]:
        """Labels in the configuration's canonical circle order."""
        return tuple(self.labels[z] for z in self.config.circle_sets)

    def __eq__(self, other):
        return isinstance(other, LabeledConfig) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        lab = "".join("+" if x == PLUS else "-" for x in self.label_tuple())
        return f"LabeledConfig({self.config!r}, {lab})"


def _covering(E: ResolutionConfig, y: dict, D: ResolutionConfig, x: dict) -> bool:
    """The one-step relation (E, y) < (D, x) of the partial order."""
    if E.index != D.index + 1:
        return False
    extra = [a for a in E.arcs if a.label not in set(D.arc_labels)]
    if len(extra) != 1:
        return False
    if E.surgery([extra[0].label]) != D:
        return False
    return _labels_ok(E, y, D, x)


def _labels_ok(E, y, D, x) -> bool:
    Dsets = set(D.circle_sets)
    Esets = set(E.circle_sets)
    old = [z for z in E.circle_sets if z not in Dsets]
    new = [z for z in D.circle_sets if z not in Esets]
    for z in Esets & Dsets:
        if y[z] != x[z]:
            return False
    return label_rule([y[z] for z in old], [x[z] for z in new])


def label_rule(before: Sequence[int], after: Sequence[int]) -> bool:
    """Merge/split label condition for one surgery step."""
    if len(before) == 1 and len(after) == 2:
        if before[0] == MINUS:
            return after[0] == after[1] == MINUS
        return sorted(after) == [MINUS, PLUS]
    if len(before) == 2 and len(after) == 1:
        if before[0] == before[1] == PLUS:
            return after[0] == PLUS
        return sorted(before) == [MINUS, PLUS] and after[0] == MINUS
    return False


def prec(a: LabeledConfig, b: LabeledConfig) -> bool:
    """Covering relation: ``b`` is one surgery step above ``a`` with compatible labels."""
    return _covering(a.config, a.labels, b.config, b.labels)


def precedes(a: LabeledConfig, b: LabeledConfig) -> bool:
    """Transitive closure of :func:`prec` (strict)."""
    D = a.config
    extra = [x for x in D.arc_labels if x not in set(b.config.arc_labels)]
    if a.config.surgery(extra) != b.config or not extra:
        return False
    return b in _upset(a, extra)


def _step_up(E: ResolutionConfig, z: dict, label: int):
    """All labeled configurations one surgery step above ``(E, z)`` along ``label``."""
    F = E.surgery([label])
    Fsets = set(F.circle_sets)
    Esets = set(E.circle_sets)
    old = [w for w in E.circle_sets if w not in Fsets]
    new = [w for w in F.circle_sets if w not in Esets]
    base = {w: z[w] for w in F.circle_sets if w in Esets}
    before = [z[w] for w in old]
    outs = []
    if len(old) == 2:
        if before == [PLUS, PLUS]:
            outs.append((PLUS,))
        elif sorted(before) == [MINUS, PLUS]:
            outs.append((MINUS,))
    else:
        if before == [MINUS]:
            outs.append((MINUS, MINUS))
        else:
            outs.extend([(PLUS, MINUS), (MINUS, PLUS)])
    result = []
    for vals in outs:
        lab = dict(base)
        lab.update(zip(new, vals))
        result.append(LabeledConfig(F, lab))
    return result


def _upset(a: LabeledConfig, arcs: Sequence[int]) -> set:
    frontier = {a}
    found = set()
    for _ in range(len(arcs)):
        nxt = set()
        for e in frontier:
            for lab in e.config.arc_labels:
                if lab in arcs:
                    nxt.update(_step_up(e.config, e.labels, lab))
        found |= nxt
        frontier = nxt
    return found


class DecoratedConfig:
    """A triple (D, x, y): labels ``y`` on Z(D) and ``x`` on Z(s(D)) with (D,y) ⪯ (s(D),x)."""

    def __init__(self, config: ResolutionConfig, x, y, check: bool = True):
        top = config.full_surgery()
        self.config = config
        self.top = top
        self.bottom_labeled = LabeledConfig(config, y)
        self.top_labeled = LabeledConfig(top, x)
        self.y = self.bottom_labeled.labels
        self.x = self.top_labeled.labels
        if check and config.index > 0:
            if not precedes(self.bottom_labeled, self.top_labeled):
                raise ValueError("labelings do not satisfy (D, y) ⪯ (s(D), x)")
        elif check and self.bottom_labeled != self.top_labeled:
            raise ValueError("index-0 decorated configuration needs x = y")

    @property
    def index(self) -> int:
        return self.config.index

    def dual(self) -> "DecoratedConfig":
        """(D*, y*, x*) with dual (flipped) labelings."""
        Dstar = self.config.dual()
        ystar = {z: -v for z, v in self.y.items()}  # labels on Z(s(D*)) = Z(D)
        xstar = {z: -v for z, v in self.x.items()}  # labels on Z(D*) = Z(s(D))
        return DecoratedConfig(Dstar, ystar, xstar)

    def __repr__(self):
        return f"DecoratedConfig({self.config!r}, index={self.index})"

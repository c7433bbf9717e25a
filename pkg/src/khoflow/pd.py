"""Planar diagram (PD) codes: parsing, strand tracing, orientation and signs.

Crossings use the Knot Atlas convention: ``X[i, j, k, l]`` lists the four
edge ends counterclockwise, starting with the incoming under-strand, so the
under-strand runs ``i -> k``. The over-strand runs ``l -> j`` at a positive
crossing and ``j -> l`` at a negative one.

Slot ``s`` of a crossing is the position ``s`` in its 4-tuple. Strands pass
straight through a crossing, pairing slot ``s`` with slot ``s + 2 (mod 4)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

__all__ = [
    "PdError",
    "MalformedToken",
    "EdgeCountError",
    "OpenStrand",
    "AmbiguousOrientation",
    "NonPlanar",
    "PdCode",
    "LinkDiagram",
    "parse_pd",
    "serialize",
    "orient_and_sign",
    "load_diagram",
    "mirror",
    "resolve_crossing",
]


class PdError(ValueError):
    """Base class for diagram input errors; carries an optional line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedToken(PdError):
    pass


class EdgeCountError(PdError):
    pass


class OpenStrand(PdError):
    pass


class AmbiguousOrientation(PdError):
    pass


class NonPlanar(PdError):
    pass


@dataclass(frozen=True)
class PdCode:
    """A validated PD listing.

    ``signs`` holds explicit per-crossing overrides (``+1``/``-1``) or None.
    ``loops`` counts crossingless unknotted components (written ``O``).
    """

    crossings: tuple[tuple[int, int, int, int], ...]
    signs: tuple[Optional[int], ...] = ()
    loops: int = 0
    lines: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.signs:
            object.__setattr__(self, "signs", (None,) * len(self.crossings))

    @property
    def edges(self) -> list[int]:
        return sorted({e for x in self.crossings for e in x})

    def __len__(self) -> int:
        return len(self.crossings)


_BRACKET_X = re.compile(r"X\s*([+-]?)\s*\[([^\]]*)\]")


def _statement_tokens(text: str) -> list[tuple[int, str]]:
    """Split PD text into (line number, statement) pairs, dropping comments."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        if "[" in line and _BRACKET_X.search(line):
            for m in _BRACKET_X.finditer(line):
                out.append((lineno, f"X{m.group(1)} {m.group(2)}"))
            rest = _BRACKET_X.sub(" ", line)
            rest = re.sub(r"PD|[\[\](),]", " ", rest)
            for stmt in rest.split(";"):
                if stmt.strip():
                    out.append((lineno, stmt))
            continue
        for stmt in line.split(";"):
            if stmt.strip():
                out.append((lineno, stmt))
    return out


def parse_pd(text: str) -> PdCode:
    """Parse a PD listing.

    Accepts ``X a b c d`` statements separated by ``;`` or newlines, optional
    ``X+``/``X-`` sign overrides, ``O`` for a crossingless unknotted
    component, ``#`` comments, and the bracketed ``PD[X[a,b,c,d], ...]`` form.
    Crossing order is listing order.
    """
    crossings: list[tuple[int, int, int, int]] = []
    signs: list[Optional[int]] = []
    lines: list[int] = []
    loops = 0
    for lineno, stmt in _statement_tokens(text):
        toks = re.sub(r"[\[\](),]", " ", stmt).split()
        if not toks:
            continue
        head = toks[0]
        sign: Optional[int] = None
        if head in ("O", "o"):
            if len(toks) != 1:
                raise MalformedToken(f"unexpected tokens after 'O': {stmt.strip()!r}", lineno)
            loops += 1
            continue
        if head.upper() == "PD":
            toks = toks[1:]
            if not toks:
                continue
            head = toks[0]
        if head.upper() in ("X", "X+", "X-"):
            sign = {"X": None, "X+": 1, "X-": -1}[head.upper()]
            toks = toks[1:]
        elif head in ("+", "-") and len(toks) > 1 and toks[1].upper() == "X":
            raise MalformedToken(f"bad crossing marker {stmt.strip()!r}", lineno)
        if len(toks) != 4:
            raise MalformedToken(
                f"expected 4 edge labels per crossing, got {len(toks)} in {stmt.strip()!r}", lineno
            )
        labels = []
        for t in toks:
            try:
                v = int(t)
            except ValueError:
                raise MalformedToken(f"non-integer edge label {t!r}", lineno) from None
            if v <= 0:
                raise MalformedToken(f"edge labels must be positive, got {v}", lineno)
            labels.append(v)
        crossings.append(tuple(labels))  # type: ignore[arg-type]
        signs.append(sign)
        lines.append(lineno)
    code = PdCode(tuple(crossings), tuple(signs), loops, tuple(lines))
    _validate(code)
    return code


def _occurrences(code: PdCode) -> dict[int, list[tuple[int, int]]]:
    occ: dict[int, list[tuple[int, int]]] = {}
    for c, x in enumerate(code.crossings):
        for s, e in enumerate(x):
            occ.setdefault(e, []).append((c, s))
    return occ


def _line(code: PdCode, c: int) -> Optional[int]:
    return code.lines[c] if c < len(code.lines) else None


def _validate(code: PdCode) -> None:
    occ = _occurrences(code)
    for e, places in sorted(occ.items()):
        if len(places) != 2:
            raise EdgeCountError(
                f"edge {e} used {len(places)} times (must be exactly 2)", _line(code, places[-1][0])
            )
        (c1, s1), (c2, s2) = places
        if s1 == s2 and s1 in (0, 2):
            what = "incoming" if s1 == 0 else "outgoing"
            raise OpenStrand(
                f"edge {e} is the {what} under-strand at both of its ends; strand cannot close up",
                _line(code, c2),
            )


def serialize(code: PdCode) -> str:
    parts = []
    for x, s in zip(code.crossings, code.signs):
        mark = {None: "X", 1: "X+", -1: "X-"}[s]
        parts.append(f"{mark} {x[0]} {x[1]} {x[2]} {x[3]}")
    parts.extend("O" for _ in range(code.loops))
    return "; ".join(parts)


@dataclass(frozen=True)
class LinkDiagram:
    """An oriented link diagram with planar rotation data.

    ``crossings[c]`` is the counterclockwise 4-tuple of edge labels with the
    incoming under-strand first. ``heads[e]`` is the ``(crossing, slot)``
    where edge ``e`` ends; ``tails[e]`` where it starts. ``components`` lists
    each oriented component as its sequence of edge labels.
    """

    crossings: tuple[tuple[int, int, int, int], ...]
    signs: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    heads: dict[int, tuple[int, int]] = field(compare=False, repr=False)
    tails: dict[int, tuple[int, int]] = field(compare=False, repr=False)
    loops: int = 0

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def writhe(self) -> int:
        return sum(self.signs)

    @property
    def num_components(self) -> int:
        return len(self.components) + self.loops

    def other_end(self, c: int, s: int) -> tuple[int, int]:
        """The (crossing, slot) at the far end of the edge leaving slot ``s`` of ``c``."""
        e = self.crossings[c][s]
        h, t = self.heads[e], self.tails[e]
        return t if h == (c, s) else h

    def to_pd(self) -> PdCode:
        return PdCode(self.crossings, tuple(self.signs), self.loops)


def _trace_components(code: PdCode, occ) -> list[list[tuple[int, tuple[int, int], tuple[int, int]]]]:
    """Trace components as lists of (edge, start place, end place) in some direction."""
    seen: set[int] = set()
    comps = []
    for e0 in sorted(occ):
        if e0 in seen:
            continue
        comp = []
        start = occ[e0][0]
        place = start
        e = e0
        while True:
            a, b = occ[e]
            here, there = (a, b) if a == place else (b, a)
            comp.append((e, here, there))
            seen.add(e)
            c, s = there
            place = (c, (s + 2) % 4)
            e = code.crossings[c][place[1]]
            if e == e0 and place == start:
                break
        comps.append(comp)
    return comps


def _count_faces(code: PdCode, occ) -> tuple[int, int]:
    """Number of faces of the 4-valent diagram graph and its connected pieces."""
    other = {}
    for e, ((c1, s1), (c2, s2)) in occ.items():
        other[(c1, s1)] = (c2, s2)
        other[(c2, s2)] = (c1, s1)
    seen = set()
    faces = 0
    for start in other:
        if start in seen:
            continue
        faces += 1
        p = start
        while p not in seen:
            seen.add(p)
            c, s = other[p]
            p = (c, (s + 1) % 4)
    # connected pieces of the underlying graph
    parent = list(range(len(code.crossings)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (c1, _), (c2, _) in occ.values():
        parent[find(c1)] = find(c2)
    pieces = len({find(c) for c in range(len(code.crossings))})
    return faces, pieces


def orient_and_sign(code: PdCode) -> LinkDiagram:
    """Trace strands, fix orientations and compute crossing signs.

    Each under-passage fixes its component's orientation (slot 0 incoming).
    An explicit sign override fixes the over-strand direction. Components
    with neither are oriented so that edge labels increase along the strand
    with a single wraparound.
    """
    occ = _occurrences(code)
    n = len(code.crossings)
    if n:
        faces, pieces = _count_faces(code, occ)
        if faces != n + 2 * pieces:
            raise NonPlanar(f"diagram is not planar ({faces} faces for {n} crossings, {pieces} pieces)")

    heads: dict[int, tuple[int, int]] = {}
    tails: dict[int, tuple[int, int]] = {}
    components = []
    for comp in _trace_components(code, occ):
        # forced[k] = True if traversal direction agrees with orientation
        verdict: Optional[bool] = None
        source = None
        for e, here, there in comp:
            c, s = there  # traversal enters crossing c at slot s
            votes = []
            if s == 0:
                votes.append((True, c))
            elif s == 2:
                votes.append((False, c))
            sign = code.signs[c]
            if sign is not None and s in (1, 3):
                incoming_slot = 3 if sign > 0 else 1
                votes.append((s == incoming_slot, c))
            for v, cc in votes:
                if verdict is None:
                    verdict, source = v, cc
                elif verdict != v:
                    raise AmbiguousOrientation(
                        f"crossings {source + 1} and {cc + 1} force opposite orientations on the "
                        f"component through edge {e}",
                        _line(code, cc),
                    )
        if verdict is None:
            labels = [e for e, _, _ in comp]
            fwd = _single_wrap(labels)
            bwd = _single_wrap(labels[::-1])
            if fwd == bwd:
                raise AmbiguousOrientation(
                    f"cannot orient the over-only component through edges {sorted(labels)}; "
                    "add an X+/X- override",
                    _line(code, comp[0][2][0]),
                )
            verdict = fwd
        if not verdict:
            comp = [(e, there, here) for e, here, there in reversed(comp)]
        for e, here, there in comp:
            tails[e] = here
            heads[e] = there
        components.append(tuple(e for e, _, _ in comp))

    signs = []
    for c, x in enumerate(code.crossings):
        if heads.get(x[3]) == (c, 3):
            computed = 1
        elif heads.get(x[1]) == (c, 1):
            computed = -1
        else:  # pragma: no cover - excluded by tracing
            raise AmbiguousOrientation(f"crossing {c + 1} has no incoming over-strand", _line(code, c))
        signs.append(computed)
    return LinkDiagram(
        crossings=code.crossings,
        signs=tuple(signs),
        components=tuple(components),
        heads=heads,
        tails=tails,
        loops=code.loops,
    )


def _single_wrap(labels: Sequence[int]) -> bool:
    if len(labels) < 2:
        return False
    drops = sum(1 for a, b in zip(labels, labels[1:] + labels[:1]) if b < a)
    rises = len(labels) - drops
    return drops == 1 and rises >= 1 and len(labels) > 2


def load_diagram(text: str) -> LinkDiagram:
    return orient_and_sign(parse_pd(text))


def _relabel(n: int, link: dict, direction: dict, loops: int) -> LinkDiagram:
    """Emit a normalized diagram from slot connectivity.

    ``link[(c, s)]`` is the (crossing, slot) joined to ``(c, s)`` by an edge;
    ``direction[(c, s)]`` is True when the edge at ``(c, s)`` enters ``c``.
    Every crossing is rotated so that its incoming under-strand comes first;
    edges are numbered consecutively along each oriented component.
    """
    # rotation so that the incoming under-slot becomes slot 0
    rot = {}
    for c in range(n):
        rot[c] = 0 if direction[(c, 0)] else 2
    label: dict[tuple[int, int], int] = {}
    next_label = 1
    order = sorted(link)
    done: set[tuple[int, int]] = set()
    for start in order:
        if start in done or not direction[start]:
            continue
        # walk back to a canonical start: follow orientation from this head
        p = start
        comp_places = []
        while True:
            # p is a head end of some edge; record it and its tail
            t = link[p]
            comp_places.append((t, p))
            done.add(p)
            c, s = p
            q = (c, (s + 2) % 4)  # leave through the opposite slot
            p = link[q]
            if p == start:
                break
        for t, h in comp_places:
            label[t] = label[h] = next_label
            next_label += 1
    crossings = []
    signs = []
    for c in range(n):
        r = rot[c]
        tup = tuple(label[(c, (r + k) % 4)] for k in range(4))
        crossings.append(tup)
        over_in = (c, (r + 3) % 4)
        signs.append(1 if direction[over_in] else -1)
    code = PdCode(tuple(crossings), tuple(signs), loops)
    return orient_and_sign(code)


def mirror(diagram: LinkDiagram) -> LinkDiagram:
    """Swap over- and under-strands at every crossing (orientation kept)."""
    n = diagram.n
    link, direction = _slot_structure(diagram)
    # Rotating a crossing by one slot turns the over-strand into the
    # under-strand; reindex slots accordingly.
    new_link = {}
    new_dir = {}
    shift = {}
    for c in range(n):
        # new slot k corresponds to old slot (k + 1) % 4 (old over-strand at slots 1,3)
        shift[c] = 1
    for (c, s), (c2, s2) in link.items():
        new_link[(c, (s - shift[c]) % 4)] = (c2, (s2 - shift[c2]) % 4)
    for (c, s), d in direction.items():
        new_dir[(c, (s - shift[c]) % 4)] = d
    return _relabel(n, new_link, new_dir, diagram.loops)


def _slot_structure(diagram: LinkDiagram):
    link = {}
    direction = {}
    for e in diagram.heads:
        h, t = diagram.heads[e], diagram.tails[e]
        link[h] = t
        link[t] = h
        direction[h] = True
        direction[t] = False
    return link, direction


def resolve_crossing(diagram: LinkDiagram, c: int, bit: int) -> LinkDiagram:
    """The diagram obtained by taking the ``bit``-resolution at crossing ``c``.

    Remaining crossings keep their relative order. Components are oriented
    to agree with the original orientation on the lowest-labeled edge of each
    new component; closed crossingless circles become ``loops``.
    """
    if not 0 <= c < diagram.n:
        raise IndexError(f"crossing index {c + 1} out of range 1..{diagram.n}")
    pairs = ((0, 1), (2, 3)) if bit == 0 else ((0, 3), (1, 2))
    link, _ = _slot_structure(diagram)
    # follow a slot's edge, passing through the resolved crossing
    partner = {}
    for a, b in pairs:
        partner[a], partner[b] = b, a

    keep = [k for k in range(diagram.n) if k != c]
    newidx = {k: i for i, k in enumerate(keep)}

    def far(place):
        """Far end of the (possibly joined) edge starting at ``place``."""
        q = link[place]
        while q[0] == c:
            q = link[(c, partner[q[1]])]
        return q

    new_link = {}
    for k in keep:
        for s in range(4):
            q = far((k, s))
            new_link[(newidx[k], s)] = (newidx[q[0]], q[1])

    # count crossingless circles through c
    loops = diagram.loops
    seen_slots = set()
    for s in range(4):
        if s in seen_slots:
            continue
        # walk from slot s of c along its edge until returning to c or hitting a kept crossing
        start = s
        cur = (c, s)
        closed = False
        visited = []
        while True:
            visited.append(cur[1])
            q = link[cur]
            if q[0] != c:
                break
            nxt = (c, partner[q[1]])
            visited.append(q[1])
            if nxt[1] == start:
                closed = True
                break
            cur = nxt
        seen_slots.update(visited)
        if closed:
            loops += 1

    # orientation: walk each new component; align with the original orientation
    # of its smallest original edge label
    old_head = {}
    for e, h in diagram.heads.items():
        old_head[h] = e
    direction = {}
    # map new places back to old for orientation lookups
    back = {(newidx[k], s): (k, s) for k in keep for s in range(4)}
    visited: set = set()
    for start in sorted(new_link):
        if start in visited:
            continue
        # traverse the component; record (place_entered, entering?) candidates
        walk = []
        p = start
        while True:
            q = new_link[p]
            walk.append((p, q))  # edge from p (leaving) to q (entering)
            visited.add(p)
            visited.add(q)
            p = (q[0], (q[1] + 2) % 4)
            if p == start:
                break
        # choose orientation by the lowest old edge label leaving a kept slot
        best = None
        for p, q in walk:
            op = back[p]
            e = diagram.crossings[op[0]][op[1]]
            agrees = diagram.tails[e] == op if diagram.tails[e] == op or diagram.heads[e] == op else None
            if diagram.heads[e] == op:
                agrees = False
            elif diagram.tails[e] == op:
                agrees = True
            if best is None or e < best[0]:
                best = (e, agrees)
        forward = best[1]
        for p, q in walk:
            direction[p] = not forward
            direction[q] = forward
    return _relabel(len(keep), new_link, direction, loops)

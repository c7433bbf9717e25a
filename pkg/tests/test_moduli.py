import itertools

import pytest

from configs import (
    CASE_E_CHAINS,
    CASE_E_EDGES,
    case_d,
    case_e,
    case_e_decorated,
    ladybug,
    leaf_ladybugs,
)
from conftest import TREFOIL
from khoflow.moduli import (
    LEFT,
    RIGHT,
    NotLadybug,
    _CLASS_CACHE,
    boundary_graph,
    build_poset,
    classify_face,
    decorations,
    dual_graph_matches,
    ladybug_bijection,
    leaf_splitting,
    match_index2,
    right_pair,
    strip_passengers,
    sweep_diagram,
    verify_6cycles,
)
from khoflow.pd import load_diagram
from khoflow.resolution import MINUS, PLUS, Arc, DecoratedConfig, ResolutionConfig, resolve

# The drawn cube numbers the three circles at vertex 101 as min-site circles
# 1, 3, 2; every other vertex uses min-site order.
FIGURE_ORDER = {frozenset({1, 3}): (0, 2, 1)}


def _rename(D, f):
    circles = [[(f(s), side) for s, side in c] for c in D.circles]
    return ResolutionConfig(circles, [Arc(a.label, (f(a.ends[0]), f(a.ends[1]))) for a in D.arcs])


# -- ladybug ------------------------------------------------------------------


def test_right_pair_segments():
    D = ladybug()
    segs, bij = right_pair(D, RIGHT)
    assert len(segs) == 2
    A1, A2 = D.arcs
    for e, f in segs:
        assert e in A1.ends and f in A2.ends
    s1, s2 = D.surgery([A1.label]), D.surgery([A2.label])
    assert set(bij) == set(s1.circle_sets)
    assert set(bij.values()) == set(s2.circle_sets)


def test_left_pair_is_the_other_bijection():
    D = ladybug()
    r = ladybug_bijection(D, RIGHT)
    l = ladybug_bijection(D, LEFT)
    assert set(r) == set(l)
    assert all(r[z] != l[z] for z in r)


def test_right_pair_direction():
    # along the stored traversal, each right-pair segment runs from an end of
    # the arc on the right into an end of the arc on the left; the left pair
    # is the mirror image
    D = ladybug()
    circle = [s for s, _ in D.circles[0]]
    for side, step in ((RIGHT, 1), (LEFT, -1)):
        segs, _ = right_pair(D, side)
        for e, f in segs:
            inner, outer = (e, f) if D.side(e) else (f, e)
            assert not D.side(outer)
            assert circle[(circle.index(outer) + step) % 4] == inner


def test_bijection_invariant_under_reindexing():
    D = ladybug()
    base = ladybug_bijection(D, RIGHT)
    c = D.circles[0]
    for k in range(4):
        rotated = ResolutionConfig([c[k:] + c[:k]], D.arcs)
        assert ladybug_bijection(rotated, RIGHT) == base
    shift = {1: 7, 2: 4}
    inv = {v: k for k, v in shift.items()}
    renamed = _rename(D, lambda s: (shift[s[0]], s[1]))

    def back(z):
        return frozenset((inv[c], k) for c, k in z)

    got = {back(z): back(w) for z, w in ladybug_bijection(renamed, RIGHT).items()}
    assert got == base


def test_not_ladybug():
    with pytest.raises(NotLadybug):
        right_pair(case_e())


def test_match_index2():
    D = ladybug()
    top = D.full_surgery()
    d = DecoratedConfig(D, {z: MINUS for z in top.circle_sets}, {D.circle_sets[0]: PLUS})
    r = match_index2(d, RIGHT)
    l = match_index2(d, LEFT)
    assert len(r.chains) == 4 and r.ladybug
    assert sorted(r.pairs) != sorted(l.pairs)
    for m in (r, l):
        covered = sorted(k for p in m.pairs for k in p)
        assert covered == [0, 1, 2, 3]
        for i, j in m.pairs:
            # each pair goes through different first arcs
            assert m.chains[i][1][0] != m.chains[j][1][0]
    # right matching follows the right-pair bijection on the x_- circles
    bij = ladybug_bijection(D, RIGHT)
    P = build_poset(d)
    for i, j in r.pairs:
        a, b = r.chains[i][1], r.chains[j][1]
        za = [z for z, v in a[1] if v == MINUS][0]
        zb = [z for z, v in b[1] if v == MINUS][0]
        assert bij.get(za) == zb or bij.get(zb) == za
    assert P.nonempty()


def test_non_ladybug_index2_is_one_pair():
    d = load_diagram(TREFOIL)
    D = resolve(d, 1).restrict([1, 2]).core()
    for dec in decorations(D):
        m = match_index2(dec)
        assert len(m.chains) == 2 and m.pairs == [(0, 1)] and not m.ladybug


# -- case (e) -------------------------------------------------------------------


def _describe(P, chain):
    """(first arc, labels, arcs after two steps, labels) in the drawn circle numbering."""
    out = []
    for node in chain[1:3]:
        labels = P.node_key(node)
        order = FIGURE_ORDER.get(node[0], range(len(labels)))
        out.append(("".join("+-"[labels[k]] for k in order), set(node[0])))
    (first,) = chain[1][0]
    return (first, out[0][0], out[1][1], out[1][0])


def test_case_e_vertex_for_vertex():
    g = boundary_graph(case_e_decorated(), RIGHT)
    assert [_describe(g.poset, c) for c in g.chains] == CASE_E_CHAINS
    edges = {frozenset(i + 1 for i in e) for e in g.edges}
    assert edges == {frozenset(e) for e in CASE_E_EDGES}
    comps = [[k + 1 for k in c] for c in g.components()]
    assert comps == [[1, 2, 12, 11, 8, 7], [3, 4, 10, 9, 6, 5]]


def test_case_e_ladybug_faces():
    D = case_e()
    s = {a: D.surgery([a]) for a in (1, 2, 3)}
    table = {}
    for p, q in [(1, 2), (2, 3)]:
        bij = ladybug_bijection(D.restrict([p, q]), RIGHT)
        table[(p, q)] = sorted(
            (s[p].circle_sets.index(z) + 1, s[q].circle_sets.index(w) + 1) for z, w in bij.items()
        )
    assert table[(1, 2)] == [(1, 2), (2, 1)]
    assert table[(2, 3)] == [(1, 1), (2, 2)]
    assert not D.restrict([1, 3]).is_ladybug()


def test_case_e_left_convention():
    d = case_e_decorated()
    g = boundary_graph(d, LEFT)
    ok, lengths = verify_6cycles(g)
    assert ok and lengths == [6, 6]
    assert {frozenset(e) for e in g.edges} != {frozenset(e) for e in boundary_graph(d, RIGHT).edges}


# -- case (d) and leaves --------------------------------------------------------------


def test_case_d_single_6cycle():
    D = case_d()
    assert not D.leaves() and not D.coleaves()
    decs = decorations(D)
    assert decs
    for dec in decs:
        for side in (RIGHT, LEFT):
            g = boundary_graph(dec, side)
            assert len(g.chains) == 6
            assert verify_6cycles(g) == (True, [6])


def _leaf_pattern(d, side):
    """Edges predicted by the leaf splitting from the index-2 matching of D'."""
    P, Pp, mapping = leaf_splitting(d)
    dp = DecoratedConfig(Pp.config, dict(Pp.top[1]), dict(Pp.bottom[1]), check=False)
    m = match_index2(dp, side)
    dchain = {c: k for k, c in enumerate(m.chains)}
    kind = {}
    for c in P.maximal_chains():
        images = [mapping[n] for n in c]
        flip = next(k for k, (_, t) in enumerate(images) if t == 1)
        base = []
        for p, _ in images:
            if not base or base[-1] != p:
                base.append(p)
        kind[c] = ("wvu"[flip - 1], dchain[tuple(base)])
    expected = set()
    for i in range(len(m.chains)):
        expected.add(frozenset({("v", i), ("u", i)}))
        expected.add(frozenset({("v", i), ("w", i)}))
    for i, j in m.pairs:
        expected.add(frozenset({("u", i), ("u", j)}))
        expected.add(frozenset({("w", i), ("w", j)}))
    return kind, expected


def test_leaf_with_ladybug_two_6cycles():
    count = 0
    for D in leaf_ladybugs():
        for dec in decorations(D):
            for side in (RIGHT, LEFT):
                g = boundary_graph(dec, side)
                assert verify_6cycles(g) == (True, [6, 6])
                kind, expected = _leaf_pattern(dec, side)
                got = {frozenset(kind[g.chains[k]] for k in e) for e in g.edges}
                assert got == expected
                count += 1
    assert count >= 48


def test_coleaf_configurations():
    # duals of the leaf configurations have co-leaves; cycles match the originals
    for D in leaf_ladybugs()[::5]:
        for dec in decorations(D):
            dd = dec.dual()
            assert dd.config.coleaves()
            for side in (RIGHT, LEFT):
                ok, lengths = verify_6cycles(boundary_graph(dd, side))
                assert ok
                assert lengths == boundary_graph(dec, side).cycle_lengths()


# -- duality and sweeps ------------------------------------------------------------------


def test_poset_reverses_under_dual():
    configs = [case_e(), case_d(), ladybug()] + leaf_ladybugs()[:8]
    for D in configs:
        for dec in decorations(D):
            assert build_poset(dec).is_reverse_of(build_poset(dec.dual()))


def test_dual_graph_isomorphic():
    for D in [case_e(), case_d()] + leaf_ladybugs()[:8]:
        for dec in decorations(D):
            for side in (RIGHT, LEFT):
                assert dual_graph_matches(dec, side)


def test_trefoil_sweep():
    _CLASS_CACHE.clear()
    results = sweep_diagram(load_diagram(TREFOIL))
    assert results and all(r.ok for r in results)
    idx2 = [r for r in results if r.index == 2]
    assert {r.chain_count for r in idx2} <= {2, 4}
    assert all((r.chain_count == 4) == r.ladybug for r in idx2)
    idx3 = [r for r in results if r.index == 3]
    assert all(set(r.components) == {6} for r in idx3)
    js = results[0].to_json()
    assert set(js) == {"face", "index", "chain_count", "ladybug", "components", "side"}


def test_sweep_invariants(corpus):
    for name in ("4_1", "5_2", "6_2", "L4a1", "L6a2"):
        d = load_diagram(corpus[name]["pd"])
        for v in range(1 << d.n):
            zeros = [c for c in range(d.n) if not (v >> c) & 1]
            Dv = resolve(d, v)
            for T in itertools.combinations(zeros, 3):
                D = strip_passengers(Dv.restrict(T).core())
                for dec in decorations(D):
                    for side in (RIGHT, LEFT):
                        g = boundary_graph(dec, side)
                        assert g.is_2_regular()
                        assert len(g.chains) <= 12 and len(g.chains) % 6 == 0


def test_classify_cache_consistent():
    D = case_e()
    _CLASS_CACHE.clear()
    first = classify_face(D)
    _CLASS_CACHE.clear()
    again = classify_face(_rename(D, lambda s: (s[0] + 10, s[1])))
    assert first == again
    assert all(entry["ok"] for entry in first)


def test_empty_diagram_sweep():
    assert sweep_diagram(load_diagram("")) == []

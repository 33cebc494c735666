"""Finite shapes, limits, factorization, and the lift solver for the base category."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from prosets.errors import NotInvertible, PreconditionViolated, ShapeNotStronglyLoopless
from prosets.fincat import (
    Diagram,
    FinitePoset,
    FinSetMap,
    GRAPH,
    Functor,
    Square,
    check_category,
    check_diagram,
    check_functor,
    check_poset,
    check_universal_property,
    cofinality_report,
    cone_extend,
    connected_components,
    finset_lift,
    finset_limit,
    graph_factorization,
    is_cofinal,
    is_directed,
    make_category,
    over_category,
    poset_as_category,
    poset_sections,
    strongly_loopless_order,
)

# ---------------------------------------------------------------------------
# strategies


@st.composite
def finset_maps(draw, max_dom=5, max_cod=5, min_cod=1):
    dom = draw(st.integers(0, max_dom))
    cod = draw(st.integers(min_cod, max_cod))
    images = tuple(draw(st.integers(0, cod - 1)) for _ in range(dom))
    return FinSetMap(dom, cod, images)


@st.composite
def small_posets(draw, max_size=5):
    n = draw(st.integers(0, max_size))
    els = [f"e{k}" for k in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                pairs.append((els[i], els[j]))
    return FinitePoset.from_relation(els, pairs)


@st.composite
def poset_diagrams(draw, max_size=4, max_value=3):
    """Functorial diagrams built by choosing each value as a cone over what is below."""
    shape = draw(small_posets(max_size))
    order = sorted(shape.elements, key=lambda e: shape.degrees()[e])
    values: dict[str, int] = {}
    arrows: dict = {}
    for u in order:
        down = shape.strict_down(u)
        sub = shape.restrict(down)
        lim = finset_limit(Diagram(sub, {v: values[v] for v in down},
                                   {k: m for k, m in arrows.items() if k[0] in down and k[1] in down}))
        size = draw(st.integers(0, max_value))
        into = FinSetMap(size, lim.size, tuple(draw(st.integers(0, lim.size - 1))
                                               for _ in range(size))) if lim.size else FinSetMap(0, 1, ())
        if lim.size == 0:
            size = 0
            into = FinSetMap(0, 0, ())
        values[u] = size
        for v in down:
            arrows[(u, v)] = lim.projections[v].after(into)
    return Diagram(shape, values, arrows)


# ---------------------------------------------------------------------------
# category validation


def test_check_category_chain_is_ok():
    c = make_category(["x", "y"], [("f", "x", "y")])
    assert check_category(c).ok


def test_check_category_flags_wrong_codomain():
    c = make_category(["x", "y"], [("f", "x", "y")], {("id_y", "f"): "id_y"})
    report = check_category(c)
    assert report.kinds() == ["closure"]


def test_check_category_lists_nonassociative_triple():
    c = make_category(
        ["x"],
        [("a", "x", "x"), ("b", "x", "x")],
        {("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "b", ("b", "b"): "b"},
    )
    report = check_category(c)
    assert not report.ok
    triples = [v.details for v in report.violations if v.kind == "associativity"]
    assert ("a", "a", "a") in triples


def test_check_poset_flags_antisymmetry():
    p = FinitePoset(("a", "b"), frozenset({("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")}))
    assert "not-antisymmetric" in check_poset(p).kinds()


@given(small_posets())
def test_random_posets_are_valid(p):
    assert check_poset(p).ok


@given(small_posets())
def test_poset_as_category_is_a_category(p):
    assert check_category(poset_as_category(p)).ok


# ---------------------------------------------------------------------------
# directedness


def test_one_object_category_is_directed():
    c = make_category(["x"])
    v = is_directed(c)
    assert (v.nonempty, v.pairs_bounded, v.parallel_equalized) == (True, True, True)


def test_parallel_pair_category_fails_only_axiom_three():
    c = make_category(["s", "t"], [("f", "s", "t"), ("g", "s", "t")])
    assert check_category(c).ok
    v = is_directed(c)
    assert (v.nonempty, v.pairs_bounded, v.parallel_equalized) == (True, True, False)
    assert set(v.parallel_witness) == {"f", "g"}


def test_two_element_antichain_fails_only_axiom_two():
    p = FinitePoset.from_relation(["x", "y"], [])
    v = is_directed(p)
    assert (v.nonempty, v.pairs_bounded, v.parallel_equalized) == (True, False, True)
    assert v.pair_witness is not None


@given(small_posets())
def test_poset_directedness_means_greatest_element(p):
    v = is_directed(p)
    has_greatest = any(all(p.le(a, g) for a in p.elements) for g in p.elements)
    assert v.pairs_bounded == (has_greatest or not p.elements)
    assert v.parallel_equalized


@given(small_posets())
def test_poset_and_category_views_agree_on_directedness(p):
    vp = is_directed(p)
    vc = is_directed(poset_as_category(p))
    assert vp.nonempty == vc.nonempty
    assert vp.pairs_bounded == vc.pairs_bounded
    assert vc.parallel_equalized


# ---------------------------------------------------------------------------
# cone extension


def test_cone_extend_empty_poset_gives_one_point():
    out = cone_extend(FinitePoset((), frozenset()))
    assert out.elements == ("inf",)
    assert out.leq == frozenset({("inf", "inf")})


def test_cone_extend_chain_adds_new_minimum():
    p = FinitePoset.from_relation(["0", "1"], [("0", "1")])
    out = cone_extend(p)
    assert set(out.elements) == {"inf", "0", "1"}
    assert out.lt("inf", "0") and out.lt("inf", "1") and out.lt("0", "1")


def test_cone_extend_antichain_adds_only_bottom_relations():
    p = FinitePoset.from_relation(["x", "y"], [])
    out = cone_extend(p)
    strict = {(a, b) for (a, b) in out.leq if a != b}
    assert strict == {("inf", "x"), ("inf", "y")}


@given(small_posets())
def test_cone_extend_poset_restriction_recovers_input(p):
    out = cone_extend(p)
    assert check_poset(out).ok
    back = out.restrict(p.elements)
    assert back.elements == p.elements and back.leq == p.leq


@given(small_posets())
def test_cone_extend_category_adds_initial_object(p):
    c = poset_as_category(p)
    out = cone_extend(c)
    assert check_category(out).ok
    apex = out.objects[0]
    for o in out.objects:
        assert len(out.hom(apex, o)) == 1
        if o != apex:
            assert out.hom(o, apex) == []


# ---------------------------------------------------------------------------
# over-categories and cofinality


def _poset_functor(src: FinitePoset, tgt: FinitePoset, on_el) -> Functor:
    cs, ct = poset_as_category(src), poset_as_category(tgt)
    on_objects = {e: on_el(e) for e in src.elements}
    on_morphisms = {}
    for m in cs.morphisms:
        iu, iv = on_objects[m.dom], on_objects[m.cod]
        on_morphisms[m.id] = ct.identity(iu) if iu == iv else f"{iu}>{iv}"
    return Functor(cs, ct, on_objects, on_morphisms)


def test_identity_functor_is_cofinal():
    p = FinitePoset.from_relation(["0", "1"], [("0", "1")])
    f = _poset_functor(p, p, lambda e: e)
    assert check_functor(f).ok
    assert is_cofinal(f)


def test_maximal_element_inclusion_is_cofinal():
    chain = FinitePoset.from_relation(["0", "1"], [("0", "1")])
    top = FinitePoset.from_relation(["1"], [])
    f = _poset_functor(top, chain, lambda e: e)
    assert check_functor(f).ok
    assert is_cofinal(f)
    report = cofinality_report(f)
    assert report["0"] == (True, True) and report["1"] == (True, True)


def test_minimal_element_inclusion_is_not_cofinal():
    chain = FinitePoset.from_relation(["0", "1"], [("0", "1")])
    bottom = FinitePoset.from_relation(["0"], [])
    f = _poset_functor(bottom, chain, lambda e: e)
    assert not is_cofinal(f)
    assert cofinality_report(f)["1"] == (False, False)


@st.composite
def monotone_maps(draw):
    src = draw(small_posets(4))
    tgt = draw(small_posets(3))
    if not tgt.elements:
        tgt = FinitePoset.from_relation(["e0"], [])
    order = sorted(src.elements, key=lambda e: src.degrees()[e])
    assignment: dict[str, str] = {}
    for e in order:
        lower = [assignment[d] for d in src.strict_down(e)]
        candidates = [t for t in tgt.elements if all(tgt.le(l, t) for l in lower)]
        if not candidates:
            candidates = tgt.upper_bounds([])  # no constraint can be met; fall back
        assignment[e] = draw(st.sampled_from(sorted(candidates or tgt.elements)))
    return src, tgt, assignment


@given(monotone_maps())
@settings(max_examples=40)
def test_over_categories_are_categories_and_cofinality_matches_oracle(data):
    src, tgt, assignment = data
    ok = all(tgt.le(assignment[a], assignment[b])
             for a in src.elements for b in src.elements if src.le(a, b))
    if not ok:
        return
    f = _poset_functor(src, tgt, lambda e: assignment[e])
    assert check_functor(f).ok
    for i in tgt.elements:
        oc = over_category(f, i)
        assert check_category(oc).ok
    expected = True
    for b in tgt.elements:
        above = [a for a in src.elements if tgt.le(b, assignment[a])]
        if not above:
            expected = False
            break
        # zigzag connectivity inside the fiber sub-poset of the source
        reached = {above[0]}
        frontier = [above[0]]
        while frontier:
            x = frontier.pop()
            for y in above:
                if y not in reached and (src.le(x, y) or src.le(y, x)):
                    reached.add(y)
                    frontier.append(y)
        if len(reached) != len(above):
            expected = False
            break
    assert is_cofinal(f) == expected


def _all_functors_to_parallel_pair(src: FinitePoset):
    """Every functor from a poset category into the two-parallel-arrows category."""
    tgt = make_category(["s", "t"], [("f", "s", "t"), ("g", "s", "t")])
    cs = poset_as_category(src)
    els = src.elements
    out = []
    for objs in itertools.product(["s", "t"], repeat=len(els)):
        on_objects = dict(zip(els, objs))
        strict = [(u, v) for u in els for v in els if src.lt(v, u)]
        if any(on_objects[u] == "t" and on_objects[v] == "s" for u, v in strict):
            continue  # no morphism t -> s exists
        choice_pairs = [(u, v) for u, v in strict
                        if on_objects[u] == "s" and on_objects[v] == "t"]
        fixed = {}
        for u, v in strict:
            if (u, v) not in choice_pairs:
                fixed[f"{u}>{v}"] = tgt.identity(on_objects[u])
        for combo in itertools.product(["f", "g"], repeat=len(choice_pairs)):
            on_morphisms = dict(fixed)
            for (u, v), m in zip(choice_pairs, combo):
                on_morphisms[f"{u}>{v}"] = m
            for e in els:
                on_morphisms[cs.identity(e)] = tgt.identity(on_objects[e])
            fn = Functor(cs, tgt, on_objects, on_morphisms)
            if check_functor(fn).ok:
                out.append(fn)
    return out


def test_no_directed_poset_maps_cofinally_onto_the_parallel_pair():
    chain = FinitePoset.from_relation(["0", "1", "2"], [("0", "1"), ("1", "2")])
    functors = _all_functors_to_parallel_pair(chain)
    assert functors
    assert all(not is_cofinal(fn) for fn in functors)


@given(monotone_maps())
@settings(max_examples=40)
def test_cofinal_image_of_directed_poset_is_directed(data):
    src, tgt, assignment = data
    ok = all(tgt.le(assignment[a], assignment[b])
             for a in src.elements for b in src.elements if src.le(a, b))
    if not ok or not is_directed(src).all_ok:
        return
    f = _poset_functor(src, tgt, lambda e: assignment[e])
    if is_cofinal(f):
        assert is_directed(poset_as_category(tgt)).all_ok


# ---------------------------------------------------------------------------
# sections and degrees


def test_sections_of_vee_poset():
    p = FinitePoset.from_relation(["0", "1", "2"], [("0", "1"), ("0", "2")])
    secs = poset_sections(p)
    assert secs == [
        frozenset(),
        frozenset({"0"}),
        frozenset({"0", "1"}),
        frozenset({"0", "2"}),
        frozenset({"0", "1", "2"}),
    ]
    assert p.degrees() == {"0": 0, "1": 1, "2": 1}


@given(small_posets())
def test_sections_are_downward_closed_and_complete(p):
    secs = poset_sections(p)
    for s in secs:
        for x in s:
            assert p.strict_down(x) <= s
    brute = 0
    for r in range(len(p.elements) + 1):
        for combo in itertools.combinations(p.elements, r):
            s = set(combo)
            if all(p.strict_down(x) <= s for x in combo):
                brute += 1
    assert len(secs) == brute


# ---------------------------------------------------------------------------
# finite-set maps


def test_finsetmap_rejects_out_of_range_images():
    with pytest.raises(PreconditionViolated):
        FinSetMap(2, 1, (0, 1))


def test_finsetmap_rejects_wrong_arity():
    with pytest.raises(PreconditionViolated):
        FinSetMap(2, 2, (0,))


@given(finset_maps())
def test_identity_laws_for_composition(f):
    assert f.after(FinSetMap.identity(f.dom)) == f
    assert FinSetMap.identity(f.cod).after(f) == f


@given(finset_maps(max_dom=4, max_cod=4))
def test_bijections_invert(f):
    if f.is_bijective():
        assert f.inverse().after(f) == FinSetMap.identity(f.dom)
        assert f.after(f.inverse()) == FinSetMap.identity(f.cod)
    else:
        with pytest.raises(NotInvertible):
            f.inverse()


# ---------------------------------------------------------------------------
# limits


def test_limit_of_empty_shape_is_a_point():
    lim = finset_limit(Diagram(FinitePoset((), frozenset()), {}, {}))
    assert lim.size == 1 and lim.tuples == ((),)


def test_limit_of_discrete_shape_is_the_product():
    p = FinitePoset.from_relation(["a", "b"], [])
    lim = finset_limit(Diagram(p, {"a": 2, "b": 3}, {}))
    assert lim.size == 6
    assert lim.tuples == tuple(sorted(itertools.product(range(2), range(3))))


def test_pullback_of_constant_cospan_has_size_four():
    p = FinitePoset.from_relation(["u", "v", "w"], [("w", "u"), ("w", "v")])
    d = Diagram(p, {"u": 2, "v": 2, "w": 1}, {
        ("u", "w"): FinSetMap.constant(2, 1, 0),
        ("v", "w"): FinSetMap.constant(2, 1, 0),
    })
    assert check_diagram(d).ok
    lim = finset_limit(d)
    assert lim.size == 4


@given(poset_diagrams())
@settings(max_examples=40, deadline=None)
def test_limit_matches_brute_force_enumeration(d):
    assert check_diagram(d).ok
    lim = finset_limit(d)
    els = d.shape.elements
    brute = []
    for combo in itertools.product(*[range(d.values[e]) for e in els]):
        assign = dict(zip(els, combo))
        if all(d.arrow((u, v))(assign[u]) == assign[v]
               for u in els for v in els if d.shape.lt(v, u)):
            brute.append(combo)
    assert lim.tuples == tuple(sorted(brute))
    for e in els:
        for k, t in enumerate(lim.tuples):
            assert lim.projections[e](k) == t[els.index(e)]


@given(poset_diagrams(max_size=3, max_value=2), st.integers(0, 2), st.data())
@settings(max_examples=25, deadline=None)
def test_limit_universal_property(d, apex, data):
    lim = finset_limit(d)
    if lim.size == 0:
        apex = 0
    chooser = FinSetMap(apex, lim.size, tuple(
        data.draw(st.integers(0, lim.size - 1)) for _ in range(apex)))
    legs = {o: lim.projections[o].after(chooser) for o in lim.objects}
    assert lim.mediate(apex, legs) == chooser
    assert check_universal_property(d, lim, apex, legs)


def test_mediate_rejects_non_cones():
    p = FinitePoset.from_relation(["u", "w"], [("w", "u")])
    d = Diagram(p, {"u": 2, "w": 2}, {("u", "w"): FinSetMap.identity(2)})
    lim = finset_limit(d)
    with pytest.raises(PreconditionViolated):
        lim.mediate(1, {"u": FinSetMap(1, 2, (0,)), "w": FinSetMap(1, 2, (1,))})


# ---------------------------------------------------------------------------
# the graph factorization


def test_graph_factorization_of_constant_map():
    f = FinSetMap(2, 1, (0, 0))
    t = graph_factorization(f)
    assert t.mid == 3
    assert t.q == FinSetMap(2, 3, (0, 1))
    assert t.p == FinSetMap(3, 1, (0, 0, 0))


def test_graph_factorization_of_identity():
    t = graph_factorization(FinSetMap.identity(1))
    assert t.q.is_injective() and t.q.cod == 2
    assert t.p.is_surjective()


@given(finset_maps())
def test_graph_factorization_properties(f):
    t = GRAPH.factor(f)
    assert t.q.is_injective()
    assert t.p.is_surjective()
    assert t.p.after(t.q) == f


@given(finset_maps())
def test_on_square_sends_identity_square_to_identity(f):
    sq = Square(f, f, FinSetMap.identity(f.dom), FinSetMap.identity(f.cod))
    assert GRAPH.on_square(sq) == FinSetMap.identity(f.dom + f.cod)


def _draw_map_from(draw, dom, max_cod=4):
    cod = draw(st.integers(1, max_cod))
    return FinSetMap(dom, cod, tuple(draw(st.integers(0, cod - 1)) for _ in range(dom)))


@st.composite
def stacked_squares(draw):
    """Two composable squares built by pushing forward along free leg maps."""
    f = draw(finset_maps())
    m1 = _draw_map_from(draw, f.cod)
    t = _draw_map_from(draw, m1.cod)
    l1, k1 = m1.after(f), t.after(m1)
    m2 = _draw_map_from(draw, t.cod)
    u = _draw_map_from(draw, m2.cod)
    l2, k2 = m2.after(t), u.after(m2)
    return f, t, u, l1, k1, l2, k2


@given(stacked_squares())
@settings(max_examples=40)
def test_on_square_rectangles_and_composition(data):
    f, t, u, l1, k1, l2, k2 = data
    sq1 = Square(f, t, l1, k1)
    sq2 = Square(t, u, l2, k2)
    tf, tt = GRAPH.factor(f), GRAPH.factor(t)
    mid1 = GRAPH.on_square(sq1)
    assert mid1.after(tf.q) == tt.q.after(l1)
    assert tt.p.after(mid1) == k1.after(tf.p)
    comp = Square(f, u, l2.after(l1), k2.after(k1))
    assert GRAPH.on_square(comp) == GRAPH.on_square(sq2).after(mid1)


# ---------------------------------------------------------------------------
# the lift solver


def test_lift_solver_frozen_example():
    left = FinSetMap(1, 2, (0,))
    right = FinSetMap(2, 1, (0, 0))
    top = FinSetMap(1, 2, (1,))
    bottom = FinSetMap(2, 1, (0, 0))
    assert finset_lift(left, right, top, bottom) == FinSetMap(2, 2, (1, 0))


def test_lift_with_identity_legs_is_the_top_map():
    top = FinSetMap(3, 3, (2, 0, 1))
    h = finset_lift(FinSetMap.identity(3), FinSetMap.identity(3), top, top)
    assert h == top


def test_lift_rejects_non_surjective_right_leg():
    with pytest.raises(PreconditionViolated):
        finset_lift(FinSetMap.identity(1), FinSetMap(1, 2, (0,)),
                    FinSetMap(1, 1, (0,)), FinSetMap(1, 2, (0,)))


@st.composite
def lifting_squares(draw):
    a = draw(st.integers(0, 4))
    b = draw(st.integers(a, a + 3))
    if b == 0:
        b = 1
    imgs = draw(st.permutations(range(b)))[:a]
    left = FinSetMap(a, b, tuple(imgs))
    d = draw(st.integers(1, 3))
    c = draw(st.integers(d, d + 3))
    surj = list(range(d)) + [draw(st.integers(0, d - 1)) for _ in range(c - d)]
    surj = draw(st.permutations(surj))
    right = FinSetMap(c, d, tuple(surj))
    top = FinSetMap(a, c, tuple(draw(st.integers(0, c - 1)) for _ in range(a)))
    bot_imgs = [draw(st.integers(0, d - 1)) for _ in range(b)]
    for x in range(a):
        bot_imgs[left(x)] = right(top(x))
    bottom = FinSetMap(b, d, tuple(bot_imgs))
    return left, right, top, bottom


@given(lifting_squares())
@settings(max_examples=60)
def test_lift_solver_solves_every_generated_square(square):
    left, right, top, bottom = square
    h = finset_lift(*square)
    assert h.after(left) == top
    assert right.after(h) == bottom


# ---------------------------------------------------------------------------
# strongly loopless orders


def test_chain_category_orders_sink_first():
    p = FinitePoset.from_relation(["0", "1"], [("0", "1")])
    assert strongly_loopless_order(poset_as_category(p)) == ("0", "1")


def test_cycle_is_rejected():
    c = make_category(["x", "y"], [("f", "x", "y"), ("g", "y", "x")],
                      {("g", "f"): "id_x", ("f", "g"): "id_y"})
    with pytest.raises(ShapeNotStronglyLoopless):
        strongly_loopless_order(c)


def test_nonidentity_endomorphism_is_rejected():
    c = make_category(["x"], [("a", "x", "x")], {("a", "a"): "a"})
    with pytest.raises(ShapeNotStronglyLoopless):
        strongly_loopless_order(c)


@given(small_posets())
def test_loopless_order_has_no_forward_morphisms(p):
    c = poset_as_category(p)
    order = strongly_loopless_order(c)
    assert sorted(order) == sorted(p.elements)
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            assert not c.hom(a, b)


# ---------------------------------------------------------------------------
# components


def test_connected_components_of_disjoint_arrows():
    c = make_category(["a", "b", "c"], [("f", "a", "b")])
    comps = sorted(connected_components(c), key=lambda s: sorted(s)[0])
    assert comps == [frozenset({"a", "b"}), frozenset({"c"})]

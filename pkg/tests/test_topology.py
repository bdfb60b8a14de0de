import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dbakit.concepts import enumerate_oo_protoconcepts, enumerate_oo_semiconcepts
from dbakit.context import FormalContext, black_diamond
from dbakit.generate import random_cts, random_topology, rng_for
from dbakit.samples import constant_clopen_cts, five_by_four_cts, identity_counterexample, survey_context
from dbakit.topology import (Cts, CtsClass, FiniteTopology, NotCtscrError, check_cts_morphism,
                             clopen_proto_dba, clopen_semi_dba, closed_sets_by_closure, compose_cts,
                             cts_from_json, cts_to_json, enumerate_clopen_oo_protoconcepts,
                             enumerate_clopen_oo_semiconcepts, generate_from_closed_subbase,
                             induced_dba_iso, is_converse_continuous, is_lower_semicontinuous,
                             is_stone_context, is_upper_semicontinuous, open_set_semicontinuity,
                             pointwise_semicontinuity, preimage_is_open, transport_cts,
                             validate_ctscr, validate_topology)
from dbakit.dba import classify_dba
from dbakit.filters import spectrum

from oracles import topology_closure


def is_topology_by_definition(n, family):
    family = set(family)
    full = (1 << n) - 1
    if 0 not in family or full not in family:
        return False
    return all(a | b in family and a & b in family for a in family for b in family)


# open-set families


def test_validate_examples():
    assert validate_topology(3, [0, 7]) == (True, [])
    assert validate_topology(3, range(8))[0]
    ok, reasons = validate_topology(3, [0, 1, 2, 7])
    assert not ok and any("union" in r for r in reasons)
    assert not validate_topology(2, [1, 3])[0]
    with pytest.raises(ValueError):
        FiniteTopology(3, [0, 1, 2, 7])


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.data())
def test_validate_matches_definition(n, data):
    family = data.draw(st.sets(st.integers(0, (1 << n) - 1), max_size=8))
    assert validate_topology(n, family)[0] == is_topology_by_definition(n, family)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.data())
def test_closed_subbase_generation(n, data):
    subbase = data.draw(st.lists(st.integers(0, (1 << n) - 1), max_size=5))
    top = generate_from_closed_subbase(n, subbase)
    full = (1 << n) - 1
    closed = {full ^ o for o in top.opens}
    assert closed == closed_sets_by_closure(n, subbase)
    assert set(top.opens) == topology_closure(n, [full ^ s for s in subbase])


def test_subbase_extremes():
    assert generate_from_closed_subbase(3, [1, 2, 4]).is_discrete
    assert generate_from_closed_subbase(3, [0]).opens == (0, 7)


def test_boolean_loci_subbase_is_discrete(boolean_dbas):
    spec = spectrum(boolean_dbas[2])
    top = generate_from_closed_subbase(spec.n_filters, spec.filter_loci)
    assert top.is_discrete and top.n == 2


def test_neighbourhoods_and_clopens():
    top = FiniteTopology(3, [0, 1, 6, 7])
    assert top.neighbourhoods == (1, 6, 6)
    assert top.clopens == (0, 1, 6, 7)
    assert not top.totally_disconnected()
    assert FiniteTopology.discrete(3).totally_disconnected()
    assert not FiniteTopology.indiscrete(2).totally_disconnected()


def test_inconsistent_neighbourhoods():
    with pytest.raises(ValueError):
        FiniteTopology.from_neighbourhoods(2, [1, 1])  # point 1 outside its own neighbourhood
    with pytest.raises(ValueError):
        FiniteTopology.from_neighbourhoods(3, [3, 6, 4])  # {0,1} holds 1 but not its neighbourhood


def test_random_topologies_are_valid():
    rng = rng_for(9)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        top = random_topology(rng, n)
        assert is_topology_by_definition(n, top.opens)


def test_point_map_continuity():
    sierpinski = FiniteTopology(2, [0, 1, 3])
    assert preimage_is_open(FiniteTopology.discrete(2), sierpinski, [0, 1])
    assert not preimage_is_open(sierpinski, FiniteTopology.discrete(2), [0, 1])


# continuity of relations


def test_discrete_cts_is_ctscr(survey):
    cts = Cts.discrete(survey)
    assert is_lower_semicontinuous(cts) and is_upper_semicontinuous(cts)
    assert is_converse_continuous(cts) and validate_ctscr(cts)


def test_identity_counterexample():
    cts = identity_counterexample()
    assert not is_lower_semicontinuous(cts)
    assert not validate_ctscr(cts)
    assert pointwise_semicontinuity(cts) == open_set_semicontinuity(cts)


def test_swapped_counterexample_fails_converse():
    cts = identity_counterexample().transpose()
    assert not is_converse_continuous(cts)
    assert not validate_ctscr(cts)


def test_constant_clopen_example():
    tau = FiniteTopology(3, [0, 1, 6, 7])
    rho = FiniteTopology(4, [0, 3, 12, 15])
    cts = constant_clopen_cts(tau, rho, 3)
    assert cts.relation_continuous and cts.converse_continuous and cts.is_ctscr
    ctx = cts.context
    for A in tau.opens:
        # the black diamond is the clopen target unless A is empty
        assert black_diamond(ctx, A) == (3 if A else 0)
    with pytest.raises(ValueError):
        constant_clopen_cts(tau, rho, 1)


def test_five_by_four_is_not_ctscr():
    cts = five_by_four_cts()
    assert not cts.is_ctscr
    ctx = cts.context
    semis = enumerate_clopen_oo_semiconcepts(cts)
    assert (ctx.object_set("abc"), ctx.attribute_set("2")) in semis
    assert (ctx.object_set("ab"), ctx.attribute_set("2")) not in semis
    with pytest.raises(NotCtscrError):
        clopen_semi_dba(cts)


@pytest.mark.parametrize("seed", range(5))
def test_pointwise_agrees_with_open_sets(seed):
    rng = rng_for(seed)
    for _ in range(30):
        cts = random_cts(rng)
        assert pointwise_semicontinuity(cts) == open_set_semicontinuity(cts)


# clopen algebras


def test_discrete_clopen_lists_match_unrestricted(small_contexts):
    for ctx in small_contexts:
        cts = Cts.discrete(ctx)
        assert enumerate_clopen_oo_protoconcepts(cts) == [p.key for p in enumerate_oo_protoconcepts(ctx)]
        assert enumerate_clopen_oo_semiconcepts(cts) == [p.key for p in enumerate_oo_semiconcepts(ctx)]


def test_clopen_algebras_classify():
    rng = rng_for(31)
    seen = 0
    for _ in range(200):
        cts = random_cts(rng, 4, 4)
        if not cts.is_ctscr:
            continue
        seen += 1
        proto, semi = clopen_proto_dba(cts), clopen_semi_dba(cts)
        assert classify_dba(proto).fully_contextual
        assert classify_dba(semi).pure
        assert set(semi.pairs) <= set(proto.pairs)
    assert seen >= 10


# Stone contexts


def test_discrete_contexts_are_stone(small_contexts, survey):
    for ctx in list(small_contexts) + [survey]:
        assert is_stone_context(Cts.discrete(ctx))


def test_indiscrete_is_not_stone(survey):
    cts = Cts(survey, FiniteTopology.indiscrete(6), FiniteTopology.indiscrete(11))
    assert not is_stone_context(cts)


# morphisms


def test_identity_is_homeomorphism():
    cts = five_by_four_cts()
    h = check_cts_morphism(cts, cts, range(5), range(4))
    assert h.verdict == CtsClass.HOMEOMORPHISM


def test_discrete_to_indiscrete():
    ctx = FormalContext.from_matrix(["a", "b"], ["x", "y"], [[True, False], [False, True]])
    disc = Cts.discrete(ctx)
    indisc = Cts(ctx, FiniteTopology.indiscrete(2), FiniteTopology.indiscrete(2))
    assert check_cts_morphism(disc, indisc, [0, 1], [0, 1]).verdict == CtsClass.ISOMORPHISM
    assert check_cts_morphism(indisc, disc, [0, 1], [0, 1]).verdict == CtsClass.NONE


def test_compose_cts(survey):
    cts = Cts.discrete(survey)
    ident = check_cts_morphism(cts, cts, range(6), range(11))
    assert compose_cts(ident, ident, cts, cts).is_homeomorphism


def survey_corner():
    s = survey_context()
    return FormalContext(s.objects[:3], s.attributes[:4], tuple(r & 0b1111 for r in s.rows[:3]))


def test_permutation_induces_iso():
    cts = Cts.discrete(survey_corner())
    alpha, beta = [2, 0, 1], [3, 1, 0, 2]
    moved = transport_cts(cts, alpha, beta)
    h = check_cts_morphism(cts, moved, alpha, beta)
    assert h.is_homeomorphism
    for semi in (False, True):
        f = induced_dba_iso(h, cts, moved, semi=semi)
        assert f.isomorphism
    ident = check_cts_morphism(cts, cts, range(3), range(4))
    assert induced_dba_iso(ident, cts, cts).map == tuple(range(clopen_proto_dba(cts).n))


def test_induced_iso_requires_homeomorphism():
    ctx = FormalContext.from_matrix(["a"], ["x"], [[True]])
    cts = Cts.discrete(ctx)
    h = check_cts_morphism(cts, cts, [0], [0])
    bad = type(h)(h.alpha, h.beta, CtsClass.ISOMORPHISM, h.context_class, h.continuous)
    with pytest.raises(ValueError):
        induced_dba_iso(bad, cts, cts)


def test_transport_preserves_ctscr():
    rng = rng_for(12)
    for _ in range(60):
        cts = random_cts(rng, 4, 4)
        alpha = list(rng.permutation(cts.context.n_objects))
        beta = list(rng.permutation(cts.context.n_attributes))
        moved = transport_cts(cts, alpha, beta)
        assert moved.is_ctscr == cts.is_ctscr
        assert check_cts_morphism(cts, moved, alpha, beta).is_homeomorphism


# JSON


def test_json_round_trip():
    rng = rng_for(4)
    for _ in range(20):
        cts = random_cts(rng)
        back = cts_from_json(json.loads(json.dumps(cts_to_json(cts))))
        assert back.context == cts.context
        assert back.object_topology == cts.object_topology
        assert back.attribute_topology == cts.attribute_topology


def test_json_discrete_shorthand(survey):
    from dbakit.context import context_to_json
    cts = cts_from_json({"context": context_to_json(survey), "object_opens": "discrete"})
    assert cts.object_topology.is_discrete and cts.attribute_topology.is_discrete


@pytest.mark.parametrize("data", [[], {"x": 1}])
def test_json_rejects(data):
    with pytest.raises(ValueError):
        cts_from_json(data)

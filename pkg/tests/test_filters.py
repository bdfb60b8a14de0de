import numpy as np
import pytest

from dbakit.concepts import inclusion_hom
from dbakit.dba import extend_pure_iso, identity_hom, pure_indices
from dbakit.filters import (carrier_subset, direct_image, enumerate_primary_filters,
                            enumerate_primary_ideals, extend_to_primary, filter_locus,
                            generate_filter, generate_ideal, hom_preimage_maps, ideal_locus,
                            is_filter, is_ideal, is_primary_filter, is_primary_ideal,
                            locus_identity_failures, primary_by_scan, separate_filter_ideal,
                            spectrum, standard_complement, standard_context)

from oracles import Alg, primary_filters, primary_ideals


def subset(n, members):
    m = np.zeros(n, dtype=bool)
    m[list(members)] = True
    return m


def as_sets(rows):
    return {frozenset(np.flatnonzero(r).tolist()) for r in rows}


@pytest.fixture
def b2(boolean_dbas):
    return boolean_dbas[2]  # elements 0=⊥, 1=a, 2=b, 3=⊤


# predicates


def test_filter_predicates_on_b2(b2):
    full = subset(4, range(4))
    assert is_filter(b2, full) and not carrier_subset(b2, full, "filter").proper
    assert is_filter(b2, subset(4, [3]))
    assert not is_filter(b2, subset(4, [0, 3]))
    assert is_ideal(b2, subset(4, [0]))
    assert is_filter(b2, subset(4, []))


def test_dimension_mismatch(b2):
    with pytest.raises(ValueError):
        is_filter(b2, np.zeros(5, dtype=bool))


def test_generated_subsets(b2):
    assert generate_filter(b2, [1]).elements() == [1, 3]
    assert generate_filter(b2, [3]).elements() == [3]
    assert generate_filter(b2, range(4)).elements() == [0, 1, 2, 3]
    assert generate_ideal(b2, [2]).elements() == [0, 2]
    with pytest.raises(ValueError):
        generate_filter(b2, [])


def test_generated_filter_is_smallest(small_algebras):
    for d in small_algebras:
        for x in range(d.n):
            F = generate_filter(d, [x])
            assert is_filter(d, F.members)
            assert F.members[x]
            # every filter containing x contains F
            up = d.leq[int(d.meet[x, x])]
            assert np.array_equal(F.members, up)


# primary filters and ideals


def test_primary_counts(boolean_dbas, survey_proto):
    assert len(enumerate_primary_filters(boolean_dbas[1])) == 1
    assert [f.elements() for f in enumerate_primary_filters(boolean_dbas[1])] == [[1]]
    assert [i.elements() for i in enumerate_primary_ideals(boolean_dbas[1])] == [[0]]
    assert len(enumerate_primary_filters(boolean_dbas[2])) == 2
    spec = spectrum(survey_proto)
    assert (spec.n_filters, spec.n_ideals) == (6, 11)


def test_primary_match_definition_oracle(small_algebras, boolean_dbas):
    for d in list(small_algebras) + list(boolean_dbas):
        if d.n > 14:
            continue
        spec = spectrum(d)
        a = Alg.of(d)
        assert as_sets(spec.filter_matrix) == set(primary_filters(a))
        assert as_sets(spec.ideal_matrix) == set(primary_ideals(a))
        f, i = primary_by_scan(d)
        assert as_sets(f) == as_sets(spec.filter_matrix)
        assert as_sets(i) == as_sets(spec.ideal_matrix)
        for row in spec.filter_matrix:
            assert is_primary_filter(d, row)
        for row in spec.ideal_matrix:
            assert is_primary_ideal(d, row)


def test_separation_on_b2(b2):
    F, I = separate_filter_ideal(b2, subset(4, [3]), subset(4, [0]))
    assert (F.elements(), I.elements()) in [([1, 3], [0, 2]), ([2, 3], [0, 1])]
    with pytest.raises(ValueError):
        separate_filter_ideal(b2, subset(4, [1, 3]), subset(4, [0, 1]))


def test_separation_on_survey_semi(survey_semi):
    d = survey_semi
    rng = np.random.default_rng(3)
    found = 0
    for x, y in rng.integers(0, d.n, size=(40, 2)):
        F, I = generate_filter(d, [int(x)]), generate_ideal(d, [int(y)])
        if (F.members & I.members).any():
            continue
        G, J = separate_filter_ideal(d, F, I)
        assert G.primary and J.primary
        assert not (G.members & J.members).any()
        assert not (F.members & ~G.members).any() and not (I.members & ~J.members).any()
        found += 1
    assert found > 0


def test_primary_pair_separates_itself(b2):
    F, I = enumerate_primary_filters(b2)[0], enumerate_primary_ideals(b2)[1]
    G, J = separate_filter_ideal(b2, F, I)
    assert G == F and J == I


def test_extend_to_primary(b2):
    top = generate_filter(b2, [3])
    assert extend_to_primary(b2, top).elements() in ([1, 3], [2, 3])
    prim = enumerate_primary_filters(b2)[0]
    assert extend_to_primary(b2, prim) == prim
    with pytest.raises(ValueError):
        extend_to_primary(b2, generate_filter(b2, [0]))


# loci


def test_loci_extremes(small_algebras):
    for d in small_algebras:
        spec = spectrum(d)
        assert filter_locus(d, d.top) == (1 << spec.n_filters) - 1
        assert filter_locus(d, d.bot) == 0
        assert ideal_locus(d, d.bot) == (1 << spec.n_ideals) - 1
        assert ideal_locus(d, d.top) == 0


def test_b2_loci(b2):
    assert filter_locus(b2, 1) == 0b01
    assert filter_locus(b2, 2) == 0b10
    with pytest.raises(ValueError):
        filter_locus(b2, 4)


def test_locus_identities(small_algebras, boolean_dbas, survey_semi):
    for d in list(small_algebras) + list(boolean_dbas) + [survey_semi]:
        assert locus_identity_failures(d) == {}


# standard contexts


@pytest.mark.parametrize("k", [1, 2, 3])
def test_standard_context_of_boolean(boolean_dbas, k):
    d = boolean_dbas[k]
    ctx = standard_context(d)
    comp = standard_complement(d)
    assert (ctx.n_objects, ctx.n_attributes) == (k, k)
    # element i of the power set is the subset with bitmask i
    atoms = [1 << i for i in range(k)]
    full = (1 << k) - 1
    coatoms = sorted(full ^ a for a in atoms)
    expect = np.array([[a & c == a for c in coatoms] for a in atoms], dtype=bool)
    assert np.array_equal(ctx.incidence(), expect)
    assert np.array_equal(comp.incidence(), ~expect)
    # ∇ pairs each atom with its complement only
    assert (comp.incidence().sum(axis=0) == 1).all() and (comp.incidence().sum(axis=1) == 1).all()


def test_standard_context_small_cases(boolean_dbas):
    assert standard_context(boolean_dbas[1]).incidence().tolist() == [[False]]
    assert standard_context(boolean_dbas[2]).incidence().tolist() == [[True, False], [False, True]]


def test_survey_standard_context_shape(survey_proto):
    ctx = standard_context(survey_proto)
    assert (ctx.n_objects, ctx.n_attributes) == (6, 11)
    assert ctx.objects[0].startswith("F@") and ctx.attributes[0].startswith("I@")


# homomorphisms


def test_identity_pullback(small_algebras):
    for d in small_algebras:
        alpha, beta = hom_preimage_maps(identity_hom(d))
        assert alpha == list(range(spectrum(d).n_filters))
        assert beta == list(range(spectrum(d).n_ideals))


def test_inclusion_pullback(survey_semi, survey_proto):
    h = inclusion_hom(survey_semi, survey_proto)
    alpha, beta = hom_preimage_maps(h)
    src, dst = spectrum(survey_semi), spectrum(survey_proto)
    hmap = np.asarray(h.map)
    for i, k in enumerate(alpha):
        assert np.array_equal(dst.filter_matrix[i][hmap], src.filter_matrix[k])
        assert is_primary_filter(survey_semi, src.filter_matrix[k])
    # the pullback agrees with loci: α⁻¹(F_x) = F_{h(x)}
    for x in range(survey_semi.n):
        pulled = {i for i, k in enumerate(alpha) if filter_locus(survey_semi, x) >> k & 1}
        assert pulled == {i for i in range(dst.n_filters) if filter_locus(survey_proto, h.map[x]) >> i & 1}
    assert len(beta) == dst.n_ideals


def test_pullback_rejects_non_hom(b2):
    from dbakit.dba import check_hom
    with pytest.raises(ValueError):
        hom_preimage_maps(check_hom(b2, b2, [3, 3, 3, 3]))


def test_direct_image_under_iso_is_primary(survey_proto):
    pd = pure_indices(survey_proto)
    f = extend_pure_iso(survey_proto, survey_proto, {int(i): int(i) for i in pd})
    for F in enumerate_primary_filters(survey_proto):
        assert is_primary_filter(survey_proto, direct_image(f, F))

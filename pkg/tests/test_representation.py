import json

import pytest

from dbakit.concepts import build_proto_dba, build_semi_dba, build_wille_semi_dba
from dbakit.dba import (boolean_power, check_hom, classify_dba, duplicate_element,
                        extend_pure_iso, from_boolean, identity_hom, product, pure_indices, pure_part,
                        to_boolean)
from dbakit.generate import seeded_contexts
from dbakit.representation import (RepresentationCapError, TheoremReport, atom_coatom_context,
                                   automorphisms, build_kpr_cts, characterize_pure_part,
                                   clopen_identity_failures, dba_digest, finite_rep_atoms, functor_F,
                                   functor_F_laws, functor_G, functor_G_laws, k_maps, kpr_algebras,
                                   oo_images, rep_map_oo, rep_map_wille, square_failures)
from dbakit.samples import five_by_four_cts
from dbakit.topology import Cts, CtsClass, FiniteTopology

from conftest import ctx_from_rows


# the filter context


def test_kpr_of_boolean(boolean_dbas):
    cts = build_kpr_cts(boolean_dbas[2])
    assert cts.object_topology.is_discrete and cts.attribute_topology.is_discrete
    assert cts.is_ctscr and cts.is_stone
    assert cts.context.incidence().tolist() == [[False, True], [True, False]]
    assert build_kpr_cts(boolean_dbas[1]).context.incidence().tolist() == [[True]]


def test_kpr_of_survey_semi(survey_semi):
    cts = build_kpr_cts(survey_semi)
    assert (cts.context.n_objects, cts.context.n_attributes) == (6, 11)
    assert cts.is_stone


def test_kpr_cap(survey_semi):
    with pytest.raises(RepresentationCapError):
        build_kpr_cts(from_boolean(boolean_power(3)), cap=5)
    with pytest.raises(RepresentationCapError):
        build_kpr_cts(survey_semi, cap=30)


# the representation maps


def test_rep_on_survey_semi(survey_semi):
    rep = rep_map_oo(survey_semi)
    assert rep.verdict, rep.report.counterexample
    assert rep.verdicts() == {"homomorphism": True, "quasi_injective": True, "injective": True,
                              "surjective": False}
    _, _, semi = kpr_algebras(survey_semi)
    mapping = [semi.index_of(*img) for img in rep.images]
    assert check_hom(survey_semi, semi, mapping).isomorphism


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_rep_on_booleans(boolean_dbas, k):
    rep = rep_map_oo(boolean_dbas[k])
    assert rep.verdict and rep.hom.isomorphism


def test_rep_ladder_on_small_algebras(small_algebras):
    for d in small_algebras:
        rep = rep_map_oo(d)
        cls = classify_dba(d)
        assert rep.verdict, rep.report.counterexample
        assert rep.homomorphism and rep.quasi_injective
        assert rep.injective == cls.contextual
        assert rep.hom.isomorphism == cls.fully_contextual


def test_rep_ladder_on_hand_built(boolean_dbas):
    corner = ctx_from_rows(["X.", ".."])
    semi = build_semi_dba(corner)
    cases = {
        "duplicate": duplicate_element(boolean_dbas[2], 1),
        "product": product(build_proto_dba(corner), semi),
        "not-fully": semi,
    }
    for name, d in cases.items():
        rep = rep_map_oo(d)
        cls = classify_dba(d)
        assert rep.verdict, (name, rep.report.counterexample)
        assert rep.quasi_injective
        assert rep.injective == cls.contextual
        assert rep.hom.isomorphism == cls.fully_contextual
    assert not rep_map_oo(cases["duplicate"]).injective


def test_rep_images_are_pairs_of_loci(boolean_dbas):
    d = boolean_dbas[2]
    imgs = oo_images(d)
    assert imgs[d.top] == (0, 0)
    assert imgs[d.bot] == (0b11, 0b11)


def test_classical_rep(boolean_dbas, small_algebras):
    rep = rep_map_wille(boolean_dbas[1])
    assert rep.images[boolean_dbas[1].top] == (1, 0)
    rep = rep_map_wille(boolean_dbas[2])
    assert rep.verdict and rep.injective
    for d in small_algebras:
        assert rep_map_wille(d).verdict


# atoms and coatoms


def test_atom_context_of_boolean(boolean_dbas):
    assert atom_coatom_context(boolean_dbas[2]).incidence().shape == (2, 2)
    assert atom_coatom_context(boolean_dbas[1]).incidence().shape == (1, 1)


def test_atom_form_on_survey(survey_semi):
    rep = finite_rep_atoms(survey_semi)
    assert rep.report.verdict, rep.report.counterexample
    assert (rep.context.n_objects, rep.context.n_attributes) == (6, 11)


def test_atom_form_on_small_algebras(small_algebras, boolean_dbas):
    for d in list(small_algebras) + list(boolean_dbas):
        rep = finite_rep_atoms(d)
        assert rep.report.verdict, rep.report.counterexample
        assert rep.hom.quasi_injective


def test_atom_form_pure_target(boolean_dbas):
    d = boolean_dbas[3]
    rep = finite_rep_atoms(d)
    target = build_wille_semi_dba(rep.context)
    assert target.n == d.n


# pure part


def test_characterize_pure_part(small_algebras, boolean_dbas, survey_semi):
    for d in list(small_algebras) + list(boolean_dbas) + [survey_semi]:
        rep = characterize_pure_part(d)
        assert rep.verdict, rep.counterexample


def test_clopen_identities(small_algebras, boolean_dbas, survey_semi):
    for d in list(small_algebras) + list(boolean_dbas) + [survey_semi]:
        assert clopen_identity_failures(d) == {}


# Stone round trip


@pytest.mark.parametrize("ctx", [
    ctx_from_rows(["X"]),
    ctx_from_rows(["X.", ".X"]),
    five_by_four_cts().context,
])
def test_round_trip_on_discrete(ctx):
    km = k_maps(Cts.discrete(ctx))
    assert km.report.verdict, km.report.counterexample
    assert km.hom.is_homeomorphism and km.induced.isomorphism


def test_round_trip_on_filter_contexts(survey_semi):
    for d in (build_semi_dba(ctx_from_rows(["X.", ".X"])), survey_semi):
        km = k_maps(build_kpr_cts(d))
        assert km.report.verdict, km.report.counterexample


def test_round_trip_rejects_non_stone():
    cts = Cts(ctx_from_rows(["X.", ".X"]), FiniteTopology.indiscrete(2), FiniteTopology.indiscrete(2))
    with pytest.raises(ValueError):
        k_maps(cts)


# functors


def full_auts(ctx):
    d = build_proto_dba(ctx)
    return d, automorphisms(d)


@pytest.mark.parametrize("rows", [["X.", ".X"], ["..", ".."], ["XX", "XX"], ["X.", ".."]])
def test_pure_part_functor(rows):
    d, auts = full_auts(ctx_from_rows(rows))
    assert auts
    report = functor_G_laws(auts, [(f, g) for f in auts for g in auts])
    assert report.verdict, report.counterexample
    src, g = functor_G(identity_hom(d))
    assert g.map == tuple(range(src.n))
    for f in auts:
        _, restricted = functor_G(f)
        pd, pt = pure_indices(f.source), pure_indices(f.target)
        h = {int(pd[i]): int(pt[j]) for i, j in enumerate(restricted.map)}
        assert extend_pure_iso(d, d, h).map == f.map


def test_extension_of_every_pure_automorphism():
    d = build_proto_dba(ctx_from_rows(["X.", ".X"]))
    pd = [int(i) for i in pure_indices(d)]
    for a in automorphisms(pure_part(d)):
        f = extend_pure_iso(d, d, {pd[i]: pd[a.map[i]] for i in range(len(pd))})
        assert f.isomorphism
        _, back = functor_G(f)
        assert back.map == a.map


@pytest.mark.parametrize("rows", [["X.", ".X"], ["..", ".."], ["X.", "XX"]])
def test_filter_context_functor(rows):
    d = build_semi_dba(ctx_from_rows(rows))
    auts = automorphisms(d)
    report = functor_F_laws(auts, [(f, g) for f in auts for g in auts])
    assert report.verdict, report.counterexample
    ident = functor_F(identity_hom(d))
    assert ident.alpha == tuple(range(len(ident.alpha)))
    for f in auts:
        pulled = functor_F(f)
        assert pulled.verdict == CtsClass.HOMEOMORPHISM
        assert square_failures(f, pulled) == []


def test_functor_F_on_boolean(boolean_dbas):
    auts = automorphisms(boolean_dbas[3])
    assert len(auts) == 6
    assert functor_F_laws(auts, [(auts[1], auts[2])]).verdict


def test_functors_reject_wrong_inputs(survey_semi, boolean_dbas):
    d = boolean_dbas[2]
    with pytest.raises(ValueError):
        functor_G(check_hom(d, d, [3, 3, 3, 3]))
    with pytest.raises(ValueError):
        functor_F(check_hom(d, d, [0, 0, 3, 3]))


def test_boolean_corollaries(boolean_dbas):
    for d in boolean_dbas[1:]:
        cts = build_kpr_cts(d)
        inc = cts.context.incidence()
        assert (inc.sum(axis=0) == 1).all() and (inc.sum(axis=1) == 1).all()
        _, proto, semi = kpr_algebras(d)
        assert to_boolean(proto) is not None
        assert proto.n == semi.n == d.n


# reports


def test_report_json_shape(boolean_dbas):
    rep = characterize_pure_part(boolean_dbas[2])
    data = json.loads(json.dumps(rep.to_json()))
    assert set(data) >= {"theorem", "input", "verdict", "counterexample", "elapsed_ms"}
    assert data["input"] == dba_digest(boolean_dbas[2])
    assert isinstance(rep, TheoremReport) and bool(rep)


def test_digest_depends_on_tables(boolean_dbas):
    assert dba_digest(boolean_dbas[2]) != dba_digest(boolean_dbas[3])
    assert dba_digest(from_boolean(boolean_power(2))) == dba_digest(boolean_dbas[2])


def test_seeded_instances_cover_ladder():
    seen = set()
    for ctx in seeded_contexts(2024, 50):
        for d in (build_proto_dba(ctx), build_semi_dba(ctx)):
            seen.add(tuple(classify_dba(d)))
    assert (True, True, False) in seen and (True, False, True) in seen

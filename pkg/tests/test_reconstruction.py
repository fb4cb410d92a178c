import random

import pytest

from grpdrecon.corpus import (cyclic_group_groupoid, disjoint_union, full_corpus,
                              pair_groupoid, trivial_groupoid)
from grpdrecon.grading import GradeGroup, TRIVIAL_GROUP
from grpdrecon.groupoid import groupoid_isomorphic, is_isomorphism, validate
from grpdrecon.normalisers import HypothesisViolation
from grpdrecon.reconstruction import (IsoCheckError, PresentationError,
                                      RingPresentation, character_value,
                                      find_normalisers, germ_groupoid,
                                      induced_groupoid_iso, load_presentation,
                                      masa_holds, presentation_from_dict,
                                      presentation_from_groupoid,
                                      presentation_to_dict, rescaling_automorphism,
                                      scramble_presentation, stone_spectrum,
                                      validate_presentation, verify_roundtrip)
from grpdrecon.rings import GF, Q, Z


def _diagonal_only_presentation(ring, n):
    """D = ring^n with orthogonal idempotent basis (a trivial groupoid algebra)."""
    basis = tuple(f"d{i}" for i in range(n))
    mult = {(b, b): {b: ring.one} for b in basis}
    grading = {b: TRIVIAL_GROUP.zero() for b in basis}
    return RingPresentation(ring, basis, mult, basis, TRIVIAL_GROUP, grading)


def test_presentation_validates(r2, f2):
    p = presentation_from_groupoid(r2, f2)
    assert validate_presentation(p) == []


def test_presentation_catches_broken_associativity(f2):
    # (aa)a = ba = 0 but a(aa) = ab = a
    basis = ("a", "b")
    mult = {("a", "a"): {"b": 1}, ("a", "b"): {"a": 1}}
    grading = {b: TRIVIAL_GROUP.zero() for b in basis}
    p = RingPresentation(f2, basis, mult, (), TRIVIAL_GROUP, grading)
    assert any("associativity" in msg for msg in validate_presentation(p))


def test_stone_spectrum_counts(r2, f2):
    assert len(stone_spectrum(_diagonal_only_presentation(f2, 3))) == 3
    assert len(stone_spectrum(_diagonal_only_presentation(f2, 1))) == 1
    atoms = stone_spectrum(presentation_from_groupoid(r2, f2))
    assert atoms == [{"(1,1)": 1}, {"(2,2)": 1}]


def test_stone_spectrum_handles_rescaled_idempotents(f3):
    # d*d = 2d: atom is the rescaled 2d (since 2*2 = 1 mod 3)
    basis = ("d",)
    mult = {("d", "d"): {"d": 2}}
    grading = {"d": TRIVIAL_GROUP.zero()}
    p = RingPresentation(f3, basis, mult, basis, TRIVIAL_GROUP, grading)
    atoms = stone_spectrum(p)
    assert atoms == [{"d": 2}]
    assert p.mul(atoms[0], atoms[0]) == atoms[0]


def test_stone_spectrum_enumeration_fallback(f2):
    # diagonal basis {1, e} with 1 the identity: not orthogonal, needs the scan
    basis = ("one", "e")
    mult = {("one", "one"): {"one": 1}, ("one", "e"): {"e": 1},
            ("e", "one"): {"e": 1}, ("e", "e"): {"e": 1}}
    grading = {b: TRIVIAL_GROUP.zero() for b in basis}
    p = RingPresentation(f2, basis, mult, basis, TRIVIAL_GROUP, grading)
    atoms = stone_spectrum(p)
    # atoms of {0, e, 1, 1+e}: e and 1+e
    assert sorted(p.canon(a) for a in atoms) == [(("e", 1),), (("e", 1), ("one", 1))]


def test_character_evaluation(r2, f2):
    p = presentation_from_groupoid(r2, f2)
    atoms = stone_spectrum(p)
    full = {u: f2.one for u in r2.units}
    for atom in atoms:
        assert character_value(p, atom, full) == 1
        assert character_value(p, atom, {}) == 0
    assert character_value(p, atoms[0], atoms[0]) == 1
    assert character_value(p, atoms[0], atoms[1]) == 0


def test_masa_check(r2, z2_trivial, z2_graded):
    for ring in (GF(2), Q, Z):
        assert masa_holds(presentation_from_groupoid(r2, ring))
        assert not masa_holds(presentation_from_groupoid(z2_trivial, ring))
        assert masa_holds(presentation_from_groupoid(z2_graded, ring))


def test_find_normalisers_counts(r2, f2):
    p = presentation_from_groupoid(r2, f2)
    assert len(find_normalisers(p, mode="black-box")) == 7
    assert len(find_normalisers(p, mode="white-box")) == 7
    assert len(find_normalisers(_diagonal_only_presentation(f2, 2), mode="black-box")) == 4


def test_find_normalisers_scramble_invariant(r2, f3):
    p = presentation_from_groupoid(r2, f3)
    rng = random.Random(11)
    s = scramble_presentation(p, rng)
    assert len(find_normalisers(s.presentation, mode="black-box")) == 7


def test_germ_groupoid_examples(r2, z2_graded, f2, f3):
    res = germ_groupoid(presentation_from_groupoid(r2, f2), mode="black-box")
    assert len(res.groupoid) == 4 and len(res.groupoid.units) == 2
    assert groupoid_isomorphic(r2, res.groupoid) is not None

    res2 = germ_groupoid(_diagonal_only_presentation(f2, 2), mode="black-box")
    assert len(res2.groupoid) == 2 and len(res2.groupoid.units) == 2

    res3 = germ_groupoid(presentation_from_groupoid(z2_graded, f3), mode="black-box")
    assert len(res3.groupoid) == 2 and len(res3.groupoid.units) == 1
    assert groupoid_isomorphic(z2_graded, res3.groupoid) is not None


def test_germ_groupoid_output_is_valid(r2, f2):
    res = germ_groupoid(presentation_from_groupoid(r2, f2))
    assert validate(res.groupoid) == []


def test_masa_failure_reported_not_wrong_answer(z2_trivial, f2):
    p = presentation_from_groupoid(z2_trivial, f2)
    with pytest.raises(HypothesisViolation):
        germ_groupoid(p, mode="black-box")


def test_roundtrip_examples(r2, z2_graded, f2, f3):
    rep = verify_roundtrip(r2, f2, mode="black-box")
    assert rep.ok and rep.class_count == 7 and rep.character_count == 2
    rep2 = verify_roundtrip(trivial_groupoid(8), Z, mode="white-box")
    assert rep2.ok
    rep3 = verify_roundtrip(z2_graded, f3, mode="white-box")
    assert rep3.ok
    rep4 = verify_roundtrip(z2_graded, f3, mode="black-box")
    assert rep4.ok


def test_roundtrip_flags_hypothesis(z2_trivial, f2):
    rep = verify_roundtrip(z2_trivial, f2)
    assert not rep.ok and rep.hypothesis_violation
    assert rep.stages[-1]["stage"] == "principal-kernel"


def test_roundtrip_witness_is_exact_table_isomorphism(f2):
    g = disjoint_union(pair_groupoid(2), trivial_groupoid(2))
    rep = verify_roundtrip(g, f2, mode="white-box")
    assert rep.ok
    res = germ_groupoid(presentation_from_groupoid(g, f2), mode="white-box")
    assert is_isomorphism(g, res.groupoid, rep.witness)


def test_epsilon_intertwines_bisection_action(z2_graded, f2):
    # the germ action of [1_V] matches src(a) -> dst(a) along V
    for g in (pair_groupoid(2), z2_graded, pair_groupoid(3)):
        p = presentation_from_groupoid(g, f2)
        res = germ_groupoid(p, mode="white-box")
        atom_of_unit = {}
        for xi, atom in enumerate(res.atoms):
            (u,) = atom
            atom_of_unit[u] = xi
        for ci, rec in enumerate(res.classes):
            if not rec.rep:
                continue
            for m in rec.support:
                xi = atom_of_unit[g.src[m]]
                conj = p.mul(p.mul(rec.partner, res.atoms[atom_of_unit[g.dst[m]]]), rec.rep)
                assert p.mul(res.atoms[xi], conj) == res.atoms[xi]


def test_germ_composition_well_defined(r2, f2):
    # unreduced classes that define the same germ compose identically
    p = presentation_from_groupoid(r2, f2)
    res = germ_groupoid(p, mode="black-box")
    groups = {}
    for ci, rec in enumerate(res.classes):
        if not rec.rep:
            continue
        sidem = p.mul(rec.partner, rec.rep)
        for xi, atom in enumerate(res.atoms):
            if p.mul(atom, sidem) != atom:
                continue
            reduced = res.class_of_support[frozenset(p.mul(rec.rep, atom))]
            groups.setdefault((reduced, xi), []).append(ci)
    for (reduced, xi), members in groups.items():
        atom = res.atoms[xi]
        keys = {res.class_of_support[frozenset(p.mul(res.classes[ci].rep, atom))]
                for ci in members}
        assert keys == {reduced}


def test_scrambled_germ_stays_isomorphic(f3):
    rng = random.Random(12)
    for g in (pair_groupoid(2), cyclic_group_groupoid(2)):
        p = presentation_from_groupoid(g, f3)
        base = germ_groupoid(p, mode="black-box").groupoid
        for multiplicative in (True, False):
            s = scramble_presentation(p, rng, multiplicative=multiplicative)
            scrambled = germ_groupoid(s.presentation, mode="black-box").groupoid
            assert groupoid_isomorphic(base, scrambled) is not None


def test_induced_iso_identity(r2, f2):
    p = presentation_from_groupoid(r2, f2)
    rho = {b: p.basis_vec(b) for b in p.basis}
    result = induced_groupoid_iso(rho, p, p, mode="black-box")
    assert all(k == v for k, v in result.mapping.items())


def test_induced_iso_unit_rescaling_is_identity(r2, f3):
    p = presentation_from_groupoid(r2, f3)
    b = {"(1,1)": 1, "(2,2)": 2}
    a = {m: f3.mul(b[r2.dst[m]], f3.unit_inverse(b[r2.src[m]])) for m in r2.morphisms}
    rho = rescaling_automorphism(p, lambda m: a[m])
    result = induced_groupoid_iso(rho, p, p, mode="black-box")
    assert all(k == v for k, v in result.mapping.items())


def test_induced_iso_unit_swap_is_the_swap(r2, f2):
    p = presentation_from_groupoid(r2, f2)
    swap = {"(1,1)": "(2,2)", "(2,2)": "(1,1)", "(1,2)": "(2,1)", "(2,1)": "(1,2)"}
    rho = {m: p.basis_vec(swap[m]) for m in r2.morphisms}
    result = induced_groupoid_iso(rho, p, p, mode="black-box")
    assert any(k != v for k, v in result.mapping.items())
    # the two unit germs are exchanged
    units = sorted(result.source.groupoid.units)
    assert sorted(result.mapping[u] for u in units) == units
    assert [result.mapping[u] for u in units] != units


def test_induced_iso_diagnoses_failures(r2, f2):
    p = presentation_from_groupoid(r2, f2)
    rho_bad = {b: p.basis_vec(b) for b in p.basis}
    rho_bad["(1,2)"] = p.add(p.basis_vec("(1,2)"), p.basis_vec("(1,1)"))
    with pytest.raises(IsoCheckError) as err:
        induced_groupoid_iso(rho_bad, p, p)
    assert err.value.kind in ("not-multiplicative", "not-graded")

    rho_collapse = {b: p.basis_vec("(1,1)") for b in p.basis}
    with pytest.raises(IsoCheckError):
        induced_groupoid_iso(rho_collapse, p, p)


def test_induced_iso_checks_grading(f3):
    g = cyclic_group_groupoid(2)
    p = presentation_from_groupoid(g, f3)
    rho = {"t0": p.basis_vec("t1"), "t1": p.basis_vec("t0")}
    with pytest.raises(IsoCheckError) as err:
        induced_groupoid_iso(rho, p, p)
    assert err.value.kind in ("not-multiplicative", "not-graded")


def test_presentation_json_roundtrip(r2, f3, tmp_path):
    p = presentation_from_groupoid(r2, f3)
    doc = presentation_to_dict(p)
    again = presentation_from_dict(doc)
    assert again.basis == p.basis
    assert again.mult == p.mult
    assert again.diagonal == p.diagonal
    path = tmp_path / "pres.json"
    import json
    path.write_text(json.dumps(doc))
    loaded = load_presentation(path)
    assert loaded.mult == p.mult


def test_presentation_json_fractions(tmp_path):
    from fractions import Fraction
    g = trivial_groupoid(1)
    p = presentation_from_groupoid(g, Q)
    p.mult[("u1", "u1")] = {"u1": Fraction(1)}
    doc = presentation_to_dict(p)
    again = presentation_from_dict(doc)
    assert again.mult[("u1", "u1")]["u1"] == Fraction(1)


def test_black_box_needs_finite_field(r2):
    from grpdrecon.limits import EnumerationCapExceeded
    p = presentation_from_groupoid(r2, Q)
    with pytest.raises(EnumerationCapExceeded):
        find_normalisers(p, mode="black-box")


def test_white_box_needs_provenance(r2, f2):
    from grpdrecon.limits import EnumerationCapExceeded
    p = presentation_from_groupoid(r2, f2)
    stripped = RingPresentation(p.ring, p.basis, p.mult, p.diagonal, p.grade_group,
                                p.grading, provenance=None)
    with pytest.raises(EnumerationCapExceeded):
        find_normalisers(stripped, mode="white-box")

from fractions import Fraction

import pytest

from relbnlib import (Assessment, Cpt, CyclicGroundingError, EncodeError, FragmentError, GroundAtom,
                      PlateModel, PlateVariable, Query, classify_fragment, cpt_to_axioms,
                      ground_spec, noisy_or, parse_formula, parse_plate, parse_prm, parse_query,
                      parse_skeleton, parse_spec, plate_to_spec, prm_to_spec, query_probability,
                      relevant_subnetwork, validate_spec, Var)
from relbnlib.model import atoms, combine_specs, has_quantifier

from conftest import read_sample

UNIVERSITY_PRM = read_sample("university.prm")


def probability(spec, n, text):
    query = parse_query(text)
    return query_probability(relevant_subnetwork(ground_spec(spec, n), query), query)


###### CPTs ######


def test_cpt_of_a_single_parent():
    spec = cpt_to_axioms(Cpt.from_list("x", ["y"], [Fraction(1, 5), Fraction(7, 10)]))
    assert spec.entry_for("Z_0").probability == Fraction(1, 5)
    assert spec.entry_for("Z_1").probability == Fraction(7, 10)
    assert spec.entry_for("x").body == parse_formula("(!y() & Z_0()) | (y() & Z_1())")
    full = combine_specs(parse_spec("prob y() = 1/3.\n"), spec)
    assert validate_spec(full).ok
    assert probability(full, 1, "x=1") == Fraction(11, 30)


def test_cpt_without_parents():
    spec = cpt_to_axioms(Cpt.from_list("a", [], [Fraction(1, 4)]))
    assert spec.entries == (Assessment("a", (), Fraction(1, 4)), )


def test_cpt_with_two_parents():
    table = [Fraction(1, 10), Fraction(1, 5), Fraction(3, 10), Fraction(2, 5)]
    spec = cpt_to_axioms(Cpt.from_list("c", ["a", "b"], table))
    aux = [e.relation for e in spec.entries if isinstance(e, Assessment)]
    assert aux == ["Z_00", "Z_01", "Z_10", "Z_11"]
    assert spec.entry_for("c").body == parse_formula(
        "!a() & !b() & Z_00() | !a() & b() & Z_01() | a() & !b() & Z_10() | a() & b() & Z_11()")
    full = combine_specs(parse_spec("prob a() = 1/2.\nprob b() = 1/3.\n"), spec)
    assert probability(full, 1, "c=1") == Fraction(7, 30)
    assert probability(full, 1, "c=1 | a=1, b=0") == Fraction(3, 10)


def test_cpt_names_avoid_parents():
    spec = cpt_to_axioms(Cpt.from_list("x", ["Z_0"], [Fraction(1, 2), Fraction(1, 3)]))
    assert {e.relation for e in spec.entries if isinstance(e, Assessment)} == {"Z_0_1", "Z_1"}


def test_cpt_table_length():
    with pytest.raises(EncodeError):
        Cpt.from_list("x", ["y"], [Fraction(1, 2)])


###### Noisy-Or ######


def test_noisy_or_with_both_parents_on():
    gate = noisy_or("x", ["a", "b"], [Fraction(1, 2), Fraction(1, 3)])
    spec = combine_specs(parse_spec("prob a() = 1/2.\nprob b() = 1/2.\n"), gate)
    assert spec.entry_for("W_a").probability == Fraction(1, 2)
    assert probability(spec, 1, "x=1 | a=1, b=1") == Fraction(2, 3)
    assert probability(spec, 1, "x=0 | a=1, b=1") == Fraction(1, 2) * Fraction(2, 3)
    assert probability(spec, 1, "x=1 | a=0, b=0") == 0


def test_noisy_or_with_a_certain_inhibitor():
    spec = combine_specs(parse_spec("prob y() = 1/3.\n"), noisy_or("x", ["y"], [1]))
    assert probability(spec, 1, "x=1") == Fraction(1, 3)
    assert probability(spec, 1, "x=1 | y=1") == 1
    assert probability(spec, 1, "x=1 | y=0") == 0


def test_noisy_or_length_mismatch():
    with pytest.raises(EncodeError):
        noisy_or("x", ["a", "b"], [Fraction(1, 2)])


###### Plates ######


def test_university_plate():
    spec = plate_to_spec(parse_plate(read_sample("university.plate")))
    probabilities = [spec.entry_for(f"A_{k}").probability for k in range(1, 5)]
    assert probabilities == [Fraction(2, 5), Fraction(1, 5), Fraction(9, 10), Fraction(4, 5)]
    assert spec.entry_for("Difficult?").probability == Fraction(3, 10)
    assert spec.entry_for("Failed?").body == parse_formula(
        "!Difficult?(x) & !Committed?(y) & A_1(x,y) | !Difficult?(x) & Committed?(y) & A_2(x,y)"
        " | Difficult?(x) & !Committed?(y) & A_3(x,y) | Difficult?(x) & Committed?(y) & A_4(x,y)")
    assert str(classify_fragment(spec)) == "QF"
    assert validate_spec(spec).ok


def test_university_plate_query():
    spec = plate_to_spec(parse_plate(read_sample("university.plate")))
    query = parse_query("Failed?(1,1)=1")
    sub = relevant_subnetwork(ground_spec(spec, 3), query)
    assert len(sub) == 7
    assert query_probability(sub, query) == Fraction(431, 1000)


def test_single_root_plate():
    model = PlateModel((PlateVariable("R", ("x", ), (), (Fraction(1, 2), )), ))
    spec = plate_to_spec(model)
    assert spec.entries == (Assessment("R", (Var("x"), ), Fraction(1, 2)), )


def test_plate_errors():
    with pytest.raises(EncodeError):
        plate_to_spec(parse_plate("var R(x) = 0.5.\nvar S(x) | R = 0.5.\n"))
    with pytest.raises(EncodeError):
        plate_to_spec(parse_plate("var R(x) = 0.5.\nvar R(y) = 0.5.\n"))
    with pytest.raises(EncodeError):
        plate_to_spec(parse_plate("var S(x) | R = 0.5 0.5.\n"))


def test_extended_plate():
    model = parse_plate("var S(x, y) = 0.5.\nvar T(x) | S = 0.1 0.9.\n")
    assert model.is_extended()
    spec = plate_to_spec(model)
    assert has_quantifier(spec.entry_for("T").body)
    assert str(classify_fragment(spec)) != "QF"
    assert probability(spec, 2, "T(1)=1") == Fraction(7, 10)


###### PRMs ######


def university_encoding(skeleton_text=None):
    skeleton = parse_skeleton(skeleton_text or read_sample("university.skel"))
    return prm_to_spec(parse_prm(UNIVERSITY_PRM), skeleton)


def conditioned(encoding, text):
    query = parse_query(text)
    query = Query.build(query.query, query.evidence + tuple(encoding.evidence.items()))
    net = ground_spec(encoding.spec, encoding.domain_size)
    return query_probability(relevant_subnetwork(net, query), query)


def test_university_prm():
    encoding = university_encoding()
    assert encoding.domain_size == 3
    assert len(encoding.evidence) == 3 * 3 + 2 * 9
    assert encoding.evidence[GroundAtom("courseOf", (1, 3))]
    assert not encoding.evidence[GroundAtom("courseOf", (3, 1))]
    assert conditioned(encoding, "Failed?(3)=1") == Fraction(431, 1000)
    assert validate_spec(encoding.spec).ok


def test_guarded_axiom_shape():
    body = university_encoding().spec.entry_for("Failed?").body
    assert body.var.name == "x" and body.body.var.name == "y"
    guards = body.body.body.left
    assert guards == parse_formula("Course(x) & Student(y) & courseOf(x,z) & studentOf(y,z)")


def test_vacuous_guard():
    assert conditioned(university_encoding(), "Failed?(1)=1") == 1


SHARED_COURSE_PRM = """
class Course.
class Registration.
assoc courseOf(Course, Registration).
attr Difficult?(Course) = 0.3.
attr Failed?(Registration) | Difficult? via courseOf = 0.4 0.9.
"""

SHARED_COURSE_SKELETON = "Course(1).\nRegistration(2).\nRegistration(3).\ncourseOf(1, 2).\ncourseOf(1, 3).\n"


def test_registrations_of_one_course_fail_independently():
    encoding = prm_to_spec(parse_prm(SHARED_COURSE_PRM), parse_skeleton(SHARED_COURSE_SKELETON))
    body = encoding.spec.entry_for("Failed?").body
    assert {a.args for a in atoms(body.body.right) if a.relation.startswith("A_")} == \
        {(Var("z"), Var("x"))}
    easy, hard = Fraction(4, 10), Fraction(9, 10)
    assert conditioned(encoding, "Failed?(2)=1") == Fraction(7, 10) * easy + Fraction(3, 10) * hard
    both = Fraction(7, 10) * easy**2 + Fraction(3, 10) * hard**2
    assert both == Fraction(71, 200)
    assert conditioned(encoding, "Failed?(2)=1, Failed?(3)=1") == both
    assert conditioned(encoding, "Failed?(2)=1 | Difficult?(1)=1") == hard


def test_skeleton_consistency():
    with pytest.raises(EncodeError):
        university_encoding("Course(1).\nRegistration(3).\ncourseOf(1, 3).\nstudentOf(2, 3).\n")
    with pytest.raises(EncodeError):
        university_encoding("Teacher(1).\n")
    with pytest.raises(EncodeError):
        university_encoding("Course(1, 2).\n")


def parse_prm_and_encode(text, skeleton="C(1).\n"):
    return prm_to_spec(parse_prm(text), parse_skeleton(skeleton))


def test_prm_declaration_errors():
    with pytest.raises(EncodeError):
        parse_prm_and_encode("class C.\nattr A(D) = 0.5.\n")
    with pytest.raises(EncodeError):
        parse_prm_and_encode("class C.\nclass D.\nattr A(C) = 0.5.\nattr B(D) | A = 0.1 0.2.\n")
    with pytest.raises(EncodeError):
        parse_prm_and_encode("class C.\nassoc l(C, D).\n")
    with pytest.raises(EncodeError):
        parse_prm_and_encode("class C.\nattr C(C) = 0.5.\n")


def test_cyclic_attributes():
    same_class = "class C.\nattr A(C) | B = 0.1 0.2.\nattr B(C) | A = 0.3 0.4.\n"
    with pytest.raises(CyclicGroundingError):
        parse_prm_and_encode(same_class)
    crossing = ("class C.\nclass S.\nassoc link(C, S).\n"
                "attr A(S) | B via link = 0.1 0.2.\nattr B(C) | A via link = 0.3 0.4.\n")
    with pytest.raises(FragmentError):
        parse_prm_and_encode(crossing, "C(1).\nS(2).\n")

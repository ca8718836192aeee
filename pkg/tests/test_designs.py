import itertools

import pytest

from redundex import designs
from redundex.designs import (
    BIPLANE_ORDER2,
    BIPLANE_ORDER3,
    BITFLIP_TRIANGLE,
    BUILTIN_DESIGNS,
    FANO_PLANE,
    BlockDesign,
    canonical_form,
    check_qec_constraints,
    complement,
    derive_parameters,
    search_2designs,
    signature_distance,
    supports_to_design,
)
from redundex.pauli import PauliOperator, commutes, enumerate_group


def test_biplane_parameters():
    p = derive_parameters(BIPLANE_ORDER2)
    assert p.as_tuple() == (7, 7, 4, 4, 2)
    assert p.is_2design and p.is_symmetric


def test_fano_parameters():
    assert derive_parameters(FANO_PLANE).as_tuple() == (7, 7, 3, 3, 1)


def test_order3_biplane_parameters():
    p = derive_parameters(BIPLANE_ORDER3)
    assert p.as_tuple() == (11, 11, 5, 5, 2)
    assert p.is_2design


def test_unequal_blocks_violate_condition_1():
    p = derive_parameters(BlockDesign.from_sets(3, [(1, 2), (1, 2, 3)]))
    assert not p.is_2design
    assert p.violation.startswith("condition 1")


@pytest.mark.parametrize("name", sorted(BUILTIN_DESIGNS))
def test_counting_identities(name):
    p = derive_parameters(BUILTIN_DESIGNS[name])
    assert p.is_2design
    assert p.m * p.w == p.n * p.rho
    assert p.lam * (p.n - 1) == p.rho * (p.w - 1)


@pytest.mark.parametrize("name", sorted(BUILTIN_DESIGNS))
def test_signature_distance_is_uniform(name):
    d = BUILTIN_DESIGNS[name]
    p = derive_parameters(d)
    for j, k in itertools.combinations(range(d.n_points), 2):
        assert signature_distance(d, j, k) == 2 * (p.rho - p.lam)


def test_signature_distance_examples():
    assert signature_distance(BITFLIP_TRIANGLE, 0, 1) == 2
    assert signature_distance(BlockDesign.from_sets(3, [(1, 2, 3)]), 0, 1) == 0
    with pytest.raises(ValueError):
        signature_distance(BIPLANE_ORDER2, 2, 2)


@pytest.mark.parametrize("d", [BIPLANE_ORDER2, FANO_PLANE, BIPLANE_ORDER3, BITFLIP_TRIANGLE])
def test_symmetric_designs_meet_in_lambda(d):
    lam = derive_parameters(d).lam
    for a, b in itertools.combinations(d.blocks, 2):
        assert (a & b).bit_count() == lam
    # row distance of a symmetric design
    w = derive_parameters(d).w
    for i, k in itertools.combinations(range(d.m), 2):
        assert designs.block_distance(d, i, k) == 2 * (w - lam)


def test_qec_constraints():
    v = check_qec_constraints(BIPLANE_ORDER2, css=True)
    assert v.constraint1_ok and v.constraint2_ok
    assert not check_qec_constraints(BIPLANE_ORDER3, css=True).constraint1_ok
    v = check_qec_constraints(BITFLIP_TRIANGLE, css=False)
    assert v.constraint1_ok and v.constraint2_ok is None
    with pytest.raises(ValueError):
        check_qec_constraints(BlockDesign.from_sets(3, [(1, 2), (1, 2, 3)]), css=False)


@pytest.mark.parametrize("d", [BIPLANE_ORDER2, FANO_PLANE, BIPLANE_ORDER3])
def test_constraint2_matches_pauli_commutation(d):
    n = d.n_points
    xs = [PauliOperator(n, b, 0) for b in d.blocks]
    zs = [PauliOperator(n, 0, b) for b in d.blocks]
    all_commute = all(commutes(x, z) for x in xs for z in zs)
    assert check_qec_constraints(d, css=True).constraint2_ok == all_commute


@pytest.mark.parametrize("d", [BIPLANE_ORDER2, FANO_PLANE])
def test_lambda_parity_shortcut_for_symmetric_designs(d):
    p = derive_parameters(d)
    assert check_qec_constraints(d, css=True).constraint2_ok == (p.lam % 2 == 0 and p.w % 2 == 0)


def test_complement_parameter_map():
    c = complement(FANO_PLANE)
    assert derive_parameters(c).as_tuple() == (7, 7, 4, 4, 2)
    assert canonical_form(c) == canonical_form(BIPLANE_ORDER2)
    for d in (FANO_PLANE, BIPLANE_ORDER2, BIPLANE_ORDER3):
        p = derive_parameters(d)
        q = derive_parameters(complement(d))
        assert q.as_tuple() == (p.n, p.m, p.n - p.w, p.m - p.rho, p.m - 2 * p.rho + p.lam)


@pytest.mark.parametrize("name", sorted(BUILTIN_DESIGNS))
def test_complement_involution(name):
    d = BUILTIN_DESIGNS[name]
    assert complement(complement(d)).multiset() == d.multiset()


def test_complement_of_triangle_is_not_a_design():
    c = complement(BITFLIP_TRIANGLE)
    assert sorted(c.block_sets()) == [(1,), (2,), (3,)]
    p = derive_parameters(c)
    assert (p.n, p.m, p.w, p.rho, p.lam) == (3, 3, 1, 1, 0)
    assert not p.is_2design


def test_complement_rejects_full_block():
    with pytest.raises(ValueError):
        complement(BlockDesign.from_sets(3, [(1, 2, 3)]))


def test_supports_to_design():
    ops = [PauliOperator.from_str(s) for s in ("ZZI", "IZZ", "ZIZ")]
    assert supports_to_design(ops).block_sets() == [(1, 2), (2, 3), (1, 3)]
    with pytest.raises(ValueError):
        supports_to_design([PauliOperator.identity(3)])


def test_steane_group_supports_are_the_biplane():
    g = enumerate_group([PauliOperator.from_str(s) for s in ("ZIIIZZZ", "IZIZIZZ", "IIZZZIZ")])
    d = supports_to_design(g.nontrivial)
    assert d.multiset() == BIPLANE_ORDER2.multiset()


def test_five_qubit_group_design():
    g = enumerate_group([PauliOperator.from_str(s) for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")])
    p = derive_parameters(supports_to_design(g.nontrivial))
    assert p.as_tuple() == (5, 15, 4, 12, 9)
    assert p.is_2design


def test_search_finds_biplane():
    res = search_2designs(7, 4, 7, constraint1=True, constraint2=True)
    assert not res.truncated
    target = canonical_form(BIPLANE_ORDER2)
    assert any(canonical_form(d) == target for d in res.designs)
    for d in res.designs:
        p = derive_parameters(d)
        assert p.is_2design and p.relations_hold()


def test_search_triangle_and_empty_cases():
    res = search_2designs(3, 2, 3, constraint1=True)
    assert [d.block_sets() for d in res.designs] == [[(1, 2), (1, 3), (2, 3)]]
    assert search_2designs(4, 3, 1).designs == ()


def test_search_truncation_flag():
    res = search_2designs(7, 3, 7, budget=5)
    assert res.truncated


def test_search_limit_and_determinism():
    a = search_2designs(7, 3, 7)
    b = search_2designs(7, 3, 7)
    assert a.designs == b.designs
    assert len(search_2designs(7, 3, 7, limit=2).designs) == 2
    # every labeled Fano plane is found once: 7!/168 = 30
    assert len(a.designs) == 30


def test_search_parallel_matches_serial():
    assert search_2designs(7, 3, 7, workers=2).designs == search_2designs(7, 3, 7).designs


def test_design_file_round_trip():
    text = designs.format_design(BIPLANE_ORDER2)
    assert text.splitlines()[0] == "n=7"
    assert text.splitlines()[1] == "1 5 6 7"
    assert designs.format_design(designs.parse_design(text)) == text
    commented = "# biplane\n" + text.replace("1 5 6 7", "1 5 6 7  # first block")
    assert designs.format_design(designs.parse_design(commented)) == text


@pytest.mark.parametrize("text, line", [
    ("7\n1 2 3\n", 1),
    ("n=3\n1 2 x\n", 2),
    ("n=3\n1 4\n", 2),
    ("n=3\n\n1 1\n", 3),
])
def test_design_parse_errors(text, line):
    with pytest.raises(designs.DesignParseError) as info:
        designs.parse_design(text)
    assert info.value.line == line

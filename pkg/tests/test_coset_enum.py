from itertools import permutations, product
from math import factorial

import pytest
from pydantic import ValidationError
from sympy.combinatorics import Permutation, PermutationGroup

from conftest import A4, A5
from constructions import higman
from coset_enum import (
    STRATEGIES, Certificate, CosetTable, EnumerationLimits, ResourceExhausted, Status,
    certify_no_finite_quotients, low_index_subgroups, todd_coxeter, verify_coset_table,
)
from presentations import Presentation, parse_presentation
from words import parse_word_list

SMALL = EnumerationLimits(max_cosets=5000, max_time=30)


def transitive_actions(p, degree):
    """Homomorphisms to S_degree with transitive image, by brute force."""
    points = range(degree)
    perms = list(permutations(points))
    inverse = {perm: tuple(sorted(points, key=perm.__getitem__)) for perm in perms}
    count = 0
    for images in product(perms, repeat=len(p.generators)):
        assignment = dict(zip(p.generators, images))

        def act(point, w):
            for name, sign in w:
                perm = assignment[name]
                point = perm[point] if sign > 0 else inverse[perm][point]
            return point

        if any(act(x, r) != x for r in p.relators for x in points):
            continue
        orbit, frontier = {0}, [0]
        while frontier:
            x = frontier.pop()
            for perm in images:
                for y in (perm[x], inverse[perm][x]):
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)
        if len(orbit) == degree:
            count += 1
    return count


def subgroup_count(p, index):
    """Subgroups of a given index correspond to transitive actions with a marked point."""
    return transitive_actions(p, index) // factorial(index - 1)


@pytest.mark.parametrize('strategy', STRATEGIES)
def test_a4_has_twelve_elements(a4, strategy):
    table = todd_coxeter(a4, (), SMALL, strategy)
    assert table.index == 12
    assert table.complete
    assert verify_coset_table(table, a4) == []
    group = PermutationGroup([Permutation(list(table.permutation(name))) for name in a4.generators])
    assert group.order() == 12


@pytest.mark.parametrize('strategy', STRATEGIES)
def test_cyclic_group(strategy):
    p = parse_presentation('< a | a^5 >')
    assert todd_coxeter(p, (), SMALL, strategy).index == 5


@pytest.mark.parametrize('strategy', STRATEGIES)
def test_subgroup_index(a4, strategy):
    subgroup = parse_word_list('a', a4.alphabet)
    table = todd_coxeter(a4, subgroup, SMALL, strategy)
    assert table.index == 6
    assert verify_coset_table(table, a4, subgroup) == []


def test_a5_order():
    p = parse_presentation(A5)
    assert todd_coxeter(p, (), SMALL).index == 60


def test_trivial_group_collapses():
    table = todd_coxeter(parse_presentation('< a, b | a*b, a^2*b >'), (), SMALL)
    assert table.index == 1


def test_infinite_group_exhausts_cosets():
    p = parse_presentation('< a, b | >')
    with pytest.raises(ResourceExhausted) as info:
        todd_coxeter(p, (), EnumerationLimits(max_cosets=50, max_time=10))
    assert info.value.cosets_reached > 0


def test_record_is_one_based():
    record = todd_coxeter(parse_presentation('< a | a^2 >'), (), SMALL).to_record()
    assert record.rows == [[2, 2], [1, 1]]
    assert record.generators == ['a']


def test_verifier_catches_broken_tables(a4):
    table = todd_coxeter(a4, (), SMALL)
    rows = [list(row) for row in table.rows]
    rows[0][0], rows[1][0] = rows[1][0], rows[0][0]
    assert verify_coset_table(CosetTable(a4.generators, rows), a4) != []
    wrong = CosetTable(a4.generators, [[1, 1, 1, 1], [0, 0, 0, 0]])
    assert any('does not close' in problem for problem in verify_coset_table(wrong, a4))


def test_unknown_strategy_and_symbols(a4):
    with pytest.raises(ValueError):
        todd_coxeter(a4, (), SMALL, 'coxeter')
    with pytest.raises(ValueError):
        todd_coxeter(a4, parse_word_list('c', parse_presentation('< c | >').alphabet), SMALL)


def test_free_group_index_two():
    tables = low_index_subgroups(parse_presentation('< a, b | >'), 2, SMALL)
    assert len(tables) == 3
    assert sorted(table.conjugacy_class for table in tables) == [1, 2, 3]


@pytest.mark.parametrize('text, max_index', [
    ('< a, b | >', 3),
    (A4, 4),
    ('< a | a^6 >', 6),
    ('< a, b | a^2, b^2, (a*b)^3 >', 4),
])
def test_low_index_agrees_with_transitive_actions(text, max_index):
    p = parse_presentation(text)
    tables = low_index_subgroups(p, max_index, SMALL)
    for index in range(2, max_index + 1):
        found = sum(1 for table in tables if table.index == index)
        assert found == subgroup_count(p, index), index
    for table in tables:
        assert verify_coset_table(table, p) == []


def subgroup_tables(p, max_index):
    return sorted(table.to_record().rows for table in low_index_subgroups(p, max_index, SMALL))


@pytest.mark.parametrize('text, max_index', [(A4, 4), ('< a, b | a^2, b^3, (a*b)^5 >', 5)])
def test_low_index_ignores_relator_order(text, max_index):
    p = parse_presentation(text)
    reordered = Presentation(p.generators, list(reversed(p.relators)))
    assert subgroup_tables(reordered, max_index) == subgroup_tables(p, max_index)


def test_low_index_conjugacy_classes(a4):
    tables = low_index_subgroups(a4, 4, SMALL)
    index_four = [table for table in tables if table.index == 4]
    assert len(index_four) == 4
    assert len({table.conjugacy_class for table in index_four}) == 1


def test_higman_has_no_small_quotients():
    q = higman()
    assert transitive_actions(q, 2) == 0
    assert transitive_actions(q, 3) == 0
    certificate = certify_no_finite_quotients(q, 3, SMALL)
    assert certificate.status == Status.CERTIFIED
    assert certificate.bound == 3
    assert certificate.input_digest == q.digest()


def test_higman_certified_to_six():
    certificate = certify_no_finite_quotients(higman(), 6, EnumerationLimits(max_cosets=5000, max_time=600))
    assert certificate.status == Status.CERTIFIED


def test_quotient_certificate_refuted_with_witness():
    certificate = certify_no_finite_quotients(parse_presentation('< a | >'), 2, SMALL)
    assert certificate.status == Status.REFUTED
    assert certificate.evidence['index'] == 2
    assert certificate.evidence['witness']['rows'] == [[2, 2], [1, 1]]


def test_a5_has_a_quotient_of_order_five():
    p = parse_presentation(A5)
    assert certify_no_finite_quotients(p, 4, SMALL).status == Status.CERTIFIED
    assert certify_no_finite_quotients(p, 5, SMALL).status == Status.REFUTED


@pytest.mark.parametrize('text', [A5, A4, '< a | >', '< a | a^7 >'])
def test_certificate_is_monotone_in_bound(text):
    p = parse_presentation(text)
    statuses = [certify_no_finite_quotients(p, bound, SMALL).status for bound in range(2, 8)]
    refuted = [status == Status.REFUTED for status in statuses]
    assert refuted == sorted(refuted)
    assert set(statuses) <= {Status.CERTIFIED, Status.REFUTED}


def test_bound_must_be_at_least_two():
    with pytest.raises(ValueError):
        certify_no_finite_quotients(higman(), 1)


def test_refuted_certificate_needs_witness():
    with pytest.raises(ValidationError):
        Certificate(claim='x', status=Status.REFUTED)

import random
from fractions import Fraction

import pytest

from conftest import random_word, trivial_word
from presentations import parse_presentation
from small_cancellation import (
    SIXTH, DehnSolver, PreconditionError, SymmetrizedRelatorSet, dehn_reduce, parse_fraction, recheck_witness,
    root_period, sc_verify,
)
from words import AlphabetMismatchError, Word, parse_word


def test_genus_two_passes_at_one_sixth(genus_2):
    report = sc_verify(genus_2)
    assert report.lambda_ == Fraction(1, 8) < SIXTH
    assert report.max_piece_length == 1
    assert report.min_relator_length == 8
    assert report.passes and report.passes_sixth
    assert report.proper_powers == []
    assert recheck_witness(report, genus_2)


def test_proper_power_fails():
    p = parse_presentation('< a, b | (a*b)^3 >')
    report = sc_verify(p)
    assert report.lambda_ == Fraction(5, 6)
    assert not report.passes
    assert len(report.witness.piece) == 5
    assert recheck_witness(report, p)
    assert [(power.root, power.exponent) for power in report.proper_powers] == [('a*b', 3)]


def test_single_letter_relator_has_no_pieces():
    report = sc_verify(parse_presentation('< a, b | a >'))
    assert report.lambda_ == 0
    assert report.witness is None
    assert report.passes_sixth
    assert recheck_witness(report)


def test_piece_shared_between_relators():
    p = parse_presentation('< a, b, c, d | a*b*c, a*b*d >')
    report = sc_verify(p)
    assert report.lambda_ == Fraction(2, 3)
    witness = report.witness
    assert str(witness.piece) in ('a*b', 'b^-1*a^-1')
    assert witness.first_relator != witness.second_relator
    assert recheck_witness(report, p)


def test_runs_inside_one_syllable():
    p = parse_presentation('< a, b | a^5*b^7 >')
    report = sc_verify(p)
    # b^6 starts the two rotations beginning at the first and second letter of the b-run
    assert report.max_piece_length == 6
    assert report.lambda_ == Fraction(6, 12)


def test_target_is_strict(genus_2):
    report = sc_verify(genus_2, Fraction(1, 8))
    assert not report.passes
    assert report.passes_sixth
    assert sc_verify(genus_2, parse_fraction('1/7')).passes


def test_report_serialization(genus_2):
    data = sc_verify(genus_2).model_dump(mode='json', by_alias=True)
    assert data['lambda'] == '1/8'
    assert data['lambda_target'] == '1/6'
    assert data['input_digest'] == genus_2.digest()
    assert isinstance(data['witness']['piece'], str)


def test_tampered_report_fails_recheck():
    p = parse_presentation('< a, b | (a*b)^3 >')
    report = sc_verify(p)
    assert not recheck_witness(report.model_copy(update={'lambda_': Fraction(1, 2)}), p)
    shortened = report.witness.model_copy(update={'first_offset': (report.witness.first_offset + 1) % 6})
    assert not recheck_witness(report.model_copy(update={'witness': shortened}), p)


@pytest.mark.parametrize('text', ['0', '3/2', '-1/6'])
def test_parse_fraction_range(text):
    with pytest.raises(ValueError):
        parse_fraction(text)


def test_no_relators():
    with pytest.raises(ValueError):
        sc_verify(parse_presentation('< a | >'))


def test_symmetrized_set(genus_2):
    symmetrized = SymmetrizedRelatorSet(genus_2)
    assert len(symmetrized) == 16
    assert len(list(symmetrized)) == 16
    r = genus_2.relators[0]
    assert r.inverse() in symmetrized
    assert parse_word('b^-1*a*b*c^-1*d^-1*c*d*a^-1', genus_2.alphabet) in symmetrized
    assert parse_word('a*b', genus_2.alphabet) not in symmetrized
    assert len(SymmetrizedRelatorSet(parse_presentation('< a, b | (a*b)^3 >'))) == 4
    assert len(SymmetrizedRelatorSet(parse_presentation('< a, b | a*b, b*a >'))) == 4


def test_root_period():
    ab = parse_presentation('< a, b | >').alphabet
    assert root_period(parse_word('(a*b)^3', ab)) == 2
    assert root_period(parse_word('a*b*a', ab)) == 3
    assert root_period(parse_word('a^4', ab)) == 1


def test_dehn_removes_majority_of_relator(genus_2):
    w = parse_word('a^-1*b^-1*a*b*c^-1', genus_2.alphabet)
    assert dehn_reduce(w, genus_2) == parse_word('d^-1*c^-1*d', genus_2.alphabet)


def test_dehn_leaves_short_words(genus_2):
    w = parse_word('a*b*a*b', genus_2.alphabet)
    assert dehn_reduce(w, genus_2) == w
    assert dehn_reduce(Word.identity(), genus_2).is_identity()


def test_dehn_on_random_trivial_words(genus_2):
    rng = random.Random(31)
    solver = DehnSolver(genus_2)
    for _ in range(100):
        w = trivial_word(rng, genus_2)
        assert solver.reduce(w).is_identity(), w
        assert all(x > y for x, y in zip(solver.history, solver.history[1:]))


def test_dehn_agrees_on_inverses(genus_2):
    rng = random.Random(43)
    solver = DehnSolver(genus_2)
    for _ in range(100):
        for w in (trivial_word(rng, genus_2), random_word(rng, genus_2.generators, 10),
                  trivial_word(rng, genus_2) * Word.generator(rng.choice(genus_2.generators))):
            assert solver.is_trivial(w) == solver.is_trivial(w.inverse()), w
        assert solver.is_trivial(trivial_word(rng, genus_2).inverse())


def test_dehn_on_rips_output(trivial_rips):
    gamma = trivial_rips.gamma
    rng = random.Random(5)
    solver = DehnSolver(gamma, trivial_rips.sc_report)
    for _ in range(100):
        w = trivial_word(rng, gamma)
        assert solver.is_trivial(w)
        assert all(x > y for x, y in zip(solver.history, solver.history[1:]))
    assert not solver.is_trivial(Word.generator('a'))
    assert not solver.is_trivial(parse_word('nu1*nu2', gamma.alphabet))


def test_dehn_requires_certificate(genus_2):
    p = parse_presentation('< a, b | (a*b)^3 >')
    with pytest.raises(PreconditionError) as info:
        DehnSolver(p)
    assert info.value.report is not None
    assert not info.value.report.passes_sixth
    with pytest.raises(PreconditionError):
        DehnSolver(p, sc_verify(genus_2))


def test_dehn_rejects_foreign_symbols(genus_2):
    with pytest.raises(AlphabetMismatchError):
        dehn_reduce(Word.generator('x'), genus_2)

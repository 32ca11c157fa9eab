import json
import random

import pytest
from pydantic import ValidationError

from conftest import A4, GENUS_2, random_word
from constructions import HIGMAN_CORRECTED
from presentations import (
    MarkedSubgroup, Presentation, PresentationSyntaxError, canonical_relator, canonical_relators, direct_product,
    factor_generators, format_presentation, is_trivial_presentation, load_presentation, parse_presentation,
    quotient_by, renaming, tietze_simplify,
)
from homology import h1
from words import Alphabet, AlphabetMismatchError, Word, WordSyntaxError, parse_word


def test_relations_become_relators():
    p = parse_presentation(HIGMAN_CORRECTED)
    assert p.generators == ('a', 'b', 'c', 'd')
    assert [str(r) for r in p.relators] == ['a*b*a^-1*b^-2', 'b*c*b^-1*c^-2', 'c*d*c^-1*d^-2', 'd*a*d^-1*a^-2']


def test_relators_are_cyclically_reduced_and_nonempty():
    p = parse_presentation('< a, b | b*a^2*b^-1, a*a^-1, 1 >')
    assert [str(r) for r in p.relators] == ['a^2']


def test_comments_and_layout():
    text = '''
    # the surface group of genus two
    < a, b, c, d |
      [a,b]*[c,d]   # one relator
    >
    '''
    assert parse_presentation(text) == parse_presentation(GENUS_2)


def test_json_form():
    p = load_presentation('{"generators": ["a", "b"], "relators": ["a^3", "[a,b]"]}')
    assert p == parse_presentation('< a, b | a^3, [a,b] >')
    assert load_presentation(p.to_json()) == p
    with pytest.raises(ValidationError):
        load_presentation('{"generators": ["a"]}')
    with pytest.raises(WordSyntaxError):
        load_presentation('{"generators": ["a"], "relators": ["b"]}')


def test_empty_presentations_format():
    assert format_presentation(Presentation([])) == '< | >'
    assert format_presentation(Presentation(['a', 'b'])) == '< a, b | >'
    assert parse_presentation('< | >') == Presentation([])


@pytest.mark.parametrize('text', ['< a | >', '< | >', '< a, b | a*b >', '< a | a^2, a^3 >'])
def test_format_spacing(text):
    assert format_presentation(parse_presentation(text)) == text


def random_presentation(rng: random.Random) -> Presentation:
    names = rng.sample(['a', 'b', 'c', 'x', 'y', 't1', 'g_2'], rng.randint(0, 4))
    relators = [random_word(rng, names, 9) for _ in range(rng.randint(0, 4))] if names else []
    return Presentation(names, relators)


def test_text_form_is_a_fixed_point():
    rng = random.Random(2024)
    for _ in range(500):
        p = random_presentation(rng)
        text = format_presentation(p)
        parsed = parse_presentation(text)
        assert parsed == p
        assert format_presentation(parsed) == text


def test_duplicate_generator_position():
    with pytest.raises(PresentationSyntaxError) as info:
        parse_presentation('< a, b,\n a | a >')
    assert (info.value.line, info.value.column) == (2, 2)


def test_undeclared_generator_on_second_line():
    with pytest.raises(WordSyntaxError) as info:
        parse_presentation('< a, b |\n a*c >')
    assert (info.value.line, info.value.column) == (2, 4)


def test_canonical_relator_ignores_rotation_and_inversion():
    ab = Alphabet(['a', 'b'])
    forms = {canonical_relator(parse_word(text, ab), ab) for text in ('a*b', 'b*a', 'a^-1*b^-1', 'b^-1*a^-1')}
    assert forms == {parse_word('a*b', ab)}
    assert canonical_relators([parse_word(t, ab) for t in ('b*a', 'a^2', 'a*b')], ab) == \
        [parse_word('a^2', ab), parse_word('a*b', ab)]


def test_relator_set_compares_up_to_rotation():
    p = parse_presentation('< a, b | a*b*a^-1*b^-2 >')
    q = parse_presentation('< a, b | b^-2*a*b*a^-1 >')
    assert p != q
    assert p.relator_set() == q.relator_set()


def test_digest():
    p = parse_presentation(GENUS_2)
    assert p.digest() == parse_presentation(GENUS_2).digest()
    assert len(p.digest()) == 64
    assert p.digest() != parse_presentation('< a, b, c, d | [a,b]*[d,c] >').digest()
    canonical = json.dumps({'generators': ['a', 'b', 'c', 'd'], 'relators': ['a^-1*b^-1*a*b*c^-1*d^-1*c*d']},
                           sort_keys=True, separators=(',', ':'))
    assert p.to_record().model_dump() == json.loads(canonical)


def test_tietze_eliminates_latest_generator():
    simplified = tietze_simplify(parse_presentation('< a, b | a*b^-1 >'))
    assert simplified.generators == ('a',)
    assert simplified.relators == ()
    assert simplified.metadata['tietze'] == 'complete'


def test_tietze_respects_keep():
    simplified = tietze_simplify(parse_presentation('< a, b | a*b^-1 >'), keep=['b'])
    assert simplified.generators == ('b',)


def test_tietze_budget():
    p = parse_presentation('< a | a >')
    assert is_trivial_presentation(tietze_simplify(p, max_moves=1))
    stalled = tietze_simplify(p, max_moves=0)
    assert stalled.generators == ('a',)
    assert stalled.metadata['tietze'] == 'incomplete'


def test_tietze_substitutes_into_other_relators():
    simplified = tietze_simplify(parse_presentation('< a, b | a^3, b*a^-2 >'))
    assert simplified.generators == ('a',)
    assert [str(r) for r in simplified.relators] == ['a^3']


def test_tietze_leaves_higman_alone():
    q = parse_presentation(HIGMAN_CORRECTED)
    simplified = tietze_simplify(q)
    assert simplified.generators == q.generators
    assert simplified.relator_set() == q.relator_set()


def test_tietze_preserves_h1():
    rng = random.Random(31)
    for _ in range(200):
        p = random_presentation(rng)
        assert str(h1(tietze_simplify(p))) == str(h1(p))


@pytest.mark.parametrize('text', [A4, GENUS_2, HIGMAN_CORRECTED])
def test_product_with_trivial_group_simplifies_back(text):
    p = parse_presentation(text)
    simplified = tietze_simplify(direct_product(p, parse_presentation('< z | z >')))
    assert simplified.generators == p.generators
    assert simplified.relator_set() == p.relator_set()


def test_tietze_drops_stale_product_metadata():
    simplified = tietze_simplify(direct_product(parse_presentation('< a, b | b >'), parse_presentation('< c | >')))
    assert simplified.generators == ('a', 'c')
    assert factor_generators(simplified, 1) == ['a']
    assert factor_generators(simplified, 2) == ['c']
    kept = tietze_simplify(direct_product(parse_presentation('< a | >'), parse_presentation('< a, b | b >')))
    assert factor_generators(kept, 2) == ['a_2']
    assert renaming(kept) == {'a': 'a_2'}
    gone = tietze_simplify(direct_product(parse_presentation('< a | >'), parse_presentation('< a | a >')))
    assert factor_generators(gone, 2) == []
    assert 'renamed' not in gone.metadata


def test_quotient_by():
    q = quotient_by(parse_presentation('< a, b | [a,b] >'), [parse_word('b', Alphabet(['a', 'b']))])
    assert q.generators == ('a',)
    assert q.relators == ()


def test_killing_every_generator_gives_trivial_group():
    rng = random.Random(37)
    for _ in range(100):
        p = random_presentation(rng)
        q = quotient_by(p, [Word.generator(name) for name in p.generators])
        assert is_trivial_presentation(q)


def test_direct_product_abelianization_is_symmetric():
    rng = random.Random(41)
    for _ in range(100):
        p, q = random_presentation(rng), random_presentation(rng)
        assert str(h1(direct_product(p, q))) == str(h1(direct_product(q, p)))


def test_direct_product_renames_clashes():
    p = parse_presentation('< a | a^2 >')
    q = parse_presentation('< a, a_2 | a^3 >')
    product = direct_product(p, q)
    assert product.generators == ('a', 'a_3', 'a_2')
    assert factor_generators(product, 1) == ['a']
    assert factor_generators(product, 2) == ['a_3', 'a_2']
    assert renaming(product) == {'a': 'a_3'}
    assert [str(r) for r in product.relators] == [
        'a^2', 'a_3^3', 'a^-1*a_3^-1*a*a_3', 'a^-1*a_2^-1*a*a_2',
    ]


def test_marked_subgroup_checks_alphabet():
    p = parse_presentation('< a, b | >')
    marked = MarkedSubgroup(p, [Word.generator('a')], label='H')
    assert marked.to_record().generators == ['a']
    with pytest.raises(AlphabetMismatchError):
        MarkedSubgroup(p, [Word.generator('c')])


def test_undeclared_relator_symbols_rejected():
    with pytest.raises(AlphabetMismatchError):
        Presentation(['a'], [Word.generator('b')])

import random

import pytest

from constructions import higman
from presentations import parse_presentation
from rips import rips_wise
from words import Word

GENUS_2 = '< a, b, c, d | [a,b]*[c,d] >'
A4 = '< a, b | a^2, b^3, (a*b)^3 >'
A5 = '< a, b | a^2, b^3, (a*b)^5 >'
TRIVIAL = '< a | a >'


@pytest.fixture
def genus_2():
    return parse_presentation(GENUS_2)


@pytest.fixture
def a4():
    return parse_presentation(A4)


@pytest.fixture(scope='session')
def higman_rips():
    return rips_wise(higman())


@pytest.fixture(scope='session')
def trivial_rips():
    return rips_wise(parse_presentation(TRIVIAL))


def random_word(rng: random.Random, names, max_length: int) -> Word:
    letters = [(rng.choice(names), rng.choice((1, -1))) for _ in range(rng.randint(0, max_length))]
    return Word(letters)


def trivial_word(rng: random.Random, p, conjugates: int = 3, conjugator_length: int = 4) -> Word:
    """A product of conjugates of relators, freely reduced."""
    w = Word.identity()
    for _ in range(rng.randint(1, conjugates)):
        g = random_word(rng, p.generators, conjugator_length)
        r = rng.choice(p.relators) ** rng.choice((1, -1))
        w = w * g * r * g.inverse()
    return w

"""
Free-group words

Words are immutable, freely reduced sequences of signed letters ``(name, ±1)``.
This module also owns the word grammar shared by every text input:

    juxtaposition with ``*``, inverse ``^-1``, powers ``^n`` (n may be negative),
    brackets ``(...)``, commutators ``[x,y] = x^-1*y^-1*x*y`` and the identity ``1``.

Example:
    >>> from words import Alphabet, parse_word
    >>> w = parse_word("[a,b]*b^2", Alphabet(["a", "b"]))
    >>> str(w)
    'a^-1*b^-1*a*b^3'
"""

import logging
import re
from itertools import groupby
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import pyparsing as pp

logger = logging.getLogger(__name__)

Letter = tuple[str, int]

NAME_RE = re.compile(r'[A-Za-z][A-Za-z0-9_]*\Z')
MAX_EXPONENT = 1_000_000


class AlphabetMismatchError(ValueError):
    """A letter or symbol is not part of the expected alphabet."""


class WordSyntaxError(ValueError):
    """Syntax error in word or presentation text, with 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UndeclaredGeneratorError(WordSyntaxError):
    """A word mentions a generator that was never declared."""


class Alphabet:
    """Ordered set of generator names."""

    __slots__ = ('_names', '_index')

    def __init__(self, names: Iterable[str] = ()):
        names = tuple(names)
        index = {}
        for position, name in enumerate(names):
            if not isinstance(name, str) or not NAME_RE.match(name):
                raise ValueError(f"Invalid generator name: {name!r}")
            if name in index:
                raise ValueError(f"Duplicate generator name: {name}")
            index[name] = position
        self._names = names
        self._index = index

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlphabetMismatchError(f"Unknown generator: {name}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Alphabet):
            return self._names == other._names
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._names)

    def __repr__(self) -> str:
        return f"Alphabet({list(self._names)!r})"

    def letter_key(self, letter: Letter) -> int:
        """Sort key of a letter: generators in declaration order, g before g^-1."""
        return 2 * self.index(letter[0]) + (0 if letter[1] > 0 else 1)


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for letter in letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


class Word:
    """A freely reduced word; the empty word is the identity."""

    __slots__ = ('_letters', '_hash')

    def __init__(self, letters: Iterable[Letter] = ()):
        self._letters = _free_reduce(letters)
        self._hash: Optional[int] = None

    @classmethod
    def _from_reduced(cls, letters: tuple[Letter, ...]) -> 'Word':
        word = cls.__new__(cls)
        word._letters = letters
        word._hash = None
        return word

    @classmethod
    def identity(cls) -> 'Word':
        return cls._from_reduced(())

    @classmethod
    def generator(cls, name: str, sign: int = 1) -> 'Word':
        return cls._from_reduced(((name, 1 if sign > 0 else -1),))

    @classmethod
    def from_syllables(cls, syllables: Iterable[tuple[str, int]]) -> 'Word':
        """Build a word from (generator, exponent) runs."""
        letters: list[Letter] = []
        for name, exponent in syllables:
            sign = 1 if exponent > 0 else -1
            letters.extend([(name, sign)] * abs(exponent))
        return cls(letters)

    @property
    def letters(self) -> tuple[Letter, ...]:
        return self._letters

    def is_identity(self) -> bool:
        return not self._letters

    def symbols(self) -> set[str]:
        return {name for name, _ in self._letters}

    def syllables(self) -> list[tuple[str, int]]:
        """Maximal runs as (generator, signed exponent)."""
        return [(key[0], key[1] * sum(1 for _ in run)) for key, run in groupby(self._letters)]

    def inverse(self) -> 'Word':
        return Word._from_reduced(tuple((name, -sign) for name, sign in reversed(self._letters)))

    def __invert__(self) -> 'Word':
        return self.inverse()

    def __mul__(self, other: 'Word') -> 'Word':
        if not isinstance(other, Word):
            return NotImplemented
        left, right = self._letters, other._letters
        limit = min(len(left), len(right))
        cancelled = 0
        while cancelled < limit:
            a = left[-1 - cancelled]
            b = right[cancelled]
            if a[0] != b[0] or a[1] != -b[1]:
                break
            cancelled += 1
        return Word._from_reduced(left[:len(left) - cancelled] + right[cancelled:])

    def __pow__(self, exponent: int) -> 'Word':
        if exponent < 0:
            return self.inverse() ** -exponent
        if exponent == 0 or not self._letters:
            return Word.identity()
        core, conjugator = cyclic_reduce(self)
        return Word._from_reduced(
            conjugator._letters + core._letters * exponent + conjugator.inverse()._letters
        )

    def __len__(self) -> int:
        return len(self._letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self._letters)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Word(self._letters[index])
        return self._letters[index]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Word):
            return self._letters == other._letters
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._letters)
        return self._hash

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


def reduce(raw: Iterable[Letter], alphabet: Optional[Alphabet] = None) -> Word:
    """Freely reduce a raw letter sequence, checking it against an alphabet."""
    checked = []
    for name, sign in raw:
        if sign not in (1, -1):
            raise ValueError(f"Letter exponent must be +1 or -1, got {sign}")
        if alphabet is not None and name not in alphabet:
            raise AlphabetMismatchError(f"Unknown generator: {name}")
        checked.append((name, sign))
    return Word(checked)


def invert(w: Word) -> Word:
    return w.inverse()


def concat(*words: Word) -> Word:
    result = Word.identity()
    for w in words:
        result = result * w
    return result


def commutator(x: Word, y: Word) -> Word:
    """[x,y] = x^-1 y^-1 x y"""
    return concat(x.inverse(), y.inverse(), x, y)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split w as conjugator * core * conjugator^-1 with core cyclically reduced."""
    letters = w.letters
    start, end = 0, len(letters)
    while end - start >= 2:
        first, last = letters[start], letters[end - 1]
        if first[0] != last[0] or first[1] != -last[1]:
            break
        start += 1
        end -= 1
    return Word._from_reduced(letters[start:end]), Word._from_reduced(letters[:start])


def is_cyclically_reduced(w: Word) -> bool:
    letters = w.letters
    if len(letters) < 2:
        return True
    return not (letters[0][0] == letters[-1][0] and letters[0][1] == -letters[-1][1])


def least_rotation(seq: Sequence) -> int:
    """Start index of the lexicographically least rotation (linear time)."""
    n = len(seq)
    if n < 2:
        return 0
    i, j, k = 0, 1, 0
    while i < n and j < n and k < n:
        a = seq[(i + k) % n]
        b = seq[(j + k) % n]
        if a == b:
            k += 1
            continue
        if a > b:
            i += k + 1
        else:
            j += k + 1
        if i == j:
            j += 1
        k = 0
    return min(i, j)


def rotate(w: Word, start: int) -> Word:
    """Cyclic rotation of a cyclically reduced word."""
    letters = w.letters
    if not letters:
        return w
    start %= len(letters)
    return Word._from_reduced(letters[start:] + letters[:start])


class GeneratorMap:
    """A total assignment of words to the symbols of a domain alphabet."""

    def __init__(self, domain: Iterable[str], assignment: Mapping[str, Word],
                 codomain: Optional[Alphabet] = None):
        self.domain = domain if isinstance(domain, Alphabet) else Alphabet(domain)
        missing = [name for name in self.domain if name not in assignment]
        if missing:
            raise AlphabetMismatchError(f"Map is not total, missing: {', '.join(missing)}")
        extra = [name for name in assignment if name not in self.domain]
        if extra:
            raise AlphabetMismatchError(f"Map assigns symbols outside its domain: {', '.join(extra)}")
        if codomain is not None:
            for name, image in assignment.items():
                stray = image.symbols() - set(codomain)
                if stray:
                    raise AlphabetMismatchError(
                        f"Image of {name} uses symbols outside the codomain: {', '.join(sorted(stray))}"
                    )
        self.codomain = codomain
        self.assignment = dict(assignment)

    @classmethod
    def identity_on(cls, alphabet: Iterable[str]) -> 'GeneratorMap':
        names = list(alphabet)
        return cls(names, {name: Word.generator(name) for name in names})

    def __getitem__(self, name: str) -> Word:
        return self.assignment[name]

    def __call__(self, w: Word) -> Word:
        return substitute(w, self)

    def compose(self, outer: 'GeneratorMap') -> 'GeneratorMap':
        """outer after self, as a map on self's domain."""
        return GeneratorMap(self.domain, {name: outer(image) for name, image in self.assignment.items()},
                            outer.codomain)


def substitute(w: Word, m: GeneratorMap) -> Word:
    """Image of w under m, freely reduced."""
    letters: list[Letter] = []
    inverses: dict[str, tuple[Letter, ...]] = {}
    for name, sign in w:
        if name not in m.assignment:
            raise AlphabetMismatchError(f"Symbol {name} is outside the map's domain")
        if sign > 0:
            letters.extend(m.assignment[name].letters)
        else:
            if name not in inverses:
                inverses[name] = m.assignment[name].inverse().letters
            letters.extend(inverses[name])
    return Word(letters)


def format_word(w: Word) -> str:
    """Canonical text: runs compressed, '*' separators, '1' for the identity."""
    if w.is_identity():
        return '1'
    parts = []
    for name, exponent in w.syllables():
        parts.append(name if exponent == 1 else f"{name}^{exponent}")
    return '*'.join(parts)


# --- grammar ---------------------------------------------------------------

class _Letters:
    """Parse-time letters, each carrying the source offset of its name token."""

    __slots__ = ('items',)

    def __init__(self, items):
        self.items = items

    def inverse(self) -> '_Letters':
        return _Letters([(name, -sign, loc) for name, sign, loc in reversed(self.items)])


def _on_name(s, loc, toks):
    return _Letters([(toks[0], 1, loc)])


def _on_identity(s, loc, toks):
    return _Letters([])


def _on_commutator(s, loc, toks):
    x, y = toks[0], toks[1]
    return _Letters(x.inverse().items + y.inverse().items + x.items + y.items)


def _on_power(s, loc, toks):
    base = toks[0]
    if len(toks) == 1:
        return base
    exponent = int(toks[1])
    if abs(exponent) > MAX_EXPONENT:
        raise pp.ParseFatalException(s, loc, f"exponent {exponent} exceeds {MAX_EXPONENT}")
    if exponent < 0:
        base, exponent = base.inverse(), -exponent
    return _Letters(base.items * exponent)


def _on_product(s, loc, toks):
    items = []
    for part in toks:
        items.extend(part.items)
    return _Letters(items)


def _build_word_expr() -> pp.ParserElement:
    name = pp.Regex(r'[A-Za-z][A-Za-z0-9_]*').set_name('generator')
    integer = pp.Regex(r'[+-]?\d+').set_name('integer')
    word = pp.Forward().set_name('word')
    identity = pp.Regex(r'1(?![0-9])').set_name('1')
    bracket = pp.Suppress('(') + word + pp.Suppress(')')
    comm = (pp.Suppress('[') + word + pp.Suppress(',') + word + pp.Suppress(']')).set_parse_action(_on_commutator)
    atom = identity.set_parse_action(_on_identity) | name.set_parse_action(_on_name) | bracket | comm
    power = (atom + pp.Optional(pp.Suppress('^') + integer)).set_parse_action(_on_power)
    word <<= (power + pp.ZeroOrMore(pp.Suppress('*') + power)).set_parse_action(_on_product)
    return word


WORD_EXPR = _build_word_expr()
_WORD_ONLY = WORD_EXPR + pp.StringEnd()


def syntax_error(exc: pp.ParseBaseException) -> WordSyntaxError:
    return WordSyntaxError(exc.msg, exc.lineno, exc.col)


def resolve_letters(parsed: _Letters, text: str, alphabet: Alphabet) -> Word:
    """Turn parse-time letters into a Word, reporting undeclared names with position."""
    letters = []
    for name, sign, loc in parsed.items:
        if name not in alphabet:
            raise UndeclaredGeneratorError(f"undeclared generator '{name}'",
                                           pp.lineno(loc, text), pp.col(loc, text))
        letters.append((name, sign))
    return Word(letters)


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse a single word over the given alphabet."""
    try:
        parsed = _WORD_ONLY.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise syntax_error(exc) from None
    return resolve_letters(parsed[0], text, alphabet)


def parse_word_list(text: str, alphabet: Alphabet) -> list[Word]:
    """Parse a comma-separated list of words; blank text gives an empty list."""
    if not text.strip():
        return []
    expr = WORD_EXPR + pp.ZeroOrMore(pp.Suppress(',') + WORD_EXPR) + pp.StringEnd()
    try:
        parsed = expr.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise syntax_error(exc) from None
    return [resolve_letters(item, text, alphabet) for item in parsed]

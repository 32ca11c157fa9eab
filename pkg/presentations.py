"""
Finite presentations

Text format:

    < a, b, c, d | a*b*a^-1 = b^2, b*c*b^-1 = c^2, c*d*c^-1 = d^2, d*a*d^-1 = a^2 >

Items are relators or relations ``u = v`` (stored as the relator ``u*v^-1``).
``#`` starts a comment that runs to the end of the line.
The JSON form is ``{"generators": [...], "relators": ["..."]}``.
"""

import hashlib
import json
import logging
import re
from collections import Counter
from typing import Any, Iterable, Mapping, Optional, Sequence

import pyparsing as pp
from pydantic import BaseModel

from config import get_settings
from words import (
    WORD_EXPR, Alphabet, AlphabetMismatchError, GeneratorMap, Word, WordSyntaxError,
    _Letters, commutator, cyclic_reduce, format_word, least_rotation, parse_word,
    resolve_letters, rotate, substitute, syntax_error,
)

logger = logging.getLogger(__name__)


class PresentationSyntaxError(WordSyntaxError):
    """Malformed presentation text."""


class PresentationRecord(BaseModel):
    generators: list[str]
    relators: list[str]


class MarkedSubgroupRecord(BaseModel):
    label: str
    ambient: PresentationRecord
    generators: list[str]
    claims: list[dict[str, Any]] = []


class Presentation:
    """Ordered generators plus cyclically reduced, nonempty relators."""

    __slots__ = ('alphabet', 'relators', '_metadata')

    def __init__(self, generators: Iterable[str], relators: Iterable[Word] = (),
                 metadata: Optional[Mapping[str, str]] = None):
        alphabet = generators if isinstance(generators, Alphabet) else Alphabet(generators)
        known = set(alphabet)
        cleaned = []
        for relator in relators:
            stray = relator.symbols() - known
            if stray:
                raise AlphabetMismatchError(
                    f"Relator {relator} uses undeclared generators: {', '.join(sorted(stray))}"
                )
            core, _ = cyclic_reduce(relator)
            if not core.is_identity():
                cleaned.append(core)
        self.alphabet = alphabet
        self.relators: tuple[Word, ...] = tuple(cleaned)
        self._metadata = tuple(sorted((metadata or {}).items()))

    @property
    def generators(self) -> tuple[str, ...]:
        return self.alphabet.names

    @property
    def metadata(self) -> dict[str, str]:
        return dict(self._metadata)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Presentation):
            return self.alphabet == other.alphabet and self.relators == other.relators
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.alphabet, self.relators))

    def __repr__(self) -> str:
        return f"Presentation({format_presentation(self)!r})"

    def __str__(self) -> str:
        return format_presentation(self)

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def relator_set(self) -> frozenset[Word]:
        """Relators in canonical cyclic form, as a set."""
        return frozenset(canonical_relator(r, self.alphabet) for r in self.relators)

    def to_record(self) -> PresentationRecord:
        return PresentationRecord(generators=list(self.generators),
                                  relators=[format_word(r) for r in self.relators])

    @classmethod
    def from_record(cls, record: PresentationRecord) -> 'Presentation':
        alphabet = Alphabet(record.generators)
        return cls(alphabet, [parse_word(text, alphabet) for text in record.relators])

    def to_json(self) -> str:
        return self.to_record().model_dump_json()

    def digest(self) -> str:
        """SHA-256 of the canonical JSON of this presentation."""
        canonical = json.dumps(self.to_record().model_dump(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


class MarkedSubgroup:
    """A subgroup of a presented group, recorded by generating words."""

    def __init__(self, ambient: Presentation, subgroup_generators: Iterable[Word],
                 label: str = '', claims: Sequence[Any] = ()):
        words = tuple(subgroup_generators)
        known = set(ambient.generators)
        for w in words:
            stray = w.symbols() - known
            if stray:
                raise AlphabetMismatchError(
                    f"Subgroup generator {w} uses symbols outside the ambient alphabet: "
                    f"{', '.join(sorted(stray))}"
                )
        self.ambient = ambient
        self.subgroup_generators = words
        self.label = label
        self.claims = tuple(claims)

    def __repr__(self) -> str:
        gens = ', '.join(format_word(w) for w in self.subgroup_generators)
        return f"MarkedSubgroup({self.label!r}: <{gens}>)"

    def to_record(self) -> MarkedSubgroupRecord:
        return MarkedSubgroupRecord(
            label=self.label,
            ambient=self.ambient.to_record(),
            generators=[format_word(w) for w in self.subgroup_generators],
            claims=[claim.model_dump(mode='json') for claim in self.claims],
        )


# --- canonical forms ---------------------------------------------------------

def relator_key(w: Word, alphabet: Alphabet) -> tuple[int, tuple[int, ...]]:
    """Shortlex sort key."""
    return len(w), tuple(alphabet.letter_key(letter) for letter in w)


def canonical_relator(w: Word, alphabet: Alphabet) -> Word:
    """Least cyclic rotation of the relator or its inverse."""
    core, _ = cyclic_reduce(w)
    if core.is_identity():
        return core
    best_keys, best = None, core
    for candidate in (core, core.inverse()):
        keys = [alphabet.letter_key(letter) for letter in candidate]
        start = least_rotation(keys)
        rotated = keys[start:] + keys[:start]
        if best_keys is None or rotated < best_keys:
            best_keys, best = rotated, rotate(candidate, start)
    return best


def canonical_relators(relators: Iterable[Word], alphabet: Alphabet) -> list[Word]:
    """Canonical forms, duplicates removed, sorted shortlex."""
    unique = {}
    for relator in relators:
        canonical = canonical_relator(relator, alphabet)
        if not canonical.is_identity():
            unique[canonical] = relator_key(canonical, alphabet)
    return sorted(unique, key=unique.__getitem__)


# --- parsing and formatting ----------------------------------------------------

class _Declared:
    __slots__ = ('name', 'loc')

    def __init__(self, name: str, loc: int):
        self.name = name
        self.loc = loc


def _on_declared(s, loc, toks):
    return _Declared(toks[0], loc)


def _on_item(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    return _Letters(toks[0].items + toks[1].inverse().items)


def _build_presentation_expr() -> pp.ParserElement:
    declared = pp.Regex(r'[A-Za-z][A-Za-z0-9_]*').set_name('generator name')
    declared.set_parse_action(_on_declared)
    names = pp.Optional(declared + pp.ZeroOrMore(pp.Suppress(',') + declared))
    item = (WORD_EXPR + pp.Optional(pp.Suppress('=') + WORD_EXPR)).set_parse_action(_on_item)
    items = pp.Optional(item + pp.ZeroOrMore(pp.Suppress(',') + item))
    return (pp.Suppress('<') + pp.Group(names) + pp.Suppress('|') + pp.Group(items)
            + pp.Suppress('>') + pp.StringEnd())


PRESENTATION_EXPR = _build_presentation_expr()
_COMMENT_RE = re.compile(r'#[^\n]*')


def parse_presentation(text: str) -> Presentation:
    """Parse the ``< gens | relators-or-relations >`` format."""
    text = _COMMENT_RE.sub(lambda match: ' ' * len(match.group()), text)
    try:
        parsed = PRESENTATION_EXPR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        error = syntax_error(exc)
        raise PresentationSyntaxError(error.message, error.line, error.column) from None

    names = []
    for declared in parsed[0]:
        if declared.name in names:
            raise PresentationSyntaxError(f"duplicate generator '{declared.name}'",
                                          pp.lineno(declared.loc, text), pp.col(declared.loc, text))
        names.append(declared.name)
    alphabet = Alphabet(names)
    relators = [resolve_letters(item, text, alphabet) for item in parsed[1]]
    return Presentation(alphabet, relators)


def load_presentation(text: str) -> Presentation:
    """Parse either the text format or the JSON record format."""
    if text.lstrip().startswith('{'):
        record = PresentationRecord.model_validate_json(text)
        return Presentation.from_record(record)
    return parse_presentation(text)


def format_presentation(p: Presentation) -> str:
    parts = ['<', ', '.join(p.generators), '|', ', '.join(format_word(r) for r in p.relators), '>']
    return ' '.join(part for part in parts if part)


# --- Tietze moves --------------------------------------------------------------

def _elimination(generators: Sequence[str], relators: Sequence[Word], keep: set[str],
                 max_length: int) -> Optional[tuple[str, Word, int]]:
    """Find (generator, replacement, relator index) for one elimination move."""
    counts = [Counter(name for name, _ in r) for r in relators]
    for generator in reversed(generators):
        if generator in keep:
            continue
        for index, relator in enumerate(relators):
            if counts[index][generator] != 1:
                continue
            letters = relator.letters
            position = next(i for i, (name, _) in enumerate(letters) if name == generator)
            rotated = letters[position:] + letters[:position]
            rest = Word(rotated[1:])
            replacement = rest.inverse() if rotated[0][1] > 0 else rest
            if len(replacement) <= max_length:
                return generator, replacement, index
            # relators are sorted by length, so every later candidate is longer
            break
    return None


def _surviving_metadata(metadata: dict[str, str], generators: Sequence[str]) -> dict[str, str]:
    """Restrict direct-product bookkeeping to the generators that are left."""
    kept = set(generators)
    for key in ('factor_1', 'factor_2'):
        if key in metadata:
            metadata[key] = ','.join(name for name in metadata[key].split(',') if name in kept)
    if 'renamed' in metadata:
        pairs = [item for item in metadata['renamed'].split(',') if item.split(':')[1] in kept]
        if pairs:
            metadata['renamed'] = ','.join(pairs)
        else:
            del metadata['renamed']
    return metadata


def tietze_simplify(p: Presentation, *, keep: Iterable[str] = (), max_moves: Optional[int] = None,
                    max_length: Optional[int] = None) -> Presentation:
    """Simplify by Tietze moves until nothing applies or the move budget runs out."""
    settings = get_settings()
    max_moves = settings.tietze_moves if max_moves is None else max_moves
    max_length = settings.tietze_max_length if max_length is None else max_length
    keep = set(keep)

    generators = list(p.generators)
    relators = canonical_relators(p.relators, Alphabet(generators))
    moves = 0
    complete = True
    while True:
        move = _elimination(generators, relators, keep, max_length)
        if move is None:
            break
        if moves >= max_moves:
            complete = False
            logger.info("Tietze budget of %d moves exhausted with %d generators left", max_moves, len(generators))
            break
        generator, replacement, index = move
        images = {name: Word.generator(name) for name in generators}
        images[generator] = replacement
        substitution = GeneratorMap(generators, images)
        generators.remove(generator)
        rest = [substitute(r, substitution) for i, r in enumerate(relators) if i != index]
        relators = canonical_relators(rest, Alphabet(generators))
        moves += 1
        logger.debug("eliminated %s = %s", generator, replacement)

    metadata = _surviving_metadata(p.metadata, generators)
    metadata['tietze'] = 'complete' if complete else 'incomplete'
    return Presentation(generators, relators, metadata)


def is_trivial_presentation(p: Presentation) -> bool:
    return not p.generators and not p.relators


def quotient_by(p: Presentation, kill: Iterable[Word], *, keep: Iterable[str] = (),
                max_moves: Optional[int] = None) -> Presentation:
    """Add the words as relators, then Tietze-simplify."""
    extended = Presentation(p.alphabet, list(p.relators) + list(kill), p.metadata)
    return tietze_simplify(extended, keep=keep, max_moves=max_moves)


def direct_product(p: Presentation, q: Presentation) -> Presentation:
    """p x q, renaming q's generators that clash with p's."""
    taken = set(p.generators) | set(q.generators)
    renamed = {}
    q_names = []
    for name in q.generators:
        new = name
        if name in p.generators:
            suffix = 2
            while f"{name}_{suffix}" in taken:
                suffix += 1
            new = f"{name}_{suffix}"
            taken.add(new)
            renamed[name] = new
        q_names.append(new)

    rename = GeneratorMap(q.generators, {name: Word.generator(new) for name, new in zip(q.generators, q_names)})
    relators = list(p.relators)
    relators.extend(substitute(r, rename) for r in q.relators)
    relators.extend(commutator(Word.generator(x), Word.generator(y)) for x in p.generators for y in q_names)

    metadata = {
        'factor_1': ','.join(p.generators),
        'factor_2': ','.join(q_names),
    }
    if renamed:
        metadata['renamed'] = ','.join(f"{old}:{new}" for old, new in renamed.items())
        logger.info("renamed clashing generators: %s", metadata['renamed'])
    return Presentation(list(p.generators) + q_names, relators, metadata)


def factor_generators(product: Presentation, factor: int) -> list[str]:
    """Generator names of factor 1 or 2 of a direct product."""
    value = product.metadata.get(f"factor_{factor}", '')
    return [name for name in value.split(',') if name]


def renaming(product: Presentation) -> dict[str, str]:
    """Original name -> new name for generators renamed by direct_product."""
    value = product.metadata.get('renamed', '')
    pairs = (item.split(':') for item in value.split(',') if item)
    return {old: new for old, new in pairs}

"""
Metric small cancellation and Dehn's algorithm

sc_verify scans every pair of positions in the symmetrized relator set for the
longest common prefix (a piece) and reports the exact ratio piece/|r| as a
Fraction. dehn_reduce decides the word problem for presentations that pass
at 1/6.

Usage:
    python small_cancellation.py "<a, b, c, d | [a,b]*[c,d]>"
"""

import logging
import sys
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from presentations import Presentation, canonical_relator, parse_presentation
from words import AlphabetMismatchError, Word, format_word, is_cyclically_reduced, least_rotation, rotate

logger = logging.getLogger(__name__)

SIXTH = Fraction(1, 6)


class PreconditionError(ValueError):
    """Dehn's algorithm was asked to run on a presentation without a C'(1/6) certificate."""

    def __init__(self, message: str, report: Optional['CancellationReport'] = None):
        super().__init__(message)
        self.report = report


class ProperPower(BaseModel):
    relator: int
    root: str
    exponent: int


class PieceWitness(BaseModel):
    """A piece together with the two symmetrized relators it is a prefix of."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    piece: Word
    first: Word
    first_relator: int
    first_inverted: bool
    first_offset: int
    second: Word
    second_relator: int
    second_inverted: bool
    second_offset: int

    @field_serializer('piece', 'first', 'second')
    def _word(self, w: Word) -> str:
        return format_word(w)


class CancellationReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True)

    max_piece_length: int
    min_relator_length: int
    lambda_: Fraction = Field(serialization_alias='lambda')
    lambda_target: Fraction
    passes: bool
    passes_sixth: bool
    witness: Optional[PieceWitness] = None
    proper_powers: list[ProperPower] = []
    relator_count: int
    symmetrized_size: int
    input_digest: str

    @field_serializer('lambda_', 'lambda_target')
    def _fraction(self, value: Fraction) -> str:
        return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """'p/q' or an integer, as an exact rational in (0, 1]."""
    value = Fraction(text.strip())
    if not 0 < value <= 1:
        raise ValueError(f"lambda must lie in (0, 1], got {text}")
    return value


class _Cycle:
    """One orientation of a relator: its letters and its cyclic syllables."""

    __slots__ = ('relator', 'inverted', 'word', 'length', 'syllables', 'offsets')

    def __init__(self, relator: int, inverted: bool, word: Word):
        syllables = word.syllables()
        offsets = []
        position = 0
        for _, exponent in syllables:
            offsets.append(position)
            position += abs(exponent)
        if len(syllables) > 1 and syllables[0][0] == syllables[-1][0]:
            # first and last runs meet around the cycle
            name, last = syllables.pop()
            offsets.pop()
            syllables[0] = (name, syllables[0][1] + last)
            offsets[0] = len(word) - abs(last)
        self.relator = relator
        self.inverted = inverted
        self.word = word
        self.length = len(word)
        self.syllables = syllables
        self.offsets = offsets


class SymmetrizedRelatorSet:
    """All cyclic rotations of the relators and their inverses.

    Relators that agree up to rotation and inversion are kept once. Rotations are
    addressed as (orientation, offset) and materialized only on demand.
    """

    def __init__(self, p: Presentation):
        self.presentation = p
        self.cycles: list[_Cycle] = []
        self._canonical: set[Word] = set()
        for index, relator in enumerate(p.relators):
            canonical = canonical_relator(relator, p.alphabet)
            if canonical in self._canonical:
                logger.debug("relator %d repeats an earlier one up to rotation and inversion", index)
                continue
            self._canonical.add(canonical)
            self.cycles.append(_Cycle(index, False, relator))
            self.cycles.append(_Cycle(index, True, relator.inverse()))

    def rotation(self, cycle: int, offset: int) -> Word:
        return rotate(self.cycles[cycle].word, offset)

    def __contains__(self, w: object) -> bool:
        if not isinstance(w, Word) or w.is_identity() or not is_cyclically_reduced(w):
            return False
        return canonical_relator(w, self.presentation.alphabet) in self._canonical

    def __iter__(self) -> Iterator[Word]:
        seen = set()
        for cycle in self.cycles:
            for offset in range(cycle.length):
                rotated = rotate(cycle.word, offset)
                if rotated not in seen:
                    seen.add(rotated)
                    yield rotated

    def __len__(self) -> int:
        total = 0
        for cycle in self.cycles[::2]:
            period = root_period(cycle.word)
            forward = self._least(cycle.word)
            backward = self._least(cycle.word.inverse())
            total += period if forward == backward else 2 * period
        return total

    def _least(self, w: Word) -> tuple[int, ...]:
        keys = [self.presentation.alphabet.letter_key(letter) for letter in w]
        start = least_rotation(keys)
        return tuple(keys[start:] + keys[:start])


def root_period(w: Word) -> int:
    """Length of the shortest s with w = s^k (prefix function)."""
    letters = w.letters
    n = len(letters)
    if n == 0:
        return 0
    border = [0] * n
    k = 0
    for i in range(1, n):
        while k and letters[i] != letters[k]:
            k = border[k - 1]
        if letters[i] == letters[k]:
            k += 1
        border[i] = k
    period = n - border[-1]
    return period if n % period == 0 else n


def _aligned_piece(a: _Cycle, i: int, b: _Cycle, j: int) -> tuple[int, int]:
    """Common prefix of the rotations that start the last m letters of syllables i and j.

    Returns (length, m). Aligning on the syllable ends gives the longest piece that
    starts inside this pair of syllables.
    """
    sa, sb = a.syllables, b.syllables
    m = min(abs(sa[i][1]), abs(sb[j][1]))
    cap = min(a.length, b.length)
    total = m
    x, y = i, j
    while total < cap:
        x = (x + 1) % len(sa)
        y = (y + 1) % len(sb)
        (g, e), (h, f) = sa[x], sb[y]
        if g != h or (e > 0) != (f > 0):
            break
        if e == f:
            total += abs(e)
            continue
        total += min(abs(e), abs(f))
        break
    if total >= cap:
        # one rotation is a prefix of the other
        return (a.length - 1 if a.length == b.length else cap), m
    return total, m


class _Best:
    __slots__ = ('length', 'first', 'first_offset', 'second', 'second_offset')

    def __init__(self):
        self.length = -1
        self.first = self.first_offset = self.second = self.second_offset = 0


def _scan(symmetrized: SymmetrizedRelatorSet) -> dict[int, _Best]:
    """Longest piece occurring in each relator, with the positions realizing it."""
    cycles = symmetrized.cycles
    best = {cycle.relator: _Best() for cycle in cycles}
    groups: dict[tuple[str, bool], list[tuple[int, int]]] = {}
    for c, cycle in enumerate(cycles):
        for s, (name, exponent) in enumerate(cycle.syllables):
            groups.setdefault((name, exponent > 0), []).append((c, s))

    def record(c1, o1, c2, o2, length):
        for this, this_offset, other, other_offset in ((c1, o1, c2, o2), (c2, o2, c1, o1)):
            slot = best[cycles[this].relator]
            if length > slot.length:
                slot.length = length
                slot.first, slot.first_offset = this, this_offset
                slot.second, slot.second_offset = other, other_offset

    for members in groups.values():
        for position, (c1, s1) in enumerate(members):
            a = cycles[c1]
            run = abs(a.syllables[s1][1])
            if run > 1:
                # two starts inside the same run
                record(c1, a.offsets[s1], c1, (a.offsets[s1] + 1) % a.length, run - 1)
            for c2, s2 in members[position + 1:]:
                b = cycles[c2]
                length, m = _aligned_piece(a, s1, b, s2)
                if length > min(best[a.relator].length, best[b.relator].length):
                    o1 = (a.offsets[s1] + abs(a.syllables[s1][1]) - m) % a.length
                    o2 = (b.offsets[s2] + abs(b.syllables[s2][1]) - m) % b.length
                    record(c1, o1, c2, o2, length)
    return best


def sc_verify(p: Presentation, lambda_target: Fraction = SIXTH) -> CancellationReport:
    """Exact C'(lambda) check: passes iff every piece in r is shorter than lambda*|r|."""
    if not p.relators:
        raise ValueError('sc_verify needs at least one relator')
    lambda_target = Fraction(lambda_target)
    symmetrized = SymmetrizedRelatorSet(p)
    best = _scan(symmetrized)

    ratio = Fraction(0)
    extremal: Optional[int] = None
    for cycle in symmetrized.cycles[::2]:
        slot = best[cycle.relator]
        value = Fraction(max(slot.length, 0), cycle.length)
        if extremal is None or value > ratio:
            ratio, extremal = value, cycle.relator

    witness = None
    slot = best[extremal]
    if slot.length > 0:
        first, second = symmetrized.cycles[slot.first], symmetrized.cycles[slot.second]
        first_rotation = symmetrized.rotation(slot.first, slot.first_offset)
        witness = PieceWitness(
            piece=Word(first_rotation.letters[:slot.length]),
            first=first_rotation,
            first_relator=first.relator,
            first_inverted=first.inverted,
            first_offset=slot.first_offset,
            second=symmetrized.rotation(slot.second, slot.second_offset),
            second_relator=second.relator,
            second_inverted=second.inverted,
            second_offset=slot.second_offset,
        )

    powers = []
    for cycle in symmetrized.cycles[::2]:
        period = root_period(cycle.word)
        if period < cycle.length:
            powers.append(ProperPower(relator=cycle.relator, root=format_word(Word(cycle.word.letters[:period])),
                                      exponent=cycle.length // period))
    if powers:
        logger.info("%d relator(s) are proper powers", len(powers))

    report = CancellationReport(
        max_piece_length=max(max(slot.length for slot in best.values()), 0),
        min_relator_length=min(len(r) for r in p.relators),
        lambda_=ratio,
        lambda_target=lambda_target,
        passes=ratio < lambda_target,
        passes_sixth=ratio < SIXTH,
        witness=witness,
        proper_powers=powers,
        relator_count=len(p.relators),
        symmetrized_size=len(symmetrized),
        input_digest=p.digest(),
    )
    logger.info("small cancellation: lambda = %s (target %s)", ratio, lambda_target)
    return report


def recheck_witness(report: CancellationReport, p: Optional[Presentation] = None) -> bool:
    """Independently confirm the reported piece and ratio."""
    witness = report.witness
    if witness is None:
        return report.lambda_ == 0
    n = len(witness.piece)
    if witness.first.letters[:n] != witness.piece.letters or witness.second.letters[:n] != witness.piece.letters:
        return False
    first_position = (witness.first_relator, witness.first_inverted, witness.first_offset)
    second_position = (witness.second_relator, witness.second_inverted, witness.second_offset)
    if first_position == second_position:
        return False
    if p is not None:
        symmetrized = SymmetrizedRelatorSet(p)
        if witness.first not in symmetrized or witness.second not in symmetrized:
            return False
        source = p.relators[witness.first_relator]
        oriented = source.inverse() if witness.first_inverted else source
        if rotate(oriented, witness.first_offset) != witness.first:
            return False
    return Fraction(n, len(witness.first)) == report.lambda_


# --- Dehn's algorithm ----------------------------------------------------------

Syllable = tuple[str, int]


def _merge(syllables) -> list[Syllable]:
    """Free reduction on (generator, exponent) runs."""
    stack: list[Syllable] = []
    for name, exponent in syllables:
        if not exponent:
            continue
        if stack and stack[-1][0] == name:
            total = stack.pop()[1] + exponent
            if total:
                stack.append((name, total))
        else:
            stack.append((name, exponent))
    return stack


def _slice(syllables: list[Syllable], prefix: list[int], start: int, stop: int) -> list[Syllable]:
    """Letters [start, stop) of a syllable list, as syllables."""
    out = []
    for index, (name, exponent) in enumerate(syllables):
        lo = max(start, prefix[index])
        hi = min(stop, prefix[index + 1])
        if lo < hi:
            out.append((name, hi - lo if exponent > 0 else lo - hi))
    return out


class _Match:
    __slots__ = ('start', 'stop', 'cycle', 'offset', 'length')

    def __init__(self, start, stop, cycle, offset, length):
        self.start = start
        self.stop = stop
        self.cycle = cycle
        self.offset = offset
        self.length = length


class DehnSolver:
    """Greendlinger replacement over a C'(1/6)-certified presentation."""

    def __init__(self, p: Presentation, report: Optional[CancellationReport] = None):
        if report is None:
            report = sc_verify(p, SIXTH)
        elif report.input_digest != p.digest():
            raise PreconditionError('cancellation report was computed for a different presentation', report)
        if not report.passes_sixth:
            raise PreconditionError(f"presentation is not C'(1/6): lambda = {report.lambda_}", report)
        self.presentation = p
        self.report = report
        self.cycles = SymmetrizedRelatorSet(p).cycles
        self.exact: dict[Syllable, list[tuple[int, int]]] = {}
        self.heavy: dict[tuple[str, bool], list[tuple[int, int]]] = {}
        self.heavy_pairs: dict[tuple[tuple[str, bool], tuple[str, bool]], list[tuple[int, int]]] = {}
        for c, cycle in enumerate(self.cycles):
            k = len(cycle.syllables)
            for s, (name, exponent) in enumerate(cycle.syllables):
                self.exact.setdefault((name, exponent), []).append((c, s))
                if 2 * abs(exponent) > cycle.length:
                    self.heavy.setdefault((name, exponent > 0), []).append((c, s))
                if k > 1:
                    after_name, after_exponent = cycle.syllables[(s + 1) % k]
                    if 2 * (abs(exponent) + abs(after_exponent)) > cycle.length:
                        key = ((name, exponent > 0), (after_name, after_exponent > 0))
                        self.heavy_pairs.setdefault(key, []).append((c, s))
        self.history: list[int] = []

    def _extend(self, ws, prefix, s, c, i) -> Optional[_Match]:
        cycle = self.cycles[c]
        syllables, k, length = cycle.syllables, len(cycle.syllables), cycle.length
        total = abs(ws[s][1])
        right = 0
        t, a = s + 1, (i + 1) % k
        while t < len(ws) and total < length:
            (g, e), (h, f) = ws[t], syllables[a]
            if g != h or (e > 0) != (f > 0):
                break
            room = length - total
            if e == f and abs(e) <= room:
                total += abs(e)
                right += abs(e)
                t, a = t + 1, (a + 1) % k
                continue
            part = min(abs(e), abs(f), room)
            total += part
            right += part
            break
        left = 0
        t, a = s - 1, (i - 1) % k
        while t >= 0 and total < length:
            (g, e), (h, f) = ws[t], syllables[a]
            if g != h or (e > 0) != (f > 0):
                break
            room = length - total
            if e == f and abs(e) <= room:
                total += abs(e)
                left += abs(e)
                t, a = t - 1, (a - 1) % k
                continue
            part = min(abs(e), abs(f), room)
            total += part
            left += part
            break
        if 2 * total <= length:
            return None
        start = prefix[s] - left
        offset = (cycle.offsets[i] - left) % length
        return _Match(start, start + total, c, offset, total)

    def _heavy(self, ws, prefix) -> Optional[_Match]:
        for s, (name, exponent) in enumerate(ws):
            key = (name, exponent > 0)
            for c, i in self.heavy.get(key, ()):
                cycle = self.cycles[c]
                part = min(abs(exponent), abs(cycle.syllables[i][1]))
                if 2 * part > cycle.length:
                    return _Match(prefix[s], prefix[s] + part, c, cycle.offsets[i], part)
            if s + 1 == len(ws):
                continue
            after_name, after_exponent = ws[s + 1]
            for c, i in self.heavy_pairs.get((key, (after_name, after_exponent > 0)), ()):
                cycle = self.cycles[c]
                first = abs(cycle.syllables[i][1])
                second = abs(cycle.syllables[(i + 1) % len(cycle.syllables)][1])
                p1 = min(abs(exponent), first)
                p2 = min(abs(after_exponent), second)
                if 2 * (p1 + p2) > cycle.length:
                    start = prefix[s + 1] - p1
                    return _Match(start, start + p1 + p2, c, (cycle.offsets[i] + first - p1) % cycle.length, p1 + p2)
        return None

    def _find(self, ws, prefix) -> Optional[_Match]:
        anchors = []
        for s, syllable in enumerate(ws):
            candidates = self.exact.get(syllable)
            if candidates:
                anchors.append((len(candidates), s, candidates))
        anchors.sort(key=lambda anchor: (anchor[0], anchor[1]))
        for _, s, candidates in anchors:
            for c, i in candidates:
                match = self._extend(ws, prefix, s, c, i)
                if match is not None:
                    return match
        return self._heavy(ws, prefix)

    def _replace(self, ws, prefix, match: _Match) -> list[Syllable]:
        cycle = self.cycles[match.cycle]
        doubled = cycle.word.letters + cycle.word.letters
        rest = Word._from_reduced(doubled[match.offset + match.length:match.offset + cycle.length])
        replacement = rest.inverse().syllables()
        head = _slice(ws, prefix, 0, match.start)
        tail = _slice(ws, prefix, match.stop, prefix[-1])
        return _merge(head + replacement + tail)

    def reduce(self, w: Word) -> Word:
        stray = w.symbols() - set(self.presentation.generators)
        if stray:
            raise AlphabetMismatchError(f"Word uses symbols outside the presentation: {', '.join(sorted(stray))}")
        ws = _merge(w.syllables())
        self.history = [len(w)]
        while ws:
            prefix = [0]
            for _, exponent in ws:
                prefix.append(prefix[-1] + abs(exponent))
            match = self._find(ws, prefix)
            if match is None:
                break
            ws = self._replace(ws, prefix, match)
            size = sum(abs(exponent) for _, exponent in ws)
            if size >= self.history[-1]:
                raise RuntimeError(f"Dehn step did not shorten the word ({self.history[-1]} -> {size})")
            self.history.append(size)
        logger.debug("Dehn reduction in %d steps: %s", len(self.history) - 1, self.history)
        return Word.from_syllables(ws)

    def is_trivial(self, w: Word) -> bool:
        return self.reduce(w).is_identity()


@lru_cache(maxsize=8)
def _solver_for(p: Presentation) -> DehnSolver:
    return DehnSolver(p)


def dehn_reduce(w: Word, p: Presentation, report: Optional[CancellationReport] = None) -> Word:
    """Dehn-reduce w; the result is empty iff w is trivial in the group."""
    solver = DehnSolver(p, report) if report is not None else _solver_for(p)
    return solver.reduce(w)


def main():
    if len(sys.argv) != 2:
        print('Usage: python small_cancellation.py "<presentation>"')
        sys.exit(1)
    report = sc_verify(parse_presentation(sys.argv[1]))
    print(report.model_dump_json(by_alias=True, indent=2))


if __name__ == '__main__':
    main()

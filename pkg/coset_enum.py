"""
Coset enumeration and low-index subgroups

Todd-Coxeter enumeration (HLT with lookahead, or Felsch) over a subgroup given by
words, and an exhaustive backtracking search for all subgroups of small index.
An empty low-index search up to B certifies that the group has no nontrivial
finite quotient of order at most B.

Cosets are 0-based internally; JSON records use the 1-based convention with
coset 1 being the subgroup itself. Columns are ordered g1, g1^-1, g2, g2^-1, ...
"""

import logging
import time
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

from pydantic import BaseModel, Field, model_validator

from config import get_settings
from presentations import Presentation
from words import Word

logger = logging.getLogger(__name__)


class Status(str, Enum):
    CERTIFIED = 'certified'
    THEOREM_CITED = 'theorem-cited'
    ASSERTED = 'asserted'
    UNKNOWN = 'unknown'
    REFUTED = 'refuted'


class Certificate(BaseModel):
    claim: str
    bound: int = 0
    status: Status
    strategy: str = ''
    runtime_ms: int = 0
    input_digest: str = ''
    evidence: dict[str, Any] = {}

    @model_validator(mode='after')
    def refutation_has_witness(self) -> 'Certificate':
        if self.status == Status.REFUTED and 'witness' not in self.evidence:
            raise ValueError('A refuted certificate must carry a witness')
        return self


class EnumerationLimits(BaseModel):
    max_cosets: int = Field(gt=0)
    max_time: float = Field(gt=0, description='seconds')

    @classmethod
    def from_settings(cls) -> 'EnumerationLimits':
        settings = get_settings()
        return cls(max_cosets=settings.max_cosets, max_time=settings.max_seconds)


class ResourceExhausted(RuntimeError):
    """An enumeration or search hit its coset or time limit."""

    def __init__(self, message: str, cosets_reached: int = 0, elapsed_ms: int = 0, nodes: int = 0):
        super().__init__(message)
        self.cosets_reached = cosets_reached
        self.elapsed_ms = elapsed_ms
        self.nodes = nodes


class CosetTableRecord(BaseModel):
    generators: list[str]
    index: int
    complete: bool
    strategy: str
    conjugacy_class: Optional[int] = None
    rows: list[list[Optional[int]]]


def column(alphabet_index: int, sign: int) -> int:
    return 2 * alphabet_index + (0 if sign > 0 else 1)


def word_columns(p: Presentation, w: Word) -> tuple[int, ...]:
    return tuple(column(p.alphabet.index(name), sign) for name, sign in w)


class CosetTable:
    """Action of generators and inverses on cosets."""

    def __init__(self, generators: Sequence[str], rows: Sequence[Sequence[Optional[int]]],
                 complete: bool = True, strategy: str = '', conjugacy_class: Optional[int] = None):
        self.generators = tuple(generators)
        self.rows = tuple(tuple(row) for row in rows)
        self.complete = complete
        self.strategy = strategy
        self.conjugacy_class = conjugacy_class

    @property
    def index(self) -> int:
        return len(self.rows)

    def trace(self, coset: int, columns: Iterable[int]) -> Optional[int]:
        for c in columns:
            coset = self.rows[coset][c]
            if coset is None:
                return None
        return coset

    def permutation(self, generator: str) -> tuple[int, ...]:
        """Action of a generator as a tuple of 0-based images (complete tables only)."""
        c = column(self.generators.index(generator), 1)
        return tuple(row[c] for row in self.rows)

    def key(self) -> tuple:
        return self.index, self.rows

    def to_record(self) -> CosetTableRecord:
        return CosetTableRecord(
            generators=list(self.generators),
            index=self.index,
            complete=self.complete,
            strategy=self.strategy,
            conjugacy_class=self.conjugacy_class,
            rows=[[None if value is None else value + 1 for value in row] for row in self.rows],
        )

    def __repr__(self) -> str:
        return f"CosetTable(index={self.index}, complete={self.complete})"


def standardize(rows: Sequence[Sequence[int]], base: int = 0) -> tuple[tuple[int, ...], ...]:
    """Renumber a complete transitive table in first-appearance order from a base coset."""
    label = {base: 0}
    order = [base]
    position = 0
    while position < len(order):
        coset = order[position]
        for target in rows[coset]:
            if target not in label:
                label[target] = len(order)
                order.append(target)
        position += 1
    return tuple(tuple(label[target] for target in rows[coset]) for coset in order)


def verify_coset_table(table: CosetTable, p: Presentation, subgroup: Sequence[Word] = ()) -> list[str]:
    """Independent re-check of a completed table; returns the list of problems found."""
    problems = []
    n = table.index
    width = 2 * len(p.generators)
    if table.generators != p.generators:
        return ['generator lists differ']
    for coset, row in enumerate(table.rows):
        if len(row) != width:
            problems.append(f"coset {coset + 1}: wrong row width")
            continue
        for c, target in enumerate(row):
            if target is None or not 0 <= target < n:
                problems.append(f"coset {coset + 1}: entry {c} undefined or out of range")
            elif table.rows[target][c ^ 1] != coset:
                problems.append(f"coset {coset + 1}: column {c} is not inverted by column {c ^ 1}")
    if problems:
        return problems
    for relator in p.relators:
        columns = word_columns(p, relator)
        for coset in range(n):
            if table.trace(coset, columns) != coset:
                problems.append(f"relator {relator} does not close at coset {coset + 1}")
    for w in subgroup:
        if table.trace(0, word_columns(p, w)) != 0:
            problems.append(f"subgroup generator {w} does not fix coset 1")
    return problems


def conjugates_by_first_letter(relators: Sequence[tuple[int, ...]], cols: int) -> list[list[tuple[int, ...]]]:
    """Distinct cyclic conjugates of the relators and their inverses, bucketed by first column."""
    buckets: list[list[tuple[int, ...]]] = [[] for _ in range(cols)]
    seen = set()
    for relator in relators:
        inverse = tuple(c ^ 1 for c in reversed(relator))
        for cyclic in (relator, inverse):
            for start in range(len(cyclic)):
                conjugate = cyclic[start:] + cyclic[:start]
                if conjugate not in seen:
                    seen.add(conjugate)
                    buckets[conjugate[0]].append(conjugate)
    return buckets


class _Overflow(Exception):
    pass


class _Enumerator:
    """Coset table under construction, with coincidence processing."""

    def __init__(self, p: Presentation, subgroup: Sequence[Word], limits: EnumerationLimits, strategy: str):
        self.p = p
        self.cols = 2 * len(p.generators)
        self.relators = [word_columns(p, r) for r in p.relators]
        self.subgroup = [word_columns(p, w) for w in subgroup if not w.is_identity()]
        self.limits = limits
        self.strategy = strategy
        self.table: list[list[Optional[int]]] = [[None] * self.cols]
        self.parent = [0]
        self.live = 1
        self.deductions: list[tuple[int, int]] = []
        self.collapsed = False
        self.started = time.monotonic()
        self.steps = 0
        self.starting_with = conjugates_by_first_letter(self.relators, self.cols)

    def elapsed_ms(self) -> int:
        return int((time.monotonic() - self.started) * 1000)

    def check_time(self):
        self.steps += 1
        if self.steps % 256 == 0 and time.monotonic() - self.started > self.limits.max_time:
            raise ResourceExhausted(f"time limit of {self.limits.max_time}s reached",
                                    cosets_reached=self.live, elapsed_ms=self.elapsed_ms())

    def define(self, alpha: int, c: int):
        if self.live >= self.limits.max_cosets:
            raise _Overflow()
        beta = len(self.table)
        self.table.append([None] * self.cols)
        self.parent.append(beta)
        self.live += 1
        self.table[alpha][c] = beta
        self.table[beta][c ^ 1] = alpha
        self.deductions.append((alpha, c))

    def rep(self, k: int) -> int:
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def merge(self, k: int, lam: int, queue: list[int]):
        phi, psi = self.rep(k), self.rep(lam)
        if phi != psi:
            low, high = min(phi, psi), max(phi, psi)
            self.parent[high] = low
            self.live -= 1
            queue.append(high)

    def coincidence(self, alpha: int, beta: int):
        self.collapsed = True
        table = self.table
        queue: list[int] = []
        self.merge(alpha, beta, queue)
        head = 0
        while head < len(queue):
            gamma = queue[head]
            head += 1
            for c in range(self.cols):
                delta = table[gamma][c]
                if delta is None:
                    continue
                table[delta][c ^ 1] = None
                mu, nu = self.rep(gamma), self.rep(delta)
                if table[mu][c] is not None:
                    self.merge(nu, table[mu][c], queue)
                elif table[nu][c ^ 1] is not None:
                    self.merge(mu, table[nu][c ^ 1], queue)
                else:
                    table[mu][c] = nu
                    table[nu][c ^ 1] = mu
                    self.deductions.append((mu, c))

    def scan(self, alpha: int, w: Sequence[int], fill: bool = False):
        """Trace w at alpha from both ends; deduce, merge, or (when filling) define."""
        table = self.table
        f = b = alpha
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] is not None:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] is not None:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                self.deductions.append((f, w[i]))
                return
            if not fill:
                return
            self.define(f, w[i])

    def lookahead(self):
        logger.debug("lookahead at %d live cosets", self.live)
        for beta in range(len(self.table)):
            if self.parent[beta] != beta:
                continue
            for w in self.relators:
                self.scan(beta, w)
                if self.parent[beta] != beta:
                    break
        self.deductions.clear()

    def exhausted(self) -> ResourceExhausted:
        return ResourceExhausted(f"coset limit of {self.limits.max_cosets} reached",
                                 cosets_reached=self.live, elapsed_ms=self.elapsed_ms())

    def run_hlt(self):
        pending = True
        while pending:
            try:
                for w in self.subgroup:
                    self.scan(0, w, fill=True)
                pending = False
            except _Overflow:
                self.lookahead()
                if self.live >= self.limits.max_cosets:
                    raise self.exhausted() from None
        alpha = 0
        while alpha < len(self.table):
            self.check_time()
            if self.parent[alpha] == alpha:
                try:
                    for w in self.relators:
                        self.scan(alpha, w, fill=True)
                        if self.parent[alpha] != alpha:
                            break
                    if self.parent[alpha] == alpha:
                        for c in range(self.cols):
                            if self.table[alpha][c] is None:
                                self.define(alpha, c)
                except _Overflow:
                    self.lookahead()
                    if self.live >= self.limits.max_cosets:
                        raise self.exhausted() from None
                    continue
            alpha += 1
        self.deductions.clear()

    def process_deductions(self):
        while True:
            while self.deductions:
                alpha, c = self.deductions.pop()
                if self.parent[alpha] != alpha or self.table[alpha][c] is None:
                    continue
                for w in self.starting_with[c]:
                    self.scan(alpha, w)
                    if self.parent[alpha] != alpha:
                        break
                beta = self.table[alpha][c]
                if beta is not None and self.parent[beta] == beta:
                    for w in self.starting_with[c ^ 1]:
                        self.scan(beta, w)
                        if self.parent[beta] != beta:
                            break
            if not self.collapsed:
                return
            self.collapsed = False
            self.lookahead_with_deductions()

    def lookahead_with_deductions(self):
        for beta in range(len(self.table)):
            if self.parent[beta] != beta:
                continue
            for w in self.relators:
                self.scan(beta, w)
                if self.parent[beta] != beta:
                    break

    def run_felsch(self):
        try:
            for w in self.subgroup:
                self.scan(0, w, fill=True)
                self.process_deductions()
            self.process_deductions()
            cursor = 0
            while True:
                self.check_time()
                gap = None
                alpha = cursor
                while alpha < len(self.table) and gap is None:
                    if self.parent[alpha] == alpha:
                        for c in range(self.cols):
                            if self.table[alpha][c] is None:
                                gap = (alpha, c)
                                break
                    if gap is None:
                        alpha += 1
                if gap is None:
                    break
                cursor = gap[0]
                self.define(*gap)
                self.process_deductions()
                if self.collapsed:
                    cursor = 0
        except _Overflow:
            raise self.exhausted() from None

    def close(self):
        """Rescan everything until a full pass changes nothing."""
        while True:
            self.collapsed = False
            self.deductions.clear()
            for w in self.subgroup:
                self.scan(0, w)
            self.lookahead_with_deductions()
            if not self.collapsed and not self.deductions:
                return

    def result(self) -> CosetTable:
        live = [k for k in range(len(self.table)) if self.parent[k] == k]
        rows = {k: [self.rep(target) if target is not None else None for target in self.table[k]] for k in live}
        complete = all(target is not None for row in rows.values() for target in row)
        if not complete:
            return CosetTable(self.p.generators, [rows[k] for k in live], complete=False, strategy=self.strategy)
        return CosetTable(self.p.generators, standardize(rows), complete=True, strategy=self.strategy)


STRATEGIES = ('hlt', 'felsch')


def todd_coxeter(p: Presentation, subgroup: Sequence[Word] = (), limits: Optional[EnumerationLimits] = None,
                 strategy: str = 'hlt') -> CosetTable:
    """Enumerate the cosets of the subgroup generated by the given words."""
    if strategy not in STRATEGIES:
        raise ValueError(f"Unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    known = set(p.generators)
    for w in subgroup:
        if not w.symbols() <= known:
            raise ValueError(f"Subgroup word {w} uses symbols outside the presentation")
    limits = limits or EnumerationLimits.from_settings()
    enumerator = _Enumerator(p, subgroup, limits, strategy)
    if strategy == 'hlt':
        enumerator.run_hlt()
    else:
        enumerator.run_felsch()
    enumerator.close()
    table = enumerator.result()
    logger.info("%s enumeration finished: index %d in %d ms (%d cosets defined)",
                strategy, table.index, enumerator.elapsed_ms(), len(enumerator.table))
    return table


class _LowIndexSearch:
    """Backtracking over partial coset tables, new cosets numbered in scan order."""

    def __init__(self, p: Presentation, max_index: int, limits: EnumerationLimits, first_only: bool):
        self.p = p
        self.max_index = max_index
        self.limits = limits
        self.first_only = first_only
        self.cols = 2 * len(p.generators)
        self.nodes = 0
        self.started = time.monotonic()
        self.relators = [word_columns(p, r) for r in p.relators]
        self.starting_with = conjugates_by_first_letter(self.relators, self.cols)

    def elapsed_ms(self) -> int:
        return int((time.monotonic() - self.started) * 1000)

    def scan(self, table, alpha, w, queue) -> bool:
        f = b = alpha
        i, j = 0, len(w) - 1
        while i <= j and table[f][w[i]] is not None:
            f = table[f][w[i]]
            i += 1
        if i > j:
            return f == alpha
        while j >= i and table[b][w[j] ^ 1] is not None:
            b = table[b][w[j] ^ 1]
            j -= 1
        if j < i:
            return f == b
        if j == i:
            table[f][w[i]] = b
            table[b][w[i] ^ 1] = f
            queue.append((f, w[i]))
        return True

    def consistent(self, table, queue) -> bool:
        while queue:
            alpha, c = queue.pop()
            beta = table[alpha][c]
            for w in self.starting_with[c]:
                if not self.scan(table, alpha, w, queue):
                    return False
            for w in self.starting_with[c ^ 1]:
                if not self.scan(table, beta, w, queue):
                    return False
        return True

    def run(self) -> list[list[list[int]]]:
        found = []
        if self.cols == 0 or self.max_index < 2:
            return found
        stack = [[[None] * self.cols]]
        while stack:
            self.nodes += 1
            if self.nodes % 1024 == 0 and time.monotonic() - self.started > self.limits.max_time:
                raise ResourceExhausted(f"time limit of {self.limits.max_time}s reached in low-index search",
                                        elapsed_ms=self.elapsed_ms(), nodes=self.nodes)
            table = stack.pop()
            count = len(table)
            gap = next(((alpha, c) for alpha in range(count) for c in range(self.cols)
                        if table[alpha][c] is None), None)
            if gap is None:
                if count >= 2 and all(self._closes(table, w) for w in self.relators):
                    found.append(table)
                    if self.first_only:
                        break
                continue
            alpha, c = gap
            children = []
            for beta in range(count):
                if table[beta][c ^ 1] is None:
                    child = [row[:] for row in table]
                    child[alpha][c] = beta
                    child[beta][c ^ 1] = alpha
                    if self.consistent(child, [(alpha, c)]):
                        children.append(child)
            if count < self.max_index:
                child = [row[:] for row in table]
                child.append([None] * self.cols)
                child[alpha][c] = count
                child[count][c ^ 1] = alpha
                if self.consistent(child, [(alpha, c)]):
                    children.append(child)
            stack.extend(reversed(children))
        return found

    def _closes(self, table, w) -> bool:
        for start in range(len(table)):
            coset = start
            for c in w:
                coset = table[coset][c]
            if coset != start:
                return False
        return True


def _annotate_conjugacy(tables: list[CosetTable]) -> list[CosetTable]:
    class_keys = {}
    annotated = []
    ordered = sorted(tables, key=CosetTable.key)
    for table in ordered:
        key = min(standardize(table.rows, base) for base in range(table.index))
        class_id = class_keys.setdefault(key, len(class_keys) + 1)
        annotated.append(CosetTable(table.generators, table.rows, True, table.strategy, class_id))
    return annotated


def low_index_subgroups(p: Presentation, max_index: int, limits: Optional[EnumerationLimits] = None,
                        first_only: bool = False) -> list[CosetTable]:
    """All subgroups of index 2..max_index as coset tables, in canonical order."""
    if max_index < 1:
        raise ValueError('max_index must be at least 1')
    if limits is None:
        settings = get_settings()
        limits = EnumerationLimits(max_cosets=settings.max_cosets, max_time=settings.lowindex_seconds)
    search = _LowIndexSearch(p, max_index, limits, first_only)
    raw = search.run()
    tables = [CosetTable(p.generators, standardize(rows), True, 'low-index') for rows in raw]
    logger.info("low-index search to %d: %d subgroups, %d nodes, %d ms",
                max_index, len(tables), search.nodes, search.elapsed_ms())
    return _annotate_conjugacy(tables)


def certify_no_finite_quotients(p: Presentation, bound: int, limits: Optional[EnumerationLimits] = None) -> Certificate:
    """Bounded certificate that p has no nontrivial finite quotient of order <= bound."""
    if bound < 2:
        raise ValueError('bound must be at least 2')
    claim = f"no non-trivial finite quotient of order <= {bound}"
    started = time.monotonic()
    digest = p.digest()
    try:
        witnesses = low_index_subgroups(p, bound, limits, first_only=True)
    except ResourceExhausted as exc:
        logger.warning("quotient search gave up: %s", exc)
        return Certificate(claim=claim, bound=bound, status=Status.UNKNOWN, strategy='low-index',
                           runtime_ms=int((time.monotonic() - started) * 1000), input_digest=digest,
                           evidence={'reason': str(exc), 'nodes_explored': exc.nodes})
    runtime = int((time.monotonic() - started) * 1000)
    if witnesses:
        witness = witnesses[0]
        return Certificate(claim=claim, bound=bound, status=Status.REFUTED, strategy='low-index',
                           runtime_ms=runtime, input_digest=digest,
                           evidence={'witness': witness.to_record().model_dump(mode='json'),
                                     'index': witness.index,
                                     'argument': 'a proper subgroup of index k gives a nontrivial '
                                                 'action on k points, hence a finite quotient'})
    return Certificate(claim=claim, bound=bound, status=Status.CERTIFIED, strategy='low-index',
                       runtime_ms=runtime, input_digest=digest,
                       evidence={'max_index_searched': bound,
                                 'argument': 'a quotient of order m <= B has a proper subgroup of index '
                                             '<= m; the exhaustive search up to B found none'})

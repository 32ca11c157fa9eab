"""
The Rips construction with small-cancellation block words

Given Q = <X | R>, builds Gamma = <X, nu1, nu2, nu3 | S> where S holds

    r * V_r^-1                                   for every r in R
    x * nu_i * x^-1 * W^-1,  x^-1 * nu_i * x * W'^-1   for x in X, i = 1, 2, 3

and every V, W is a block word nu1^k nu2 nu1^(k+1) nu2 ... nu1^(k+c) nu2 nu3 on its
own exponent window. The nu's generate a normal subgroup N with Gamma/N = Q.
A candidate is accepted only when sc_verify certifies C'(1/6) and killing the
nu's gives back Q; otherwise the windows are scaled up and the build retried.

Usage:
    python rips.py "<a | a>"
"""

import json
import logging
import sys
import time
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from config import get_settings
from coset_enum import Certificate, Status
from presentations import (
    MarkedSubgroup, Presentation, PresentationRecord, parse_presentation, quotient_by,
)
from small_cancellation import SIXTH, CancellationReport, sc_verify
from words import GeneratorMap, Word, substitute

logger = logging.getLogger(__name__)

NU_NAMES = ('nu1', 'nu2', 'nu3')


class InvalidInput(ValueError):
    """The input presentation cannot be fed to the construction."""


class ConstructionFailed(RuntimeError):
    """No round produced a C'(1/6) presentation that recovers Q."""

    def __init__(self, message: str, report: Optional[CancellationReport] = None):
        super().__init__(message)
        self.report = report


class RipsParameters(BaseModel):
    model_config = ConfigDict(frozen=True)

    block_base: int = Field(default_factory=lambda: get_settings().block_base, ge=10)
    escalation_factor: int = Field(default_factory=lambda: get_settings().escalation_factor, ge=2)
    max_rounds: int = Field(default_factory=lambda: get_settings().max_rounds, ge=1)
    block_runs: int = Field(default_factory=lambda: get_settings().block_runs, ge=2)


class RipsOutput(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gamma: Presentation
    n_subgroup: MarkedSubgroup
    q_input: Presentation
    params: RipsParameters
    nu: tuple[str, str, str]
    block_base_used: int
    rounds: int
    sc_report: CancellationReport
    metadata: list[Certificate]

    def to_dict(self) -> dict:
        return {
            'status': 'ok',
            'q': self.q_input.to_record().model_dump(),
            'params': self.params.model_dump(),
            'block_base_used': self.block_base_used,
            'rounds': self.rounds,
            'gamma': self.gamma.to_record().model_dump(),
            'nu': list(self.nu),
            'n_subgroup': self.n_subgroup.to_record().model_dump(),
            'sc_report': self.sc_report.model_dump(mode='json', by_alias=True),
            'metadata': [claim.model_dump(mode='json') for claim in self.metadata],
        }


class RipsOutputRecord(BaseModel):
    """The part of a saved rips result needed to rebuild and check it."""

    q: PresentationRecord
    params: RipsParameters
    gamma: PresentationRecord


def fresh_names(taken, wanted=NU_NAMES) -> tuple[str, ...]:
    names = []
    used = set(taken)
    for name in wanted:
        candidate, suffix = name, 1
        while candidate in used:
            candidate = f"{name}_{suffix}"
            suffix += 1
        used.add(candidate)
        names.append(candidate)
    return tuple(names)


def block_word(nu: tuple[str, str, str], start: int, runs: int) -> Word:
    """nu1^start nu2 nu1^(start+1) nu2 ... nu1^(start+runs-1) nu2 nu3"""
    syllables = []
    for offset in range(runs):
        syllables.append((nu[0], start + offset))
        syllables.append((nu[1], 1))
    syllables.append((nu[2], 1))
    return Word.from_syllables(syllables)


def _block_count(q: Presentation) -> int:
    return len(q.relators) + 6 * len(q.generators)


def _assemble(q: Presentation, nu: tuple[str, str, str], base: int, runs: int) -> Presentation:
    blocks = (block_word(nu, base + b * runs, runs) for b in range(_block_count(q)))
    relators = [r * next(blocks).inverse() for r in q.relators]
    for x in q.generators:
        g = Word.generator(x)
        for name in nu:
            letter = Word.generator(name)
            relators.append(g * letter * g.inverse() * next(blocks).inverse())
            relators.append(g.inverse() * letter * g * next(blocks).inverse())
    return Presentation(list(q.generators) + list(nu), relators)


def recover_quotient(gamma: Presentation, nu, keep) -> Presentation:
    """Gamma / <<nu>>, simplified without touching the generators in keep."""
    return quotient_by(gamma, [Word.generator(name) for name in nu], keep=keep)


def recovers(gamma: Presentation, nu, q: Presentation) -> bool:
    recovered = recover_quotient(gamma, nu, q.generators)
    return recovered.generators == q.generators and recovered.relator_set() == q.relator_set()


def conjugation_relator_index(q: Presentation, x: str, i: int, sign: int) -> int:
    """Position in Gamma's relators of the relator rewriting x^sign nu_i x^-sign (i is 1-based)."""
    return len(q.relators) + 6 * q.alphabet.index(x) + 2 * (i - 1) + (0 if sign > 0 else 1)


def _rewrite(gamma: Presentation, q: Presentation, nu, x: str, i: int, sign: int) -> Word:
    g = Word.generator(x, sign)
    conjugate = g * Word.generator(nu[i - 1]) * g.inverse()
    relator = gamma.relators[conjugation_relator_index(q, x, i, sign)]
    return relator.inverse() * conjugate


def rewrite_conjugate(out: RipsOutput, x: str, i: int, sign: int = 1) -> Word:
    """The nu-word equal to x^sign nu_i x^-sign, read off its defining relator."""
    return _rewrite(out.gamma, out.q_input, out.nu, x, i, sign)


def _normality_holds(gamma: Presentation, q: Presentation, nu) -> bool:
    return all(_rewrite(gamma, q, nu, x, i, sign).symbols() <= set(nu)
               for x in q.generators for i in (1, 2, 3) for sign in (1, -1))


def _metadata(q: Presentation, gamma: Presentation, nu, report: CancellationReport) -> list[Certificate]:
    digest = q.digest()
    torsion_free = Status.THEOREM_CITED if not report.proper_powers else Status.UNKNOWN
    return [
        Certificate(claim='Gamma has |X| + 3 generators and |R| + 6|X| relators', status=Status.CERTIFIED,
                    strategy='count', input_digest=digest,
                    evidence={'generators': len(gamma.generators), 'relators': len(gamma.relators)}),
        Certificate(claim="Gamma satisfies C'(1/6)", status=Status.CERTIFIED, strategy='piece-scan',
                    input_digest=digest,
                    evidence={'lambda': f"{report.lambda_.numerator}/{report.lambda_.denominator}",
                              'max_piece_length': report.max_piece_length,
                              'min_relator_length': report.min_relator_length}),
        Certificate(claim='killing nu1, nu2, nu3 recovers the relator set of Q', status=Status.CERTIFIED,
                    strategy='tietze', input_digest=digest, evidence={'kill': list(nu)}),
        Certificate(claim='N = <nu1, nu2, nu3> is normal in Gamma', status=Status.CERTIFIED,
                    strategy='rewrite', input_digest=digest,
                    evidence={'argument': 'every x^(+-1) nu_i x^(-+1) equals a nu-word by its defining relator'}),
        Certificate(claim='Gamma is hyperbolic', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': "finite C'(1/6) presentations define word-hyperbolic groups",
                              'depends_on': "Gamma satisfies C'(1/6)"}),
        Certificate(claim='Gamma is torsion-free', status=torsion_free, input_digest=digest,
                    evidence={'citation': "torsion in a C'(1/6) group comes only from proper-power relators",
                              'proper_power_relators': len(report.proper_powers)}),
        Certificate(claim='Gamma has cohomological dimension 2', status=torsion_free, input_digest=digest,
                    evidence={'citation': "C'(1/6) presentations without proper powers are aspherical"}),
        Certificate(claim='Gamma is residually finite', status=Status.THEOREM_CITED, input_digest=digest,
                    evidence={'citation': "Wise, a residually finite version of Rips's construction"}),
        Certificate(claim='N is finitely generated and, when Q is infinite, not free', status=Status.THEOREM_CITED,
                    input_digest=digest,
                    evidence={'citation': 'Rips, subgroups of small cancellation groups'}),
    ]


@lru_cache(maxsize=32)
def rips_wise(q: Presentation, params: Optional[RipsParameters] = None) -> RipsOutput:
    """Build Gamma and N for Q, scaling the block words until the checks pass."""
    params = params or RipsParameters()
    if not q.generators:
        raise InvalidInput('the construction needs at least one generator')
    nu = fresh_names(q.generators)
    base = params.block_base
    report = None
    for round_number in range(1, params.max_rounds + 1):
        started = time.monotonic()
        gamma = _assemble(q, nu, base, params.block_runs)
        report = sc_verify(gamma, SIXTH)
        if report.passes_sixth and recovers(gamma, nu, q) and _normality_holds(gamma, q, nu):
            logger.info("round %d: accepted with block base %d, lambda = %s (%.2fs)",
                        round_number, base, report.lambda_, time.monotonic() - started)
            n = MarkedSubgroup(gamma, [Word.generator(name) for name in nu], label='N')
            return RipsOutput(gamma=gamma, n_subgroup=n, q_input=q, params=params, nu=nu,
                              block_base_used=base, rounds=round_number, sc_report=report,
                              metadata=_metadata(q, gamma, nu, report))
        logger.info("round %d: lambda = %s with block base %d, escalating", round_number, report.lambda_, base)
        base *= params.escalation_factor
    raise ConstructionFailed(f"no C'(1/6) presentation after {params.max_rounds} round(s)", report)


def load_rips_output(text: str) -> RipsOutput:
    """Rebuild a saved result from its q and params, checking the stored Gamma."""
    record = RipsOutputRecord.model_validate_json(text)
    q = Presentation.from_record(record.q)
    out = rips_wise(q, record.params)
    if out.gamma.to_record() != record.gamma:
        raise InvalidInput('stored gamma does not match a rebuild from q and params')
    return out


def projection(out: RipsOutput) -> GeneratorMap:
    """pi: Gamma -> Q on words, sending every nu to 1."""
    assignment = {name: Word.generator(name) for name in out.q_input.generators}
    assignment.update({name: Word.identity() for name in out.nu})
    return GeneratorMap(out.gamma.generators, assignment, out.q_input.alphabet)


def project(out: RipsOutput, w: Word) -> Word:
    return substitute(w, projection(out))


def main():
    if len(sys.argv) != 2:
        print('Usage: python rips.py "<presentation>"')
        sys.exit(1)
    out = rips_wise(parse_presentation(sys.argv[1]))
    print(json.dumps(out.to_dict(), indent=2))


if __name__ == '__main__':
    main()

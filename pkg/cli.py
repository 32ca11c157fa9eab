#!/usr/bin/env python3
"""
Command-line entry point

Usage:
    fpcert parse FILE
    fpcert h1 FILE
    fpcert snf MATRIX_JSON [--transforms]
    fpcert tc FILE [--subgroup "w1, w2"] [--strategy hlt|felsch] [--max-cosets N]
    fpcert lowindex FILE --max-index N
    fpcert certify FILE --bound B
    fpcert sc-check FILE [--lambda p/q]
    fpcert dehn FILE --word W
    fpcert rips FILE [--block-base L] [--max-rounds K]
    fpcert pipeline theorem-main --q FILE [--bound B]
    fpcert pair gg --q FILE --b FILE [--bound B]
    fpcert pair fp --gamma RIPS_JSON
    fpcert fibre --gamma RIPS_JSON
    fpcert ns --gamma RIPS_JSON --word W
    fpcert family gn --seed higman|trivial --n N [--bound B]

Every subcommand accepts --format text|json, --out PATH and -v/-vv.
Exit codes: 0 ok, 1 refuted or failed check, 2 resource limit (unknown), 3 input error.
"""

import argparse
import json
import logging
import os
import sys
import tempfile
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from config import get_settings
from constructions import (
    SEEDS, HypothesisRefuted, PairReport, PreconditionRefuted, finitely_presented_pair, gn_family,
    fibre_product_generators, goldstein_guralnick_pair, nikolov_segal_subgroup, theorem_main_pipeline,
)
from coset_enum import (
    STRATEGIES, EnumerationLimits, ResourceExhausted, Status, certify_no_finite_quotients, low_index_subgroups,
    todd_coxeter, verify_coset_table,
)
from homology import IntegerMatrix, MatrixRecord, h1, smith_normal_form
from presentations import Presentation, format_presentation, load_presentation
from rips import ConstructionFailed, InvalidInput, RipsParameters, load_rips_output, rips_wise
from small_cancellation import DehnSolver, PreconditionError, parse_fraction, recheck_witness, sc_verify
from words import AlphabetMismatchError, WordSyntaxError, format_word, parse_word, parse_word_list

logger = logging.getLogger(__name__)

OK, REFUTED, UNKNOWN, INPUT_ERROR = 0, 1, 2, 3
STATUS_CODES = {
    'ok': OK, 'certified': OK, 'pass': OK,
    'refuted': REFUTED, 'fail': REFUTED, 'failed': REFUTED,
    'unknown': UNKNOWN,
    'error': INPUT_ERROR,
}
COMMANDS = ('parse', 'h1', 'snf', 'tc', 'lowindex', 'certify', 'sc-check', 'dehn', 'rips',
            'pipeline', 'pair', 'fibre', 'ns', 'family')


class UsageError(Exception):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class RunConfig(BaseModel):
    command: Literal[COMMANDS]
    variant: Optional[str] = None
    inputs: list[str] = []
    out: Optional[str] = None
    format: Literal['text', 'json'] = 'text'
    verbose: int = Field(0, ge=0)
    bound: Optional[int] = Field(None, ge=2)
    index: Optional[int] = Field(None, ge=1)
    n: Optional[int] = Field(None, ge=0)
    max_cosets: Optional[int] = Field(None, gt=0)
    max_seconds: Optional[float] = Field(None, gt=0)
    strategy: Literal[STRATEGIES] = 'hlt'
    subgroup: str = ''
    word: Optional[str] = None
    lambda_: str = Field('1/6', alias='lambda')
    transforms: bool = False
    block_base: Optional[int] = Field(None, ge=10)
    block_runs: Optional[int] = Field(None, ge=2)
    escalation: Optional[int] = Field(None, ge=2)
    max_rounds: Optional[int] = Field(None, ge=1)
    tietze_budget: Optional[int] = Field(None, ge=0)
    seed: Optional[str] = None
    oracle: bool = True

    model_config = {'populate_by_name': True}

    @field_validator('inputs')
    @classmethod
    def files_exist(cls, paths: list[str]) -> list[str]:
        for path in paths:
            if not os.path.isfile(path):
                raise ValueError(f"No such file: {path}")
        return paths

    @field_validator('lambda_')
    @classmethod
    def valid_fraction(cls, value: str) -> str:
        parse_fraction(value)
        return value

    @field_validator('seed')
    @classmethod
    def known_seed(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in SEEDS:
            raise ValueError(f"Unknown seed: {value} (expected one of {', '.join(SEEDS)})")
        return value

    def limits(self, seconds: Optional[float] = None) -> EnumerationLimits:
        settings = get_settings()
        return EnumerationLimits(max_cosets=self.max_cosets or settings.max_cosets,
                                 max_time=self.max_seconds or seconds or settings.max_seconds)

    def quotient_bound(self) -> int:
        return get_settings().quotient_bound if self.bound is None else self.bound

    def rips_parameters(self) -> RipsParameters:
        overrides = {'block_base': self.block_base, 'block_runs': self.block_runs,
                     'escalation_factor': self.escalation, 'max_rounds': self.max_rounds}
        return RipsParameters(**{key: value for key, value in overrides.items() if value is not None})


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=['text', 'json'], default='text')
    common.add_argument('--out', help='write output to this file instead of stdout')
    common.add_argument('-v', '--verbose', action='count', default=0)
    return common


def _rips_options(parser):
    parser.add_argument('--block-base', type=int)
    parser.add_argument('--block-runs', type=int)
    parser.add_argument('--escalation', type=int)
    parser.add_argument('--max-rounds', type=int)


def _limit_options(parser):
    parser.add_argument('--max-cosets', type=int)
    parser.add_argument('--max-seconds', type=float)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog='fpcert', description='Certified computations with finitely presented groups')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    for name, help_text in (('parse', 'parse and normalize a presentation'),
                            ('h1', 'abelianization of a presentation')):
        sub.add_parser(name, parents=[common], help=help_text).add_argument('file')

    snf = sub.add_parser('snf', parents=[common], help='Smith normal form of a matrix JSON file')
    snf.add_argument('file')
    snf.add_argument('--transforms', action='store_true')

    tc = sub.add_parser('tc', parents=[common], help='Todd-Coxeter coset enumeration')
    tc.add_argument('file')
    tc.add_argument('--subgroup', default='', help='comma-separated subgroup generators')
    tc.add_argument('--strategy', choices=STRATEGIES, default='hlt')
    _limit_options(tc)

    lowindex = sub.add_parser('lowindex', parents=[common], help='all subgroups of index <= N')
    lowindex.add_argument('file')
    lowindex.add_argument('--max-index', '--index', dest='index', type=int, required=True)
    _limit_options(lowindex)

    certify = sub.add_parser('certify', parents=[common], help='no non-trivial finite quotient of order <= B')
    certify.add_argument('file')
    certify.add_argument('--bound', type=int, required=True)
    _limit_options(certify)

    sc = sub.add_parser('sc-check', parents=[common], help="C'(lambda) small cancellation check")
    sc.add_argument('file')
    sc.add_argument('--lambda', dest='lambda_', default='1/6')

    dehn = sub.add_parser('dehn', parents=[common], help="Dehn's algorithm on a C'(1/6) presentation")
    dehn.add_argument('file')
    dehn.add_argument('--word', required=True)

    rips = sub.add_parser('rips', parents=[common], help='Rips construction')
    rips.add_argument('file')
    _rips_options(rips)

    pipeline = sub.add_parser('pipeline', parents=[common], help='check Q and build (Gamma, N)')
    pipeline.add_argument('variant', choices=['theorem-main'])
    pipeline.add_argument('--q', required=True)
    pipeline.add_argument('--bound', type=int, help='quotient bound B (default FPCERT_QUOTIENT_BOUND)')
    _rips_options(pipeline)
    _limit_options(pipeline)

    pair = sub.add_parser('pair', parents=[common], help='pairs A -> G')
    pair.add_argument('variant', choices=['gg', 'fp'])
    pair.add_argument('--q')
    pair.add_argument('--b')
    pair.add_argument('--gamma')
    pair.add_argument('--bound', type=int, help='quotient bound B (default FPCERT_QUOTIENT_BOUND)')
    _rips_options(pair)
    _limit_options(pair)

    fibre = sub.add_parser('fibre', parents=[common], help='generators of the fibre product P')
    fibre.add_argument('--gamma', required=True)

    ns = sub.add_parser('ns', parents=[common], help='the subgroup <N, gamma>')
    ns.add_argument('--gamma', required=True)
    ns.add_argument('--word', required=True)
    ns.add_argument('--no-oracle', dest='oracle', action='store_false')

    family = sub.add_parser('family', parents=[common], help='member n of the direct-factor family')
    family.add_argument('variant', choices=['gn'])
    family.add_argument('--seed', required=True)
    family.add_argument('--n', type=int, required=True)
    family.add_argument('--bound', type=int, help='quotient bound B (default FPCERT_QUOTIENT_BOUND)')
    family.add_argument('--tietze-budget', type=int)
    _rips_options(family)
    _limit_options(family)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    values = {key: value for key, value in vars(args).items() if value is not None}
    inputs = [values.pop(key) for key in ('file', 'q', 'b', 'gamma') if key in values]
    values['inputs'] = inputs
    if 'lambda_' in values:
        values['lambda'] = values.pop('lambda_')
    return RunConfig(**values)


def _read(path: str) -> str:
    with open(path, 'r', encoding='utf-8') as file:
        return file.read()


def _presentation(path: str) -> Presentation:
    return load_presentation(_read(path))


def _report_text(report: PairReport) -> str:
    lines = [f"{report.construction}: {report.status}",
             f"G: {len(report.g.generators)} generators, {len(report.g.relators)} relators",
             f"A ({report.a.label}): {', '.join(format_word(w) for w in report.a.subgroup_generators)}"]
    if report.b is not None:
        lines.append(f"B ({report.b.label}): {', '.join(format_word(w) for w in report.b.subgroup_generators)}")
    lines.extend(f"[{claim.status.value}] {claim.claim}" for claim in report.certificates)
    lines.extend(f"[{claim.status.value}] {claim.claim} (profinite)" for claim in report.profinite_claims)
    if report.direct_factor is not None:
        lines.append(f"direct factor: {report.direct_factor}")
    return '\n'.join(lines)


def _report(report: PairReport) -> tuple[dict, str]:
    return report.to_dict(), _report_text(report)


# --- subcommands -----------------------------------------------------------------

def cmd_parse(cfg: RunConfig) -> tuple[dict, str]:
    p = _presentation(cfg.inputs[0])
    return {'status': 'ok', 'presentation': p.to_record().model_dump(), 'digest': p.digest()}, \
        format_presentation(p)


def cmd_h1(cfg: RunConfig) -> tuple[dict, str]:
    factors = h1(_presentation(cfg.inputs[0]))
    return {'status': 'ok', 'h1': str(factors), **factors.model_dump()}, str(factors)


def cmd_snf(cfg: RunConfig) -> tuple[dict, str]:
    matrix = IntegerMatrix.from_record(MatrixRecord.model_validate_json(_read(cfg.inputs[0])))
    form = smith_normal_form(matrix, transforms=cfg.transforms)
    payload = {'status': 'ok', 'diagonal': [str(d) for d in form.diagonal]}
    if cfg.transforms:
        payload['left'] = form.left.to_record().model_dump()
        payload['right'] = form.right.to_record().model_dump()
    return payload, ' '.join(str(d) for d in form.diagonal)


def cmd_tc(cfg: RunConfig) -> tuple[dict, str]:
    p = _presentation(cfg.inputs[0])
    subgroup = parse_word_list(cfg.subgroup, p.alphabet)
    table = todd_coxeter(p, subgroup, cfg.limits(), cfg.strategy)
    problems = verify_coset_table(table, p, subgroup)
    status = 'ok' if not problems else 'failed'
    return {'status': status, 'index': table.index, 'problems': problems,
            'table': table.to_record().model_dump()}, f"index {table.index}"


def cmd_lowindex(cfg: RunConfig) -> tuple[dict, str]:
    p = _presentation(cfg.inputs[0])
    tables = low_index_subgroups(p, cfg.index, cfg.limits(get_settings().lowindex_seconds))
    lines = [f"{len(tables)} subgroup(s) of index <= {cfg.index}"]
    lines.extend(f"index {table.index}, conjugacy class {table.conjugacy_class}" for table in tables)
    return {'status': 'ok', 'count': len(tables),
            'subgroups': [table.to_record().model_dump() for table in tables]}, '\n'.join(lines)


def cmd_certify(cfg: RunConfig) -> tuple[dict, str]:
    p = _presentation(cfg.inputs[0])
    certificate = certify_no_finite_quotients(p, cfg.bound, cfg.limits(get_settings().lowindex_seconds))
    text = f"{certificate.status.value}: {certificate.claim}"
    if certificate.status == Status.REFUTED:
        text += f" (witness: subgroup of index {certificate.evidence['index']})"
    return certificate.model_dump(mode='json'), text


def cmd_sc_check(cfg: RunConfig) -> tuple[dict, str]:
    p = _presentation(cfg.inputs[0])
    target = parse_fraction(cfg.lambda_)
    report = sc_verify(p, target)
    status = 'pass' if report.passes else 'fail'
    text = f"lambda = {report.lambda_} {'<' if report.passes else '>='} {target}: {status}"
    return {'status': status, 'witness_rechecked': recheck_witness(report, p),
            'report': report.model_dump(mode='json', by_alias=True)}, text


def cmd_dehn(cfg: RunConfig) -> tuple[dict, str]:
    p = _presentation(cfg.inputs[0])
    w = parse_word(cfg.word, p.alphabet)
    solver = DehnSolver(p)
    reduced = solver.reduce(w)
    verdict = 'trivial' if reduced.is_identity() else 'non-trivial'
    return {'status': 'ok', 'word': format_word(w), 'reduced': format_word(reduced), 'verdict': verdict,
            'lengths': solver.history}, f"{format_word(reduced)}\n{verdict}"


def cmd_rips(cfg: RunConfig) -> tuple[dict, str]:
    out = rips_wise(_presentation(cfg.inputs[0]), cfg.rips_parameters())
    text = (f"Gamma: {len(out.gamma.generators)} generators, {len(out.gamma.relators)} relators, "
            f"lambda = {out.sc_report.lambda_} after {out.rounds} round(s)")
    return out.to_dict(), text


def cmd_pipeline(cfg: RunConfig) -> tuple[dict, str]:
    report = theorem_main_pipeline(_presentation(cfg.inputs[0]), cfg.quotient_bound(), cfg.rips_parameters(),
                                   limits=cfg.limits(get_settings().lowindex_seconds))
    return _report(report)


def cmd_pair(cfg: RunConfig) -> tuple[dict, str]:
    if cfg.variant == 'fp':
        if len(cfg.inputs) != 1:
            raise UsageError('pair fp needs --gamma')
        return _report(finitely_presented_pair(load_rips_output(_read(cfg.inputs[0]))))
    if len(cfg.inputs) != 2:
        raise UsageError('pair gg needs --q and --b')
    q, b = (_presentation(path) for path in cfg.inputs)
    return _report(goldstein_guralnick_pair(q, b, cfg.quotient_bound(), cfg.rips_parameters(),
                                            limits=cfg.limits(get_settings().lowindex_seconds)))


def cmd_fibre(cfg: RunConfig) -> tuple[dict, str]:
    marked = fibre_product_generators(load_rips_output(_read(cfg.inputs[0])))
    text = '\n'.join(format_word(w) for w in marked.subgroup_generators)
    return {'status': 'ok', 'p': marked.to_record().model_dump()}, text


def cmd_ns(cfg: RunConfig) -> tuple[dict, str]:
    out = load_rips_output(_read(cfg.inputs[0]))
    marked = nikolov_segal_subgroup(out, parse_word(cfg.word, out.gamma.alphabet), use_oracle=cfg.oracle)
    lines = [marked.label] + [f"[{claim.status.value}] {claim.claim}" for claim in marked.claims]
    return {'status': 'ok', 'subgroup': marked.to_record().model_dump()}, '\n'.join(lines)


def cmd_family(cfg: RunConfig) -> tuple[dict, str]:
    report = gn_family(SEEDS[cfg.seed], cfg.n, cfg.quotient_bound(), cfg.rips_parameters(),
                       tietze_budget=cfg.tietze_budget, limits=cfg.limits(get_settings().lowindex_seconds))
    return _report(report)


HANDLERS = {
    'parse': cmd_parse, 'h1': cmd_h1, 'snf': cmd_snf, 'tc': cmd_tc, 'lowindex': cmd_lowindex,
    'certify': cmd_certify, 'sc-check': cmd_sc_check, 'dehn': cmd_dehn, 'rips': cmd_rips,
    'pipeline': cmd_pipeline, 'pair': cmd_pair, 'fibre': cmd_fibre, 'ns': cmd_ns, 'family': cmd_family,
}


# --- output --------------------------------------------------------------------------

def write_atomic(path: str, text: str):
    """Write text to path through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, temporary = tempfile.mkstemp(dir=directory, prefix='.fpcert-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as file:
            file.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.unlink(temporary)
        raise


def _emit(payload: dict[str, Any], text: str, output_format: str, out: Optional[str]):
    rendered = json.dumps(payload, indent=2) if output_format == 'json' else text
    if out:
        write_atomic(out, rendered + '\n')
    else:
        print(rendered)


def _failure(status: str, message: str, **extra) -> dict[str, Any]:
    return {'status': status, 'error': message, **extra}


def _dump_report(report) -> Optional[dict]:
    return report.model_dump(mode='json', by_alias=True) if report is not None else None


def setup_logging(verbose: int):
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, get_settings().log_level)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s', force=True)


def run(argv=None) -> int:
    """Run one subcommand; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ValidationError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return INPUT_ERROR

    setup_logging(cfg.verbose)
    try:
        payload, text = HANDLERS[cfg.command](cfg)
    except ResourceExhausted as exc:
        payload, text = _failure('unknown', str(exc), cosets_reached=exc.cosets_reached,
                                 elapsed_ms=exc.elapsed_ms), f"unknown: {exc}"
    except HypothesisRefuted as exc:
        payload = _failure('refuted', str(exc), hypothesis=exc.hypothesis,
                           certificate=exc.certificate.model_dump(mode='json'),
                           checked=[claim.model_dump(mode='json') for claim in exc.checked])
        text = f"refuted: {exc.hypothesis}"
    except PreconditionRefuted as exc:
        payload = _failure('refuted', str(exc), certificate=exc.certificate.model_dump(mode='json'))
        text = f"refuted: {exc}"
    except PreconditionError as exc:
        payload = _failure('refuted', str(exc), sc_report=_dump_report(exc.report))
        text = f"precondition failed: {exc}"
    except ConstructionFailed as exc:
        payload = _failure('failed', str(exc), sc_report=_dump_report(exc.report))
        text = f"construction failed: {exc}"
    except (WordSyntaxError, AlphabetMismatchError, InvalidInput, ValidationError, ValueError, OSError,
            UsageError) as exc:
        logger.debug("input error", exc_info=True)
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR

    code = STATUS_CODES.get(payload.get('status'), INPUT_ERROR)
    try:
        _emit(payload, text, cfg.format, cfg.out)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return INPUT_ERROR
    return code


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()

"""
JSON API over the fpcert operations

Every endpoint takes a JSON body whose "presentation" field holds either the
text format or a JSON presentation record. Computed outcomes (including
refuted and unknown ones) come back with status 200; malformed requests get 400.
"""

import logging
from typing import Optional

from flask import Flask, jsonify, request
from flask_cors import CORS
from pydantic import BaseModel, Field, ValidationError

from config import get_settings
from constructions import SEEDS, HypothesisRefuted, gn_family, theorem_main_pipeline
from coset_enum import (
    EnumerationLimits, ResourceExhausted, certify_no_finite_quotients, low_index_subgroups, todd_coxeter,
    verify_coset_table,
)
from homology import IntegerMatrix, MatrixRecord, h1, smith_normal_form
from presentations import Presentation, format_presentation, load_presentation
from rips import ConstructionFailed, RipsParameters, rips_wise
from small_cancellation import DehnSolver, PreconditionError, parse_fraction, recheck_witness, sc_verify
from words import AlphabetMismatchError, WordSyntaxError, format_word, parse_word, parse_word_list

logger = logging.getLogger(__name__)

app = Flask(__name__)
CORS(app)

INPUT_ERRORS = (ValidationError, WordSyntaxError, AlphabetMismatchError, ValueError)


class PresentationRequest(BaseModel):
    presentation: str

    def parsed(self) -> Presentation:
        return load_presentation(self.presentation)


class WordRequest(PresentationRequest):
    word: str


class CosetRequest(PresentationRequest):
    subgroup: str = ''
    strategy: str = 'hlt'
    max_cosets: Optional[int] = Field(None, gt=0)


class IndexRequest(PresentationRequest):
    index: int = Field(ge=1)


class BoundRequest(PresentationRequest):
    bound: int = Field(ge=2)


class CancellationRequest(PresentationRequest):
    lambda_: str = Field('1/6', alias='lambda')


class RipsRequest(PresentationRequest):
    params: RipsParameters = Field(default_factory=RipsParameters)


class PipelineRequest(RipsRequest):
    bound: Optional[int] = Field(None, ge=2)


class FamilyRequest(BaseModel):
    seed: str
    n: int = Field(ge=0)
    bound: Optional[int] = Field(None, ge=2)
    tietze_budget: Optional[int] = Field(None, ge=0)
    params: RipsParameters = Field(default_factory=RipsParameters)


def _body(model):
    return model.model_validate(request.get_json(force=True, silent=True) or {})


def _limits(max_cosets: Optional[int] = None, seconds: Optional[float] = None) -> EnumerationLimits:
    settings = get_settings()
    return EnumerationLimits(max_cosets=max_cosets or settings.max_cosets, max_time=seconds or settings.max_seconds)


def _bound(bound: Optional[int]) -> int:
    return get_settings().quotient_bound if bound is None else bound


def _input_error(e: Exception):
    logger.info("rejected request: %s", e)
    return jsonify({'error': str(e)}), 400


def _unknown(e: ResourceExhausted):
    return jsonify({'status': 'unknown', 'error': str(e), 'cosets_reached': e.cosets_reached})


def _refused(e: HypothesisRefuted):
    return jsonify({'status': 'refuted', 'hypothesis': e.hypothesis,
                    'certificate': e.certificate.model_dump(mode='json'),
                    'checked': [claim.model_dump(mode='json') for claim in e.checked]})


@app.route('/api/parse', methods=['POST'])
def parse():
    try:
        p = _body(PresentationRequest).parsed()
        return jsonify({'status': 'ok', 'presentation': p.to_record().model_dump(),
                        'text': format_presentation(p), 'digest': p.digest()})
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/h1', methods=['POST'])
def abelianization():
    try:
        factors = h1(_body(PresentationRequest).parsed())
        return jsonify({'status': 'ok', 'h1': str(factors), **factors.model_dump()})
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/snf', methods=['POST'])
def snf():
    try:
        matrix = IntegerMatrix.from_record(_body(MatrixRecord))
        form = smith_normal_form(matrix, transforms=request.args.get('transforms') == '1')
        payload = {'status': 'ok', 'diagonal': [str(d) for d in form.diagonal]}
        if form.left is not None:
            payload['left'] = form.left.to_record().model_dump()
            payload['right'] = form.right.to_record().model_dump()
        return jsonify(payload)
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/tc', methods=['POST'])
def coset_enumeration():
    try:
        body = _body(CosetRequest)
        p = body.parsed()
        subgroup = parse_word_list(body.subgroup, p.alphabet)
        table = todd_coxeter(p, subgroup, _limits(body.max_cosets), body.strategy)
        return jsonify({'status': 'ok', 'index': table.index, 'problems': verify_coset_table(table, p, subgroup),
                        'table': table.to_record().model_dump()})
    except ResourceExhausted as e:
        return _unknown(e)
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/lowindex', methods=['POST'])
def lowindex():
    try:
        body = _body(IndexRequest)
        tables = low_index_subgroups(body.parsed(), body.index, _limits(seconds=get_settings().lowindex_seconds))
        return jsonify({'status': 'ok', 'count': len(tables),
                        'subgroups': [table.to_record().model_dump() for table in tables]})
    except ResourceExhausted as e:
        return _unknown(e)
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/certify', methods=['POST'])
def certify():
    try:
        body = _body(BoundRequest)
        certificate = certify_no_finite_quotients(body.parsed(), body.bound,
                                                  _limits(seconds=get_settings().lowindex_seconds))
        return jsonify(certificate.model_dump(mode='json'))
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/sc-check', methods=['POST'])
def small_cancellation_check():
    try:
        body = _body(CancellationRequest)
        p = body.parsed()
        report = sc_verify(p, parse_fraction(body.lambda_))
        return jsonify({'status': 'pass' if report.passes else 'fail',
                        'witness_rechecked': recheck_witness(report, p),
                        'report': report.model_dump(mode='json', by_alias=True)})
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/dehn', methods=['POST'])
def dehn():
    try:
        body = _body(WordRequest)
        p = body.parsed()
        w = parse_word(body.word, p.alphabet)
        solver = DehnSolver(p)
        reduced = solver.reduce(w)
        return jsonify({'status': 'ok', 'reduced': format_word(reduced),
                        'verdict': 'trivial' if reduced.is_identity() else 'non-trivial',
                        'lengths': solver.history})
    except PreconditionError as e:
        return jsonify({'status': 'refuted', 'error': str(e)})
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/rips', methods=['POST'])
def rips():
    try:
        body = _body(RipsRequest)
        return jsonify(rips_wise(body.parsed(), body.params).to_dict())
    except ConstructionFailed as e:
        return jsonify({'status': 'failed', 'error': str(e)})
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/pipeline', methods=['POST'])
def pipeline():
    try:
        body = _body(PipelineRequest)
        report = theorem_main_pipeline(body.parsed(), _bound(body.bound), body.params,
                                       limits=_limits(seconds=get_settings().lowindex_seconds))
        return jsonify(report.to_dict())
    except HypothesisRefuted as e:
        return _refused(e)
    except ConstructionFailed as e:
        return jsonify({'status': 'failed', 'error': str(e)})
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/family', methods=['POST'])
def family():
    try:
        body = _body(FamilyRequest)
        if body.seed not in SEEDS:
            return jsonify({'error': f"Unknown seed: {body.seed}"}), 404
        report = gn_family(SEEDS[body.seed], body.n, _bound(body.bound), body.params, tietze_budget=body.tietze_budget,
                           limits=_limits(seconds=get_settings().lowindex_seconds))
        return jsonify(report.to_dict())
    except HypothesisRefuted as e:
        return _refused(e)
    except ConstructionFailed as e:
        return jsonify({'status': 'failed', 'error': str(e)})
    except INPUT_ERRORS as e:
        return _input_error(e)


@app.route('/api/seeds', methods=['GET'])
def seeds():
    return jsonify([{'name': name, 'description': seed.description,
                     'has_oracle': seed.nontriviality_oracle is not None} for name, seed in SEEDS.items()])

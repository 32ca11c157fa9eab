import json
import random

import pytest
from pydantic import ValidationError

from conftest import TRIVIAL, random_word
from constructions import higman
from presentations import Presentation, parse_presentation
from rips import (
    NU_NAMES, ConstructionFailed, InvalidInput, RipsParameters, block_word, conjugation_relator_index,
    fresh_names, load_rips_output, project, recover_quotient, recovers, rewrite_conjugate, rips_wise,
)
from small_cancellation import SIXTH, recheck_witness
from words import Word, parse_word


def test_block_word_shape():
    w = block_word(NU_NAMES, 10, 20)
    assert len(w) == sum(range(10, 30)) + 20 + 1
    assert w.syllables()[:4] == [('nu1', 10), ('nu2', 1), ('nu1', 11), ('nu2', 1)]
    assert w.syllables()[-1] == ('nu3', 1)


def test_fresh_names():
    assert fresh_names(['a', 'b']) == NU_NAMES
    assert fresh_names(['nu1', 'nu2_1', 'nu2']) == ('nu1_1', 'nu2_2', 'nu3')


def test_higman_counts(higman_rips):
    assert len(higman_rips.gamma.generators) == 7
    assert len(higman_rips.gamma.relators) == 28
    assert higman_rips.gamma.generators[4:] == NU_NAMES
    assert higman_rips.nu == NU_NAMES


def test_trivial_counts(trivial_rips):
    assert len(trivial_rips.gamma.generators) == 4
    assert len(trivial_rips.gamma.relators) == 7


def test_higman_output_is_small_cancellation(higman_rips):
    report = higman_rips.sc_report
    assert report.passes_sixth
    assert report.lambda_ < SIXTH
    assert report.input_digest == higman_rips.gamma.digest()
    assert report.proper_powers == []
    assert recheck_witness(report, higman_rips.gamma)


def test_killing_nu_recovers_q(higman_rips):
    q = higman()
    recovered = recover_quotient(higman_rips.gamma, higman_rips.nu, q.generators)
    assert recovered.generators == q.generators
    assert recovered.relator_set() == q.relator_set()
    assert recovers(higman_rips.gamma, higman_rips.nu, q)


def test_conjugates_rewrite_to_block_words(higman_rips):
    params = higman_rips.params
    q = higman_rips.q_input
    for x in q.generators:
        for i in (1, 2, 3):
            for sign in (1, -1):
                rewritten = rewrite_conjugate(higman_rips, x, i, sign)
                index = conjugation_relator_index(q, x, i, sign)
                start = higman_rips.block_base_used + index * params.block_runs
                assert rewritten == block_word(higman_rips.nu, start, params.block_runs)
                assert rewritten.symbols() <= set(higman_rips.nu)


def test_certificates(higman_rips):
    statuses = {claim.claim: claim.status.value for claim in higman_rips.metadata}
    assert statuses["Gamma satisfies C'(1/6)"] == 'certified'
    assert statuses['N = <nu1, nu2, nu3> is normal in Gamma'] == 'certified'
    assert statuses['Gamma is hyperbolic'] == 'theorem-cited'
    assert statuses['Gamma is torsion-free'] == 'theorem-cited'
    assert all(claim.input_digest == higman().digest() for claim in higman_rips.metadata)


def test_rebuild_is_deterministic(trivial_rips):
    again = rips_wise.__wrapped__(parse_presentation(TRIVIAL))
    assert json.dumps(again.to_dict()) == json.dumps(trivial_rips.to_dict())


def test_projection(higman_rips):
    w = parse_word('nu1*a*nu2^3*b*nu3^-1', higman_rips.gamma.alphabet)
    assert project(higman_rips, w) == parse_word('a*b', higman_rips.q_input.alphabet)


def test_saved_output_round_trip(trivial_rips):
    saved = json.dumps(trivial_rips.to_dict())
    assert load_rips_output(saved).gamma == trivial_rips.gamma


def test_saved_output_mismatch(trivial_rips):
    data = trivial_rips.to_dict()
    data['gamma']['relators'][0] = 'a'
    with pytest.raises(InvalidInput):
        load_rips_output(json.dumps(data))
    with pytest.raises(ValidationError):
        load_rips_output('{"q": {"generators": ["a"], "relators": []}}')


def test_needs_a_generator():
    with pytest.raises(InvalidInput):
        rips_wise(Presentation([]))


def test_repeated_relators_are_kept():
    q = parse_presentation('< a, b | [a,b], b*a*b^-1*a^-1 >')
    out = rips_wise(q)
    assert out.q_input == q
    assert len(out.gamma.relators) == 2 + 6 * 2
    assert out.sc_report.passes_sixth
    assert recovers(out.gamma, out.nu, q)
    counts = next(claim for claim in out.metadata if claim.strategy == 'count')
    assert counts.evidence['relators'] == 14


def test_short_blocks_fail():
    params = RipsParameters(block_runs=2, max_rounds=2)
    with pytest.raises(ConstructionFailed) as info:
        rips_wise(parse_presentation(TRIVIAL), params)
    assert info.value.report is not None
    assert not info.value.report.passes_sixth


def test_parameter_bounds():
    with pytest.raises(ValidationError):
        RipsParameters(block_base=3)
    with pytest.raises(ValidationError):
        RipsParameters(escalation_factor=1)
    assert RipsParameters().block_runs == 20


def test_random_inputs_recover():
    rng = random.Random(3)
    for _ in range(20):
        names = ['x', 'y', 'z'][:rng.randint(1, 3)]
        relators = [random_word(rng, names, 8) for _ in range(rng.randint(1, 3))]
        q = Presentation(names, relators)
        out = rips_wise(q)
        assert out.sc_report.passes_sixth
        assert recovers(out.gamma, out.nu, out.q_input)
        assert out.q_input == q
        assert len(out.gamma.relators) == len(q.relators) + 6 * len(names)
        assert len(out.gamma.generators) == len(names) + 3
        assert project(out, Word.generator(out.nu[0])).is_identity()

import json
import os

import pytest

from cli import INPUT_ERROR, OK, REFUTED, UNKNOWN, run
from conftest import A4, A5, GENUS_2, TRIVIAL
from constructions import HIGMAN_CORRECTED

MALFORMED = [
    '< a, b | a*c >',
    '< a, a | a >',
    '< a | a^ >',
    '< a | a** >',
    'a, b | a',
    '< a | a',
    '< a | [a, ] >',
    '< a | (a >',
    '< a b | a >',
    '< a | a^x >',
    '< 1a | a >',
    '< a | a = >',
    '< a | a = = a >',
    '< a | a,, a >',
    '< a | a)>',
    '< a | a^99999999 >',
    '< a | a^-1^2 >',
    '< a, b | [a,b,a] >',
    '< a | a > trailing',
    '',
]


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write


def run_json(capsys, *argv):
    code = run([*argv, '--format', 'json'])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_parse(write, capsys):
    code, data = run_json(capsys, 'parse', write('g.txt', '< a, b | a*b = b*a >'))
    assert code == OK
    assert data['presentation'] == {'generators': ['a', 'b'], 'relators': ['a*b*a^-1*b^-1']}
    assert len(data['digest']) == 64


def test_h1_text(write, capsys):
    assert run(['h1', write('g.txt', GENUS_2)]) == OK
    assert capsys.readouterr().out.strip() == 'Z^4'


def test_snf_with_transforms(write, capsys):
    path = write('m.json', '{"rows": 2, "cols": 2, "entries": ["2", "4", "6", "8"]}')
    code, data = run_json(capsys, 'snf', path, '--transforms')
    assert code == OK
    assert data['diagonal'] == ['2', '4']
    assert data['left']['rows'] == 2


def test_tc(write, capsys):
    code, data = run_json(capsys, 'tc', write('a4.txt', A4), '--strategy', 'felsch')
    assert code == OK
    assert data['index'] == 12
    assert data['problems'] == []
    code, data = run_json(capsys, 'tc', write('a4.txt', A4), '--subgroup', 'a, b')
    assert data['index'] == 1


def test_tc_hits_coset_limit(write, capsys):
    code, data = run_json(capsys, 'tc', write('f2.txt', '< a, b | >'), '--max-cosets', '20')
    assert code == UNKNOWN
    assert data['status'] == 'unknown'


def test_lowindex(write, capsys):
    code, data = run_json(capsys, 'lowindex', write('f2.txt', '< a, b | >'), '--index', '2')
    assert code == OK
    assert data['count'] == 3
    code, data = run_json(capsys, 'lowindex', write('a4.txt', A4), '--max-index', '4')
    assert code == OK
    assert data['count'] == 5


def test_certify(write, capsys):
    code, data = run_json(capsys, 'certify', write('z.txt', '< a | >'), '--bound', '2')
    assert code == REFUTED
    assert data['status'] == 'refuted'
    assert data['evidence']['index'] == 2
    assert data['evidence']['witness']['index'] == 2
    assert set(data) == {'claim', 'bound', 'status', 'strategy', 'runtime_ms', 'input_digest', 'evidence'}
    code, data = run_json(capsys, 'certify', write('a5.txt', A5), '--bound', '4')
    assert code == OK
    assert data['status'] == 'certified'
    assert data['bound'] == 4


def test_sc_check(write, capsys):
    code, data = run_json(capsys, 'sc-check', write('g.txt', GENUS_2))
    assert code == OK
    assert data['report']['lambda'] == '1/8'
    assert data['witness_rechecked'] is True
    code, data = run_json(capsys, 'sc-check', write('p.txt', '< a, b | (a*b)^3 >'))
    assert code == REFUTED
    assert data['status'] == 'fail'
    assert run(['sc-check', write('g.txt', GENUS_2), '--lambda', '1/9']) == REFUTED


def test_dehn(write, capsys):
    path = write('g.txt', GENUS_2)
    code, data = run_json(capsys, 'dehn', path, '--word', '[c,d]*[a,b]')
    assert code == OK
    assert data['verdict'] == 'trivial'
    code, data = run_json(capsys, 'dehn', path, '--word', 'a*b')
    assert data['verdict'] == 'non-trivial'
    code, data = run_json(capsys, 'dehn', write('p.txt', '< a, b | (a*b)^3 >'), '--word', 'a')
    assert code == REFUTED
    assert data['sc_report']['lambda'] == '5/6'


def test_pipeline_refusal(write, capsys):
    code, data = run_json(capsys, 'pipeline', 'theorem-main', '--q', write('a5.txt', A5), '--bound', '5')
    assert code == REFUTED
    assert data['hypothesis'] == 'no-finite-quotients'


def test_pipeline_refuses_free_cyclic_seed(write, capsys):
    code, data = run_json(capsys, 'pipeline', 'theorem-main', '--q', write('z.txt', '< a | >'), '--bound', '2')
    assert code == REFUTED
    assert data['hypothesis'] == 'no-finite-quotients'
    assert data['certificate']['evidence']['index'] == 2
    assert [claim['claim'] for claim in data['checked']] == ['H1(Q) = 0']


def test_pair_gg_uses_default_bound(write, capsys):
    code, data = run_json(capsys, 'pair', 'gg', '--q', write('higman.txt', HIGMAN_CORRECTED),
                          '--b', write('z.txt', '< t | >'))
    assert code == OK
    assert data['status'] == 'ok'
    claims = [claim['claim'] for claim in data['certificates']]
    assert 'no non-trivial finite quotient of order <= 6' in claims


def test_family_uses_default_bound(capsys):
    code, data = run_json(capsys, 'family', 'gn', '--seed', 'trivial', '--n', '1')
    assert code == OK
    assert data['direct_factor'] == 'yes'
    claims = [claim['claim'] for claim in data['certificates']]
    assert 'no non-trivial finite quotient of order <= 6' in claims


def test_family(capsys):
    code, data = run_json(capsys, 'family', 'gn', '--seed', 'trivial', '--n', '3', '--bound', '2')
    assert code == OK
    assert data['direct_factor'] == 'yes'
    assert data['status'] == 'ok'
    code, data = run_json(capsys, 'family', 'gn', '--seed', 'trivial', '--n', '3', '--bound', '2',
                          '--tietze-budget', '0')
    assert code == UNKNOWN
    assert data['direct_factor'] == 'unknown'


def test_rips_output_feeds_other_commands(write, tmp_path, capsys):
    saved = tmp_path / 'gamma.json'
    assert run(['rips', write('q.txt', TRIVIAL), '--format', 'json', '--out', str(saved)]) == OK
    assert capsys.readouterr().out == ''
    data = json.loads(saved.read_text(encoding='utf-8'))
    assert data['status'] == 'ok'
    assert len(data['gamma']['generators']) == 4
    assert [name for name in os.listdir(tmp_path) if name.startswith('.fpcert-')] == []

    code, fibre = run_json(capsys, 'fibre', '--gamma', str(saved))
    assert code == OK
    assert len(fibre['p']['generators']) == 7

    code, refused = run_json(capsys, 'ns', '--gamma', str(saved), '--word', 'a')
    assert code == REFUTED
    assert refused['status'] == 'refuted'

    code, report = run_json(capsys, 'pair', 'fp', '--gamma', str(saved))
    assert code == OK
    assert report['construction'] == 'finitely-presented'


def test_tampered_rips_output_is_input_error(write, tmp_path, capsys):
    saved = tmp_path / 'gamma.json'
    assert run(['rips', write('q.txt', TRIVIAL), '--format', 'json', '--out', str(saved)]) == OK
    data = json.loads(saved.read_text(encoding='utf-8'))
    data['gamma']['relators'][0] = 'a'
    saved.write_text(json.dumps(data), encoding='utf-8')
    assert run(['fibre', '--gamma', str(saved)]) == INPUT_ERROR


@pytest.mark.parametrize('text', MALFORMED)
def test_malformed_presentations(write, capsys, text):
    assert run(['parse', write('bad.txt', text)]) == INPUT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ''
    assert 'line ' in captured.err and 'column ' in captured.err


@pytest.mark.parametrize('argv', [
    ['h1', 'no-such-file.txt'],
    ['certify', 'FILE', '--bound', '1'],
    ['sc-check', 'FILE', '--lambda', '7/6'],
    ['family', 'gn', '--seed', 'nonsense', '--n', '1', '--bound', '2'],
    ['rips', 'FILE', '--block-base', '3'],
    ['tc', 'FILE', '--strategy', 'random'],
    ['frobnicate'],
    [],
])
def test_bad_arguments(write, argv):
    path = write('g.txt', GENUS_2)
    assert run([path if arg == 'FILE' else arg for arg in argv]) == INPUT_ERROR


def test_bad_word_is_input_error(write, capsys):
    assert run(['dehn', write('g.txt', GENUS_2), '--word', 'a*x']) == INPUT_ERROR
    assert 'line 1, column 3' in capsys.readouterr().err

import json

import pytest

from main import main, EXAMPLES, EXIT_OK, EXIT_FAILURES, EXIT_INPUT
from storage import ReportStorage


def generate(tmp_path, example):
    path = tmp_path / f"{example}.json"
    assert main(['--no-banner', 'generate', example, '-o', str(path)]) == EXIT_OK
    return str(path)


@pytest.mark.parametrize('example', ['sierpinski', 'chain3', 'constant-sierpinski', 'homeo-discrete2', 'pair2'])
def test_validate_generated_examples(report_dir, tmp_path, example):
    assert main(['--no-banner', 'validate', generate(tmp_path, example)]) == EXIT_OK


def test_every_example_can_be_generated(report_dir, tmp_path):
    for example in EXAMPLES:
        path = generate(tmp_path, example)
        with open(path, encoding='utf-8') as f:
            assert isinstance(json.load(f), dict)


def test_check_passes_on_homeo_of_discrete_space(report_dir, tmp_path):
    path = generate(tmp_path, 'homeo-discrete2')
    assert main(['--no-banner', 'check', path, '--suite', 'def21']) == EXIT_OK


def test_check_fails_on_homeo_of_sierpinski(report_dir, tmp_path, capsys):
    path = generate(tmp_path, 'homeo-sierpinski')
    capsys.readouterr()
    assert main(['--json', 'check', path, '--suite', 'def21']) == EXIT_FAILURES
    data = json.loads(capsys.readouterr().out)
    statuses = {r['name']: r['status'] for r in data['results']}
    assert statuses['def21.condition_2'] == 'fail'


def test_roundtrip_of_pair_groupoid(report_dir, tmp_path):
    path = generate(tmp_path, 'pair2')
    assert main(['--no-banner', 'roundtrip', path, '--direction', 'g2p2g']) == EXIT_OK


def test_roundtrip_of_non_etale_groupoid_fails(report_dir, tmp_path):
    path = generate(tmp_path, 'coarse-unit2')
    assert main(['--no-banner', 'roundtrip', path, '--direction', 'g2p2g']) == EXIT_FAILURES


def test_roundtrip_direction_must_match_the_file(report_dir, tmp_path):
    path = generate(tmp_path, 'pair2')
    assert main(['--no-banner', 'roundtrip', path, '--direction', 'p2g2p']) == EXIT_INPUT


def test_malformed_json_is_an_input_error(report_dir, tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"points": [0, 1', encoding='utf-8')
    assert main(['--no-banner', 'validate', str(path)]) == EXIT_INPUT
    assert main(['--no-banner', 'check', str(path), '--suite', 'def21']) == EXIT_INPUT


def test_unknown_structure_is_an_input_error(report_dir, tmp_path):
    path = tmp_path / 'other.json'
    path.write_text('{"colour": "blue"}', encoding='utf-8')
    assert main(['--no-banner', 'validate', str(path)]) == EXIT_INPUT


def test_unknown_suite_is_an_input_error(report_dir, tmp_path):
    path = generate(tmp_path, 'homeo-discrete2')
    assert main(['--no-banner', 'check', path, '--suite', 'nonexistent']) == EXIT_INPUT


def test_unknown_example_is_an_input_error(report_dir, tmp_path):
    assert main(['--no-banner', 'generate', 'klein-bottle', '-o', str(tmp_path / 'x.json')]) == EXIT_INPUT


def test_dot_of_sierpinski(report_dir, tmp_path):
    path = generate(tmp_path, 'sierpinski')
    output = tmp_path / 'sierpinski.dot'
    assert main(['--no-banner', 'dot', path, '--kind', 'space', '-o', str(output)]) == EXIT_OK
    text = output.read_text(encoding='utf-8')
    assert '1 -> 0;' in text
    assert text.startswith('digraph')


def test_dot_of_groupoid_arrows(report_dir, tmp_path):
    path = generate(tmp_path, 'pair2')
    output = tmp_path / 'pair2.dot'
    assert main(['--no-banner', 'dot', path, '--kind', 'groupoid', '-o', str(output)]) == EXIT_OK
    assert output.read_text(encoding='utf-8').count('->') == 4


def test_json_report_and_storage(report_dir, tmp_path, capsys):
    path = generate(tmp_path, 'homeo-discrete2')
    capsys.readouterr()
    assert main(['--json', 'check', path, '--suite', 'def21']) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert set(data) == {'command', 'target', 'results', 'instance_digests', 'summary', 'counts', 'digest',
                         'timing'}
    assert data['counts'] == {'pass': len(data['results'])}

    storage = ReportStorage(str(report_dir))
    assert storage.has_digest(data['digest'])
    assert storage.load(data['digest'])['digest'] == data['digest']
    assert storage.get_stats()['commands'] == {'check': 1}


def test_same_input_gives_the_same_digest(report_dir, tmp_path, capsys):
    path = generate(tmp_path, 'pair2')
    digests = []
    for _ in range(2):
        capsys.readouterr()
        assert main(['--json', 'validate', path]) == EXIT_OK
        digests.append(json.loads(capsys.readouterr().out)['digest'])
    assert digests[0] == digests[1]


def test_explicit_report_path(report_dir, tmp_path):
    path = generate(tmp_path, 'sierpinski')
    output = tmp_path / 'out' / 'report.json'
    assert main(['--no-banner', '--report', str(output), 'validate', path]) == EXIT_OK
    with open(output, encoding='utf-8') as f:
        assert json.load(f)['command'] == 'validate'


# Malformed tables ------------------------------------------------------------

def rewrite(path, edit):
    with open(path, encoding='utf-8') as f:
        data = json.load(f)
    edit(data)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f)
    return path


def validate_input_error(path, capsys):
    capsys.readouterr()
    assert main(['--json', 'validate', path]) == EXIT_INPUT
    data = json.loads(capsys.readouterr().out)
    (result,) = data['results']
    assert result['name'] == 'input'
    assert result['status'] == 'error'
    assert result['witness']['error'] == 'SchemaError'
    return result['witness']['witness']


def test_restriction_to_undeclared_section(report_dir, tmp_path, capsys):
    path = tmp_path / 'presheaf.json'
    path.write_text(json.dumps({
        'space': {'points': [0], 'opens': [[], [0]]},
        'sections': {'[]': ['*'], '[0]': ['a']},
        'restrictions': {'[0]/[]': {'a': 'zz'}},
    }), encoding='utf-8')
    witness = validate_input_error(str(path), capsys)
    assert witness['id'] == 'zz'
    assert witness['field'] == 'presheaf.restrictions.[0]/[]'


def test_undeclared_inclusion(report_dir, tmp_path, capsys):
    def edit(data):
        data['incl']['[0]/[0]'] = 'nope'

    path = rewrite(generate(tmp_path, 'homeo-discrete2'), edit)
    witness = validate_input_error(path, capsys)
    assert witness == {'field': 'pseudogroup.incl.[0]/[0]', 'id': 'nope'}


def test_undeclared_composite(report_dir, tmp_path, capsys):
    def edit(data):
        table = data['compose']['[0,1]/[0,1]/[0,1]']
        table[sorted(table)[0]] = 'nope'

    path = rewrite(generate(tmp_path, 'homeo-discrete2'), edit)
    witness = validate_input_error(path, capsys)
    assert witness['field'] == 'pseudogroup.compose.[0,1]/[0,1]/[0,1]'
    assert witness['id'] == 'nope'


def test_undeclared_composition_key(report_dir, tmp_path, capsys):
    def edit(data):
        data['compose']['[0,1]/[0,1]/[0,1]']['ghost,ghost'] = data['incl']['[0,1]/[0,1]']

    path = rewrite(generate(tmp_path, 'homeo-discrete2'), edit)
    assert validate_input_error(path, capsys)['id'] == 'ghost'


def test_missing_underlying_map(report_dir, tmp_path, capsys):
    def edit(data):
        data['underlying']['[0,1]/[0,1]'] = {}

    path = rewrite(generate(tmp_path, 'homeo-sierpinski'), edit)
    witness = validate_input_error(path, capsys)
    assert witness['field'] == 'pseudogroup.underlying.[0,1]/[0,1]'


@pytest.mark.parametrize('labels', [['x'], {'a': 'x'}])
def test_malformed_groupoid_labels(report_dir, tmp_path, capsys, labels):
    def edit(data):
        data['labels'] = labels

    path = rewrite(generate(tmp_path, 'pair2'), edit)
    assert validate_input_error(path, capsys)['field'] == 'groupoid.labels'

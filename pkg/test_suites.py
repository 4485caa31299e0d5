import pytest

from corpus import PSEUDOGROUP, GROUPOID, CorpusInstance, build_corpus
from corpus.mutations import build_mutations, MUTATION_NAMES
from groupoids.groupoid import pair_groupoid
from pseudogroups.pseudogroup import build_homeo_l, injective_truncation
from suites import SuiteManager, summarize, apply_expectations, category_cost
from suites.batteries import mutation_results
from utils.config import Config
from utils.errors import SuiteUnavailable
from utils.reporting import CheckResult, Report, PASS, FAIL, SKIPPED


@pytest.fixture
def config(report_dir):
    return Config()


@pytest.fixture
def manager(config):
    return SuiteManager(config)


@pytest.fixture
def homeo2(discrete2):
    return build_homeo_l(discrete2)


def test_all_suites_enabled_by_default(manager):
    assert manager.get_enabled_suites() == manager.get_available_suites()


@pytest.mark.parametrize('suite', ['def21', 'prop11', 'prop24', 'prop25'])
def test_suites_pass_on_homeo_of_discrete_space(manager, homeo2, suite):
    results = manager.run_suite(suite, homeo2, PSEUDOGROUP)
    assert results
    assert all(r.status == PASS for r in results), [r.to_dict() for r in results]
    assert all(r.name.startswith(f"{suite}.") for r in results)


def test_sheafification_suites_on_truncation(manager, homeo2):
    truncated = injective_truncation(homeo2)
    for suite in ('prop45', 'universality'):
        results = manager.run_suite(suite, truncated, PSEUDOGROUP)
        assert all(r.status == PASS for r in results), [r.to_dict() for r in results]


def test_unknown_suite(manager, homeo2):
    with pytest.raises(SuiteUnavailable):
        manager.run_suite('prop99', homeo2, PSEUDOGROUP)


def test_suite_refuses_other_kinds(manager):
    with pytest.raises(SuiteUnavailable):
        manager.run_suite('def21', pair_groupoid(2), GROUPOID)


def test_sheafification_suite_needs_t1(manager, sierpinski):
    with pytest.raises(SuiteUnavailable):
        manager.run_suite('prop45', build_homeo_l(sierpinski), PSEUDOGROUP)


def test_category_budget_skips(config, homeo2):
    assert category_cost(homeo2) > 1
    config.category_budget = 1
    results = SuiteManager(config).run_suite('def21', homeo2, PSEUDOGROUP)
    assert [(r.name, r.status) for r in results] == [('def21.budget', SKIPPED)]
    assert results[0].witness['witness']['budget'] == 1


def test_expected_failures_become_passes():
    instance = CorpusInstance('presheaf', PSEUDOGROUP, None, tags=('pre',))
    results = apply_expectations(instance, [
        CheckResult(name='def21.condition_1', status=PASS),
        CheckResult(name='def21.condition_4', status=FAIL),
    ])
    assert [r.status for r in results] == [PASS, PASS]
    assert results[1].details['expected'] == 'fail'


def test_missing_expected_failure_is_flagged():
    instance = CorpusInstance('presheaf', PSEUDOGROUP, None, tags=('pre',))
    results = apply_expectations(instance, [
        CheckResult(name='def21.condition_4', status=PASS),
        CheckResult(name='prop11.condition_1', status=PASS),
    ])
    statuses = {r.name: r.status for r in results}
    assert statuses['def21.condition_4'] == FAIL
    assert statuses['prop11.condition_3'] == FAIL


def test_summarize_groups_by_suite():
    table = summarize([
        CheckResult(name='a/def21.condition_1', status=PASS),
        CheckResult(name='b/def21.condition_4', status=FAIL),
        CheckResult(name='mutation.broken_unit', status=PASS),
    ])
    assert table == {'def21': {'pass': 1, 'fail': 1}, 'mutation': {'pass': 1}}


def test_mutations_are_detected():
    results = mutation_results(7)
    assert len(results) == len(MUTATION_NAMES) == 10
    assert all(r.status == PASS for r in results), [r.to_dict() for r in results if r.status != PASS]


def test_mutations_depend_only_on_the_seed():
    first = [m.description for m in build_mutations(3)]
    second = [m.description for m in build_mutations(3)]
    assert first == second


def test_corpus_report_is_reproducible(config):
    config.max_points = 2
    config.exhaustive_max_points = 2
    config.exhaustive_max_arrows = 4
    config.random_groupoids = 5
    config.random_presheaves = 5
    config.workers = 2
    manager = SuiteManager(config)
    digests = set()
    for parallel in (False, True):
        results = manager.run_corpus(build_corpus(config), parallel=parallel)
        digests.add(Report(command='corpus', target='seed', results=results).digest())
    assert len(digests) == 1


# Configuration -------------------------------------------------------------

def test_config_file_overrides_environment(report_dir, monkeypatch):
    monkeypatch.setenv('SEED', '11')
    config = Config()
    assert config.seed == 11
    config.max_points = 3
    config.save_to_file()
    monkeypatch.setenv('SEED', '12')
    reloaded = Config()
    assert reloaded.seed == 11
    assert reloaded.max_points == 3


def test_config_validation(report_dir, monkeypatch):
    monkeypatch.setenv('ENABLED_SUITES', 'def21, prop99')
    monkeypatch.setenv('COVER_BUDGET', '0')
    config = Config()
    assert config.enabled_suites == ['def21', 'prop99']
    issues = config.validate()
    assert 'COVER_BUDGET must be positive' in issues
    assert 'Unknown suites: prop99' in issues

import pytest

from topology.finspace import sierpinski_space, discrete_space, chain_space

# examples/ is reference material; test_system.py is run as a script
collect_ignore = ['examples', 'test_system.py']


@pytest.fixture
def sierpinski():
    return sierpinski_space()


@pytest.fixture
def discrete2():
    return discrete_space(2)


@pytest.fixture
def chain3():
    return chain_space(3)


@pytest.fixture
def report_dir(tmp_path, monkeypatch):
    """Keep cli reports and config lookups inside the test's temp dir."""
    directory = tmp_path / 'reports'
    monkeypatch.setenv('REPORT_DIR', str(directory))
    monkeypatch.chdir(tmp_path)
    return directory

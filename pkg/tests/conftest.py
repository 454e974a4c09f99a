import pytest

from lplm import bundled_grammar_path
from lplm.grammar import load_grammar_file


@pytest.fixture(scope="session")
def english():
    return load_grammar_file(bundled_grammar_path("english.gr"))


@pytest.fixture(scope="session")
def example():
    return load_grammar_file(bundled_grammar_path("example.gr"))


@pytest.fixture(scope="session")
def fig1():
    return load_grammar_file(bundled_grammar_path("fig1.gr"))


@pytest.fixture(scope="session")
def amb():
    return load_grammar_file(bundled_grammar_path("amb.gr"))


@pytest.fixture(scope="session")
def mini():
    return load_grammar_file(bundled_grammar_path("mini.gr"))

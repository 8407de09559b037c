# Shared nets and processes for the test suites
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from compat import process_of  # noqa: E402
from net_io import load_net, load_process  # noqa: E402
from random_nets import random_corpus  # noqa: E402
from reachability import ExplorationBudget  # noqa: E402

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"

CORPUS_SEED = 7
SMALL_BUDGET = ExplorationBudget(max_markings=200, max_depth=8)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def net_fig1():
    """Three transitions sharing p1, plus d feeding p1 back"""
    return load_net(FIXTURES / "fig1.net")


@pytest.fixture(scope="session")
def net_fig2():
    return load_net(FIXTURES / "fig2.net")


@pytest.fixture(scope="session")
def net_triv():
    return load_net(FIXTURES / "triv.net")


@pytest.fixture(scope="session")
def net_w2():
    return load_net(FIXTURES / "w2.net")


@pytest.fixture(scope="session")
def net_self():
    return load_net(FIXTURES / "self.net")


@pytest.fixture(scope="session")
def p1(net_fig1):
    """processOf(abdc): b takes the initial p1 token, c the one produced by d"""
    return process_of(net_fig1, "abdc")


@pytest.fixture(scope="session")
def p2(net_fig1):
    """processOf(adcb): c takes the initial p1 token, b the one produced by d"""
    return process_of(net_fig1, "adcb")


@pytest.fixture(scope="session")
def p1_from_file(net_fig1):
    return load_process(FIXTURES / "fig1_p1.json", net_fig1)


@pytest.fixture(scope="session")
def p2_from_file(net_fig1):
    return load_process(FIXTURES / "fig1_p2.json", net_fig1)


@pytest.fixture(scope="session")
def named_nets(net_fig1, net_fig2, net_triv, net_w2):
    return [net_fig1, net_fig2, net_triv, net_w2]


@pytest.fixture(scope="session")
def small_corpus():
    return random_corpus(12, seed=CORPUS_SEED, max_places=3, max_transitions=3)


@pytest.fixture(scope="session")
def full_corpus():
    return random_corpus(100, seed=CORPUS_SEED, max_places=3, max_transitions=3)


@pytest.fixture
def rng():
    return np.random.default_rng(CORPUS_SEED)


@pytest.fixture
def budget():
    return SMALL_BUDGET

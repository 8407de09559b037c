# Seeded random nets for property checks and `verify --random`
from typing import List, Optional
import logging
import os

import numpy as np

from net_model import Net, TransitionSpec, validate

logger = logging.getLogger(__name__)

RANDOM_NET_CONFIG = {
    'MAX_PLACES': int(os.getenv('PROCNET_RANDOM_MAX_PLACES', '4')),
    'MAX_TRANSITIONS': int(os.getenv('PROCNET_RANDOM_MAX_TRANSITIONS', '4')),
    'MAX_WEIGHT': int(os.getenv('PROCNET_RANDOM_MAX_WEIGHT', '2')),
    'MAX_TOKENS': int(os.getenv('PROCNET_RANDOM_MAX_TOKENS', '2')),
    'SEED': int(os.getenv('PROCNET_SEED', '20240601')),
}


def _arcs(rng: np.random.Generator, places: List[str], count: int, max_weight: int) -> dict:
    chosen = rng.choice(len(places), size=count, replace=False)
    return {places[int(i)]: int(rng.integers(1, max_weight + 1)) for i in sorted(chosen)}


def random_net(rng: np.random.Generator,
               max_places: int = RANDOM_NET_CONFIG['MAX_PLACES'],
               max_transitions: int = RANDOM_NET_CONFIG['MAX_TRANSITIONS'],
               max_weight: int = RANDOM_NET_CONFIG['MAX_WEIGHT'],
               max_tokens: int = RANDOM_NET_CONFIG['MAX_TOKENS'],
               name: str = "random") -> Net:
    """Draw a valid net: every transition has at least one preplace, s0 starts marked and M0 enables t0"""
    n_places = int(rng.integers(1, max_places + 1))
    n_transitions = int(rng.integers(1, max_transitions + 1))
    places = [f"s{i}" for i in range(n_places)]
    tokens = {s: int(rng.integers(0, max_tokens + 1)) for s in places}
    tokens["s0"] = max(tokens["s0"], 1)
    transitions = {}
    marked = [s for s in places if tokens[s]]
    for j in range(n_transitions):
        if j == 0:
            # t0 draws from marked places with weights the tokens cover, so M0 enables it
            inputs = _arcs(rng, marked, int(rng.integers(1, len(marked) + 1)), max_weight)
            inputs = {s: min(w, tokens[s]) for s, w in inputs.items()}
        else:
            inputs = _arcs(rng, places, int(rng.integers(1, n_places + 1)), max_weight)
        outputs = _arcs(rng, places, int(rng.integers(0, n_places + 1)), max_weight)
        transitions[f"t{j}"] = TransitionSpec(inputs=inputs, outputs=outputs)
    net = Net(name=name, places=tokens, transitions=transitions)
    violations = validate(net)
    if violations:
        raise RuntimeError(f"random net generator produced an invalid net: {violations}")
    return net


def random_corpus(count: int, seed: Optional[int] = None, **limits) -> List[Net]:
    """Deterministic list of random nets for a given seed"""
    seed = RANDOM_NET_CONFIG['SEED'] if seed is None else seed
    rng = np.random.default_rng(seed)
    corpus = [random_net(rng, name=f"random-{seed}-{i}", **limits) for i in range(count)]
    logger.info("Generated %d random nets with seed %d", count, seed)
    return corpus


def uncountable_analogue_net(n: int) -> Net:
    """n transitions, each with a private one-token place and a loop on a shared two-token place.

    Finite stand-in for the net whose largest process fails to exist only because
    it has uncountably many transitions; with finitely many, one always exists.
    """
    if n < 1:
        raise ValueError("need at least one transition")
    places = {"shared": 2}
    transitions = {}
    for i in range(n):
        places[f"q{i}"] = 1
        transitions[f"t{i}"] = TransitionSpec(inputs={f"q{i}": 1, "shared": 1}, outputs={"shared": 1})
    return Net(name=f"analogue-{n}", places=places, transitions=transitions)

"""Shared fixtures: bundled automata, analyzed results, hypothesis profile."""

from importlib.resources import files

import pytest
from hypothesis import HealthCheck, settings

from autperm import Dfao, analyze, load_automaton, scc_decompose

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

BUNDLED = (
    "thue_morse",
    "rudin_shapiro",
    "five_state",
    "six_state",
    "mod3_residue",
    "base3_nonsync",
)
CONNECTED = BUNDLED[:5]


def example_path(name: str) -> str:
    return str(files("autperm").joinpath("examples", name + ".json"))


@pytest.fixture(scope="session")
def ex() -> dict[str, Dfao]:
    return {name: load_automaton(example_path(name)) for name in BUNDLED}


@pytest.fixture(scope="session")
def base3_component(ex) -> Dfao:
    a = ex["base3_nonsync"]
    comp = scc_decompose(a).final_components()[0]
    return a.restrict(comp, min(comp))


@pytest.fixture(scope="session")
def results(ex, base3_component):
    """analyze() once per strongly connected example; reused everywhere."""
    out = {name: analyze(ex[name]) for name in CONNECTED}
    out["base3_component"] = analyze(base3_component)
    return out


def make_dfao(k: int, delta, outputs=None, initial: int = 0) -> Dfao:
    n = len(delta)
    return Dfao(
        k=k,
        states=tuple(f"s{i}" for i in range(n)),
        delta=tuple(tuple(r) for r in delta),
        initial=initial,
        output=tuple(outputs) if outputs else tuple(str(i) for i in range(n)),
        embedding=None,
    )

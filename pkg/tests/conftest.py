import os
import sys
from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

from padebrocard.forge import build_family, make_context  # noqa: E402
from padebrocard.pade import build_initial_pade, make_config  # noqa: E402


@lru_cache(maxsize=None)
def built(r: int, D: int, eps0: str, beta1=None, beta2=None, M=None):
    beta1 = r if beta1 is None else beta1
    beta2 = 2 * r if beta2 is None else beta2
    M = beta2 if M is None else M
    cfg = make_config(r, beta1, beta2, M, D, Fraction(eps0))
    return cfg, build_initial_pade(cfg)


@lru_cache(maxsize=None)
def derived(r: int, D: int, eps0: str, k_max: int):
    cfg, triple = built(r, D, eps0)
    ctx = make_context(r, cfg.M_cap, cfg.beta1, cfg.beta2)
    return cfg, triple, ctx, build_family(ctx, triple, k_max)


@pytest.fixture(scope="session")
def build():
    return built


@pytest.fixture(scope="session")
def derive():
    return derived


def pytest_terminal_summary(terminalreporter):
    verdicts = getattr(sys.modules.get("test_acceptance"), "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        title, ok, note = verdicts[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {note}")

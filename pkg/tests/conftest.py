"""Shared fixtures, random parameter draws, and the acceptance summary hook."""

import numpy as np
import pytest

from orbitq import SystemParams, check_stability

# The benchmark parameter set used across the suite: stable, strongly
# pooled and strongly balanced, with pooled load 0.7636.
BENCH = SystemParams(0.15, 0.05, 0.01, 0.44, 0.25, 0.1)

# Strongly pooled but NOT strongly balanced (the marginal-sum refusal case).
POOLED_UNBALANCED = SystemParams(0.04, 0.01, 0.01, 0.44, 0.25, 0.25)


@pytest.fixture
def bench_params():
    return BENCH


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def draw_params(rng):
    """One random parameter set with positive routed stream and service."""
    return SystemParams(
        lambda0=rng.uniform(0.01, 0.3),
        lambda1=rng.uniform(0.0, 0.15),
        lambda2=rng.uniform(0.0, 0.15),
        mu=rng.uniform(0.3, 1.0),
        alpha1=rng.uniform(0.05, 0.5),
        alpha2=rng.uniform(0.05, 0.5),
    )


def draw_pooled_stable(rng, min_rho=0.15, max_tries=10000):
    """Rejection-sample a stable, strongly pooled parameter set."""
    for _ in range(max_tries):
        p = draw_params(rng)
        rep = check_stability(p)
        if rep.criterion1 and rep.strongly_pooled and rep.rho > min_rho:
            return p
    raise RuntimeError("no pooled stable draw found")


def draw_stable(rng, min_rho=0.05, max_tries=10000):
    """Rejection-sample a parameter set with pooled load below one."""
    for _ in range(max_tries):
        p = draw_params(rng)
        rep = check_stability(p)
        if min_rho < rep.rho < 1.0:
            return p
    raise RuntimeError("no stable draw found")


def draw_symmetric_pooled(rng, max_tries=10000):
    """Rejection-sample a stable symmetric set (equal sides, equal retrials)."""
    for _ in range(max_tries):
        side = rng.uniform(0.0, 0.1)
        a = rng.uniform(0.1, 0.5)
        p = SystemParams(
            lambda0=rng.uniform(0.02, 0.3),
            lambda1=side,
            lambda2=side,
            mu=rng.uniform(0.4, 0.9),
            alpha1=a,
            alpha2=a,
        )
        rep = check_stability(p)
        if rep.criterion1 and rep.strongly_pooled:
            return p
    raise RuntimeError("no symmetric stable draw found")


# --- acceptance criteria reporting -----------------------------------------
#
# test_acceptance.py records one entry per criterion; the summary hook
# prints a single PASS/FAIL line for each at the end of the run.

ACCEPTANCE_LOG = []


def record_acceptance(number, passed, description):
    ACCEPTANCE_LOG.append((number, bool(passed), description))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, description in sorted(ACCEPTANCE_LOG):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"ACCEPTANCE {number:2d} {status} - {description}"
        )

import sys

import numpy as np
import pytest

from trafoens.panel import MemberPanel, OrderedSampleSpace, Outcomes


def random_cdfs(rng, M, n, K, alpha=1.0):
    """Valid CDF rows from Dirichlet class densities, shape (M, n, K)."""
    f = rng.dirichlet(np.full(K, alpha), size=(M, n))
    F = np.cumsum(f, axis=-1)
    F[..., -1] = 1.0
    return np.minimum(F, 1.0)


def random_panel(rng, M=5, n=200, K=7, censored_frac=0.0, alpha=1.0):
    F = random_cdfs(rng, M, n, K, alpha)
    y = rng.integers(0, K, size=n)
    items = []
    for i in range(n):
        if rng.random() < censored_frac:
            lo = int(rng.integers(-1, K - 1))
            up = int(rng.integers(lo + 1, K))
            items.append((None if lo < 0 else lo, up))
        else:
            items.append(int(y[i]))
    return MemberPanel(OrderedSampleSpace.of_size(K), [f"m{m}" for m in range(M)], F,
                       Outcomes.from_list(items))


def random_weights(rng, M):
    w = rng.dirichlet(np.ones(M))
    w[-1] = 1.0 - w[:-1].sum()
    if w[-1] < 0:
        w = np.full(M, 1.0 / M)
        w[-1] = 1.0 - w[:-1].sum()
    return w


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

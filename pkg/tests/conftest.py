import hypothesis
import numpy as np
import pytest

from qcmdpc.qc_mdpc import Params, keygen

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("default")

TOY = Params(1202, 601, 30, 11)
SMALL = Params(62, 31, 6, 2)


@pytest.fixture(scope="session")
def toy_keys():
    return keygen(TOY, np.random.default_rng(12345))


@pytest.fixture(scope="session")
def small_keys():
    return keygen(SMALL, np.random.default_rng(3))


def dense_H(priv):
    """Parity-check matrix built entry by entry: H0[i, j] = h0[(j - i) mod r]."""
    r = priv.params.r
    H = np.zeros((r, 2 * r), dtype=np.int64)
    for blk, h in enumerate((priv.h0, priv.h1)):
        for i in range(r):
            for k in h:
                H[i, blk * r + (k + i) % r] = 1
    return H


def dense_G(pub):
    r = pub.params.r
    q = pub.q.to_array()
    G = np.zeros((r, 2 * r), dtype=np.int64)
    for i in range(r):
        G[i, i] = 1
        G[i, r:] = np.roll(q, i)
    return G


# acceptance summary ---------------------------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and rep.when == "call":
        num, title = marker.args
        _ACCEPTANCE.append((num, title, "PASS" if rep.passed else "FAIL"))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    grouped = {}
    for num, title, status in _ACCEPTANCE:
        grouped.setdefault((num, title), []).append(status)
    for (num, title), statuses in sorted(grouped.items()):
        status = "PASS" if all(s == "PASS" for s in statuses) else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")

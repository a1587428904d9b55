import math

import numpy as np
import pytest

from riciancap.channel import ChannelSpec, exponential_correlation, normalize_spec


def random_hpd(rng, n, cond_floor=0.1):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a @ a.conj().T + cond_floor * np.eye(n)


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    a = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return a @ a.conj().T


def random_unitary(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_channel(rng, n_r, n_t, k_db, alpha, snr_db):
    h = rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))
    spec = ChannelSpec(
        h_bar=h,
        t_corr=exponential_correlation(n_t, alpha),
        r_corr=exponential_correlation(n_r, alpha),
        snr_db=snr_db,
        rice_k_db=k_db,
    )
    return normalize_spec(spec)


K_DB = (-math.inf, 0.0, 10.0)  # K in {0, 1, 10}
ALPHAS = (0.0, 0.5, 0.9)
RHOS = (0.1, 1.0, 10.0, 100.0)


def randomized_family(count=216, seed=2007):
    """Channels over dims 1-16 covering every (K, alpha, rho) combination."""
    rng = np.random.default_rng(seed)
    combos = [(k, a, r) for k in K_DB for a in ALPHAS for r in RHOS]
    out = []
    for i in range(count):
        k_db, alpha, rho = combos[i % len(combos)]
        n_r, n_t = (int(x) for x in rng.integers(1, 17, size=2))
        out.append(random_channel(rng, n_r, n_t, k_db, alpha, 10.0 * math.log10(rho)))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        crit = dict(report.user_properties).get("criterion")
        if crit is not None:
            _CRITERIA[crit] = (report.outcome, dict(report.user_properties).get("detail", ""))


_CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (outcome, detail) in sorted(_CRITERIA.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {number:>2} {verdict}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)


@pytest.fixture
def criterion(request, record_property):
    """Tag a test with its acceptance criterion; returns a detail recorder."""
    mark = request.node.get_closest_marker("criterion")
    record_property("criterion", (mark.args[0], mark.args[1]))

    def detail(text):
        record_property("detail", text)

    return detail

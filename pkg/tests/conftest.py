import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FIG1 = (b"abac", b"abcab")
LCS5 = (b"acbcddaaea", b"abbbccdec")


def random_strings(seed, m, n, alphabet=b"ACGT"):
    rng = np.random.default_rng(seed)
    a = np.frombuffer(alphabet, dtype=np.uint8)
    return bytes(rng.choice(a, m)), bytes(rng.choice(a, n))


def lcs_len(x, y):
    """Textbook LCS length."""
    prev = [0] * (len(y) + 1)
    for cx in x:
        cur = [0]
        for j, cy in enumerate(y):
            cur.append(prev[j] + 1 if cx == cy else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def levenshtein(x, y):
    prev = list(range(len(y) + 1))
    for i, cx in enumerate(x, 1):
        cur = [i]
        for j, cy in enumerate(y, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (cx != cy)))
        prev = cur
    return prev[-1]


def max_score(x, y, wm, wx, wd):
    """Best global alignment score with per-letter gap score wd."""
    prev = [j * wd for j in range(len(y) + 1)]
    for i, cx in enumerate(x, 1):
        cur = [i * wd]
        for j, cy in enumerate(y, 1):
            cur.append(max(prev[j - 1] + (wm if cx == cy else wx), prev[j] + wd, cur[j - 1] + wd))
        prev = cur
    return prev[-1]


def is_subsequence(x, y):
    it = iter(y)
    return all(c in it for c in x)


@pytest.fixture(scope="session")
def fig1():
    return FIG1

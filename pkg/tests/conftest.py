import pytest

from monodromy_lab.pipeline import build_pipeline


@pytest.fixture(scope="session")
def pipelines():
    """Lazily built, shared FibrationData per degree."""
    cache = {}

    def get(d):
        if d not in cache:
            cache[d] = build_pipeline(d)
        return cache[d]

    return get

import math

import numpy as np
import pytest

from meandro import MeanderModel, QLogModel


@pytest.fixture(scope="session")
def meander_half():
    """Meander series at x = 1/2 with the c = 0.1 radius used by jet tests."""
    return MeanderModel(0.5, c=0.1, alpha=2.0, lam=1.5)


@pytest.fixture(scope="session")
def meander_tight():
    """Meander series at x = 1/2 with the acceptance radius c = 0.05."""
    return MeanderModel(0.5, c=0.05, alpha=2.0, lam=1.5)


@pytest.fixture(scope="session")
def qlog_half():
    """q-logarithm at x = 1/2 with the acceptance radius c = 0.05."""
    return QLogModel(0.5, c=0.05, alpha=2.0, lam=1.5)


def logsumexp(values):
    a = np.asarray(values, dtype=float)
    m = float(a.max())
    return m + math.log(float(np.exp(a - m).sum()))

import numpy as np
import pytest
from scipy.special import ellipkm1

from rdlie.lie_structure import build_root_datum


def xi_sl2_closed_form(t):
    """Xi(exp t(1,-1)) = 1 / AGM(e^t, e^-t), written through the complete elliptic integral."""
    t = np.asarray(t, dtype=float)
    a, b = np.exp(t), np.exp(-t)
    return (2 / np.pi) * ellipkm1((b / a) ** 2) / a


@pytest.fixture
def sl2():
    return build_root_datum(2)


@pytest.fixture
def sl3():
    return build_root_datum(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eulerkit.eos import DavisReactant, SimpleMacaw, StiffenedGas


@pytest.fixture
def macaw():
    return SimpleMacaw()


@pytest.fixture
def davis():
    return DavisReactant()


@pytest.fixture
def stiffened():
    return StiffenedGas()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

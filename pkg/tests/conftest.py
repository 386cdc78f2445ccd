import sys
from pathlib import Path

import numpy as np
import pytest

# make the oracle helpers importable as plain modules
sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)

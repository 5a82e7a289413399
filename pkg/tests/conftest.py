import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qbc.simulator import RotationParams
import math

# Angle sets used across the suite: the attack-simulation parameters and
# the match-rate parameters shipped with the key presets.
FIG6_THETA1 = RotationParams(0.0, 0.15 * math.pi, 0.72 * math.pi, 0.32 * math.pi)
FIG6_THETA2 = RotationParams(0.0, 0.45 * math.pi, 0.17 * math.pi, 1.64 * math.pi)
SUPP_THETA1 = RotationParams(0.45 * math.pi, 4.04, 1.04, 0.92)
SUPP_THETA2 = RotationParams(0.0, 0.35, 0.55 * math.pi, 0.79)

# 97-character worked example (marks already canonicalized).
DUMAS = (
    "All human wisdom is contained in these words. Wait and hope. "
    "The Count of Monte Cristo. Chap 117."
)

DUMAS_FRAMED = (
    "All human  wisdom ins containied in thense words.e Wait and. hope. "
    "Thde Count ohf Monte Coristo. ChCap 117."
)


@pytest.fixture
def fig6_thetas():
    return FIG6_THETA1, FIG6_THETA2


@pytest.fixture
def supp_thetas():
    return SUPP_THETA1, SUPP_THETA2


@pytest.fixture
def dumas_message():
    return DUMAS

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rjgarma.model import CountSeries
from rjgarma.sampler import ChainOutput, SamplerConfig

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIO_DIR = REPO_ROOT / "scenarios"


@pytest.fixture
def empty_series():
    return CountSeries(y=np.zeros(0, dtype=np.int64))


def make_chain(draws, indicators, coef_names, toggleable_names,
               config=None) -> ChainOutput:
    """Hand-built ChainOutput for diagnostics tests."""
    draws = np.asarray(draws, dtype=np.float64)
    indicators = np.asarray(indicators, dtype=np.uint8)
    zero = {nm: 0 for nm in coef_names}
    return ChainOutput(draws=draws, indicators=indicators,
                       coef_names=tuple(coef_names),
                       toggleable_names=tuple(toggleable_names),
                       accept_rj=dict(zero), accept_rw=dict(zero),
                       propose_rj=dict(zero), propose_rw=dict(zero),
                       config=config or SamplerConfig(p_max=0, q_max=0))

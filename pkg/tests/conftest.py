"""Shared fixtures: seeded RNGs and synthetic banks/images."""

import numpy as np
import pytest

from illumaug import IlluminantBank, Illuminant
from illumaug.bank import BankEntry


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


def make_bank(n=5, seed=0):
    """A small synthetic bank with distinct, valid illuminants."""
    r = np.random.default_rng(seed)
    entries = []
    for i in range(n):
        v = r.uniform(0.2, 1.0, 3)
        entries.append(BankEntry(f"entry{i:03d}", Illuminant.from_rgb(*v)))
    return IlluminantBank(tuple(entries))


@pytest.fixture
def small_bank():
    return make_bank(5, seed=0)

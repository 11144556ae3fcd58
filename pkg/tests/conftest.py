import random
from fractions import Fraction

import pytest

from atomembed import validate_measure


def rational_tuple(rng: random.Random, size: int, max_num: int = 30):
    """Random strictly positive Fractions with small numerators/denominators."""
    return tuple(
        Fraction(rng.randint(1, max_num), rng.randint(1, max_num))
        for _ in range(size)
    )


def float_tuple(rng: random.Random, size: int, lo: float = 0.05, hi: float = 1.0):
    return tuple(rng.uniform(lo, hi) for _ in range(size))


def rational_measure(rng: random.Random, size: int, normalize: bool = False):
    return validate_measure(rational_tuple(rng, size), normalize=normalize)


def float_measure(rng: random.Random, size: int, normalize: bool = False):
    return validate_measure(float_tuple(rng, size), normalize=normalize)


@pytest.fixture
def rng():
    return random.Random(0xA70B)

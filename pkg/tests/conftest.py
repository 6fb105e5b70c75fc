import random

import pytest

from oreqs.cli import RING_PRESETS, fixture_problems
from oreqs.textio import parse_ring

# The four ring kinds exercised by the worked examples.
KINDS = ("conj", "ddt", "shift", "qdiff")


def ring_of(kind: str):
    return parse_ring(RING_PRESETS[kind])


def generated_instance(n: int):
    """Size and rank drawn for instance ``n`` of the generator round-trip."""
    rng = random.Random(1000 + n)
    s = rng.randint(1, 4)
    return s, rng.randint(0, s)


@pytest.fixture(scope="session")
def fixtures():
    return fixture_problems()


@pytest.fixture(params=KINDS)
def kind_ring(request):
    return ring_of(request.param)


@pytest.fixture(scope="session")
def rings():
    return {k: ring_of(k) for k in ("commutative",) + KINDS}


def random_poly(rng, ring, max_deg: int = 3, size: int = 2):
    """Random element of the Ore ring with degree at most ``max_deg``."""
    K = ring.field
    coeffs = [K.random_element(rng, size) if rng.random() < 0.7 else K.zero for _ in range(rng.randint(0, max_deg) + 1)]
    return ring.poly(coeffs)


def random_nonzero_poly(rng, ring, max_deg: int = 3, size: int = 2):
    while True:
        f = random_poly(rng, ring, max_deg, size)
        if f:
            return f

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mucklesharp.protocol import BUILTIN_SUITES, make_pair  # noqa: E402
from mucklesharp.qkd import KeyManagementService  # noqa: E402


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def kms():
    k = KeyManagementService(random.Random(99))
    k.add_link("alice", "bob")
    return k


@pytest.fixture
def toy_pair(kms, rng):
    return make_pair(BUILTIN_SUITES["toy"], kms, rng)

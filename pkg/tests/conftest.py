from __future__ import annotations

import pytest
from hypothesis import settings

from cubicpair.core import FormPair

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def mod7_pair() -> FormPair:
    return FormPair((1, 0, 2, 4, 6), (0, 1, 2, 2, 2))

from __future__ import annotations

from functools import lru_cache

import pytest

from diagcell.algebra import build_algebra
from diagcell.cellular import CellDatum
from diagcell.linalg import field_from_name


@lru_cache(maxsize=None)
def algebra(family: str, n: int, delta="0", ring="5"):
    field = field_from_name(ring)
    return build_algebra(family, n, field.parse(str(delta)), field)


@lru_cache(maxsize=None)
def datum(family: str, n: int, delta="0", ring="5"):
    return CellDatum.from_algebra(algebra(family, n, delta, ring))


@pytest.fixture
def get_algebra():
    return algebra


@pytest.fixture
def get_datum():
    return datum

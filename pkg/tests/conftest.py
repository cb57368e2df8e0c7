from functools import lru_cache

import pytest
from hypothesis import settings

from lgfrob.corpus import CORPUS
from lgfrob.laurent import parse_laurent
from lgfrob.structure import build_canonical_structure, build_good_maximal_deformation, classify_deformation

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@lru_cache(maxsize=None)
def good_max_structure(text: str, n: int):
    f = parse_laurent(text, n)
    return build_canonical_structure(build_good_maximal_deformation(f))


@lru_cache(maxsize=None)
def structure_for(text: str, n: int, gs: tuple[str, ...]):
    f = parse_laurent(text, n)
    D = classify_deformation(f, [parse_laurent(g, n) for g in gs], check_good=False)
    return build_canonical_structure(D)


@pytest.fixture(params=CORPUS, ids=lambda ex: ex.name)
def example(request):
    return request.param

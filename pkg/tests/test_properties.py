import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from fractions import Fraction

from drsum.embed import EvaluationContext

import props
from conftest import standard_tower

seeds = st.integers(min_value=0, max_value=2 ** 32)
quick = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

TOWER = standard_tower()
CTX = EvaluationContext.for_tower(TOWER, params={"n": Fraction(1, 3)})
SMALL = props.small_tower()
MERGES = {o: props.merge_tower(o) for o in props.MERGE_CASES}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 12])
def test_idempotent_algebra(n):
    props.check_idempotents(n)


@quick
@given(seeds)
def test_component_maps(seed):
    props.check_components(TOWER, props.seeded(seed))


@quick
@given(seeds)
def test_embedding_is_a_homomorphism(seed):
    props.check_embedding(CTX, props.seeded(seed))


@pytest.mark.parametrize("orders", list(props.MERGE_CASES))
@quick
@given(seeds)
def test_merge_round_trip(orders, seed):
    T, (T2, M) = MERGES[orders]
    props.check_merge(T, T2, M, props.seeded(seed))


@quick
@given(seeds)
def test_strategies_agree(seed):
    props.check_strategies(SMALL, props.seeded(seed))


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_pflde_brute_force(seed):
    props.check_pflde(props.seeded(seed))

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from ediscovery.seeding import make_rng, split_seed, uniform_rows


@given(st.integers(0, 2**32 - 1), st.integers(0, 1000))
def test_split_matches_spawn(root, i):
    child = np.random.SeedSequence(root).spawn(i + 1)[i]
    assert split_seed(root, i) == int(child.generate_state(1, np.uint32)[0])


def test_distinct_keys_distinct_seeds():
    seeds = {split_seed(0, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert split_seed(0, 1, 2) != split_seed(0, 2, 1)


def test_uniform_rows_match_generators():
    U = uniform_rows([3, 9], 5)
    assert np.array_equal(U[1], np.random.default_rng(9).random(5))


def test_make_rng_passthrough():
    g = np.random.default_rng(1)
    assert make_rng(g) is g
    assert make_rng(5).random() == np.random.default_rng(5).random()

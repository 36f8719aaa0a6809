import math

import numpy
import pytest

from rdplab.info_measures import empirical_pmf_from_indices, entropy, tv_distance
from rdplab.source_models import (
    Block,
    Pmf,
    SourceModel,
    block_pmf,
    block_support,
    check_enumerable,
    entropy_rate,
    sample_block,
    sample_blocks,
    self_information_block,
    stationary_distribution,
    symbols_to_block_indices,
)
from rdplab.utils import (
    EnumerationTooLargeError,
    InfiniteSelfInformationError,
    MultipleStationaryDistributionsError,
)


@pytest.mark.smoke
def test_pmf_validation():
    Pmf(("a", "b"), [0.25, 0.75])
    with pytest.raises(ValueError):
        Pmf(("a", "b"), [0.5, 0.6])
    with pytest.raises(ValueError):
        Pmf(("a", "a"), [0.5, 0.5])
    with pytest.raises(ValueError):
        Pmf(("a", "b"), [-0.5, 1.5])
    with pytest.raises(ValueError):
        Pmf(("a",), [0.5, 0.5])


@pytest.mark.unit
def test_pmf_is_read_only():
    pmf = Pmf.uniform(("0", "1", "2"))
    with pytest.raises(ValueError):
        pmf.probs[0] = 1.0
    assert pmf.support_size == 3
    assert Pmf.point_mass(("0", "1"), "1").support_size == 1


@pytest.mark.unit
@pytest.mark.parametrize(
    "index,n,symbols,label",
    [
        (0, 3, ("0", "0", "0"), "000"),
        (5, 3, ("1", "0", "1"), "101"),
        (7, 3, ("1", "1", "1"), "111"),
        (2, 2, ("1", "0"), "10"),
        (3, 2, ("1", "1"), "11"),
    ],
)
def test_block_index_order(index, n, symbols, label):
    block = Block.from_index(index, n, ("0", "1"))
    assert block.symbols == symbols
    assert block.label == label
    assert block.index == index


@pytest.mark.unit
def test_block_rejects_foreign_symbols():
    with pytest.raises(ValueError):
        Block(symbols=("0", "2"), alphabet=("0", "1"))


@pytest.mark.smoke
def test_block_pmf_iid(bernoulli_source):
    pmf = block_pmf(bernoulli_source, 2)
    assert pmf.support == ("00", "01", "10", "11")
    assert numpy.allclose(pmf.probs, [0.49, 0.21, 0.21, 0.09])


@pytest.mark.unit
def test_block_pmf_markov(sticky_markov):
    pmf = block_pmf(sticky_markov, 2)
    assert numpy.allclose(pmf.probs, [0.45, 0.05, 0.1, 0.4])
    three = block_pmf(sticky_markov, 3)
    assert three.prob("000") == pytest.approx(0.5 * 0.9 * 0.9)
    assert three.prob("101") == pytest.approx(0.5 * 0.2 * 0.1)


@pytest.mark.unit
def test_enumeration_cap():
    assert check_enumerable(2, 10) == 1024
    with pytest.raises(EnumerationTooLargeError) as err:
        check_enumerable(2, 25)
    assert err.value.cap == 2**24
    with pytest.raises(EnumerationTooLargeError):
        block_support(("0", "1", "2"), 4, cap=80)


@pytest.mark.unit
def test_sampling_is_seed_deterministic(sticky_markov):
    first = sample_blocks(sticky_markov, 5, 100, numpy.random.default_rng(7))
    second = sample_blocks(sticky_markov, 5, 100, numpy.random.default_rng(7))
    assert numpy.array_equal(first, second)
    first = sample_block(sticky_markov, 4, seed=3)
    assert first == sample_block(sticky_markov, 4, seed=3)


@pytest.mark.regression
def test_sampled_block_frequencies(bernoulli_source):
    rng = numpy.random.default_rng(11)
    symbols = sample_blocks(bernoulli_source, 2, 200_000, rng)
    indices = symbols_to_block_indices(symbols, 2)
    freq = numpy.bincount(indices, minlength=4) / len(indices)
    assert numpy.allclose(freq, block_pmf(bernoulli_source, 2).probs, atol=5e-3)


@pytest.mark.slow
@pytest.mark.regression
@pytest.mark.parametrize("n", [2, 4])
def test_sampled_blocks_match_the_block_law(bernoulli_source, sticky_markov, n):
    trials = 100_000
    for source in (bernoulli_source, sticky_markov):
        p_n = block_pmf(source, n)
        rng = numpy.random.default_rng(17 + n)
        indices = symbols_to_block_indices(sample_blocks(source, n, trials, rng), 2)
        observed = empirical_pmf_from_indices(indices, p_n.support)
        assert tv_distance(observed, p_n) <= 3 * math.sqrt(len(p_n) / trials)


@pytest.mark.unit
def test_point_mass_never_samples_zero_symbols():
    source = SourceModel.point_mass(("0", "1", "2"), "2")
    symbols = sample_blocks(source, 3, 1000, numpy.random.default_rng(0))
    assert numpy.all(symbols == 2)


@pytest.mark.unit
def test_stationary_distribution(sticky_markov):
    assert numpy.allclose(stationary_distribution(sticky_markov), [2 / 3, 1 / 3])
    periodic = SourceModel.markov([1.0, 0.0], [[0.0, 1.0], [1.0, 0.0]])
    assert numpy.allclose(stationary_distribution(periodic), [0.5, 0.5])
    reducible = SourceModel.markov([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(MultipleStationaryDistributionsError):
        stationary_distribution(reducible)


@pytest.mark.unit
def test_entropy_rate(uniform_binary, sticky_markov):
    assert entropy_rate(uniform_binary) == pytest.approx(1.0)
    assert entropy_rate(SourceModel.point_mass(("0", "1"), "0")) == 0.0
    # 2/3 h(0.1) + 1/3 h(0.2)
    assert entropy_rate(sticky_markov) == pytest.approx(0.553307, abs=1e-5)


@pytest.mark.unit
@pytest.mark.parametrize("probs", [[0.7, 0.3], [0.5, 0.25, 0.25], [1.0, 0.0]])
@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_iid_block_entropy_is_additive(probs, n):
    source = SourceModel.iid(probs)
    expected = n * entropy_rate(source)
    assert entropy(block_pmf(source, n)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.unit
def test_self_information_block(uniform_binary, bernoulli_source):
    block = Block(symbols=("0", "1", "1"), alphabet=("0", "1"))
    assert self_information_block(uniform_binary, block) == pytest.approx(1.0)
    expected = -(numpy.log2(0.7) + 2 * numpy.log2(0.3)) / 3
    assert self_information_block(bernoulli_source, block) == pytest.approx(expected)

    point_mass = SourceModel.point_mass(("0", "1"), "0")
    with pytest.raises(InfiniteSelfInformationError):
        self_information_block(point_mass, block)

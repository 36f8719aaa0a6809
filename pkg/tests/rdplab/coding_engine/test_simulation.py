import numpy
import pytest
from scipy.stats import chisquare

from rdplab.coding_engine import (
    block_distortion,
    design_greedy_quantizer,
    simulate_fixed_length,
    simulate_variable_length,
)
from rdplab.rdp_solvers import Channel, DistortionSpec
from rdplab.source_models import block_pmf
from rdplab.utils import ConverseViolationError


@pytest.mark.smoke
def test_identity_channel_is_lossless(uniform_binary, hamming):
    p_2 = block_pmf(uniform_binary, 2)
    report = simulate_variable_length(
        uniform_binary, Channel.identity(p_2.support), hamming, n=2, trials=2000, seed=1
    )
    assert report.criterion == "va"
    assert report.empirical_distortion == 0.0
    assert report.theory_distortion == 0.0
    assert report.max_distortion_quantile == 0.0
    assert report.theory_tv == 0.0
    # four equiprobable blocks get two-digit codewords
    assert report.avg_len_per_symbol == 1.0
    assert report.theory_rate == pytest.approx(1.0)
    assert report.theory_entropy_rate == pytest.approx(1.0)
    assert sum(report.decoded_counts) == 2000
    assert report.support_size == 4


@pytest.mark.sanity
def test_binary_symmetric_channel_distortion(uniform_binary, hamming):
    channel = Channel.bsc(0.25).per_letter_product(2)
    report = simulate_variable_length(
        uniform_binary, channel, hamming, n=2, trials=20_000, seed=3
    )
    assert report.theory_distortion == pytest.approx(0.25)
    assert abs(report.empirical_distortion - 0.25) <= report.distortion_radius
    assert report.theory_tv == pytest.approx(0.0, abs=1e-12)
    assert report.empirical_tv <= report.tv_bias_bound * 3


@pytest.mark.slow
@pytest.mark.regression
def test_decoded_blocks_follow_the_output_law(bernoulli_source, hamming):
    p_2 = block_pmf(bernoulli_source, 2)
    channel = Channel.from_rows([[0.9, 0.1], [0.4, 0.6]]).per_letter_product(2)
    report = simulate_variable_length(
        bernoulli_source, channel, hamming, n=2, trials=40_000, seed=5
    )
    q_2 = p_2.probs @ channel.rows
    counts = numpy.array(report.decoded_counts)
    _, p_value = chisquare(counts, q_2 * counts.sum())
    assert p_value > 1e-3


NON_PRODUCT_CHANNELS = [
    [
        [0.7, 0.1, 0.1, 0.1],
        [0.2, 0.5, 0.2, 0.1],
        [0.1, 0.1, 0.6, 0.2],
        [0.25, 0.25, 0.25, 0.25],
    ],
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
        [0.0, 0.0, 0.3, 0.7],
        [0.4, 0.0, 0.0, 0.6],
    ],
    [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ],
]


@pytest.mark.slow
@pytest.mark.regression
@pytest.mark.parametrize("rows", NON_PRODUCT_CHANNELS)
def test_block_channels_reproduce_their_output_law(bernoulli_source, hamming, rows):
    p_2 = block_pmf(bernoulli_source, 2)
    channel = Channel.from_rows(rows, p_2.support)
    report = simulate_variable_length(
        bernoulli_source, channel, hamming, n=2, trials=100_000, seed=13
    )
    q_2 = p_2.probs @ channel.rows
    counts = numpy.array(report.decoded_counts)
    positive = q_2 > 0
    assert numpy.all(counts[~positive] == 0)
    _, p_value = chisquare(counts[positive], q_2[positive] * counts.sum())
    assert p_value > 1e-3


@pytest.mark.slow
@pytest.mark.regression
@pytest.mark.parametrize("n", [4, 8])
def test_product_channel_at_longer_blocks(uniform_binary, hamming, n):
    channel = Channel.bsc(0.11).per_letter_product(n)
    report = simulate_variable_length(
        uniform_binary, channel, hamming, n=n, trials=100_000, seed=21
    )
    assert report.theory_tv == pytest.approx(0.0, abs=1e-12)
    assert report.theory_distortion == pytest.approx(0.11)
    assert abs(report.empirical_distortion - 0.11) <= 0.005
    low = report.theory_entropy_rate - report.avg_len_radius
    high = report.theory_entropy_rate + 1 / n + report.avg_len_radius
    assert low <= report.avg_len_per_symbol <= high


@pytest.mark.slow
@pytest.mark.regression
def test_rate_approaches_huffman_expectation(bernoulli_source, hamming):
    p_3 = block_pmf(bernoulli_source, 3)
    report = simulate_variable_length(
        bernoulli_source,
        Channel.identity(p_3.support),
        hamming,
        n=3,
        trials=30_000,
        seed=8,
    )
    assert abs(report.avg_len_per_symbol - report.theory_rate) <= report.avg_len_radius
    entropy_rate = report.theory_entropy_rate
    assert entropy_rate <= report.theory_rate < entropy_rate + 1 / 3


@pytest.mark.unit
def test_ternary_code_alphabet(uniform_binary, hamming):
    p_2 = block_pmf(uniform_binary, 2)
    report = simulate_variable_length(
        uniform_binary,
        Channel.identity(p_2.support),
        hamming,
        n=2,
        trials=500,
        K=3,
        seed=0,
    )
    assert report.k == 3
    assert report.theory_entropy_rate == pytest.approx(numpy.log(4) / numpy.log(3) / 2)


@pytest.mark.unit
@pytest.mark.parametrize("workers,chunk_size", [(1, 1000), (4, 1000), (3, 1000)])
def test_reports_do_not_depend_on_workers(uniform_binary, hamming, workers, chunk_size):
    channel = Channel.bsc(0.2).per_letter_product(2)
    reference = simulate_variable_length(
        uniform_binary,
        channel,
        hamming,
        n=2,
        trials=5000,
        seed=12,
        chunk_size=chunk_size,
    )
    report = simulate_variable_length(
        uniform_binary,
        channel,
        hamming,
        n=2,
        trials=5000,
        seed=12,
        workers=workers,
        chunk_size=chunk_size,
    )
    assert report.model_dump() == reference.model_dump()


@pytest.mark.unit
def test_seeds_change_the_draws(uniform_binary, hamming):
    channel = Channel.bsc(0.2).per_letter_product(2)
    first, second = (
        simulate_variable_length(
            uniform_binary, channel, hamming, n=2, trials=3000, seed=seed
        )
        for seed in (1, 2)
    )
    assert first.decoded_counts != second.decoded_counts


@pytest.mark.smoke
def test_fixed_length_code(uniform_binary, hamming):
    p_2 = block_pmf(uniform_binary, 2)
    quantizer, reproduction = design_greedy_quantizer(p_2, hamming.for_blocks(2), 2)
    report = simulate_fixed_length(
        uniform_binary, quantizer, reproduction, hamming, n=2, trials=10_000, seed=4
    )
    assert report.criterion == "fa"
    assert report.codebook_size == 2
    assert report.avg_len_per_symbol == pytest.approx(0.5)
    assert report.avg_len_radius == 0.0
    assert report.theory_distortion == pytest.approx(0.25)
    assert abs(report.empirical_distortion - 0.25) <= report.distortion_radius
    assert report.best_support_tv == pytest.approx(0.5)
    assert report.theory_tv == pytest.approx(0.5)
    assert report.max_distortion_quantile == pytest.approx(0.5)


@pytest.mark.unit
def test_fixed_length_converse_check(uniform_binary, hamming, monkeypatch):
    p_2 = block_pmf(uniform_binary, 2)
    quantizer, reproduction = design_greedy_quantizer(p_2, hamming.for_blocks(2), 2)
    # a support bound of 0.9 cannot hold against the measured distance of 0.5
    monkeypatch.setattr(
        "rdplab.coding_engine.simulation.best_support_tv", lambda p, M: 0.9
    )
    with pytest.raises(ConverseViolationError):
        simulate_fixed_length(
            uniform_binary, quantizer, reproduction, hamming, n=2, trials=4000, seed=4
        )


@pytest.mark.unit
def test_fixed_length_validation(uniform_binary, hamming):
    with pytest.raises(ValueError):
        simulate_fixed_length(
            uniform_binary, numpy.array([0, 1, 0]), numpy.array([0, 1]), hamming, 2, 10
        )
    with pytest.raises(ValueError):
        simulate_fixed_length(
            uniform_binary,
            numpy.array([0, 2, 0, 1]),
            numpy.array([0, 1]),
            hamming,
            2,
            10,
        )
    with pytest.raises(ValueError):
        simulate_fixed_length(
            uniform_binary, numpy.array([0, 0, 0, 0]), numpy.array([7]), hamming, 2, 10
        )


@pytest.mark.unit
def test_variable_length_validation(uniform_binary, hamming):
    p_2 = block_pmf(uniform_binary, 2)
    identity = Channel.identity(p_2.support)
    with pytest.raises(ValueError):
        simulate_variable_length(
            uniform_binary, Channel.bsc(0.1), hamming, n=2, trials=10
        )
    with pytest.raises(ValueError):
        simulate_variable_length(uniform_binary, identity, hamming, n=2, trials=0)
    with pytest.raises(ValueError):
        simulate_variable_length(
            uniform_binary, identity, hamming, n=2, trials=10, workers=0
        )


@pytest.mark.unit
def test_block_distortion(hamming):
    assert block_distortion(hamming, 2, 2).block_length == 2
    delta_2 = hamming.for_blocks(2)
    assert block_distortion(delta_2, 2, 2) is delta_2
    with pytest.raises(ValueError):
        block_distortion(DistortionSpec.hamming(3), 2, 2)

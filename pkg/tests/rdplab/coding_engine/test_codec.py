import numpy
import pytest
from scipy.stats import chisquare

from rdplab.coding_engine import (
    build_huffman,
    decode_fixed_length,
    decode_lossless,
    design_greedy_quantizer,
    encode_fixed_length,
    fixed_length_digits,
    quantizer_distortion,
    stochastic_encode,
)
from rdplab.rdp_solvers import Channel
from rdplab.source_models import Block, Pmf, block_pmf
from rdplab.utils import DecodeError


@pytest.mark.unit
@pytest.mark.parametrize(
    "M,K,expected",
    [(1, 2, 0), (2, 2, 1), (5, 2, 3), (8, 2, 3), (9, 3, 2), (10, 3, 3)],
)
def test_fixed_length_digits(M, K, expected):
    assert fixed_length_digits(M, K) == expected


@pytest.mark.smoke
def test_fixed_length_code():
    digits = encode_fixed_length(numpy.array([0, 4, 3]), M=5, K=2)
    assert digits.tolist() == [[0, 0, 0], [1, 0, 0], [0, 1, 1]]
    assert decode_fixed_length(digits, M=5, K=2).tolist() == [0, 4, 3]


@pytest.mark.unit
def test_fixed_length_code_errors():
    with pytest.raises(ValueError):
        encode_fixed_length(numpy.array([5]), M=5, K=2)
    with pytest.raises(ValueError):
        fixed_length_digits(0, 2)
    with pytest.raises(DecodeError):
        decode_fixed_length(numpy.array([[1, 1, 1]]), M=5, K=2)
    with pytest.raises(DecodeError):
        decode_fixed_length(numpy.array([[0, 2, 0]]), M=5, K=2)
    with pytest.raises(DecodeError):
        decode_fixed_length(numpy.array([[0, 1]]), M=5, K=2)


@pytest.mark.unit
def test_stochastic_encode_through_identity(uniform_binary):
    p_2 = block_pmf(uniform_binary, 2)
    table = build_huffman(p_2)
    x = Block(symbols=("1", "0"), alphabet=("0", "1"))
    codeword, y = stochastic_encode(x, Channel.identity(p_2.support), table, seed=4)
    assert y.symbols == x.symbols
    assert decode_lossless(table, codeword) == x.index == 2


@pytest.mark.unit
def test_stochastic_encode_is_seeded(uniform_binary):
    p_2 = block_pmf(uniform_binary, 2)
    channel = Channel.bsc(0.5).per_letter_product(2)
    table = build_huffman(p_2)
    x = Block(symbols=("0", "0"), alphabet=("0", "1"))
    draws = {
        stochastic_encode(x, channel, table, seed=seed)[1].symbols for seed in range(40)
    }
    assert len(draws) > 1
    first, again = (stochastic_encode(x, channel, table, seed=9) for _ in range(2))
    assert first[0] == again[0]
    assert first[1].symbols == again[1].symbols
    with pytest.raises(ValueError):
        stochastic_encode(x, Channel.bsc(0.5), table, seed=0)


@pytest.mark.slow
@pytest.mark.regression
def test_stochastic_encode_reproduces_the_output_law(bernoulli_source):
    p_2 = block_pmf(bernoulli_source, 2)
    channel = Channel.from_rows(
        [
            [0.7, 0.1, 0.1, 0.1],
            [0.2, 0.5, 0.2, 0.1],
            [0.1, 0.1, 0.6, 0.2],
            [0.25, 0.25, 0.25, 0.25],
        ],
        p_2.support,
    )
    q_2 = p_2.probs @ channel.rows
    table = build_huffman(Pmf(p_2.support, q_2))

    trials = 100_000
    sources = numpy.random.default_rng(31).choice(4, size=trials, p=p_2.probs)
    counts = numpy.zeros(4, dtype=numpy.int64)
    for seed, x_index in enumerate(sources):
        x = Block.from_index(int(x_index), 2, ("0", "1"))
        codeword, y = stochastic_encode(x, channel, table, seed=seed)
        assert decode_lossless(table, codeword) == y.index
        counts[y.index] += 1

    _, p_value = chisquare(counts, q_2 * trials)
    assert p_value > 1e-3


@pytest.mark.smoke
def test_greedy_quantizer(uniform_binary, hamming):
    p_2 = block_pmf(uniform_binary, 2)
    delta_2 = hamming.for_blocks(2)
    quantizer, reproduction = design_greedy_quantizer(p_2, delta_2, 2)
    assert reproduction.tolist() == [0, 1]
    assert quantizer.tolist() == [0, 1, 0, 1]
    distortion = quantizer_distortion(p_2, delta_2, quantizer, reproduction)
    assert distortion == pytest.approx(0.25)


@pytest.mark.unit
@pytest.mark.parametrize("M,expected", [(1, 0.5), (2, 0.25), (4, 0.0)])
def test_greedy_quantizer_distortion_falls(uniform_binary, hamming, M, expected):
    p_2 = block_pmf(uniform_binary, 2)
    delta_2 = hamming.for_blocks(2)
    quantizer, reproduction = design_greedy_quantizer(p_2, delta_2, M)
    assert len(reproduction) == M
    assert numpy.all(numpy.diff(reproduction) > 0)
    value = quantizer_distortion(p_2, delta_2, quantizer, reproduction)
    assert value == pytest.approx(expected)


@pytest.mark.unit
def test_greedy_quantizer_validation(uniform_binary, hamming):
    p_2 = block_pmf(uniform_binary, 2)
    with pytest.raises(ValueError):
        design_greedy_quantizer(p_2, hamming.for_blocks(2), 5)
    with pytest.raises(ValueError):
        design_greedy_quantizer(p_2, hamming, 2)

import numpy
import pytest

from rdplab.coding_engine import (
    CodeTable,
    build_huffman,
    decode_lossless,
    decode_stream,
    encode_blocks,
    encode_lossless,
)
from rdplab.info_measures import entropy
from rdplab.source_models import Pmf
from rdplab.utils import DecodeError


def _pmf(probs):
    return Pmf(tuple(str(idx) for idx in range(len(probs))), probs)


@pytest.mark.smoke
def test_dyadic_code():
    table = build_huffman(_pmf([0.5, 0.25, 0.25]))
    assert list(table.lengths) == [1, 2, 2]
    assert table.is_prefix_free()
    assert table.kraft_sum() == pytest.approx(1.0)
    assert table.expected_length(_pmf([0.5, 0.25, 0.25])) == pytest.approx(1.5)


@pytest.mark.unit
@pytest.mark.parametrize(
    "probs,K",
    [
        ([0.4, 0.3, 0.2, 0.1], 2),
        ([0.25, 0.25, 0.25, 0.25], 3),
        ([0.6, 0.1, 0.1, 0.1, 0.05, 0.05], 3),
        ([0.2] * 5, 4),
    ],
)
def test_expected_length_within_one_digit_of_entropy(probs, K):
    p = _pmf(probs)
    table = build_huffman(p, K)
    assert table.is_prefix_free()
    assert table.kraft_sum() <= 1.0 + 1e-12
    length = table.expected_length(p)
    assert entropy(p, base=K) - 1e-9 <= length < entropy(p, base=K) + 1.0


@pytest.mark.unit
def test_ternary_code_pads_with_a_dummy():
    table = build_huffman(_pmf([0.25] * 4), K=3)
    assert list(table.lengths) == [2, 2, 1, 1]
    assert table.kraft_sum() == pytest.approx(8 / 9)


@pytest.mark.unit
def test_zero_probability_blocks_have_no_codeword():
    p = _pmf([0.5, 0.0, 0.5])
    table = build_huffman(p)
    assert set(table.codewords) == {0, 2}
    assert table.lengths[1] == 0
    with pytest.raises(ValueError):
        encode_lossless(table, 1)
    with pytest.raises(ValueError):
        table.expected_length(_pmf([0.4, 0.2, 0.4]))


@pytest.mark.unit
def test_single_block_gets_the_empty_codeword():
    table = build_huffman(Pmf.point_mass(("0", "1"), "1"))
    assert table.is_degenerate
    assert encode_lossless(table, 1) == ()
    assert decode_stream(table, [], count=3) == [1, 1, 1]
    with pytest.raises(ValueError):
        decode_stream(table, [])
    with pytest.raises(DecodeError):
        decode_stream(table, [0], count=1)


@pytest.mark.unit
def test_deterministic_tie_breaking():
    first = build_huffman(_pmf([0.25] * 4))
    second = build_huffman(_pmf([0.25] * 4))
    assert first.codewords == second.codewords


@pytest.mark.unit
def test_stream_parsing():
    table = build_huffman(_pmf([0.5, 0.25, 0.25]))
    blocks = [2, 0, 1, 1, 0]
    stream = encode_blocks(table, blocks)
    assert len(stream) == sum(table.lengths[blocks])
    assert decode_stream(table, stream) == blocks
    assert decode_stream(table, stream, count=5) == blocks
    assert decode_lossless(table, encode_lossless(table, 2)) == 2


@pytest.mark.unit
def test_decode_errors():
    table = build_huffman(_pmf([0.5, 0.25, 0.25]))
    stream = encode_blocks(table, [1, 2])
    with pytest.raises(DecodeError) as truncated:
        decode_stream(table, stream[:-1])
    assert truncated.value.offset == 2
    with pytest.raises(DecodeError):
        decode_stream(table, [0, 2])
    with pytest.raises(DecodeError):
        decode_stream(table, stream, count=1)
    with pytest.raises(DecodeError):
        decode_stream(table, stream, count=3)
    with pytest.raises(DecodeError):
        decode_lossless(table, stream)


@pytest.mark.unit
def test_code_table_validation():
    with pytest.raises(ValueError):
        CodeTable(alphabet_size=1, codewords={0: (0,)}, size=1)
    with pytest.raises(ValueError):
        CodeTable(alphabet_size=2, codewords={0: (0,), 1: (0,)}, size=2)
    with pytest.raises(ValueError):
        CodeTable(alphabet_size=2, codewords={0: (2,)}, size=1)
    with pytest.raises(ValueError):
        build_huffman(_pmf([0.5, 0.5]), K=1)


@pytest.mark.regression
def test_random_pmfs_round_trip():
    rng = numpy.random.default_rng(7)
    for size in (2, 5, 17):
        p = _pmf(rng.dirichlet(numpy.ones(size)))
        table = build_huffman(p)
        blocks = [int(idx) for idx in rng.integers(0, size, 50)]
        assert decode_stream(table, encode_blocks(table, blocks)) == blocks

import pydantic
import pytest

from rdplab.rdp_solvers import (
    DistortionSpec,
    TradeoffPoint,
    bound_type_for,
    default_spectrum_length,
    markov_block_length,
    rfa_evaluate,
)
from rdplab.source_models import SourceModel


@pytest.mark.smoke
@pytest.mark.parametrize("S", [0.0, 0.25, 0.75])
def test_uniform_source_needs_full_rate(uniform_binary, hamming, S):
    point = rfa_evaluate(uniform_binary, hamming, 0.11, S, n=8)
    assert point.R == pytest.approx(1.0)
    assert point.spectrum_floor == pytest.approx(1.0)
    assert point.ba_component == pytest.approx(0.5004, abs=1e-3)
    assert point.criterion == "fa"
    assert point.bound_type == "exact"


@pytest.mark.unit
def test_full_perception_leaves_distortion_term(uniform_binary, hamming):
    point = rfa_evaluate(uniform_binary, hamming, 0.11, 1.0, n=8)
    assert point.spectrum_floor == 0.0
    assert point.R == pytest.approx(0.5004, abs=1e-3)


@pytest.mark.unit
def test_code_alphabet_sets_base(uniform_binary, hamming):
    point = rfa_evaluate(uniform_binary, hamming, 0.11, 0.5, n=4, K=4)
    assert point.base == 4.0
    assert point.R == pytest.approx(0.5)
    with pytest.raises(ValueError):
        rfa_evaluate(uniform_binary, hamming, 0.11, 0.5, n=4, K=1)


@pytest.mark.unit
def test_rejects_nonzero_diagonal(uniform_binary):
    offset = DistortionSpec(matrix=[[1.0, 2.0], [2.0, 1.0]])
    block_delta = DistortionSpec.hamming(2).for_blocks(2)
    with pytest.raises(ValueError):
        rfa_evaluate(uniform_binary, offset, 1.0, 0.5, n=4)
    with pytest.raises(ValueError):
        rfa_evaluate(uniform_binary, block_delta, 0.1, 0.5, n=4)


@pytest.mark.unit
def test_markov_source_is_upper_bound(sticky_markov, hamming):
    point = rfa_evaluate(sticky_markov, hamming, 0.05, 0.5, n=6)
    assert point.bound_type == "upper_bound"
    assert point.R == max(point.ba_component, point.spectrum_floor)
    assert point.R > 0.0


@pytest.mark.unit
@pytest.mark.parametrize(
    "alphabet_size,n,expected",
    [(2, 64, 8), (2, 3, 3), (3, 10, 5), (300, 4, 1)],
)
def test_markov_block_length(alphabet_size, n, expected):
    assert markov_block_length(alphabet_size, n) == expected


@pytest.mark.unit
def test_default_spectrum_length(uniform_binary, sticky_markov):
    assert default_spectrum_length(uniform_binary) == 64
    assert default_spectrum_length(sticky_markov) == 16
    ternary = SourceModel.markov([1.0, 0.0, 0.0], [[0.8, 0.1, 0.1]] * 3)
    assert default_spectrum_length(ternary) == 10
    assert default_spectrum_length(sticky_markov, n=6) == 6


@pytest.mark.regression
def test_rate_decreases_with_perception_level(hamming):
    source = SourceModel.iid([0.7, 0.3])
    levels = (0.0, 0.3, 0.6, 1.0)
    rates = [rfa_evaluate(source, hamming, 0.05, S, n=16).R for S in levels]
    assert all(later <= earlier + 1e-9 for earlier, later in zip(rates, rates[1:]))


@pytest.mark.unit
def test_tradeoff_point_validation():
    point = TradeoffPoint(R=0.5, D=0.1, S=0.2, criterion="va")
    assert point.bound_type == "exact"
    assert point.ba_component is None
    with pytest.raises(pydantic.ValidationError):
        TradeoffPoint(R=-0.1, D=0.1, S=0.2, criterion="va")
    with pytest.raises(pydantic.ValidationError):
        TradeoffPoint(R=0.1, D=0.1, S=1.2, criterion="fa")
    with pytest.raises(pydantic.ValidationError):
        TradeoffPoint(R=0.1, D=0.1, S=0.2, criterion="lossless")


@pytest.mark.unit
@pytest.mark.parametrize(
    "method,expected",
    [("exact", "exact"), ("grid", "upper_bound"), ("multistart", "upper_bound")],
)
def test_bound_type_for(method, expected):
    assert bound_type_for(method) == expected

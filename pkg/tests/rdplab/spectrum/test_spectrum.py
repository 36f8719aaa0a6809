import itertools
import math

import numpy
import pytest

from rdplab.info_measures import tv_distance
from rdplab.rdp_solvers import Channel
from rdplab.source_models import Pmf, SourceModel, entropy_rate
from rdplab.spectrum import (
    best_support_tv,
    f_spectrum,
    f_spectrum_with_radius,
    rate_for_perception,
    sampled_self_information,
    self_information_spectrum,
    sup_information_rate_estimate,
)

BERNOULLI_LEVELS = [
    (0.0, 1.0),
    (0.6, 0.51),
    (1.0, 0.51),
    (1.2, 0.09),
    (1.8, 0.0),
]


@pytest.mark.smoke
def test_bernoulli_spectrum_atoms(bernoulli_source):
    values, probs = self_information_spectrum(bernoulli_source, 2)
    assert values.size == 3
    assert numpy.all(numpy.diff(values) > 0)
    assert probs == pytest.approx([0.49, 0.42, 0.09])
    assert values[0] == pytest.approx(-math.log2(0.7))
    assert values[2] == pytest.approx(-math.log2(0.3))


@pytest.mark.unit
@pytest.mark.parametrize("R,expected", BERNOULLI_LEVELS)
def test_f_spectrum_levels(bernoulli_source, R, expected):
    assert f_spectrum(bernoulli_source, 2, R) == pytest.approx(expected)


@pytest.mark.unit
def test_uniform_spectrum_is_a_point(uniform_binary):
    values, probs = self_information_spectrum(uniform_binary, 10)
    assert values == pytest.approx([1.0])
    assert probs == pytest.approx([1.0])
    assert f_spectrum(uniform_binary, 10, 1.0) == 1.0
    assert f_spectrum(uniform_binary, 10, 1.0 + 1e-6) == 0.0


@pytest.mark.unit
def test_markov_spectrum_enumerates_blocks(sticky_markov):
    values, probs = self_information_spectrum(sticky_markov, 3)
    assert probs.sum() == pytest.approx(1.0)
    assert numpy.all(numpy.diff(values) > 0)
    assert f_spectrum(sticky_markov, 3, 0.0) == pytest.approx(1.0)


@pytest.mark.unit
def test_spectrum_rejects_bad_arguments(bernoulli_source):
    with pytest.raises(ValueError):
        self_information_spectrum(bernoulli_source, 0)
    with pytest.raises(ValueError):
        f_spectrum(bernoulli_source, 2, 1.0, mode="bootstrap")
    with pytest.raises(ValueError):
        rate_for_perception(bernoulli_source, 2, 1.5)


@pytest.mark.unit
@pytest.mark.parametrize(
    "S,expected",
    [(0.0, 1.7370), (0.05, 1.7370), (0.09, 1.1258), (0.5, 1.1258), (0.6, 0.5146)],
)
def test_rate_for_perception(bernoulli_source, S, expected):
    rate = rate_for_perception(bernoulli_source, 2, S)
    assert rate == pytest.approx(expected, abs=1e-4)


@pytest.mark.unit
def test_rate_for_perception_vanishes_at_full_level(bernoulli_source):
    assert rate_for_perception(bernoulli_source, 2, 1.0) == 0.0


@pytest.mark.regression
def test_rate_for_perception_concentrates(bernoulli_source):
    floor = rate_for_perception(bernoulli_source, 64, 0.5)
    assert floor == pytest.approx(entropy_rate(bernoulli_source), abs=0.05)


@pytest.mark.slow
@pytest.mark.regression
def test_monte_carlo_matches_exact(bernoulli_source):
    estimate, radius = f_spectrum_with_radius(
        bernoulli_source, 8, 0.9, mode="mc", trials=50_000, seed=11
    )
    exact = f_spectrum(bernoulli_source, 8, 0.9)
    assert radius > 0.0
    assert abs(estimate - exact) <= radius
    again, _ = f_spectrum_with_radius(
        bernoulli_source, 8, 0.9, mode="mc", trials=50_000, seed=11
    )
    assert again == estimate


@pytest.mark.unit
def test_sampled_self_information():
    source = SourceModel.iid([0.5, 0.25, 0.25])
    symbols = numpy.array([[0, 0], [1, 2]])
    assert sampled_self_information(source, symbols) == pytest.approx([1.0, 2.0])


@pytest.mark.unit
@pytest.mark.parametrize("M,expected", [(1, 0.5), (2, 0.2), (3, 0.0), (5, 0.0)])
def test_best_support_tv(M, expected):
    p = Pmf(("a", "b", "c"), [0.3, 0.5, 0.2])
    assert best_support_tv(p, M) == pytest.approx(expected)


@pytest.mark.regression
@pytest.mark.parametrize("size", [4, 7, 12])
def test_best_support_tv_matches_a_support_search(size):
    labels = tuple(str(idx) for idx in range(size))
    probs = numpy.random.default_rng(size).dirichlet(numpy.ones(size))
    p = Pmf(labels, probs)

    def concentrated(kept):
        # p on the kept labels, the remaining mass on the first of them
        q = numpy.zeros(size)
        q[list(kept)] = probs[list(kept)]
        q[kept[0]] += 1.0 - q.sum()
        return Pmf(labels, q)

    for M in range(1, size + 1):
        searched = min(
            tv_distance(concentrated(kept), p)
            for kept in itertools.combinations(range(size), M)
        )
        assert best_support_tv(p, M) == pytest.approx(searched, abs=1e-12)


@pytest.mark.slow
@pytest.mark.regression
def test_information_rate_of_a_binary_symmetric_channel(uniform_binary):
    estimate = sup_information_rate_estimate(
        uniform_binary, Channel.bsc(0.11), n=200, eps=0.5, trials=4000, seed=2
    )
    assert estimate == pytest.approx(0.5, abs=0.05)


@pytest.mark.unit
def test_information_rate_needs_iid(sticky_markov):
    with pytest.raises(ValueError):
        sup_information_rate_estimate(sticky_markov, Channel.bsc(0.1), n=4)

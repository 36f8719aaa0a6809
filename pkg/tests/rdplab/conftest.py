import pytest

from rdplab.rdp_solvers import DistortionSpec
from rdplab.source_models import Pmf, SourceModel


@pytest.fixture
def uniform_binary() -> SourceModel:
    return SourceModel.iid([0.5, 0.5])


@pytest.fixture
def bernoulli_source() -> SourceModel:
    # P("1") = 0.3
    return SourceModel.iid([0.7, 0.3])


@pytest.fixture
def sticky_markov() -> SourceModel:
    return SourceModel.markov([0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]])


@pytest.fixture
def uniform_pmf() -> Pmf:
    return Pmf(("0", "1"), [0.5, 0.5])


@pytest.fixture
def hamming() -> DistortionSpec:
    return DistortionSpec.hamming(2)

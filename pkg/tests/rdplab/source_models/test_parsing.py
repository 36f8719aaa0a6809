import numpy
import pytest

from rdplab.source_models import parse_source


@pytest.mark.smoke
def test_parse_iid():
    source = parse_source("iid:0.5,0.5")
    assert source.kind == "iid"
    assert source.alphabet == ("0", "1")
    assert numpy.allclose(source.symbol_pmf.probs, [0.5, 0.5])


@pytest.mark.unit
def test_parse_iid_with_alphabet():
    source = parse_source("iid:0.2,0.3,0.5;alphabet=[a,b,c]")
    assert source.alphabet == ("a", "b", "c")
    assert source.symbol_pmf.prob("c") == pytest.approx(0.5)


@pytest.mark.unit
def test_parse_markov():
    source = parse_source("markov:init=[0.5,0.5];rows=[[0.9,0.1],[0.2,0.8]]")
    assert source.kind == "markov"
    assert numpy.allclose(source.transition, [[0.9, 0.1], [0.2, 0.8]])
    assert numpy.allclose(source.initial.probs, [0.5, 0.5])


@pytest.mark.unit
def test_parse_from_file(tmp_path):
    path = tmp_path / "source.txt"
    path.write_text("iid:0.1,0.9\n")
    assert numpy.allclose(parse_source(str(path)).symbol_pmf.probs, [0.1, 0.9])


@pytest.mark.unit
@pytest.mark.parametrize(
    "spec",
    [
        "gauss:0,1",
        "0.5,0.5",
        "iid:0.5,0.6",
        "iid:a,b",
        "iid:0.5,0.5;colors=[r,g]",
        "markov:init=[0.5,0.5]",
        "markov:init=[0.5,0.5];rows=[[0.9,0.2],[0.2,0.8]]",
        "markov:init=[0.5,0.5];rows=oops",
    ],
)
def test_parse_rejects_malformed(spec):
    with pytest.raises(ValueError):
        parse_source(spec)

import pytest
import weightscope
from weightscope import IndexKind, SimilarityParams

def test_parse():
    assert IndexKind.parse("DOCS")          is IndexKind.DOCS
    assert IndexKind.parse("docs-mean")     is IndexKind.DOCS_MEAN
    assert IndexKind.parse(" svcca_r2 ")    is IndexKind.SVCCA_R2

    with pytest.raises(weightscope.util.ConfigError, match="Unknown index kind 'cka'"):
        IndexKind.parse("cka")

def test_properties():
    assert {kind for kind in IndexKind if kind.is_docs}        == {IndexKind.DOCS, IndexKind.DOCS_MEAN}
    assert {kind for kind in IndexKind if not kind.symmetric}  == {IndexKind.LINREG, IndexKind.LINEAR_HSIC}
    assert {kind for kind in IndexKind if not kind.reflexive}  == {IndexKind.DOCS_MEAN, IndexKind.CCA_R2, IndexKind.LINEAR_HSIC}
    assert {kind for kind in IndexKind if not kind.bounded}    == {IndexKind.LINEAR_HSIC}

def test_score():
    score = weightscope.SimilarityScore(IndexKind.DOCS, 0.5, {"note": 1})

    assert float(score) == 0.5

    # Diagnostics don't take part in comparisons.
    assert score == weightscope.SimilarityScore(IndexKind.DOCS, 0.5)

def test_params():
    params = SimilarityParams()

    assert params.svcca_threshold == 0.99
    assert params.aggregate       == "max"
    assert params.tile            == 512
    assert params.workers         is None
    assert params.compute_dtype   == "f32"

    SimilarityParams(svcca_threshold=1.0, aggregate="mean", tile=1, workers=3, compute_dtype="float64")

    for kwargs in (
        dict(svcca_threshold=0.0),
        dict(svcca_threshold=1.5),
        dict(aggregate="median"),
        dict(tile=0),
        dict(tile=2.5),
        dict(workers=0),
        dict(compute_dtype="f16"),
    ):
        with pytest.raises(weightscope.util.ArgError):
            SimilarityParams(**kwargs)

def test_resolved_workers(monkeypatch):
    monkeypatch.setenv(weightscope.util.THREADS_ENV_VAR, "2")

    assert SimilarityParams(workers=8).resolved_workers() == 2
    assert SimilarityParams(workers=1).resolved_workers() == 1

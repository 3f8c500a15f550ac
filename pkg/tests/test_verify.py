import json

import pytest
import weightscope
from weightscope import IndexKind
from weightscope.verify import Classification, Property, PropertyReport

def test_theorem1():
    report = weightscope.verify.verify_theorem1([2, 4, 8, 64])

    assert report.property is Property.Theorem1
    assert report.holds
    assert report.trials == 4

    for case in report.details["cases"]:
        assert case["squared_norm"] == pytest.approx(2 * case["m"])
        assert case["docs"]         == pytest.approx(case["m"] ** -0.5, abs=1e-12)
        assert case["degenerate"]

    with pytest.raises(weightscope.util.ArgError, match="powers of two"):
        weightscope.verify.verify_theorem1([2, 6])

    with pytest.raises(weightscope.util.ArgError, match="powers of two"):
        weightscope.verify.verify_theorem1([1])

def test_witness_pairs():
    report = weightscope.verify.verify_witness_pairs()

    assert report.property is Property.Discriminativity
    assert report.holds

    high, low = report.details["values"]

    assert high == pytest.approx(0.88, abs=0.01)
    assert low  == pytest.approx(0.76, abs=0.01)

def test_docs_properties():
    reports = weightscope.verify.verify_docs_properties(trials=5, seed=7, workers=2)

    assert [report.property for report in reports] == [
        Property.PT,
        Property.Symmetry,
        Property.IS,
        Property.Reflexivity,
    ]

    for report in reports:
        assert report.holds
        assert report.trials == 5
        assert report.seed   == 7

    assert reports[-1].max_deviation == 0.0

    # The worker count does not change the reports.
    assert weightscope.verify.verify_docs_properties(trials=5, seed=7, workers=1) == reports

    with pytest.raises(weightscope.util.ArgError, match="at least 1 trial"):
        weightscope.verify.verify_docs_properties(trials=0)

@pytest.mark.parametrize("kind, expected", [
    (IndexKind.DOCS,        Classification.Discriminative),
    (IndexKind.LINREG,      Classification.Constant),
    (IndexKind.CCA_NUCLEAR, Classification.Constant),
    (IndexKind.LINEAR_HSIC, Classification.DimensionDependent),
    (IndexKind.LINEAR_CKA,  Classification.Constant),
])
def test_orthogonal_behavior(kind, expected):
    report = weightscope.verify.verify_orthogonal_behavior(kind, n_values=(4, 8, 16), trials_per_n=5, seed=3)

    assert report.property       is Property.OrthogonalBehavior
    assert report.kind           is kind
    assert report.trials         == 15
    assert report.classification is expected
    assert report.classification is weightscope.verify.EXPECTED_ORTHOGONAL_BEHAVIOR[kind]

    assert [entry["n"] for entry in report.details["per_n"]] == [4, 8, 16]

def test_orthogonal_behavior_errors():
    with pytest.raises(weightscope.util.ArgError, match="at least 2 trials"):
        weightscope.verify.verify_orthogonal_behavior(IndexKind.DOCS, trials_per_n=1)

def test_suite():
    reports = weightscope.verify.run_suite(seed=1, trials=3, n_values=(4, 8), trials_per_n=3, workers=2)

    # Theorem, four invariance properties, witness pairs, then one per index.
    assert len(reports) == 6 + len(IndexKind)
    assert weightscope.verify.suite_passes(reports)

    # Every index must be covered.
    assert not weightscope.verify.suite_passes(reports[:-1])

    failing = PropertyReport(Property.PT, IndexKind.DOCS, 1, 1.0, Classification.Fails)
    assert not weightscope.verify.suite_passes([failing] + reports)

    wrong = PropertyReport(Property.OrthogonalBehavior, IndexKind.LINREG, 1, 1.0, Classification.Discriminative)
    assert not weightscope.verify.suite_passes(reports + [wrong])

def test_report_as_dict():
    report = PropertyReport(
        property       = Property.Symmetry,
        kind           = IndexKind.DOCS,
        trials         = 10,
        max_deviation  = 1e-15,
        classification = Classification.Holds,
        seed           = 42,
        tolerance      = 1e-9,
    )

    assert report.as_dict() == dict(
        property       = "Symmetry",
        kind           = "DOCS",
        trials         = 10,
        max_deviation  = 1e-15,
        classification = "Holds",
        seed           = 42,
        tolerance      = 1e-9,
        details        = {},
    )

    json.dumps(report.as_dict())

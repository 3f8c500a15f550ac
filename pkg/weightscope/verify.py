"""Numerical checks of the mathematical properties of similarity indices.

Each check produces a :class:`PropertyReport`, and :func:`run_suite`
runs every check. The reports are reproducible: the same seed always
gives the same reports.
"""

import dataclasses
import enum
import logging
import math

import numpy as np

from . import util
from .simcore import (
    IndexKind,
    SimilarityParams,
    docs,
    hadamard,
    random_orthogonal,
    similarity,
)

__all__ = [
    "Property",
    "Classification",
    "PropertyReport",
    "CONSTANCY_TOLERANCE",
    "DISCRIMINATIVE_FLOOR",
    "EXPECTED_ORTHOGONAL_BEHAVIOR",
    "verify_theorem1",
    "verify_orthogonal_behavior",
    "verify_docs_properties",
    "verify_witness_pairs",
    "run_suite",
    "suite_passes",
]

logger = logging.getLogger(__name__)

class Property(enum.Enum):
    """A property checked by the verifier."""

    PT                 = "PT"
    Symmetry           = "Symmetry"
    IS                 = "IS"
    Reflexivity        = "Reflexivity"
    OrthogonalBehavior = "OrthogonalBehavior"
    Theorem1           = "Theorem1"
    Discriminativity   = "Discriminativity"

class Classification(enum.Enum):
    """The outcome of a check.

    :attr:`Constant`, :attr:`DimensionDependent` and :attr:`Discriminative`
    describe how an index behaves on pairs of orthogonal matrices; the
    other checks either :attr:`Holds` or :attr:`Fails`.
    """

    Constant           = "Constant"
    DimensionDependent = "DimensionDependent"
    Discriminative     = "Discriminative"
    Holds              = "Holds"
    Fails              = "Fails"

#: Spreads at most this large count as constant.
CONSTANCY_TOLERANCE = 1e-6

#: The within-order standard deviation an index must exceed to be discriminative.
DISCRIMINATIVE_FLOOR = 1e-3

PT_TOLERANCE       = 1e-12
SYMMETRY_TOLERANCE = 1e-9
IS_TOLERANCE       = 1e-9

THEOREM1_NORM_TOLERANCE = 1e-9
THEOREM1_DOCS_TOLERANCE = 1e-12

WITNESS_TOLERANCE = 0.01

#: How each index behaves on pairs of orthogonal matrices.
EXPECTED_ORTHOGONAL_BEHAVIOR = {
    IndexKind.DOCS:          Classification.Discriminative,
    IndexKind.DOCS_MEAN:     Classification.Discriminative,
    IndexKind.LINREG:        Classification.Constant,
    IndexKind.CCA_R2:        Classification.Constant,
    IndexKind.CCA_NUCLEAR:   Classification.Constant,
    IndexKind.SVCCA_R2:      Classification.Constant,
    IndexKind.SVCCA_NUCLEAR: Classification.Constant,
    IndexKind.LINEAR_HSIC:   Classification.DimensionDependent,
    IndexKind.LINEAR_CKA:    Classification.Constant,
}

# Two pairs of 3 × 3 orthogonal matrices, to four decimals,
# whose DOCS similarities are about 0.88 and 0.76.
WITNESS_PAIRS = (
    (
        np.array([
            [-0.6676,  0.5171, -0.5357],
            [-0.7310, -0.5917,  0.3399],
            [-0.1412,  0.6185,  0.7730],
        ]),

        np.array([
            [-0.1837,  0.5950,  0.7825],
            [ 0.0457, -0.7900,  0.6114],
            [ 0.9819,  0.1481,  0.1179],
        ]),

        0.88,
    ),

    (
        np.array([
            [-0.8499,  0.0164,  0.5267],
            [-0.0816, -0.9915, -0.1009],
            [ 0.5206, -0.1287,  0.8440],
        ]),

        np.array([
            [-0.7028, -0.6446, -0.3009],
            [ 0.3734, -0.6943,  0.6153],
            [-0.6056,  0.3200,  0.7286],
        ]),

        0.76,
    ),
)

@dataclasses.dataclass(frozen=True)
class PropertyReport:
    """The outcome of checking one property.

    Parameters
    ----------
    property : :class:`Property`
        The checked property.
    kind : :class:`.IndexKind`
        The index it was checked for.
    trials : :class:`int`
        How many cases were evaluated.
    max_deviation : :class:`float`
        The largest deviation from the expected behavior.
    classification : :class:`Classification`
        The outcome.
    seed : :class:`int` or ``None``
        The seed the cases were drawn with, if any.
    tolerance : :class:`float`
        The deviation allowed.
    details : :class:`dict`
        Extra JSON-compatible diagnostics.
    """

    property:       Property
    kind:           IndexKind
    trials:         int
    max_deviation:  float
    classification: Classification
    seed:           int   = None
    tolerance:      float = 0.0
    details:        dict  = dataclasses.field(default_factory=dict, compare=False)

    @property
    def holds(self):
        return self.classification is Classification.Holds

    def as_dict(self):
        """Gets the report as a JSON-compatible :class:`dict`."""

        return dict(
            property       = self.property.value,
            kind           = self.kind.value,
            trials         = self.trials,
            max_deviation  = self.max_deviation,
            classification = self.classification.value,
            seed           = self.seed,
            tolerance      = self.tolerance,
            details        = self.details,
        )

def _holds(ok):
    return Classification.Holds if ok else Classification.Fails

def _f64_docs(x, y):
    return docs(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)).value

def verify_theorem1(m_values=(2, 4, 8, 16, 64, 256)):
    """Checks the DOCS similarity of the standard basis and a scaled Hadamard matrix.

    For each ``m``, ``X`` is the ``m × m`` identity and ``Y`` is
    ``H / √m`` for the Hadamard matrix ``H`` of order ``m``. Both are
    orthogonal, ``‖X - Y‖²`` is ``2m``, and since every absolute cosine
    similarity between their columns is ``1 / √m``, the DOCS
    similarity is exactly ``1 / √m``, through degenerate Gumbel fits.

    Parameters
    ----------
    m_values : iterable of :class:`int`
        The orders, powers of two at least ``2``.

    Returns
    -------
    :class:`PropertyReport`
        The report. Its ``details`` lists the measured
        norms and similarities.

    Raises
    ------
    :exc:`.ArgError`
        If an order is not a power of two, or is ``1``.

    Examples
    --------
    >>> from weightscope.verify import verify_theorem1
    >>> verify_theorem1([2, 4]).classification
    <Classification.Holds: 'Holds'>
    """

    m_values = list(m_values)
    for m in m_values:
        if not util.is_power_of_two(m) or m < 2:
            raise util.ArgError(f"Orders must be powers of two of at least 2, got {m!r}")

    max_deviation = 0.0
    ok            = True
    cases         = []

    for m in m_values:
        x = np.eye(m)
        y = hadamard(m) / math.sqrt(m)

        squared_norm   = float(np.sum(np.square(x - y)))
        norm_deviation = abs(squared_norm - 2 * m) / (2 * m)

        score          = docs(x, y)
        expected       = 1 / math.sqrt(m)
        docs_deviation = abs(score.value - expected)

        degenerate = score.meta["fit_x"].degenerate and score.meta["fit_y"].degenerate

        ok = ok and (
            norm_deviation <= THEOREM1_NORM_TOLERANCE and
            docs_deviation <= THEOREM1_DOCS_TOLERANCE and
            degenerate
        )

        max_deviation = max(max_deviation, norm_deviation, docs_deviation)

        cases.append(dict(m=m, squared_norm=squared_norm, docs=score.value, degenerate=degenerate))

        logger.debug("Theorem check m=%d: ‖X - Y‖² = %r, DOCS = %r", m, squared_norm, score.value)

    return PropertyReport(
        property       = Property.Theorem1,
        kind           = IndexKind.DOCS,
        trials         = len(m_values),
        max_deviation  = max_deviation,
        classification = _holds(ok),
        tolerance      = THEOREM1_NORM_TOLERANCE,
        details        = dict(cases=cases),
    )

def _classify_orthogonal(values_by_n):
    within_spread = max(float(np.ptp(values)) for values in values_by_n.values())
    within_std    = max(float(np.std(values)) for values in values_by_n.values())

    everything   = np.concatenate(list(values_by_n.values()))
    cross_spread = float(np.ptp(everything))

    if cross_spread <= CONSTANCY_TOLERANCE:
        return Classification.Constant, cross_spread

    if within_spread <= CONSTANCY_TOLERANCE:
        return Classification.DimensionDependent, within_spread

    if within_std > DISCRIMINATIVE_FLOOR:
        return Classification.Discriminative, within_spread

    # Varies within an order, but too little to tell from rounding.
    return Classification.Fails, within_spread

def verify_orthogonal_behavior(kind, n_values=(4, 16, 64, 256), trials_per_n=50, seed=0, *, workers=None):
    """Classifies how an index behaves on random pairs of orthogonal matrices.

    For each order ``n``, ``trials_per_n`` pairs of random ``n × n``
    orthogonal matrices are drawn with :func:`.random_orthogonal`
    and compared with the index, computed in ``float64``. SVCCA
    kinds keep every singular vector. The index is then

    - :attr:`~Classification.Constant` if every value agrees
      within :data:`CONSTANCY_TOLERANCE`,
    - :attr:`~Classification.DimensionDependent` if the values
      agree within each order but not across orders,
    - :attr:`~Classification.Discriminative` if, for some order,
      their standard deviation exceeds :data:`DISCRIMINATIVE_FLOOR`.

    Anything else is classified as :attr:`~Classification.Fails`.

    Parameters
    ----------
    kind : :class:`.IndexKind`
        The index.
    n_values : iterable of :class:`int`
        The orders.
    trials_per_n : :class:`int`
        The number of pairs per order, at least ``2``.
    seed : :class:`int`
        The seed the pairs are drawn with.
    workers : :class:`int` or ``None``
        The number of threads to use.

    Returns
    -------
    :class:`PropertyReport`
        The report. Its ``details`` holds the mean and
        standard deviation of the values for each order.

    Raises
    ------
    :exc:`.ArgError`
        If ``trials_per_n`` is less than ``2``.
    """

    if trials_per_n < 2:
        raise util.ArgError(f"Need at least 2 trials per order, got {trials_per_n}")

    n_values = list(n_values)
    gen      = util.generator(seed)
    params   = SimilarityParams(svcca_threshold=1.0, compute_dtype="f64", workers=1)

    # Pairs are drawn up front so that they don't depend on the worker count.
    cases = [
        (n, random_orthogonal(n, gen), random_orthogonal(n, gen))

        for n in n_values
        for _ in range(trials_per_n)
    ]

    def evaluate(case):
        _, x, y = case

        return similarity(kind, x, y, params).value

    values = util.map_ordered(evaluate, cases, workers=util.worker_count(workers))

    values_by_n = {n: [] for n in n_values}
    for (n, _, _), value in zip(cases, values):
        values_by_n[n].append(value)

    values_by_n = {n: np.array(values_by_n[n]) for n in n_values}

    classification, deviation = _classify_orthogonal(values_by_n)

    logger.info("%s on orthogonal matrices: %s", kind.value, classification.value)

    return PropertyReport(
        property       = Property.OrthogonalBehavior,
        kind           = kind,
        trials         = len(cases),
        max_deviation  = deviation,
        classification = classification,
        seed           = seed,
        tolerance      = CONSTANCY_TOLERANCE,

        details = dict(
            discriminative_floor = DISCRIMINATIVE_FLOOR,

            per_n = [
                dict(n=n, mean=float(np.mean(values)), std=float(np.std(values)))

                for n, values in values_by_n.items()
            ],
        ),
    )

def _property_case(gen):
    n   = int(gen.integers(2, 65))
    m_x = int(gen.integers(2, 65))
    m_y = int(gen.integers(2, 65))

    x = util.standard_normal(gen, (n, m_x))
    y = util.standard_normal(gen, (n, m_y))

    perm_x = gen.permutation(m_x)
    perm_y = gen.permutation(m_y)

    a, b = (
        float(gen.choice([-1.0, 1.0]) * 10.0**gen.uniform(-6, 6))

        for _ in range(2)
    )

    return x, y, perm_x, perm_y, a, b

def verify_docs_properties(trials=100, seed=42, *, workers=None):
    """Checks that DOCS has its invariance properties on random matrices.

    Each trial draws Gaussian matrices ``X`` and ``Y`` with a shared
    number of rows and at most 64 rows and columns, and checks that

    - permuting the columns of ``X`` and ``Y`` changes the similarity
      by at most ``1e-12``,
    - swapping ``X`` and ``Y`` changes it by at most ``1e-9``,
    - scaling them by nonzero scalars from ``1e-6`` to ``1e6`` in
      magnitude changes it by at most ``1e-9``,
    - the similarity of ``X`` with itself is exactly ``1``.

    Parameters
    ----------
    trials : :class:`int`
        The number of trials, at least ``1``.
    seed : :class:`int`
        The seed the trials are drawn with.
    workers : :class:`int` or ``None``
        The number of threads to use.

    Returns
    -------
    :class:`list` of :class:`PropertyReport`
        The reports for :attr:`Property.PT`, :attr:`Property.Symmetry`,
        :attr:`Property.IS` and :attr:`Property.Reflexivity`.

    Raises
    ------
    :exc:`.ArgError`
        If ``trials`` is less than ``1``.
    """

    if trials < 1:
        raise util.ArgError(f"Need at least 1 trial, got {trials}")

    gen   = util.generator(seed)
    cases = [_property_case(gen) for _ in range(trials)]

    def evaluate(case):
        x, y, perm_x, perm_y, a, b = case

        base = _f64_docs(x, y)

        return (
            abs(_f64_docs(x[:, perm_x], y[:, perm_y]) - base),
            abs(_f64_docs(y, x) - base),
            abs(_f64_docs(a * x, b * y) - base),
            abs(_f64_docs(x, x) - 1.0),
        )

    deviations = np.array(util.map_ordered(evaluate, cases, workers=util.worker_count(workers)))

    reports = []
    for column, (prop, tolerance) in enumerate([
        (Property.PT,          PT_TOLERANCE),
        (Property.Symmetry,    SYMMETRY_TOLERANCE),
        (Property.IS,          IS_TOLERANCE),
        (Property.Reflexivity, 0.0),
    ]):
        max_deviation = float(np.max(deviations[:, column]))

        reports.append(PropertyReport(
            property       = prop,
            kind           = IndexKind.DOCS,
            trials         = trials,
            max_deviation  = max_deviation,
            classification = _holds(max_deviation <= tolerance),
            seed           = seed,
            tolerance      = tolerance,
        ))

        logger.info("DOCS %s over %d trials: max deviation %r", prop.value, trials, max_deviation)

    return reports

def verify_witness_pairs():
    """Checks that DOCS tells apart two pairs of orthogonal matrices.

    Two pairs of ``3 × 3`` orthogonal matrices have DOCS
    similarities of about ``0.88`` and ``0.76``, whereas the
    constant baseline indices give both pairs the same value.

    Returns
    -------
    :class:`PropertyReport`
        A :attr:`Property.Discriminativity` report, which holds if
        both similarities are within ``0.01`` of those values.
    """

    values = [_f64_docs(x, y) for x, y, _ in WITNESS_PAIRS]

    max_deviation = max(abs(value - expected) for value, (_, _, expected) in zip(values, WITNESS_PAIRS))

    return PropertyReport(
        property       = Property.Discriminativity,
        kind           = IndexKind.DOCS,
        trials         = len(WITNESS_PAIRS),
        max_deviation  = max_deviation,
        classification = _holds(max_deviation <= WITNESS_TOLERANCE and values[0] != values[1]),
        tolerance      = WITNESS_TOLERANCE,
        details        = dict(values=values),
    )

def run_suite(seed=42, trials=100, *, n_values=(4, 16, 64, 256), trials_per_n=50, workers=None):
    """Runs every check.

    Parameters
    ----------
    seed : :class:`int`
        The seed for every randomized check.
    trials : :class:`int`
        The number of trials of :func:`verify_docs_properties`.
    n_values : iterable of :class:`int`
        The orders for :func:`verify_orthogonal_behavior`.
    trials_per_n : :class:`int`
        The number of pairs per order for :func:`verify_orthogonal_behavior`.
    workers : :class:`int` or ``None``
        The number of threads to use.

    Returns
    -------
    :class:`list` of :class:`PropertyReport`
        The reports, with one orthogonal behavior
        report for each :class:`.IndexKind`.
    """

    logger.info("Running verification suite with seed %d", seed)

    reports = [verify_theorem1()]
    reports.extend(verify_docs_properties(trials, seed, workers=workers))
    reports.append(verify_witness_pairs())

    for kind in IndexKind:
        reports.append(verify_orthogonal_behavior(kind, n_values, trials_per_n, seed, workers=workers))

    return reports

def suite_passes(reports):
    """Checks whether the reports of :func:`run_suite` are as expected.

    Every property report must hold, and every index must
    behave on orthogonal matrices as listed in
    :data:`EXPECTED_ORTHOGONAL_BEHAVIOR`.

    Returns
    -------
    :class:`bool`
        Whether everything is as expected.
    """

    covered = set()

    for report in reports:
        if report.property is Property.OrthogonalBehavior:
            covered.add(report.kind)

            if report.classification is not EXPECTED_ORTHOGONAL_BEHAVIOR[report.kind]:
                logger.warning(
                    "%s behaves as %s on orthogonal matrices, expected %s",

                    report.kind.value,
                    report.classification.value,
                    EXPECTED_ORTHOGONAL_BEHAVIOR[report.kind].value,
                )

                return False

        elif not report.holds:
            logger.warning("%s does not hold for %s: max deviation %r", report.property.value, report.kind.value, report.max_deviation)

            return False

    return covered == set(EXPECTED_ORTHOGONAL_BEHAVIOR)

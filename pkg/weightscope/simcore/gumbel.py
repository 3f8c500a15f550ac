"""Maximum likelihood fitting of Gumbel distributions."""

import dataclasses
import math

import numpy as np
import scipy.special
import scipy.stats

from .. import util

__all__ = [
    "DEGENERATE_STD",
    "GumbelFit",
    "GumbelHistogram",
    "gumbel_fit_location",
    "gumbel_histogram",
]

#: Data with a sample standard deviation below this gives a degenerate fit.
DEGENERATE_STD = 1e-12

@dataclasses.dataclass(frozen=True)
class GumbelFit:
    """A fitted Gumbel (maximum) distribution.

    Parameters
    ----------
    location_u : :class:`float`
        The location.
    scale_beta : :class:`float`
        The scale, ``0`` for a degenerate fit.
    iterations : :class:`int`
        How many iterations the solver took.
    converged : :class:`bool`
        Whether the solver converged.
    degenerate : :class:`bool`
        Whether the data was (numerically) constant.
    """

    location_u: float
    scale_beta: float
    iterations: int
    converged:  bool
    degenerate: bool

    def pdf(self, x):
        """Evaluates the fitted density.

        Parameters
        ----------
        x : array-like
            Where to evaluate it.

        Returns
        -------
        :class:`numpy.ndarray`
            The density, or NaN everywhere for a degenerate fit.
        """

        x = np.asarray(x, dtype=np.float64)
        if self.degenerate:
            return np.full_like(x, np.nan)

        return scipy.stats.gumbel_r.pdf(x, loc=self.location_u, scale=self.scale_beta)

    def as_dict(self):
        """Gets the fit as a JSON-compatible :class:`dict`."""

        return dataclasses.asdict(self)

def _constant_location(x):
    # Exact when every sample is equal.
    return float(x[0] + np.mean(x - x[0]))

def gumbel_fit_location(data, *, tolerance=1e-10, max_iterations=200):
    """Fits a Gumbel distribution by maximum likelihood.

    The scale solves ``β = mean(x) - Σ xᵢ wᵢ / Σ wᵢ`` with
    ``wᵢ = exp(-xᵢ / β)``, found by Newton's method started from
    the method-of-moments estimate ``β₀ = std(x) √6 / π``. The
    location is then ``u = -β ln(mean(exp(-xᵢ / β)))``. Exponential
    sums are computed with max-shifting, and the data are sorted
    first so the fit does not depend on their order.

    Parameters
    ----------
    data : array-like
        The finite samples, at least one.
    tolerance : :class:`float`
        Iteration stops once a step changes ``β`` by at most
        ``tolerance * max(1, β)``.
    max_iterations : :class:`int`
        The iteration cap.

    Returns
    -------
    :class:`GumbelFit`
        The fit. If the sample standard deviation is below
        :data:`DEGENERATE_STD`, the fit is degenerate with the
        mean as location and zero scale. If the solver does not
        converge, the last iterate is returned with ``converged``
        unset.

    Raises
    ------
    :exc:`.NonFiniteError`
        If any sample is NaN or infinite.
    :exc:`.ArgError`
        If there are no samples.

    Examples
    --------
    >>> from weightscope.simcore import gumbel_fit_location
    >>> fit = gumbel_fit_location([0.5, 0.5, 0.5])
    >>> fit.location_u, fit.scale_beta, fit.degenerate
    (0.5, 0.0, True)
    """

    x = np.sort(np.asarray(data, dtype=np.float64).ravel())
    if x.size == 0:
        raise util.ArgError("Cannot fit a Gumbel distribution to no data")

    non_finite = x.size - int(np.count_nonzero(np.isfinite(x)))
    if non_finite > 0:
        raise util.NonFiniteError("Gumbel fit data", non_finite)

    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    if std < DEGENERATE_STD:
        return GumbelFit(_constant_location(x), 0.0, 0, True, True)

    mean = float(np.mean(x))
    beta = std * math.sqrt(6) / math.pi

    converged  = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        weights       = scipy.special.softmax(-x / beta)
        weighted_mean = float(weights @ x)
        weighted_var  = float(weights @ np.square(x - weighted_mean))

        residual   = (mean - weighted_mean) - beta
        derivative = 1.0 + weighted_var / beta**2

        new_beta = beta + residual / derivative
        if new_beta <= 0:
            new_beta = beta / 2

        step = new_beta - beta
        beta = new_beta

        if abs(step) <= tolerance * max(1.0, beta):
            converged = True

            break

    location = -beta * (float(scipy.special.logsumexp(-x / beta)) - math.log(x.size))
    location = min(max(location, float(x[0])), float(x[-1]))

    return GumbelFit(location, beta, iterations, converged, False)

@dataclasses.dataclass(frozen=True)
class GumbelHistogram:
    """Histogram data for comparing samples with their Gumbel fit.

    Parameters
    ----------
    edges : :class:`numpy.ndarray`
        The bin edges.
    counts : :class:`numpy.ndarray`
        The number of samples per bin.
    density : :class:`numpy.ndarray`
        The empirical density per bin.
    fitted_density : :class:`numpy.ndarray`
        The fitted density at each bin centre.
    """

    edges:          np.ndarray
    counts:         np.ndarray
    density:        np.ndarray
    fitted_density: np.ndarray

    @property
    def centers(self):
        """The bin centres."""

        return (self.edges[:-1] + self.edges[1:]) / 2

def gumbel_histogram(values, fit=None, bins=50):
    """Bins samples and evaluates their fitted Gumbel density.

    Parameters
    ----------
    values : array-like
        The samples, e.g. :attr:`.CosineMaxVector.values`.
    fit : :class:`GumbelFit` or ``None``
        The fit. If ``None``, :func:`gumbel_fit_location` is used.
    bins : :class:`int`
        The number of bins.

    Returns
    -------
    :class:`GumbelHistogram`
        The histogram.
    """

    values = np.asarray(values, dtype=np.float64).ravel()
    if fit is None:
        fit = gumbel_fit_location(values)

    if bins < 1:
        raise util.ArgError(f"Bin count must be positive, got {bins}")

    counts, edges = np.histogram(values, bins=bins)
    density, _    = np.histogram(values, bins=edges, density=True)

    return GumbelHistogram(edges, counts, density, fit.pdf((edges[:-1] + edges[1:]) / 2))

"""Seeded random number generation.

All randomness in :mod:`weightscope` flows through a NumPy
:class:`numpy.random.Generator` driven by the counter-based
:class:`numpy.random.Philox` bit generator, seeded with a
64-bit integer. Gaussian variates are produced by the
Box-Muller transform applied to the generator's uniform
output in a fixed order, so that fixtures reproduce exactly
given the same seed.
"""

import numpy as np

__all__ = [
    "generator",
    "standard_normal",
]

def generator(seed):
    """Creates a seeded random number generator.

    Parameters
    ----------
    seed : :class:`int`
        A non-negative seed, at most 64 bits wide.

    Returns
    -------
    :class:`numpy.random.Generator`
        The generator.

    Raises
    ------
    :exc:`ValueError`
        If ``seed`` is negative or wider than 64 bits.
    """

    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"Seed must be an unsigned 64-bit integer, got {seed}")

    return np.random.Generator(np.random.Philox(seed))

def standard_normal(gen, shape):
    """Draws standard normal variates with the Box-Muller transform.

    Uniform pairs ``(u1, u2)`` are drawn in order and each
    pair produces ``sqrt(-2 ln u1) cos(2 pi u2)`` followed by
    ``sqrt(-2 ln u1) sin(2 pi u2)``. The values fill the output
    in C order.

    Parameters
    ----------
    gen : :class:`numpy.random.Generator`
        The generator to draw from.
    shape : :class:`int` or :class:`tuple` of :class:`int`
        The shape of the output.

    Returns
    -------
    :class:`numpy.ndarray`
        A ``float64`` array of the given shape.

    Examples
    --------
    >>> import numpy as np
    >>> import weightscope
    >>> a = weightscope.util.standard_normal(weightscope.util.generator(7), (2, 3))
    >>> b = weightscope.util.standard_normal(weightscope.util.generator(7), (2, 3))
    >>> a.shape
    (2, 3)
    >>> bool(np.array_equal(a, b))
    True
    """

    count = int(np.prod(shape, dtype=np.int64))
    pairs = (count + 1) // 2

    uniforms = gen.random(2 * pairs).reshape(pairs, 2)

    # 'random' samples [0, 1), so flip to (0, 1] for the logarithm.
    radius = np.sqrt(-2.0 * np.log(1.0 - uniforms[:, 0]))
    angle  = 2.0 * np.pi * uniforms[:, 1]

    values = np.empty((pairs, 2))
    values[:, 0] = radius * np.cos(angle)
    values[:, 1] = radius * np.sin(angle)

    return values.reshape(-1)[:count].reshape(shape)

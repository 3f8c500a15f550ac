"""Utilities related to binary operations."""

__all__ = [
    "bit",
    "is_power_of_two",
]

def bit(n):
    """Gets the number with the ``n``-th bit set.

    Parameters
    ----------
    n : :class:`int`
        The bit to set.

    Returns
    ------
    :class:`int`
        The number with the ``n``-th bit set.

    Examples
    --------
    >>> import weightscope
    >>> weightscope.util.bit(0)
    1
    >>> weightscope.util.bit(4)
    16
    """

    return (1 << n)

def is_power_of_two(num):
    """Checks whether a number is a positive power of two.

    Parameters
    ----------
    num : :class:`int`
        The number to check.

    Returns
    -------
    :class:`bool`
        Whether ``num`` equals ``2**k`` for some ``k >= 0``.

    Examples
    --------
    >>> import weightscope
    >>> weightscope.util.is_power_of_two(1)
    True
    >>> weightscope.util.is_power_of_two(64)
    True
    >>> weightscope.util.is_power_of_two(12)
    False
    >>> weightscope.util.is_power_of_two(0)
    False
    """

    if not isinstance(num, int) or isinstance(num, bool) or num < 1:
        return False

    return (num & (num - 1)) == 0

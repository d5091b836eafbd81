"""
Small argument checks shared by the configuration validation. The ``*_problem`` helpers
return the violation as an exception instance (or None) so that a caller can collect every
violation before raising.
"""

import numbers

from mmshare.exceptions import BadArrayShape, NonPositiveParameter


def check_dtype(attribute, correct_dtype, attribute_name):
    """Check that a configuration value has the correct type.

    Parameters
    ----------
    attribute : object
        Value to check.
    correct_dtype : type or tuple of types
        Accepted type(s).
    attribute_name : str
        Name of the value (for the error message).

    Raises
    ------
    TypeError
        If the value is not of the correct type. Booleans are never accepted as numbers.
    """
    if isinstance(attribute, bool) and correct_dtype is not bool:
        correct = False
    else:
        correct = isinstance(attribute, correct_dtype)
    if not correct:
        if isinstance(correct_dtype, tuple):
            expected = " or ".join(t.__name__ for t in correct_dtype)
        else:
            expected = correct_dtype.__name__
        raise TypeError(
            f"Incorrect data type for {attribute_name}: must be of type {expected}, "
            f"not {type(attribute).__name__}."
        )


def check_number(attribute, attribute_name, integer=False):
    """Type check for a real (or integer) configuration value."""
    check_dtype(attribute, numbers.Integral if integer else numbers.Real, attribute_name)


def positive_problem(value, name, allow_zero=False):
    """Return a NonPositiveParameter if ``value`` is not > 0 (or >= 0), else None."""
    if allow_zero and value >= 0:
        return None
    if not allow_zero and value > 0:
        return None
    bound = ">= 0" if allow_zero else "> 0"
    return NonPositiveParameter(f"{name} must be {bound}, got {value!r}.")


def array_shape_problem(shape, name):
    """Return a BadArrayShape if ``shape`` is not a pair of integers >= 1, else None."""
    if (
        not isinstance(shape, (tuple, list))
        or len(shape) != 2
        or not all(isinstance(n, numbers.Integral) and not isinstance(n, bool) for n in shape)
        or min(shape) < 1
    ):
        return BadArrayShape(f"{name} must be (rows, cols) with both >= 1, got {shape!r}.")
    return None

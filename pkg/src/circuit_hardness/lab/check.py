import math
from functools import wraps
from typing import Callable


class InvalidParameterError(Exception):
    """Simple error class to handle invalid numerical parameters."""

    pass


class ThetaRangeError(InvalidParameterError):
    """Simple error class to handle interpolation parameters outside of [0, m]."""

    pass


def check_finite(name: str, value: float) -> float:
    """
    Assert that a numerical parameter is a finite real number.

    :name (str) The parameter name, for the error message
    :value (float) The value to check

    Return the value as a float
    """
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f'Parameter {name}: {value!r} is not a number.')
    if not math.isfinite(value):
        raise InvalidParameterError(f'Parameter {name}: {value} is not finite.')
    return value


def check_range(name: str, value: float, low: float, high: float,
                low_open: bool = False, high_open: bool = False) -> float:
    """
    Assert that a parameter lies within an interval.

    :name (str) The parameter name, for the error message
    :value (float) The value to check
    :low (float) Lower end of the interval
    :high (float) Upper end of the interval
    :low_open (bool) Whether the lower end is excluded
    :high_open (bool) Whether the upper end is excluded

    Return the value as a float
    """
    value = check_finite(name, value)
    below = value <= low if low_open else value < low
    above = value >= high if high_open else value > high
    if below or above:
        left, right = '(' if low_open else '[', ')' if high_open else ']'
        raise InvalidParameterError(
            f'Parameter {name}: {value} is outside of {left}{low}, {high}{right}.')
    return value


def theta_checker(func: Callable) -> Callable:
    """
    Verify the interpolation parameter of a draw-based function.

    Meant to be used as a decorator on functions called as func(draw, theta, ...)

    :func (Callable) The decorated function to be called

    Return the wrapper function executing the verification
    """
    @wraps(func)
    def wrapper(draw, theta, *args, **kwargs):
        """
        Assert that 0 <= theta <= m before calling the decorated function.

        :draw (RandomDraw) The draw defining C(theta)
        :theta (float) The interpolation parameter

        Return the decorated function result
        """
        value = check_finite('theta', theta)
        if not 0.0 <= value <= draw.m:
            raise ThetaRangeError(f'theta={value} is outside of [0, {draw.m}]')
        return func(draw, value, *args, **kwargs)
    return wrapper

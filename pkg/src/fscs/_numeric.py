"""Ratio helpers that tolerate binary round-off (0.2e-3 / 0.5e-6 == 399.99999999999994)."""

import math

_REL = 1e-9


def as_integer_ratio(num, den):
    """Return ``num/den`` as an int if it is integral up to round-off, else None."""
    q = num / den
    r = round(q)
    if abs(q - r) <= _REL * max(1.0, abs(q)):
        return int(r)
    return None


def floor_ratio(num, den):
    r = as_integer_ratio(num, den)
    return r if r is not None else math.floor(num / den)


def ceil_ratio(num, den):
    r = as_integer_ratio(num, den)
    return r if r is not None else math.ceil(num / den)

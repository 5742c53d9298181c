"""Small shared numerics helpers."""

import numpy as np


def loglog_slope(x, y, drop_zero=True):
    """Least-squares slope of log10(y) against log10(x).

    Used for measuring decay/growth exponents. Nonpositive y entries are
    dropped when drop_zero is set (they carry no log information); raises
    ValueError if fewer than two usable points remain.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if drop_zero:
        keep = (y > 0) & (x > 0) & np.isfinite(y)
        x, y = x[keep], y[keep]
    if x.size < 2:
        raise ValueError("need at least two positive samples for a slope fit")
    return np.polyfit(np.log10(x), np.log10(y), 1)[0]


def relerr(value, reference, floor=0.0):
    """max-norm relative error with an absolute floor on the denominator."""
    value = np.asarray(value)
    reference = np.asarray(reference)
    num = np.max(np.abs(value - reference))
    den = max(np.max(np.abs(reference)), floor, np.finfo(float).tiny)
    return num / den


def hermitian_part(m):
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))

"""Every alpha-power in the package goes through these two helpers.

Odd-symmetric powers of negative bases are formed as ``sign(t) * |t|**p`` so
that no fractional power of a negative float is ever taken.
"""
import numpy as np


def apow(t, p):
    """|t| ** p, elementwise."""
    return np.abs(t) ** p


def spow(t, p):
    """sign(t) * |t| ** p, elementwise (odd extension of t ** p)."""
    return np.sign(t) * np.abs(t) ** p


def check_alpha(alpha):
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha <= 0:
        raise ValueError(f"alpha must be a positive finite real, got {alpha!r}")
    return alpha

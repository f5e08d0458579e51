"""Angle wrapping helpers shared across sampling, alignment and scoring."""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_two_pi(angle):
    """Wrap angles to [0, 2*pi).  Scalar in, float out; array in, array out."""
    wrapped = np.mod(angle, TWO_PI)
    # np.mod can round up to the modulus itself for tiny negative inputs
    wrapped = np.where(wrapped == TWO_PI, 0.0, wrapped)
    if np.ndim(angle) == 0:
        return float(wrapped)
    return wrapped


def wrap_pi(angle):
    """Wrap angles to [-pi, pi).  Scalar in, float out; array in, array out."""
    wrapped = np.mod(np.asanyarray(angle) + np.pi, TWO_PI) - np.pi
    wrapped = np.where(wrapped >= np.pi, wrapped - TWO_PI, wrapped)
    if np.ndim(angle) == 0:
        return float(wrapped)
    return wrapped

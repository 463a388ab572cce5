"""Beta-polynomial MIDAS lag weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, DomainError

__all__ = ["WeightVector", "beta_weights", "beta_weights_restricted"]

# Above this exponent the powers are evaluated through logs to dodge underflow.
_LOG_SPACE_EXPONENT = 50.0


@dataclass(frozen=True)
class WeightVector:
    weights: np.ndarray
    omega1: float
    omega2: float

    @property
    def K(self) -> int:
        return self.weights.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


def beta_weights(K: int, omega1: float, omega2: float) -> WeightVector:
    """Normalised weights ``(k/K)^(omega1-1) * (1-k/K)^(omega2-1)`` for k = 1..K.

    The last lag sits at ``1 - K/K = 0``, so its weight vanishes for
    ``omega2 > 1`` and is one (``0**0``) for ``omega2 == 1``. A single lag
    (K = 1) always gets weight one.
    """
    if int(K) != K or K < 1:
        raise DomainError(f"lag order must be a positive integer, got {K}")
    if not (omega1 >= 1.0 and omega2 >= 1.0):
        raise DomainError(f"beta shape parameters must be >= 1, got ({omega1}, {omega2})")
    K = int(K)
    if K == 1:
        w = np.ones(1)
    else:
        x = np.arange(1, K + 1) / K
        a, b = omega1 - 1.0, omega2 - 1.0
        if max(a, b) > _LOG_SPACE_EXPONENT:
            with np.errstate(divide="ignore"):
                logw = a * np.log(x) + (b * np.log1p(-x) if b > 0 else 0.0)
            w = np.exp(logw - logw.max())
        else:
            w = x ** a * (1.0 - x) ** b
        total = w.sum()
        if not total > 0.0:
            raise DegeneracyError(f"beta weights vanish for K={K}, omega=({omega1}, {omega2})")
        w = w / total
    w.setflags(write=False)
    return WeightVector(w, float(omega1), float(omega2))


def beta_weights_restricted(K: int, omega2: float) -> WeightVector:
    """Decaying weights with the first shape parameter pinned to one."""
    return beta_weights(K, 1.0, omega2)

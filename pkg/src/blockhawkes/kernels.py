"""Parametric excitation kernels for multivariate Hawkes processes.

A kernel phi_ij(t) gives the boost a past event of component j adds to the
intensity of component i after a lag of t hours.  Three families are
supported:

* :class:`ExponentialKernel`   phi_ij(t) = alpha_ij * exp(-beta_ij * t)
* :class:`SumExpKernel`        phi_ij(t) = sum_u alpha^u_ij * exp(-beta^u * t),
  with decays beta^u shared across all (i, j) pairs
* :class:`PowerLawKernel`      phi_ij(t) = alpha_ij * (c_ij + t)^(-beta_ij),
  integrable only for beta_ij > 1

Only the exponential families admit O(n) recursive likelihood evaluation;
the power-law kernel is supported for evaluation and simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError


def _as_matrix(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} must be finite")
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ExponentialKernel:
    """Single-exponential kernel with per-pair amplitudes and decays."""

    alpha: np.ndarray  # (m, m), >= 0
    beta: np.ndarray   # (m, m), > 0, per hour

    def __post_init__(self):
        alpha = _as_matrix(self.alpha, "alpha")
        beta = _as_matrix(self.beta, "beta")
        if alpha.shape != beta.shape:
            raise InvalidInputError("alpha and beta must share a shape")
        if np.any(alpha < 0):
            raise InvalidInputError("alpha entries must be >= 0")
        if np.any(beta <= 0):
            raise InvalidInputError("beta entries must be > 0")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def dim(self) -> int:
        return self.alpha.shape[0]

    def phi(self, i: int, j: int, lags) -> np.ndarray:
        """Evaluate phi_ij at nonnegative lags (1-based i, j)."""
        lags = np.asarray(lags, dtype=float)
        return self.alpha[i - 1, j - 1] * np.exp(-self.beta[i - 1, j - 1] * lags)

    def norms(self) -> np.ndarray:
        """Integral of each phi_ij over [0, inf): alpha / beta."""
        return self.alpha / self.beta


@dataclass(frozen=True)
class SumExpKernel:
    """Sum-of-exponentials kernel with decays shared across pairs.

    The shared decays are what make the intensity a finite-dimensional
    Markov state, enabling O(n) evaluation over an event sequence.
    """

    alpha: np.ndarray   # (U, m, m), >= 0
    decays: np.ndarray  # (U,), > 0, strictly increasing

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        decays = np.asarray(self.decays, dtype=float)
        if alpha.ndim != 3 or alpha.shape[1] != alpha.shape[2]:
            raise InvalidInputError(f"alpha must have shape (U, m, m), got {alpha.shape}")
        if decays.ndim != 1 or decays.shape[0] != alpha.shape[0]:
            raise InvalidInputError("decays must be a vector of length U")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(decays))):
            raise InvalidInputError("kernel parameters must be finite")
        if np.any(alpha < 0):
            raise InvalidInputError("alpha entries must be >= 0")
        if np.any(decays <= 0):
            raise InvalidInputError("decays must be > 0")
        if np.any(np.diff(decays) <= 0):
            raise InvalidInputError("decays must be strictly increasing (canonical order)")
        alpha.flags.writeable = False
        decays.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "decays", decays)

    @property
    def dim(self) -> int:
        return self.alpha.shape[1]

    @property
    def num_decays(self) -> int:
        return self.alpha.shape[0]

    def phi(self, i: int, j: int, lags) -> np.ndarray:
        lags = np.asarray(lags, dtype=float)
        out = np.zeros_like(lags, dtype=float)
        for u in range(self.num_decays):
            out += self.alpha[u, i - 1, j - 1] * np.exp(-self.decays[u] * lags)
        return out

    def norms(self) -> np.ndarray:
        """sum_u alpha^u / beta^u."""
        return np.tensordot(1.0 / self.decays, self.alpha, axes=(0, 0))


@dataclass(frozen=True)
class PowerLawKernel:
    """Shifted power-law kernel, capturing long-memory excitation."""

    alpha: np.ndarray  # (m, m), >= 0
    c: np.ndarray      # (m, m), > 0 (shift, hours)
    beta: np.ndarray   # (m, m), > 1 (integrability)

    def __post_init__(self):
        alpha = _as_matrix(self.alpha, "alpha")
        c = _as_matrix(self.c, "c")
        beta = _as_matrix(self.beta, "beta")
        if alpha.shape != c.shape or alpha.shape != beta.shape:
            raise InvalidInputError("alpha, c, beta must share a shape")
        if np.any(alpha < 0):
            raise InvalidInputError("alpha entries must be >= 0")
        if np.any(c <= 0):
            raise InvalidInputError("c entries must be > 0")
        if np.any(beta <= 1):
            raise InvalidInputError("beta entries must be > 1 for an integrable kernel")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "beta", beta)

    @property
    def dim(self) -> int:
        return self.alpha.shape[0]

    def phi(self, i: int, j: int, lags) -> np.ndarray:
        lags = np.asarray(lags, dtype=float)
        a = self.alpha[i - 1, j - 1]
        return a * (self.c[i - 1, j - 1] + lags) ** (-self.beta[i - 1, j - 1])

    def norms(self) -> np.ndarray:
        """alpha * c^(1-beta) / (beta - 1)."""
        return self.alpha * self.c ** (1.0 - self.beta) / (self.beta - 1.0)


KernelSpec = Union[ExponentialKernel, SumExpKernel, PowerLawKernel]

"""Implicit trajectory (Hankel) matrices.

The L x K trajectory matrix of a series ``x`` has entries ``X[i, j] = x[i + j]``.
It is never formed here: products with ``X`` and ``X.T`` are correlations of
``x`` with the argument vector and are evaluated with real FFTs of a fixed
length ``>= N``, so one product costs O(N log N) whatever the window length.
Diagonal averaging of a rank-one matrix ``u v^T`` is a linear convolution of
``u`` and ``v`` divided by the antidiagonal counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import fft as sfft

from .errors import ParameterError

__all__ = [
    "WindowSpec",
    "HankelOperator",
    "embed",
    "hmatvec",
    "hmatvec_t",
    "hankelize_rank1",
    "hankelize_matrix",
    "antidiag_counts",
    "trajectory_matrix",
]


@dataclass(frozen=True)
class WindowSpec:
    """Series length ``N`` and window length ``L``; ``K = N - L + 1``."""

    N: int
    L: int

    def __post_init__(self):
        if not 1 < self.L < self.N:
            raise ParameterError(
                f"window length must satisfy 1 < L < N, got L={self.L}, N={self.N}"
            )

    @property
    def K(self):
        return self.N - self.L + 1

    @property
    def rank_bound(self):
        return min(self.L, self.K)

    @classmethod
    def from_shape(cls, L, K):
        return cls(L + K - 1, L)


@lru_cache(maxsize=64)
def _counts(N, L):
    K = N - L + 1
    s = np.arange(1, N + 1)
    w = np.minimum(np.minimum(s, N - s + 1), min(L, K))
    w.setflags(write=False)
    return w


def antidiag_counts(spec: WindowSpec) -> np.ndarray:
    """Number of trajectory-matrix entries on each antidiagonal.

    Element ``s`` (0-based) is ``min(s + 1, L, K, N - s)``; these are also the
    weights of the w-correlation inner product. The returned array is shared
    and read-only.
    """
    return _counts(spec.N, spec.L)


class HankelOperator:
    """Trajectory matrix of a series held as the spectrum of the zero-padded series.

    Instances are immutable; all products allocate their own work arrays, so
    one operator can be used from several threads.
    """

    def __init__(self, values, L):
        x = np.array(values, dtype=float, copy=True).ravel()
        x.setflags(write=False)
        self.spec = WindowSpec(x.size, int(L))
        self.series = x
        self.nfft = sfft.next_fast_len(x.size, real=True)
        spectrum = sfft.rfft(x, self.nfft)
        spectrum.setflags(write=False)
        self.spectrum = spectrum

    @property
    def shape(self):
        return (self.spec.L, self.spec.K)

    def matvec(self, v):
        return hmatvec(self, v)

    def rmatvec(self, u):
        return hmatvec_t(self, u)

    def _correlate(self, w):
        # full-length linear correlation; indices >= n-1 are free of wrap-around
        n = w.shape[0]
        wf = sfft.rfft(w[::-1], self.nfft, axis=0)
        if wf.ndim == 2:
            prod = wf * self.spectrum[:, None]
        else:
            prod = wf * self.spectrum
        return sfft.irfft(prod, self.nfft, axis=0)[n - 1 : self.spec.N]

    def dense(self):
        """Explicit L x K trajectory matrix (copy)."""
        return trajectory_matrix(self.series, self.spec.L)

    @cached_property
    def frobenius_norm2(self):
        w = antidiag_counts(self.spec)
        return float(np.dot(w, self.series**2))

    def __repr__(self):
        return f"HankelOperator(N={self.spec.N}, L={self.spec.L}, K={self.spec.K})"


def trajectory_matrix(values, L):
    """Dense trajectory matrix built directly from lagged windows."""
    x = np.asarray(values, dtype=float).ravel()
    WindowSpec(x.size, L)
    return sliding_window_view(x, x.size - L + 1).copy()


def embed(series, L: int) -> HankelOperator:
    """Embedding step: wrap ``series`` into an implicit trajectory operator."""
    return HankelOperator(np.asarray(series, dtype=float), L)


def _check_vec(v, n, what):
    v = np.asarray(v, dtype=float)
    if v.shape[0] != n or v.ndim > 2:
        raise ParameterError(f"{what} must have length {n}, got shape {v.shape}")
    return v


def hmatvec(op: HankelOperator, v) -> np.ndarray:
    """``X @ v`` for a vector of length K (or a K x m block)."""
    v = _check_vec(v, op.spec.K, "vector")
    return op._correlate(v)


def hmatvec_t(op: HankelOperator, u) -> np.ndarray:
    """``X.T @ u`` for a vector of length L (or an L x m block)."""
    u = _check_vec(u, op.spec.L, "vector")
    return op._correlate(u)


def hankelize_rank1(u, v) -> np.ndarray:
    """Diagonal average of the outer product ``u v^T``."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    spec = WindowSpec.from_shape(u.size, v.size) if u.size > 1 and v.size > 1 else None
    if spec is None:
        raise ParameterError("hankelization needs L >= 2 and K >= 2")
    nfft = sfft.next_fast_len(spec.N, real=True)
    conv = sfft.irfft(sfft.rfft(u, nfft) * sfft.rfft(v, nfft), nfft)[: spec.N]
    return conv / antidiag_counts(spec)


def hankelize_matrix(Y) -> np.ndarray:
    """Diagonal average of a dense L x K matrix (reference implementation)."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] < 2 or Y.shape[1] < 2:
        raise ParameterError(f"expected an L x K matrix with L, K >= 2, got {Y.shape}")
    L, K = Y.shape
    spec = WindowSpec.from_shape(L, K)
    out = np.zeros(spec.N)
    for i in range(L):
        out[i : i + K] += Y[i]
    return out / antidiag_counts(spec)

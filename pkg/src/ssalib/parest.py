"""Signal roots, frequencies and damping rates.

A root ``mu = rho * exp(i * 2 pi * omega)`` of the characteristic polynomial
corresponds to the term ``rho^n cos(2 pi omega n + phi)``; its damping rate is
``log(rho)`` and its (signed) period ``1 / omega``. Conjugate roots appear as
pairs with mirrored periods, and real positive roots have infinite period.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import NumericalError, ParameterError

__all__ = ["RootSet", "PairEstimate", "roots", "esprit", "pairs_estimate", "series_rank"]


def _order(mu):
    mu = np.asarray(mu, dtype=complex)
    order = np.argsort(-np.abs(mu), kind="stable")
    mu = mu[order]
    # keep conjugate pairs together, positive argument first
    k = 0
    while k < mu.size - 1:
        a, b = mu[k], mu[k + 1]
        if a.imag != 0 and abs(b - np.conj(a)) <= 1e-8 * max(abs(a), 1e-300):
            if a.imag < 0:
                mu[k], mu[k + 1] = b, a
            k += 2
        else:
            k += 1
    return mu


@dataclass(frozen=True)
class RootSet:
    """Complex roots ordered by decreasing modulus."""

    roots: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "roots", _order(self.roots))

    def __len__(self):
        return self.roots.size

    @property
    def moduli(self):
        return np.abs(self.roots)

    @property
    def args(self):
        return np.angle(self.roots)

    @property
    def frequencies(self):
        return self.args / (2 * np.pi)

    @property
    def periods(self):
        a = self.args
        with np.errstate(divide="ignore"):
            return np.where(a == 0, np.inf, 2 * np.pi / np.where(a == 0, 1.0, a))

    @property
    def rates(self):
        with np.errstate(divide="ignore"):
            return np.log(self.moduli)

    def table(self):
        """Rows of ``(modulus, period, frequency, rate, re, im)``."""
        return np.column_stack(
            [self.moduli, self.periods, self.frequencies, self.rates,
             self.roots.real, self.roots.imag]
        )

    def to_csv(self):
        buf = io.StringIO()
        buf.write("modulus,period,frequency,rate,re,im\n")
        for row in self.table():
            buf.write(",".join(format(float(v), ".17g") for v in row) + "\n")
        return buf.getvalue()

    def __str__(self):
        lines = [f"{'modulus':>12} {'period':>12} {'frequency':>12} {'rate':>12}"]
        for mod, per, freq, rate, *_ in self.table():
            lines.append(f"{mod:12.6f} {per:12.6f} {freq:12.6f} {rate:12.6f}")
        return "\n".join(lines)


@dataclass(frozen=True)
class PairEstimate:
    """Frequency of a sine pair from the rotation between successive coordinates.

    ``frequency`` is the median of the per-step estimates and ``mad`` their
    median absolute deviation.
    """

    frequency: float
    mad: float
    steps: int

    @property
    def period(self):
        return np.inf if self.frequency == 0 else 1.0 / self.frequency


def roots(rel) -> RootSet:
    """Roots of the characteristic polynomial of a recurrence.

    Computed as eigenvalues of the companion matrix of
    ``mu^t - a_1 mu^{t-1} - ... - a_t``.
    """
    a = np.asarray(rel.coefficients if hasattr(rel, "coefficients") else rel, dtype=float)
    t = a.size
    if t < 1:
        raise ParameterError("recurrence has no coefficients")
    comp = np.zeros((t, t))
    comp[0] = a
    comp[np.arange(1, t), np.arange(t - 1)] = 1.0
    try:
        mu = linalg.eigvals(comp, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"companion eigenvalues failed: {exc}") from exc
    return RootSet(mu)


def esprit(session, group) -> RootSet:
    """Least-squares ESPRIT estimate of the ``len(group)`` signal roots.

    With ``U`` the eigenvectors of the group, the roots are the eigenvalues of
    ``pinv(U[:-1]) @ U[1:]``.
    """
    group = tuple(int(i) for i in np.atleast_1d(group))
    r = len(group)
    if session.L < r + 1:
        raise ParameterError(f"window length {session.L} too small for {r} roots")
    U = session.eigenvectors(group)
    lo, hi = U[:-1], U[1:]
    sv = linalg.svdvals(lo)
    if sv[-1] <= 1e-12 * max(sv[0], 1e-300):
        raise NumericalError("eigenvector matrix without its last row is rank deficient")
    shift = linalg.lstsq(lo, hi)[0]
    return RootSet(linalg.eigvals(shift))


def pairs_estimate(session, pair) -> PairEstimate:
    """Frequency of a sine pair from the angles between successive 2-vectors.

    For each coordinate ``i`` the angle between ``(u1_i, u2_i)`` and
    ``(u1_{i+1}, u2_{i+1})`` gives one estimate ``|angle| / 2 pi``; steps where
    either 2-vector vanishes are skipped.
    """
    pair = tuple(int(i) for i in np.atleast_1d(pair))
    if len(pair) != 2 or pair[0] == pair[1]:
        raise ParameterError(f"pairs estimation needs two distinct indices, got {pair}")
    U = session.eigenvectors(pair)
    u1, u2 = U[:, 0], U[:, 1]
    cross = u1[:-1] * u2[1:] - u2[:-1] * u1[1:]
    dot = u1[:-1] * u1[1:] + u2[:-1] * u2[1:]
    r2 = u1**2 + u2**2
    ok = (r2[:-1] > 0) & (r2[1:] > 0)
    if not np.any(ok):
        raise NumericalError("all 2-vectors of the pair vanish")
    freq = np.abs(np.arctan2(cross[ok], dot[ok])) / (2 * np.pi)
    med = float(np.median(freq))
    mad = float(np.median(np.abs(freq - med)))
    return PairEstimate(med, mad, int(ok.sum()))


def series_rank(session, tol=1e-9) -> int:
    """Number of computed triples with ``lambda_i > tol * max(lambda)``."""
    lam = session.lambdas
    if lam.size == 0 or lam.max() <= 0:
        return 0
    return int(np.sum(lam > tol * lam.max()))

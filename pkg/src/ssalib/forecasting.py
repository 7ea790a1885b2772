"""Recurrent, vector and bootstrap SSA forecasting and sliding-window checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomposition import new_session
from .errors import BootstrapError, ParameterError, SsaError, VerticalityError
from .hankel import hankelize_matrix, hankelize_rank1, hmatvec_t
from .reconstruction import Grouping, _as_grouping, reconstruct
from .series import TimeIndex, TimeSeries

__all__ = [
    "Lrr",
    "ForecastResult",
    "BootstrapForecast",
    "ForecastCheck",
    "lrr",
    "rforecast",
    "vforecast",
    "bforecast",
    "forecast_check",
]

#: forecasting is refused when nu^2 = sum of squared last coordinates reaches this
VERTICALITY_LIMIT = 1.0 - 1e-9


@dataclass(frozen=True)
class Lrr:
    """Linear recurrence ``y_n = sum_j a_j y_{n-j}``, j = 1..L-1.

    ``coefficients[j - 1]`` is ``a_j``; ``nu2`` is the verticality coefficient
    of the eigenvector subspace the recurrence was built from.
    """

    coefficients: np.ndarray
    nu2: float
    group: tuple
    L: int

    @property
    def order(self):
        return self.coefficients.size

    @property
    def R(self):
        """Coefficients in lag-vector order ``(a_{L-1}, ..., a_1)``."""
        return self.coefficients[::-1]

    def apply(self, history, M):
        """Continue ``history`` (at least ``order`` values) by ``M`` steps."""
        history = np.asarray(history, dtype=float)
        t = self.order
        if history.size < t:
            raise ParameterError(f"need at least {t} initial values, got {history.size}")
        y = np.empty(t + M)
        y[:t] = history[-t:]
        R = self.R
        for n in range(t, t + M):
            y[n] = R @ y[n - t : n]
        return y[t:]


def _verticality(P):
    pi = P[-1]
    nu2 = float(pi @ pi)
    if nu2 >= VERTICALITY_LIMIT:
        raise VerticalityError(
            f"verticality coefficient nu^2 = {nu2:.12g} is too close to 1; "
            "the eigenvector subspace contains the last unit vector"
        )
    return pi, nu2


def lrr(session, group) -> Lrr:
    """Forecasting recurrence of the subspace spanned by eigenvectors ``group``."""
    group = tuple(int(i) for i in np.atleast_1d(group))
    P = session.eigenvectors(group)
    pi, nu2 = _verticality(P)
    R = P[:-1] @ pi / (1.0 - nu2)
    return Lrr(R[::-1].copy(), nu2, group, session.L)


@dataclass
class ForecastResult:
    """Forecast of one group.

    ``base`` is the group's reconstruction (length N) and ``ahead`` the M new
    points. ``values`` follows ``only_new``.
    """

    base: np.ndarray
    ahead: np.ndarray
    method: str
    group: tuple
    index: TimeIndex | None = None
    only_new: bool = True
    label: str = "F1"

    @property
    def values(self):
        if self.only_new:
            return self.ahead
        return np.concatenate([self.base, self.ahead])

    @property
    def times(self):
        if self.index is None:
            return None
        n = self.base.size
        if self.only_new:
            return self.index.times(self.ahead.size, offset=n)
        return self.index.times(n + self.ahead.size)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        v = self.values
        return v if dtype is None else v.astype(dtype)


def _check_len(M):
    if int(M) != M or M < 1:
        raise ParameterError(f"forecast length must be a positive integer, got {M}")
    return int(M)


def rforecast(session, grouping, M, only_new=True):
    """Recurrent forecast: reconstruct each group, then iterate its recurrence.

    Returns one :class:`ForecastResult` per group.
    """
    M = _check_len(M)
    grouping = _as_grouping(grouping)
    out = []
    rec = reconstruct(session, grouping)
    for g, label, comp in zip(grouping.groups, grouping.labels, rec.components):
        rel = lrr(session, g)
        ahead = rel.apply(comp.values, M)
        out.append(
            ForecastResult(comp.values.copy(), ahead, "recurrent", g,
                           session.series.index, only_new, label)
        )
    return out


def _vector_parts(session, group):
    P = session.eigenvectors(group)
    pi, nu2 = _verticality(P)
    R = P[:-1] @ pi / (1.0 - nu2)
    return P, P[:-1], R, nu2


def _vforecast_classic(session, group, M):
    P, Pd, R, nu2 = _vector_parts(session, group)
    L, K = session.L, session.K
    steps = M + L - 1
    Z = np.empty((L, K + steps))
    # projections of the lagged vectors onto span(P)
    Z[:, :K] = P @ hmatvec_t(session.operator, P).T
    c = 1.0 - nu2
    for i in range(K, K + steps):
        y = Z[1:, i - 1]
        Ry = R @ y
        Z[:-1, i] = Pd @ (Pd.T @ y) + c * R * Ry
        Z[-1, i] = Ry
    return hankelize_matrix(Z)


def _vforecast_reduced(session, group, M):
    # the shifted operator maps span(P) into itself; iterate r coordinates only
    P, Pd, R, nu2 = _vector_parts(session, group)
    L, K = session.L, session.K
    steps = M + L - 1
    Y = P[1:]
    RY = R @ Y
    image = np.vstack([Pd @ (Pd.T @ Y) + (1.0 - nu2) * np.outer(R, RY), RY])
    A = P.T @ image
    C = np.empty((P.shape[1], K + steps))
    C[:, :K] = hmatvec_t(session.operator, P).T
    for i in range(K, K + steps):
        C[:, i] = A @ C[:, i - 1]
    out = np.zeros(L + C.shape[1] - 1)
    for j in range(P.shape[1]):
        out += hankelize_rank1(P[:, j], C[j])
    return out


def vforecast(session, grouping, M, only_new=True, fast=False):
    """Vector forecast: extend the projected lagged vectors, then hankelize.

    ``fast=True`` iterates the r coordinates of the lagged vectors in the
    eigenvector basis (cost ``O(r^2 (M + L))`` plus FFT hankelization)
    instead of the L-dimensional vectors themselves.
    """
    M = _check_len(M)
    grouping = _as_grouping(grouping)
    rec = reconstruct(session, grouping)
    impl = _vforecast_reduced if fast else _vforecast_classic
    out = []
    N = session.N
    for g, label, comp in zip(grouping.groups, grouping.labels, rec.components):
        y = impl(session, g, M)
        out.append(
            ForecastResult(comp.values.copy(), y[N : N + M], "vector", g,
                           session.series.index, only_new, label)
        )
    return out


@dataclass
class BootstrapForecast:
    """Bootstrap forecast of one group.

    ``mean`` is the average bootstrap forecast, ``lower``/``upper`` the
    ``(1 - level) / 2`` and ``1 - (1 - level) / 2`` sample quantiles and
    ``point`` the ordinary forecast of the original series.
    """

    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    point: np.ndarray
    level: float
    replicates: int
    dropped: int
    method: str
    seed: int | None
    index: TimeIndex | None = None
    n_base: int = 0
    samples: np.ndarray = field(default=None, repr=False)

    @property
    def times(self):
        if self.index is None:
            return None
        return self.index.times(self.mean.size, offset=self.n_base)


def _forecast_fn(method):
    if method == "recurrent":
        return rforecast
    if method == "vector":
        return vforecast
    raise ParameterError(f"method must be 'recurrent' or 'vector', got {method!r}")


def bforecast(
    session,
    group,
    M,
    level=0.95,
    replicates=100,
    method="recurrent",
    seed=None,
    keep_samples=False,
) -> BootstrapForecast:
    """Bootstrap confidence bounds for the forecast of one group.

    The group's reconstruction is taken as the signal and the remainder as
    white noise. Each replicate adds residuals resampled with replacement to
    the signal, redecomposes with the same window length, and forecasts the
    leading ``len(group)`` triples. Replicate ``q`` draws from a generator
    spawned deterministically from ``seed``, so results do not depend on the
    order in which replicates run.
    """
    M = _check_len(M)
    fn = _forecast_fn(method)
    if not 0 < level < 1:
        raise ParameterError(f"confidence level must lie in (0, 1), got {level}")
    if replicates < 1:
        raise ParameterError("need at least one bootstrap replicate")
    group = tuple(int(i) for i in np.atleast_1d(group))
    r = len(group)
    point = fn(session, [group], M)[0]
    signal = point.base
    resid = session.series.values - signal
    N = session.N
    lead = list(range(1, r + 1))
    method_b = session.method if session.method in ("eigen", "svd") else "auto"

    children = np.random.SeedSequence(seed).spawn(replicates)
    samples = np.full((replicates, M), np.nan)
    dropped = 0
    for q, child in enumerate(children):
        rng = np.random.default_rng(child)
        x = signal + rng.choice(resid, size=N, replace=True)
        try:
            s = new_session(x, session.L, session.kind, method_b, neig=r,
                            config=session.config)
            samples[q] = fn(s, [lead], M)[0].ahead
        except SsaError:
            dropped += 1
    if dropped > 0.1 * replicates:
        raise BootstrapError(f"{dropped} of {replicates} bootstrap replicates failed")
    good = samples[~np.isnan(samples).any(axis=1)]
    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(good, [alpha, 1.0 - alpha], axis=0)
    return BootstrapForecast(
        mean=good.mean(axis=0),
        lower=lower,
        upper=upper,
        point=point.ahead,
        level=level,
        replicates=replicates,
        dropped=dropped,
        method=method,
        seed=seed,
        index=session.series.index,
        n_base=N,
        samples=good if keep_samples else None,
    )


@dataclass
class ForecastCheck:
    """Sliding-forecast accuracy.

    ``errors[w, g]`` is the mean squared error of window ``w`` for grouping
    ``g`` (NaN when that forecast failed); ``mse`` averages over the windows
    that succeeded and ``failed`` counts the others per grouping.
    """

    mse: np.ndarray
    errors: np.ndarray
    failed: np.ndarray
    labels: tuple

    @property
    def windows(self):
        return self.errors.shape[0]


def forecast_check(
    series,
    groupings,
    forecast_len=1,
    sliding_len=None,
    L=None,
    method="recurrent",
    svd_method="auto",
    kind="basic",
    neig=None,
    config=None,
) -> ForecastCheck:
    """Mean squared error of forecasts from sliding subseries.

    For every start ``i`` the subseries ``x[i : i + sliding_len]`` is
    decomposed with window ``L`` and each group is forecast ``forecast_len``
    steps ahead; the error is measured against the held-out points that
    follow.

    Parameters
    ----------
    groupings : sequence of index lists, or Grouping
        Each entry is forecast as a single group.
    sliding_len : int, optional
        Length of the training windows (default ``N - forecast_len``).
    L : int, optional
        Window length (default ``sliding_len // 2``).
    """
    x = np.asarray(series, dtype=float).ravel()
    N = x.size
    fn = _forecast_fn(method)
    fl = _check_len(forecast_len)
    if sliding_len is None:
        sliding_len = N - fl
    if sliding_len < 3 or sliding_len + fl > N:
        raise ParameterError(
            f"need 3 <= sliding_len and sliding_len + forecast_len <= N "
            f"(sliding_len={sliding_len}, forecast_len={fl}, N={N})"
        )
    grouping = _as_grouping(groupings) if isinstance(groupings, (Grouping, str)) else Grouping(
        [np.atleast_1d(g) for g in groupings]
    )
    if L is None:
        L = sliding_len // 2
    if not 1 < L < sliding_len:
        raise ParameterError(f"window length {L} invalid for sliding_len={sliding_len}")
    need = max(grouping.indices)
    neig = need if neig is None else max(neig, need)

    nwin = N - sliding_len - fl + 1
    errors = np.full((nwin, len(grouping)), np.nan)
    for i in range(nwin):
        train = x[i : i + sliding_len]
        check = x[i + sliding_len : i + sliding_len + fl]
        try:
            s = new_session(train, L, kind, svd_method, neig=neig, config=config)
        except SsaError:
            continue
        for k, g in enumerate(grouping.groups):
            try:
                f = fn(s, [g], fl)[0].ahead
            except SsaError:
                continue
            errors[i, k] = np.mean((f - check) ** 2)
    failed = np.sum(np.isnan(errors), axis=0)
    with np.errstate(invalid="ignore"):
        mse = np.array([
            np.mean(col[~np.isnan(col)]) if np.any(~np.isnan(col)) else np.nan
            for col in errors.T
        ])
    return ForecastCheck(mse, errors, failed, grouping.labels)


def forecast_series(result: ForecastResult, name=None) -> TimeSeries:
    """Forecast values as a :class:`TimeSeries` (needs at least 3 points)."""
    index = result.index
    if index is not None and result.only_new:
        index = index.shifted(result.base.size)
    return TimeSeries(result.values, index, name or result.label)

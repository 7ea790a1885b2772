"""Decomposition stage: eigentriples of the trajectory matrix.

Eigentriples are numbered from 1 in every public function, following the
usual ``ET1, ET2, ...`` naming.  Three backends are available:

``eigen``
    symmetric eigendecomposition of ``X X^T`` (basic) or of the lag-covariance
    matrix (toeplitz); always full.
``svd``
    dense thin SVD of ``X``; basic only, always full.
``lanczos``
    truncated, matrix-free Lanczos bidiagonalization on the FFT operator;
    basic only. The number of triples grows on demand (see :func:`extend`).
"""

from __future__ import annotations

import io
import json
import threading
import zipfile
from collections import OrderedDict

import numpy as np
from scipy import fft as sfft
from scipy import linalg

from . import __version__
from .config import DEFAULT_CONFIG, Config
from .errors import IoError, NumericalError, ParameterError, ValidationError
from .hankel import HankelOperator, WindowSpec, hmatvec, hmatvec_t
from .lanczos import lanczos_svd
from .series import TimeIndex, TimeSeries

__all__ = [
    "SsaSession",
    "new_session",
    "decompose",
    "decompose_eigen",
    "decompose_svd",
    "decompose_lanczos",
    "extend",
    "lagcov",
    "save_session",
    "load_session",
]

KINDS = ("basic", "toeplitz")
METHODS = ("eigen", "svd", "lanczos", "auto")
SNAPSHOT_VERSION = 1


class SsaSession:
    """Series, window, chosen backend and the eigentriples computed so far.

    Attributes
    ----------
    lambdas : ndarray
        ``lambda_i = ||X^T P_i||^2``.  For the basic kind these are the
        eigenvalues of ``X X^T`` and are non-increasing.
    U : ndarray, L x n
        Eigenvectors ``P_i`` in columns.
    V : ndarray, K x n, or None
        Normalized factor vectors ``Q_i / ||Q_i||`` when the backend
        produced them; otherwise they are computed on demand.
    ordering_values : ndarray
        The values the triples are sorted by (``lambdas`` for basic,
        eigenvalues of the lag-covariance matrix for toeplitz).
    """

    def __init__(self, series, L=None, kind="basic", method="auto", config=None):
        if not isinstance(series, TimeSeries):
            series = TimeSeries(series)
        if kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {kind!r}")
        if method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}, got {method!r}")
        N = len(series)
        if L is None:
            L = N // 2
        if isinstance(L, float) and not L.is_integer():
            raise ParameterError(f"window length must be an integer, got {L}")
        self.series = series
        self.spec = WindowSpec(N, int(L))
        self.kind = kind
        self.requested_method = method
        self.method = None
        self.config = config or DEFAULT_CONFIG
        self.operator = HankelOperator(series.values, self.spec.L)
        self.lambdas = np.zeros(0)
        self.U = np.zeros((self.spec.L, 0))
        self.V = None
        self.ordering_values = np.zeros(0)
        self.zero_factor = np.zeros(0, dtype=bool)
        self._cache = OrderedDict()
        self._lock = threading.RLock()
        #: number of elementary series actually computed (cache misses)
        self.elementary_computations = 0

    # -- basic accessors -------------------------------------------------
    @property
    def L(self):
        return self.spec.L

    @property
    def K(self):
        return self.spec.K

    @property
    def N(self):
        return self.spec.N

    @property
    def nu(self):
        """Number of computed eigentriples."""
        return self.lambdas.size

    @property
    def is_full(self):
        return self.method in ("eigen", "svd")

    @property
    def sigma(self):
        return np.sqrt(self.lambdas)

    @property
    def max_triples(self):
        return self.spec.rank_bound if self.kind == "basic" else self.spec.L

    def _check_indices(self, idx):
        idx = np.atleast_1d(np.asarray(idx))
        if idx.size and (idx.dtype.kind not in "iu" or idx.min() < 1):
            raise ParameterError(f"eigentriple indices are 1-based integers, got {idx}")
        return idx.astype(int)

    def ensure(self, idx):
        """Make sure all (1-based) indices in ``idx`` are computed.

        Extends a truncated decomposition when needed.
        """
        idx = self._check_indices(idx)
        if idx.size == 0:
            return idx
        need = int(idx.max())
        if need > self.nu:
            if need > self.max_triples:
                raise ParameterError(
                    f"eigentriple {need} requested, at most {self.max_triples} exist"
                )
            extend(self, need)
        return idx

    def eigenvectors(self, idx):
        idx = self.ensure(idx)
        return self.U[:, idx - 1]

    def factor_vectors(self, idx):
        """Normalized factor vectors ``X^T P_i / sqrt(lambda_i)`` (zero when lambda_i = 0)."""
        idx = self.ensure(idx)
        if self.V is not None:
            return self.V[:, idx - 1]
        P = self.U[:, idx - 1]
        Q = hmatvec_t(self.operator, P)
        norms = np.sqrt(self.lambdas[idx - 1])
        out = np.zeros_like(Q)
        ok = norms > 0
        out[:, ok] = Q[:, ok] / norms[ok]
        return out

    def contribution(self):
        """Share of each computed triple in ``||X||_F^2``."""
        total = self.operator.frobenius_norm2
        return self.lambdas / total if total > 0 else np.zeros_like(self.lambdas)

    def cache_info(self):
        with self._lock:
            nbytes = sum(v.nbytes for v in self._cache.values())
            return len(self._cache), nbytes

    def clear_cache(self):
        with self._lock:
            self._cache.clear()

    def summary(self):
        """Text summary: lengths, backend and what has been computed."""
        ncached, nbytes = self.cache_info()
        nvec = 0 if self.V is None else self.V.shape[1]
        arrays = self.series.values.nbytes + self.U.nbytes + self.lambdas.nbytes
        if self.V is not None:
            arrays += self.V.nbytes
        total = (arrays + nbytes + self.operator.spectrum.nbytes) / 2**20
        return "\n".join(
            [
                f"Series length: {self.N},\tWindow length: {self.L},\t"
                f"SVD method: {self.method or self.requested_method}",
                f"Kind: {self.kind}",
                "Computed:",
                f"Eigenvalues: {self.nu},\tEigenvectors: {self.U.shape[1]},\t"
                f"Factor vectors: {nvec}",
                f"Pre-cached: {ncached} elementary series ({nbytes / 2**20:.4g} MiB)",
                f"Overall memory consumption (estimate): {total:.4g} MiB",
            ]
        )

    def __repr__(self):
        return (
            f"SsaSession(N={self.N}, L={self.L}, kind={self.kind!r}, "
            f"method={self.method or self.requested_method!r}, nu={self.nu})"
        )

    # -- cache plumbing used by the reconstruction module ----------------
    def _cache_get(self, i):
        with self._lock:
            val = self._cache.get(i)
            if val is not None:
                self._cache.move_to_end(i)
            return val

    def _cache_put(self, i, val):
        with self._lock:
            self._cache[i] = val
            self._cache.move_to_end(i)
            while len(self._cache) > self.config.cache_budget:
                self._cache.popitem(last=False)

    def _store(self, lambdas, U, V=None, ordering=None, zero_factor=None):
        U, V = _fix_signs(U, V)
        self.lambdas = np.ascontiguousarray(lambdas, dtype=float)
        self.U = np.ascontiguousarray(U)
        self.V = None if V is None else np.ascontiguousarray(V)
        self.ordering_values = self.lambdas.copy() if ordering is None else ordering
        self.zero_factor = (
            np.zeros(self.lambdas.size, dtype=bool) if zero_factor is None else zero_factor
        )
        self._cache.clear()


def _fix_signs(U, V):
    # first coordinate with |u| > 1e-12 made positive
    U = np.array(U, dtype=float, copy=True)
    V = None if V is None else np.array(V, dtype=float, copy=True)
    big = np.abs(U) > 1e-12
    first = np.argmax(big, axis=0)
    lead = U[first, np.arange(U.shape[1])]
    flip = lead < 0
    U[:, flip] *= -1
    if V is not None:
        V[:, flip] *= -1
    return U, V


def resolve_method(kind, method, spec, neig, config):
    if kind == "toeplitz":
        if method in ("svd", "lanczos"):
            raise ParameterError(f"method {method!r} is not available for toeplitz SSA")
        return "eigen"
    if method != "auto":
        return method
    rank = spec.rank_bound
    if rank <= config.auto_eigen_max_rank:
        return "eigen"
    if neig is not None and neig > config.auto_eigen_neig_fraction * rank:
        return "eigen"
    return "lanczos"


def new_session(
    series,
    L=None,
    kind="basic",
    method="auto",
    neig=None,
    decompose_now=True,
    config: Config | None = None,
) -> SsaSession:
    """Embed ``series`` and (by default) run the decomposition.

    Parameters
    ----------
    series : TimeSeries or array_like
    L : int, optional
        Window length, ``1 < L < N``; defaults to ``N // 2``.
    kind : {"basic", "toeplitz"}
    method : {"auto", "eigen", "svd", "lanczos"}
        ``auto`` picks ``eigen`` for small trajectory matrices or when many
        triples are requested and ``lanczos`` otherwise (thresholds in
        :class:`~ssalib.config.Config`).
    neig : int, optional
        Number of triples for the truncated backend (default
        ``min(L, K, 50)``); ignored by the full backends.
    """
    session = SsaSession(series, L, kind, method, config)
    if neig is not None and neig < 1:
        raise ParameterError("neig must be positive")
    session.method = resolve_method(kind, method, session.spec, neig, session.config)
    if decompose_now:
        decompose(session, neig)
    return session


def decompose(session, neig=None):
    if session.method is None:
        session.method = resolve_method(
            session.kind, session.requested_method, session.spec, neig, session.config
        )
    if session.method == "eigen":
        decompose_eigen(session)
    elif session.method == "svd":
        decompose_svd(session)
    else:
        if neig is None:
            neig = min(session.config.default_neig, session.spec.rank_bound)
        decompose_lanczos(session, neig)
    return session


def lagcov(series, L: int) -> np.ndarray:
    """Lag-covariance matrix ``c_ij = mean_m x_m x_{m+|i-j|}`` (L x L, Toeplitz)."""
    x = np.asarray(series, dtype=float).ravel()
    N = x.size
    WindowSpec(N, L)
    if L <= 64:
        acf = np.array([np.dot(x[: N - k], x[k:]) for k in range(L)])
    else:
        nfft = sfft.next_fast_len(2 * N - 1, real=True)
        f = sfft.rfft(x, nfft)
        acf = sfft.irfft(f * np.conj(f), nfft)[:L]
    acf = acf / (N - np.arange(L))
    return linalg.toeplitz(acf)


def _sorted_eigh(S):
    try:
        w, vecs = linalg.eigh(S)
    except linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(w, kind="stable")[::-1]
    return w[order], vecs[:, order]


def decompose_eigen(session: SsaSession) -> SsaSession:
    """Full eigendecomposition (``X X^T`` for basic, lag covariance for toeplitz)."""
    with session._lock:
        if session.kind == "basic":
            X = session.operator.dense()
            w, P = _sorted_eigh(X @ X.T)
            n = session.spec.rank_bound
            w, P = w[:n], P[:, :n]
            if w.size and w[-1] < -1e-9 * max(w[0], 0.0):
                raise NumericalError(f"negative eigenvalue {w[-1]:.3g} of X X^T")
            session._store(np.clip(w, 0.0, None), P)
        else:
            C = lagcov(session.series.values, session.L)
            w, P = _sorted_eigh(C)
            Q = hmatvec_t(session.operator, P)
            lam = np.sum(Q**2, axis=0)
            norms = np.sqrt(lam)
            zero = norms <= 1e-300
            V = np.zeros_like(Q)
            V[:, ~zero] = Q[:, ~zero] / norms[~zero]
            session._store(lam, P, V, ordering=w, zero_factor=zero)
        session.method = "eigen"
    return session


def decompose_svd(session: SsaSession) -> SsaSession:
    """Full dense SVD of the trajectory matrix (basic kind only)."""
    if session.kind != "basic":
        raise ParameterError("the svd backend supports kind='basic' only")
    with session._lock:
        X = session.operator.dense()
        try:
            U, s, Vt = linalg.svd(X, full_matrices=False, lapack_driver="gesdd")
        except linalg.LinAlgError:
            try:
                U, s, Vt = linalg.svd(X, full_matrices=False, lapack_driver="gesvd")
            except linalg.LinAlgError as exc:
                raise NumericalError(f"SVD failed: {exc}") from exc
        session._store(s**2, U, Vt.T)
        session.method = "svd"
    return session


def _run_lanczos(session, k, locked=None, scale=None):
    op = session.operator
    cfg = session.config
    return lanczos_svd(
        lambda v: hmatvec(op, v),
        lambda u: hmatvec_t(op, u),
        op.shape,
        k,
        tol=cfg.lanczos_tol,
        ncv=cfg.lanczos_ncv,
        max_restarts=cfg.lanczos_max_restarts,
        locked=locked,
        scale=scale,
    )


def decompose_lanczos(session: SsaSession, neig: int) -> SsaSession:
    """Leading ``neig`` triples by thick-restart Lanczos bidiagonalization."""
    if session.kind != "basic":
        raise ParameterError("the lanczos backend supports kind='basic' only")
    if not 1 <= neig <= session.spec.rank_bound:
        raise ParameterError(
            f"neig must be in [1, {session.spec.rank_bound}], got {neig}"
        )
    with session._lock:
        res = _run_lanczos(session, int(neig))
        session._store(res.s**2, res.U, res.V)
        session.method = "lanczos"
    return session


def extend(session: SsaSession, neig: int) -> SsaSession:
    """Grow the decomposition to ``neig`` triples, keeping existing ones bitwise.

    Full backends already hold every triple, so this is a no-op for them.
    """
    if neig > session.max_triples:
        raise ParameterError(
            f"cannot extend to {neig} triples, at most {session.max_triples} exist"
        )
    with session._lock:
        if neig <= session.nu:
            return session
        if session.method is None or session.nu == 0:
            return decompose(session, neig)
        if session.is_full:
            return session
        # truncated: deflate the known triples and compute the next ones
        res = _run_lanczos(
            session,
            neig - session.nu,
            locked=(session.U, session.V),
            scale=float(np.sqrt(session.lambdas[0])),
        )
        U_new, V_new = _fix_signs(res.U, res.V)
        session.lambdas = np.concatenate([session.lambdas, res.s**2])
        session.ordering_values = session.lambdas.copy()
        session.U = np.hstack([session.U, U_new])
        session.V = np.hstack([session.V, V_new])
        session.zero_factor = np.zeros(session.lambdas.size, dtype=bool)
    return session


# -- snapshots ---------------------------------------------------------------

_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


def _zip_write(zf, name, data):
    info = zipfile.ZipInfo(name, date_time=_ZIP_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    zf.writestr(info, data)


def _npy_bytes(arr):
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.ascontiguousarray(arr), allow_pickle=False)
    return buf.getvalue()


def save_session(session: SsaSession, path, include_cache=False) -> None:
    """Write a versioned, deterministic snapshot (a zip of .npy arrays + JSON)."""
    idx = session.series.index
    meta = {
        "format": "ssalib-session",
        "version": SNAPSHOT_VERSION,
        "writer": __version__,
        "N": session.N,
        "L": session.L,
        "kind": session.kind,
        "method": session.method,
        "requested_method": session.requested_method,
        "name": session.series.name,
        "index": None if idx is None else [idx.start, idx.step, idx.unit],
        "has_V": session.V is not None,
        "config": {k: getattr(session.config, k) for k in session.config.__dataclass_fields__},
        "cached": [],
    }
    arrays = {
        "series": session.series.values,
        "lambdas": session.lambdas,
        "U": session.U,
        "ordering_values": session.ordering_values,
        "zero_factor": session.zero_factor,
    }
    if session.V is not None:
        arrays["V"] = session.V
    if include_cache:
        with session._lock:
            for i, val in session._cache.items():
                meta["cached"].append(int(i))
                arrays[f"cache_{i}"] = val
    try:
        with zipfile.ZipFile(path, "w") as zf:
            _zip_write(zf, "meta.json", json.dumps(meta, sort_keys=True, indent=1))
            for name, arr in arrays.items():
                _zip_write(zf, f"{name}.npy", _npy_bytes(arr))
    except OSError as exc:
        raise IoError(f"cannot write snapshot {path!r}: {exc}") from exc


def load_session(path) -> SsaSession:
    """Inverse of :func:`save_session`."""
    try:
        with zipfile.ZipFile(path) as zf:
            meta = json.loads(zf.read("meta.json"))
            if meta.get("format") != "ssalib-session":
                raise ValidationError(f"{path!r} is not an ssalib session snapshot")
            if meta.get("version") != SNAPSHOT_VERSION:
                raise ValidationError(
                    f"snapshot version {meta.get('version')} is not supported "
                    f"(expected {SNAPSHOT_VERSION})"
                )

            def arr(name):
                return np.lib.format.read_array(
                    io.BytesIO(zf.read(f"{name}.npy")), allow_pickle=False
                )

            index = meta["index"]
            series = TimeSeries(
                arr("series"),
                None if index is None else TimeIndex(*index),
                meta["name"],
            )
            session = SsaSession(
                series, meta["L"], meta["kind"], meta["requested_method"],
                Config(**meta["config"]),
            )
            session.method = meta["method"]
            session.lambdas = arr("lambdas")
            session.U = arr("U")
            session.V = arr("V") if meta["has_V"] else None
            session.ordering_values = arr("ordering_values")
            session.zero_factor = arr("zero_factor")
            for i in meta["cached"]:
                cached = arr(f"cache_{i}")
                cached.setflags(write=False)
                session._cache[int(i)] = cached
    except (OSError, zipfile.BadZipFile, KeyError) as exc:
        if isinstance(exc, OSError):
            raise IoError(f"cannot read snapshot {path!r}: {exc}") from exc
        raise ValidationError(f"corrupt snapshot {path!r}: {exc}") from exc
    return session

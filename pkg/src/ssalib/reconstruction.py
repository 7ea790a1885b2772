"""Reconstruction stage: grouping, diagonal averaging and w-correlations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, StateError
from .hankel import WindowSpec, antidiag_counts, hankelize_rank1, hmatvec_t
from .series import TimeSeries

__all__ = [
    "Grouping",
    "ReconstructionResult",
    "WCorMatrix",
    "elementary",
    "reconstruct",
    "wcor",
    "wcor_series",
    "residuals",
    "parse_groups",
]


@dataclass(frozen=True)
class Grouping:
    """Ordered index sets ``I_1, ..., I_m`` of 1-based eigentriple numbers."""

    groups: tuple
    labels: tuple

    def __init__(self, groups, labels=None):
        if isinstance(groups, Grouping):
            groups, labels = groups.groups, labels or groups.labels
        norm = []
        for g in groups:
            arr = np.atleast_1d(np.asarray(g))
            if arr.size == 0:
                raise ParameterError("empty group")
            if arr.dtype.kind not in "iu" or arr.min() < 1:
                raise ParameterError(f"eigentriple indices are 1-based integers, got {g!r}")
            norm.append(tuple(int(i) for i in arr))
        if not norm:
            raise ParameterError("grouping has no groups")
        if labels is None:
            labels = [f"F{k + 1}" for k in range(len(norm))]
        labels = tuple(str(s) for s in labels)
        if len(labels) != len(norm):
            raise ParameterError("number of labels differs from number of groups")
        object.__setattr__(self, "groups", tuple(norm))
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    @property
    def indices(self):
        return sorted({i for g in self.groups for i in g})

    @property
    def disjoint(self):
        seen = set()
        for g in self.groups:
            s = set(g)
            if len(s) != len(g) or seen & s:
                return False
            seen |= s
        return True

    @classmethod
    def elementary(cls, indices: Iterable[int]):
        idx = list(indices)
        return cls([[i] for i in idx], [f"F{i}" for i in idx])


def parse_groups(text: str) -> Grouping:
    """Parse ``"1,4|2,3|5-6"``: groups split by ``|``, items by ``,``, ranges ``a-b``."""
    groups = []
    for part in text.split("|"):
        items = []
        for tok in part.split(","):
            tok = tok.strip()
            if not tok:
                raise ParameterError(f"malformed group specification {text!r}")
            a, sep, b = tok.partition("-")
            try:
                if sep:
                    lo, hi = int(a), int(b)
                    if hi < lo:
                        raise ValueError
                    items.extend(range(lo, hi + 1))
                else:
                    items.append(int(a))
            except ValueError:
                raise ParameterError(f"malformed group specification {text!r}") from None
        groups.append(items)
    return Grouping(groups)


def _as_grouping(grouping) -> Grouping:
    if isinstance(grouping, Grouping):
        return grouping
    if isinstance(grouping, str):
        return parse_groups(grouping)
    if isinstance(grouping, dict):
        return Grouping(list(grouping.values()), list(grouping.keys()))
    grouping = list(grouping)
    if grouping and all(np.isscalar(g) for g in grouping):
        grouping = [grouping]
    return Grouping(grouping)


@dataclass
class ReconstructionResult:
    """Reconstructed components in grouping order plus the residual.

    ``residual`` is ``None`` when the groups overlap.
    """

    components: list
    residual: TimeSeries | None
    original: TimeSeries
    grouping: Grouping = field(repr=False)

    def __getitem__(self, key):
        if isinstance(key, str):
            key = self.grouping.labels.index(key)
        return self.components[key]

    def __len__(self):
        return len(self.components)

    def as_dict(self):
        return dict(zip(self.grouping.labels, self.components))


@dataclass
class WCorMatrix:
    """Weighted correlations of reconstructed components.

    ``valid[j]`` is False for a component that is identically zero; its row
    and column are reported as 0.
    """

    matrix: np.ndarray
    labels: tuple
    valid: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def elementary(session, i: int) -> np.ndarray:
    """Elementary reconstructed series of eigentriple ``i`` (1-based).

    The result is cached in the session; the returned array is read-only.
    """
    (i,) = session.ensure([i])
    cached = session._cache_get(i)
    if cached is not None:
        return cached
    P = session.U[:, i - 1]
    if session.V is not None:
        Q = np.sqrt(session.lambdas[i - 1]) * session.V[:, i - 1]
    else:
        Q = hmatvec_t(session.operator, P)
    val = hankelize_rank1(P, Q)
    val.setflags(write=False)
    with session._lock:
        session.elementary_computations += 1
    session._cache_put(i, val)
    return val


def _group_sum(session, group):
    out = np.zeros(session.N)
    for i in group:
        out += elementary(session, i)
    return out


def reconstruct(session, grouping) -> ReconstructionResult:
    """Sum elementary series within each group.

    ``grouping`` may be a :class:`Grouping`, a list of index lists, a dict
    ``label -> indices`` or a string such as ``"1,4|2,3|5-6"``.
    """
    grouping = _as_grouping(grouping)
    session.ensure(grouping.indices)
    original = session.series
    comps = [
        original.with_values(_group_sum(session, g), name=label)
        for g, label in zip(grouping.groups, grouping.labels)
    ]
    residual = None
    if grouping.disjoint:
        total = np.sum([c.values for c in comps], axis=0)
        residual = original.with_values(original.values - total, name="Residuals")
    return ReconstructionResult(comps, residual, original, grouping)


def residuals(result: ReconstructionResult) -> TimeSeries:
    if result.residual is None:
        raise StateError("residuals are defined only for disjoint groupings")
    return result.residual


def wcor_series(series: Sequence, L: int, labels=None) -> WCorMatrix:
    """w-correlation matrix of arbitrary length-N series for window length L."""
    F = np.array([np.asarray(s, dtype=float) for s in series])
    w = antidiag_counts(WindowSpec(F.shape[1], L)).astype(float)
    gram = (F * w) @ F.T
    norms = np.sqrt(np.clip(np.diag(gram), 0.0, None))
    valid = norms > 0
    denom = np.outer(norms, norms)
    mat = np.zeros_like(gram)
    np.divide(gram, denom, out=mat, where=np.outer(valid, valid))
    mat = np.clip(mat, -1.0, 1.0)
    mat[np.arange(len(mat))[valid], np.arange(len(mat))[valid]] = 1.0
    if labels is None:
        labels = [f"F{k + 1}" for k in range(len(F))]
    return WCorMatrix(mat, tuple(labels), valid)


def wcor(session, grouping=None) -> WCorMatrix:
    """w-correlations between grouped reconstructions.

    Defaults to the elementary grouping of all computed triples. Weights are
    the antidiagonal counts of the trajectory matrix.
    """
    if grouping is None:
        grouping = Grouping.elementary(range(1, session.nu + 1))
    grouping = _as_grouping(grouping)
    if not grouping.disjoint:
        raise ParameterError("w-correlations need pairwise disjoint groups")
    session.ensure(grouping.indices)
    comps = [_group_sum(session, g) for g in grouping.groups]
    return wcor_series(comps, session.L, grouping.labels)

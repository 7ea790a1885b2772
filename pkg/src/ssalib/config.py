"""Tunable defaults (cache budget, Lanczos tolerances, method selection)."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import IoError, ParameterError


@dataclass(frozen=True)
class Config:
    #: maximum number of elementary series kept per session (LRU)
    cache_budget: int = 256
    #: residual tolerance relative to the leading singular value
    lanczos_tol: float = 1e-8
    lanczos_max_restarts: int = 300
    #: Krylov basis size; ``None`` picks ``max(2 * neig + 10, 20)``
    lanczos_ncv: int | None = None
    #: number of triples computed by the truncated backend when not requested
    default_neig: int = 50
    #: ``method="auto"`` uses the full eigendecomposition up to this min(L, K)
    auto_eigen_max_rank: int = 100
    #: ... or when more than this fraction of min(L, K) triples is requested
    auto_eigen_neig_fraction: float = 0.5

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


DEFAULT_CONFIG = Config()


def _convert(field, raw):
    if raw.lower() in ("none", ""):
        return None
    if field.type in ("int", "int | None"):
        return int(raw)
    return float(raw)


def load_config(path) -> Config:
    """Read ``key = value`` lines (``#`` starts a comment) into a :class:`Config`."""
    fields = {f.name: f for f in dataclasses.fields(Config)}
    values = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read config {path!r}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in fields:
            raise ParameterError(f"{path}:{lineno}: unknown setting {line!r}")
        try:
            values[key] = _convert(fields[key], raw.strip())
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: bad value for {key}") from None
    return Config(**values)

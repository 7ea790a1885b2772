"""Singular spectrum analysis: decomposition, reconstruction, forecasting and
parameter estimation for one-dimensional time series.

Typical use::

    import ssalib as ssa

    x = ssa.datasets.load("co2")
    s = ssa.new_session(x, L=120)
    rec = ssa.reconstruct(s, [[1, 4], [2, 3], [5, 6]])
    fc = ssa.rforecast(s, [[1, 4]], 36)

Eigentriples are numbered from 1 (``ET1`` is the leading one).
"""

__version__ = "0.1.0"

from . import datasets
from .config import Config, load_config
from .decomposition import (
    SsaSession,
    decompose_eigen,
    decompose_lanczos,
    decompose_svd,
    extend,
    lagcov,
    load_session,
    new_session,
    save_session,
)
from .errors import (
    BootstrapError,
    ConvergenceError,
    FormatError,
    IoError,
    NumericalError,
    ParameterError,
    SsaError,
    StateError,
    ValidationError,
    VerticalityError,
)
from .forecasting import (
    BootstrapForecast,
    ForecastCheck,
    ForecastResult,
    Lrr,
    bforecast,
    forecast_check,
    lrr,
    rforecast,
    vforecast,
)
from .hankel import (
    HankelOperator,
    WindowSpec,
    antidiag_counts,
    embed,
    hankelize_matrix,
    hankelize_rank1,
    hmatvec,
    hmatvec_t,
)
from .parest import PairEstimate, RootSet, esprit, pairs_estimate, roots, series_rank
from .reconstruction import (
    Grouping,
    ReconstructionResult,
    WCorMatrix,
    elementary,
    parse_groups,
    reconstruct,
    residuals,
    wcor,
)
from .series import TimeIndex, TimeSeries, load_series, write_series

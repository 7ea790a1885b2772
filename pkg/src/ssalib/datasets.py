"""Monthly series used in the worked examples (see ``data/README.md``)."""

from importlib import resources

from .series import TimeIndex, TimeSeries, load_series

_FILES = {"co2": "co2.csv", "MotorVehicle": "MotorVehicle.csv"}


def available():
    return sorted(_FILES)


def data_path(name):
    """Filesystem path of a bundled CSV."""
    try:
        fname = _FILES[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; choose from {available()}") from None
    return resources.files("ssalib") / "data" / fname


def load(name) -> TimeSeries:
    """Load a bundled series with a monthly decimal-year index."""
    with data_path(name).open("rb") as fh:
        ts = load_series(fh, name=name)
    # regenerate the axis exactly: start year, 12 steps per year
    return TimeSeries(ts.values, TimeIndex(ts.index.start, 1 / 12, "year"), name)

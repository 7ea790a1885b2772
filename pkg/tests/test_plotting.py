import csv

import numpy as np
import pytest

from ssalib import ParameterError, esprit, new_session, plotting


@pytest.fixture(scope="module")
def session(co2):
    return new_session(co2, L=120)


def _read(path):
    with open(path) as fh:
        return list(csv.reader(fh))


BUILDERS = {
    "values": lambda s: plotting.plot_values(s),
    "vectors": lambda s: plotting.plot_vectors(s, range(1, 7)),
    "paired": lambda s: plotting.plot_paired(s, range(1, 7)),
    "wcor": lambda s: plotting.plot_wcor(s, [[i] for i in range(1, 13)]),
    "series": lambda s: plotting.plot_series(s, range(1, 5)),
    "reconstruction": lambda s: plotting.plot_reconstruction(s, "1,4|2,3|5,6"),
    "roots": lambda s: plotting.plot_roots(esprit(s, range(1, 7))),
    "forecast": lambda s: plotting.plot_forecast([1.0, 2.0, 3.0], [4, 5, 6], [0.0, 1.0, 0.5],
                                                  None, [0.5, 1.5, 2.5], [1.5, 2.5, 3.5]),
}


@pytest.mark.parametrize("kind", plotting.KINDS)
def test_every_kind_is_deterministic(tmp_path, session, kind):
    a = BUILDERS[kind](session)
    assert a.kind == kind
    svg, data = a.save(tmp_path / "a")
    b = BUILDERS[kind](session)
    svg2, data2 = b.save(tmp_path / "b")
    assert open(svg, "rb").read() == open(svg2, "rb").read()
    assert open(data, "rb").read() == open(data2, "rb").read()
    assert open(svg).read().lstrip().startswith("<?xml")


def test_values_csv_is_exact(tmp_path, session):
    _, data = plotting.plot_values(session).save(tmp_path / "v")
    rows = _read(data)
    assert rows[0] == ["index", "lambda"]
    got = np.array([float(r[1]) for r in rows[1:]])
    assert np.array_equal(got, session.lambdas)


def test_paired_csv_holds_vectors(tmp_path, session):
    _, data = plotting.plot_paired(session, [1, 2, 3]).save(tmp_path / "p")
    rows = _read(data)
    assert rows[0] == ["coord", "U1", "U2", "U3"]
    U = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    assert np.array_equal(U, session.U[:, :3])


def test_rendered_line_matches_csv(session):
    art = plotting.plot_vectors(session, [2])
    line = art.figure.axes[0].lines[0]
    table = np.array(art.rows)
    assert np.array_equal(line.get_ydata(), table[:, 1])


def test_wcor_csv_square(tmp_path, session):
    _, data = plotting.plot_wcor(session, [[1, 4], [2, 3]]).save(tmp_path / "w")
    rows = _read(data)
    assert rows[0] == ["label", "F1", "F2"] and rows[1][0] == "F1" and float(rows[1][1]) == 1.0


def test_paired_needs_two(session):
    with pytest.raises(ParameterError):
        plotting.plot_paired(session, [1])


def test_reconstruction_flags(session):
    a = plotting.plot_reconstruction(session, "1,4|2,3", add_original=False, add_residuals=False)
    assert a.header == ["time", "F1", "F2"]
    b = plotting.plot_reconstruction(session, "1,4|2,3")
    assert b.header == ["time", "Original", "F1", "F2", "Residuals"]

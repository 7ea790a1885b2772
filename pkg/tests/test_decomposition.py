import numpy as np
import pytest
from conftest import dense_trajectory

import ssalib
from ssalib import (
    Config,
    ParameterError,
    TimeSeries,
    ValidationError,
    extend,
    lagcov,
    load_session,
    new_session,
    save_session,
)
from ssalib.decomposition import resolve_method


def _same_up_to_sign(a, b, tol):
    return min(np.abs(a - b).max(), np.abs(a + b).max()) <= tol


def test_co2_session(co2):
    s = new_session(co2, L=120)
    assert (s.L, s.K, s.N, s.kind) == (120, 349, 468, "basic")


def test_default_window():
    s = new_session(np.arange(11.0) ** 2)
    assert s.L == 5


def test_motor_small_window_is_eigen(motor):
    s = new_session(motor, L=12)
    assert s.method == "eigen"
    text = s.summary()
    assert "Series length: 541" in text and "Window length: 12" in text
    assert "SVD method: eigen" in text


def test_bad_window():
    with pytest.raises(ParameterError):
        new_session(np.arange(10.0), L=11)


def test_auto_resolution():
    cfg = Config()
    spec = ssalib.WindowSpec(1000, 500)
    assert resolve_method("basic", "auto", spec, None, cfg) == "lanczos"
    assert resolve_method("basic", "auto", spec, 300, cfg) == "eigen"
    assert resolve_method("basic", "auto", ssalib.WindowSpec(300, 100), None, cfg) == "eigen"
    assert resolve_method("toeplitz", "auto", spec, None, cfg) == "eigen"
    with pytest.raises(ParameterError):
        resolve_method("toeplitz", "svd", spec, None, cfg)


def test_constant_series():
    s = new_session(np.full(5, 2.0), L=2, method="eigen")
    assert s.lambdas[0] == pytest.approx(32.0, rel=1e-12)
    np.testing.assert_allclose(s.U[:, 0], [1 / np.sqrt(2)] * 2, rtol=1e-12)
    assert s.lambdas[1] <= 1e-12


def test_sine_period4_rank2():
    x = np.sin(np.pi / 2 * np.arange(40) + 0.3)
    lam = new_session(x, L=4, method="eigen").lambdas
    assert lam[2] < 1e-10 * lam[0]
    # equal eigenvalues once K is a multiple of the period as well
    lam = new_session(x[:39], L=4, method="eigen").lambdas
    assert lam[2] < 1e-10 * lam[0]
    assert lam[1] == pytest.approx(lam[0], rel=1e-10)


@pytest.mark.parametrize("method", ["eigen", "svd"])
def test_full_backends_match_dense(rng, method):
    x = rng.standard_normal(100)
    s = new_session(x, L=30, method=method)
    sv = np.linalg.svd(dense_trajectory(x, 30), compute_uv=False)
    np.testing.assert_allclose(s.lambdas, sv**2, rtol=1e-9)


def test_energy_and_orthonormality(rng):
    x = rng.standard_normal(150)
    for method in ("eigen", "svd"):
        s = new_session(x, L=40, method=method)
        X = dense_trajectory(x, 40)
        assert s.lambdas.sum() == pytest.approx(np.sum(X**2), rel=1e-9)
        np.testing.assert_allclose(s.U.T @ s.U, np.eye(s.nu), atol=1e-9)
        Q = s.factor_vectors(range(1, s.nu + 1))
        np.testing.assert_allclose(X.T @ s.U, Q * np.sqrt(s.lambdas), rtol=1e-8, atol=1e-8)


def test_svd_small_example():
    x = np.arange(1.0, 6.0)
    s = new_session(x, L=2, method="svd")
    np.testing.assert_allclose(np.sqrt(s.lambdas),
                               np.linalg.svd(dense_trajectory(x, 2), compute_uv=False), rtol=1e-12)


def test_zero_series():
    s = new_session(np.zeros(20), L=5, method="svd")
    assert np.all(s.lambdas == 0)


def test_backends_agree(rng):
    x = rng.standard_normal(400)
    ref = new_session(x, L=150, method="eigen")
    for method in ("svd", "lanczos"):
        s = new_session(x, L=150, method=method, neig=8)
        np.testing.assert_allclose(s.lambdas[:8], ref.lambdas[:8], rtol=1e-6)
        for i in range(8):
            assert _same_up_to_sign(s.U[:, i], ref.U[:, i], 1e-5)


def test_lanczos_vs_eigen_large(rng):
    x = rng.standard_normal(1000)
    lz = new_session(x, L=500, method="lanczos", neig=10)
    ref = new_session(x, L=500, method="eigen")
    np.testing.assert_allclose(lz.lambdas, ref.lambdas[:10], rtol=1e-6)


def test_lanczos_constant_series():
    s = new_session(np.full(200, 3.0), L=80, method="lanczos", neig=1)
    assert s.lambdas[0] == pytest.approx(9 * 80 * 121, rel=1e-10)
    np.testing.assert_allclose(s.U[:, 0], 1 / np.sqrt(80), rtol=1e-8)


def test_lanczos_too_many():
    with pytest.raises(ParameterError):
        new_session(np.arange(50.0), L=10, method="lanczos", neig=11)


def test_sign_convention(rng):
    s = new_session(rng.standard_normal(120), L=40, method="eigen")
    for u in s.U.T:
        first = u[np.abs(u) > 1e-12][0]
        assert first > 0


def test_extend_keeps_triples(rng):
    x = rng.standard_normal(600)
    s = new_session(x, L=250, method="lanczos", neig=10)
    lam, U = s.lambdas.copy(), s.U.copy()
    extend(s, 15)
    assert s.nu == 15
    assert np.array_equal(s.lambdas[:10], lam) and np.array_equal(s.U[:, :10], U)
    ref = new_session(x, L=250, method="eigen")
    np.testing.assert_allclose(s.lambdas, ref.lambdas[:15], rtol=1e-6)
    extend(s, 5)
    assert s.nu == 15
    with pytest.raises(ParameterError):
        extend(s, 252)


def test_auto_extension_via_index(rng):
    s = new_session(rng.standard_normal(600), L=250, method="lanczos", neig=5)
    s.eigenvectors([7])
    assert s.nu >= 7


def test_rank_detection():
    n = np.arange(200)
    x = np.exp(0.01 * n) * np.sin(2 * np.pi * n / 10) + 0.5 * n + 3
    s = new_session(x, L=60, method="eigen")
    assert s.lambdas[4] / s.lambdas[0] < 1e-10
    assert s.lambdas[3] / s.lambdas[0] > 1e-10


def test_lagcov_examples(rng):
    np.testing.assert_allclose(lagcov(np.ones(20), 5), np.ones((5, 5)))
    alt = (-1.0) ** np.arange(30)
    i, j = np.indices((6, 6))
    np.testing.assert_allclose(lagcov(alt, 6), (-1.0) ** np.abs(i - j))
    x = rng.standard_normal(300)
    for L in (20, 100):
        naive = np.empty((L, L))
        for a in range(L):
            for b in range(L):
                k = abs(a - b)
                naive[a, b] = np.mean(x[: 300 - k] * x[k:])
        np.testing.assert_allclose(lagcov(x, L), naive, atol=1e-12)


def test_toeplitz(rng):
    x = np.sin(2 * np.pi * np.arange(300) / 12) + 0.1 * rng.standard_normal(300)
    s = new_session(x, L=48, kind="toeplitz")
    assert s.method == "eigen" and s.nu == 48
    assert np.all(np.diff(s.ordering_values) <= 0)
    P = s.U
    np.testing.assert_allclose(P.T @ P, np.eye(48), atol=1e-9)
    np.testing.assert_allclose(s.lambdas, np.sum((dense_trajectory(x, 48).T @ P) ** 2, axis=0),
                               rtol=1e-9)
    rec = ssalib.reconstruct(s, [list(range(1, 49))])
    np.testing.assert_allclose(rec.components[0].values, x, atol=1e-9)


def test_toeplitz_zero_factor():
    s = new_session(np.zeros(30), L=5, kind="toeplitz")
    assert s.zero_factor.all()
    assert np.all(s.lambdas == 0)


def test_cache_budget(rng):
    s = new_session(rng.standard_normal(100), L=30, config=Config(cache_budget=3))
    for i in range(1, 6):
        ssalib.elementary(s, i)
    n, _ = s.cache_info()
    assert n == 3


@pytest.mark.parametrize("method", ["eigen", "lanczos"])
def test_snapshot_round_trip(tmp_path, co2, method):
    s = new_session(co2, L=120, method=method, neig=12)
    ssalib.elementary(s, 1)
    p = tmp_path / "s.ssa"
    save_session(s, p, include_cache=True)
    p2 = tmp_path / "s2.ssa"
    save_session(s, p2, include_cache=True)
    assert p.read_bytes() == p2.read_bytes()
    t = load_session(p)
    assert np.array_equal(t.lambdas, s.lambdas) and np.array_equal(t.U, s.U)
    assert t.series.index == s.series.index and t.method == s.method
    a = ssalib.reconstruct(s, "1,4|2,3").components
    b = ssalib.reconstruct(t, "1,4|2,3").components
    for x, y in zip(a, b):
        assert np.array_equal(x.values, y.values)


def test_snapshot_version_mismatch(tmp_path):
    import json
    import zipfile

    s = new_session(np.arange(20.0), L=5)
    p = tmp_path / "s.ssa"
    save_session(s, p)
    with zipfile.ZipFile(p) as zf:
        items = {n: zf.read(n) for n in zf.namelist()}
    meta = json.loads(items["meta.json"])
    meta["version"] = 999
    items["meta.json"] = json.dumps(meta).encode()
    with zipfile.ZipFile(p, "w") as zf:
        for n, d in items.items():
            zf.writestr(n, d)
    with pytest.raises(ValidationError):
        load_session(p)


def test_concurrent_reads(rng):
    from concurrent.futures import ThreadPoolExecutor

    s = new_session(rng.standard_normal(300), L=100, method="eigen")
    serial = [ssalib.elementary(s, i).copy() for i in range(1, 21)]
    s.clear_cache()
    with ThreadPoolExecutor(4) as ex:
        par = list(ex.map(lambda i: ssalib.elementary(s, i), range(1, 21)))
    for a, b in zip(serial, par):
        assert np.array_equal(a, b)


def test_timeseries_input_preserved(co2):
    s = new_session(co2, L=24)
    assert isinstance(s.series, TimeSeries) and s.series.index == co2.index

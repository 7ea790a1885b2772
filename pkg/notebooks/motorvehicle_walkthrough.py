# %% [markdown]
# # MotorVehicle: sequential decomposition
#
# Monthly vehicle sales. A short window first extracts a smooth trend; a
# long window on the residual then separates many seasonal harmonics. We
# estimate their periods, build a noise envelope from the squared residual
# and forecast. Figures go to `out/motorvehicle/`.

# %%
from pathlib import Path

import numpy as np

import ssalib
from ssalib import plotting

out = Path(__file__).with_name("out") / "motorvehicle"
out.mkdir(parents=True, exist_ok=True)

mv = ssalib.datasets.load("MotorVehicle")
s1 = ssalib.new_session(mv, L=12)
trend = ssalib.reconstruct(s1, {"trend": [1]})
detrended = trend.residual
plotting.plot_reconstruction(s1, {"trend": [1]}).save(out / "stage1")

# %% [markdown]
# Stage two: window 264 on the detrended series. Consecutive eigentriples
# pair up into harmonics of the yearly cycle.

# %%
s2 = ssalib.new_session(detrended, L=264)
plotting.plot_values(s2, range(1, 31)).save(out / "values")
plotting.plot_paired(s2, range(1, 13)).save(out / "paired")
plotting.plot_wcor(s2, [[i] for i in range(1, 31)]).save(out / "wcor")

# %% [markdown]
# Periods of the twelve leading triples by ESPRIT, and the pairs estimate for
# the slow pair 11-12.

# %%
rs = ssalib.esprit(s2, range(1, 13))
print(rs)
print("pairs 11-12 period:", ssalib.pairs_estimate(s2, [11, 12]).period)

# %% [markdown]
# Seasonality is the sum of the first ten triples. Smoothing the squared
# residual with a short window and taking the square root gives a slowly
# varying noise envelope.

# %%
season = ssalib.reconstruct(s2, {"seasonality": range(1, 11)})
noise = season.residual.values
env_session = ssalib.new_session(noise**2, L=30)
envelope = np.sqrt(np.clip(ssalib.reconstruct(env_session, [[1]])[0].values, 0, None))
print("envelope range:", envelope.min(), envelope.max())
plotting.plot_reconstruction(s2, {"seasonality": range(1, 11)}).save(out / "seasonality")

# %% [markdown]
# Five-year forecasts of the seasonal component with a bootstrap band.

# %%
rf = ssalib.rforecast(s2, [list(range(1, 11))], 60)[0]
vf = ssalib.vforecast(s2, [list(range(1, 11))], 60)[0]
print("max |recurrent - vector|:", np.abs(rf.ahead - vf.ahead).max())
bf = ssalib.bforecast(s2, list(range(1, 11)), 60, replicates=100, seed=42)
n = detrended.values.size
plotting.plot_forecast(
    bf.point, bf.times, detrended.values[-120:], detrended.index.times(120, offset=n - 120),
    bf.lower, bf.upper,
).save(out / "forecast")

# %% [markdown]
# # co2: trend and seasonality
#
# Monthly atmospheric CO2 concentrations. We decompose with a window of ten
# years, group the eigentriples into trend and two seasonal harmonics, look
# at the recurrence roots and forecast one year ahead with bootstrap bounds.
# Figures are written next to this script under `out/co2/`.

# %%
from pathlib import Path

import numpy as np

import ssalib
from ssalib import plotting

out = Path(__file__).with_name("out") / "co2"
out.mkdir(parents=True, exist_ok=True)

co2 = ssalib.datasets.load("co2")
s = ssalib.new_session(co2, L=120)
print(s.summary())

# %% [markdown]
# The scree plot shows a dominant trend triple followed by pairs of nearly
# equal eigenvalues, the signature of sine waves.

# %%
plotting.plot_values(s, range(1, 31)).save(out / "values")
plotting.plot_paired(s, range(1, 11)).save(out / "paired")
plotting.plot_wcor(s, [[i] for i in range(1, 21)]).save(out / "wcor")

# %% [markdown]
# Triples 1 and 4 form the trend, 2-3 the annual cycle and 5-6 the
# half-year harmonic. The w-correlations between these groups are small.

# %%
groups = {"trend": [1, 4], "annual": [2, 3], "half-year": [5, 6]}
rec = ssalib.reconstruct(s, groups)
print(np.round(ssalib.wcor(s, groups).matrix, 3))
plotting.plot_reconstruction(s, groups).save(out / "reconstruction")

# %% [markdown]
# The signal subspace 1-6 defines a linear recurrence; its roots give the
# periods and growth rates of the components.

# %%
rel = ssalib.lrr(s, range(1, 7))
rs = ssalib.roots(rel)
print(ssalib.RootSet(rs.roots[:6]))  # the six signal roots
plotting.plot_roots(rs).save(out / "roots")

# %% [markdown]
# Recurrent and vector forecasts of the signal for the next twelve months,
# and a bootstrap interval for the recurrent one.

# %%
rf = ssalib.rforecast(s, [list(range(1, 7))], 12)[0]
vf = ssalib.vforecast(s, [list(range(1, 7))], 12)[0]
print("max |recurrent - vector|:", np.abs(rf.ahead - vf.ahead).max())
bf = ssalib.bforecast(s, list(range(1, 7)), 12, replicates=100, seed=1)
plotting.plot_forecast(
    bf.point, bf.times, co2.values[-60:], co2.index.times(60, offset=co2.values.size - 60),
    bf.lower, bf.upper,
).save(out / "forecast")

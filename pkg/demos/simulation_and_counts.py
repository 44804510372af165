"""Simulating the process and comparing counts with the exact distribution."""
# %%
import numpy as np

import fracpoisson as fp

p = fp.FppParams(nu=0.6, mu=1.0)
src = fp.UniformSource(2024)

path = fp.simulate_path(p, src.substream(0), horizon=50.0)
print(len(path.arrivals), "events before t = 50")
print("first arrivals:", np.round(path.arrivals[:5], 4))

# %%
# Survival of the waiting time is E_nu(-mu t^nu); compare with the empirical tail.
gaps = fp.sample_interarrival(p, src.substream(1), 200_000)
for t in (0.1, 1.0, 10.0, 100.0):
    print(f"t={t:>6}: empirical {np.mean(gaps > t):.4f}   exact {float(fp.survival(p, t)):.4f}")

# %%
# Count distribution at a fixed time.
t = 5.0
counts = fp.sample_counts(p, t, 20_000, src.substream(2))
n = np.arange(8)
pmf = fp.count_pmf(p, n, t)
emp = np.bincount(counts, minlength=8)[:8] / counts.size
for k in n:
    print(f"P(N={k}) exact {pmf[k]:.4f}  simulated {emp[k]:.4f}")
print("mean, var:", fp.count_mean_var(p, t), "vs", counts.mean(), counts.var())

# %%
# After rescaling by the mean, counts settle to the limit law. For nu = 1/2 it is half-normal.
law = fp.LimitLawNu(0.5)
print("f(0) =", float(fp.limit_pdf(law, 0.0)), "2/pi =", 2 / np.pi)
print("relative fluctuation:", fp.relative_fluctuation(law))

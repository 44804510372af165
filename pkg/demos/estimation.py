"""Moment estimation of nu and mu from waiting times, with both interval types."""
# %%
import fracpoisson as fp

p = fp.FppParams(nu=0.9, mu=10.0)
gaps = fp.sample_interarrival(p, fp.UniformSource(7), 10_000)

est = fp.fit(gaps, ci="both", B=200, seed=7)
print(f"nu_hat = {est.nu_hat:.4f} (se {est.nu_se:.4f})  interval {est.nu_ci}")
print(f"mu_hat = {est.mu_hat:.3f} (se {est.mu_se:.3f})  interval {est.mu_ci}")
print("bootstrap:", est.bootstrap)

# %%
# Predicted standard errors shrink like 1/sqrt(N).
for n in (100, 1_000, 10_000, 100_000):
    print(n, fp.asymptotic_se(0.9, 10.0, n))

# %%
# Small Monte Carlo study in the style of the accuracy tables.
spec = fp.ExperimentSpec(nu=0.3, mu=1.0, sample_sizes=[100, 1000], replicates=200, seed=1)
print(fp.report_emit(fp.run_experiment(spec), "markdown"))

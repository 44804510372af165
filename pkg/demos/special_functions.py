"""Mittag-Leffler and stable densities, checked against closed forms."""
# %%
import math

import numpy as np

import fracpoisson as fp

# E_1(-z) is exp(-z) and E_{1/2}(-z) is exp(z^2) erfc(z).
z = np.array([0.0, 0.5, 1.0, 3.0, 10.0])
print(np.max(np.abs(fp.mittag_leffler(1.0, -z) - np.exp(-z))))
print(np.max(np.abs(fp.mittag_leffler(0.5, -z) - np.exp(z**2) * fp.erfc(z))))

# %%
# Large arguments switch to the integral route; the decay is algebraic.
for x in (10.0, 100.0, 1e4):
    v = fp.mittag_leffler(0.7, -x)
    print(f"E_0.7(-{x:g}) = {v:.6e}   x*E = {x * v:.6f}")
print("1/Gamma(0.3) =", 1 / math.gamma(0.3))

# %%
# The one-sided stable density at alpha = 1/2 is the Levy density.
law = fp.StableLaw(0.5)
t = np.array([0.05, 0.2, 1.0, 5.0, 100.0])
levy = np.exp(-1 / (4 * t)) / (2 * math.sqrt(math.pi) * t**1.5)
print(np.max(np.abs(fp.stable_pdf(law, t) / levy - 1)))

# %%
# The saddle-point form is exact at alpha = 1/2 and drifts away from it elsewhere.
# Grid points scale with alpha; for alpha near 1 the density at small t is below double range.
for a in (0.3, 0.5, 0.8):
    law = fp.StableLaw(a)
    t = a * np.array([0.3, 0.6, 1.0])
    print(a, fp.stable_pdf_saddlepoint(law, t) / fp.stable_pdf(law, t))

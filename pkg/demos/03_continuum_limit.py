# %% [markdown]
# # Continuum limits
#
# Smooth fields on a torus of side T are sampled on finer and finer lattices.
# The subtracted Wilson action approaches the Yang-Mills integral with error
# O(l^2), and the Higgs observables approach their integrals as well.

# %%
import numpy as np

from gaugenet.continuum import (
    abelian_wave, higgs_limit_sweep, higgs_wave, nonabelian_two_mode, wilson_limit_sweep,
)

ab = wilson_limit_sweep(abelian_wave(amplitude=0.5), [8, 16, 32, 64])
print(ab.to_csv())
print(f"order {ab.order:.3f}, kappa {ab.extras['kappa']:.5f}")

# %% [markdown]
# Non-abelian SU(2) field in four dimensions.  The commutator term matters
# here; flipping its sign would spoil the convergence.

# %%
na = wilson_limit_sweep(nonabelian_two_mode(d=4), [4, 6, 8, 10], threads=4)
print(f"order {na.order:.3f}, kappa {na.extras['kappa']:.4f}")

# %% [markdown]
# Higgs sector: the quartic and mass sums are exact rectangle rules, while the
# covariant kinetic term converges at second order.

# %%
reps = higgs_limit_sweep(higgs_wave(), [8, 16, 32, 64])
for name, rep in reps.items():
    errs = np.array([r["rel_err"] for r in rep.rows])
    print(f"{name:8s} rel errors {np.array2string(errs, precision=2)} order {rep.order}")

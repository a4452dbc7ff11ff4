"""Monte Carlo of the reconstruction with vacuum and squeezed fluctuations.

Wing-mode vacuum noise is amplified by sqrt((1-lambda)/lambda); squeezing the
amplitude quadrature by e^r = 10 buys a factor 100 in variance.
"""

# %%
import math

import numpy as np

from prolatoscope import NoiseModel, build_basis, make_double_gaussian, photons_from_power, run_ensemble

basis = build_basis(1.0, 18)
print("1 mW at 1064 nm for 1 ms:", f"{photons_from_power(1e-3, 1064e-9, 1e-3):.3e}", "photons")

# %% variance law at 1e5 trials
obj = make_double_gaussian(1e12)
for model in (NoiseModel.coherent(), NoiseModel.squeezed(math.log(10))):
    ens = run_ensemble(obj, basis, 4, model, 100_000, seed=1)
    ratio = ens.summary()["var_re"] * 4 * basis.lambdas[:4] * math.exp(2 * model.r)
    print(model.kind, "var / predicted:", np.round(ratio, 3))

# %% five realizations per setting: deviation grows with xi
xi = np.array([1.0, 3.0, 5.0, 7.0])
for photons, model in ((1e12, NoiseModel.coherent()), (1e13, NoiseModel.coherent()), (1e12, NoiseModel.squeezed(math.log(10)))):
    ens = run_ensemble(make_double_gaussian(photons), basis, 7, model, 5, seed=2021)
    print(f"{model.kind:9s} N={photons:.0e}", np.array2string(ens.deviation(basis, xi), precision=3))

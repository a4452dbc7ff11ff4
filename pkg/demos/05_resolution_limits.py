"""Point-spread functions, super-resolution factor and the photon-number
limit on the usable mode count."""

# %%
import math

from prolatoscope import NoiseModel, build_basis, superres_factor, sweep_S_vs_N

basis = build_basis(1.0, 18)
S, W, W_L = superres_factor(basis, 7)
print(f"W = {W:.4f}, W_7 = {W_L:.4f}, S = {S:.3f}")

# %% width shrinks as modes are added
for L in (1, 3, 5, 7, 9, 11):
    print(L, f"{superres_factor(basis, L)[2]:.4f}")

# %% S against photon number for a narrow rectangle probe
photons = [10.0**e for e in range(3, 16, 2)]
for p in sweep_S_vs_N(photons, [NoiseModel.coherent(), NoiseModel.squeezed(math.log(10))], basis):
    print(f"{p.model.kind:9s} N={p.photons:.0e}  L*={p.L_star:2d}  S={p.S:.3f}")

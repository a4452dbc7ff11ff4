"""Two Gaussian peaks closer than the Rayleigh distance: the image shows one
bump, the spectrum spreads well beyond the pupil."""

# %%
import numpy as np

from prolatoscope import build_basis, direct_spectrum, forward_image, make_double_gaussian, rayleigh_distance
from prolatoscope.fieldmodel import count_local_maxima, default_object_grid

c = 1.0
basis = build_basis(c, 18)
obj = make_double_gaussian(1.0, s0=0.5, sigma=0.1)
print("separation 1.0, Rayleigh distance", rayleigh_distance(c))

# %% image on the 1e-3 grid
s = default_object_grid()
image = forward_image(obj, basis, s)
print("image maxima:", count_local_maxima(image.values))

# %% the two image routes agree: PSF convolution and lambda-weighted series
core = np.linspace(-1, 1, 201)
e_kernel = forward_image(obj, basis, core).values
e_series = forward_image(obj, basis, core, method="series").values
print("kernel vs series:", np.abs(e_kernel - e_series).max())

# %% how much of |f|^2 passes the pupil |xi| <= 1
xi = np.linspace(-15, 15, 3001)
f = direct_spectrum(obj, c, xi).values
inside = np.abs(xi) <= 1
print("fraction of spectral energy inside the pupil:", np.sum(np.abs(f[inside]) ** 2) / np.sum(np.abs(f) ** 2))

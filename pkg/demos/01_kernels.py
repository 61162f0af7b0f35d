"""
Kernels and their transforms
============================

Every estimator is driven by the Fourier transform of a kernel supported
on [-1, 1]. This script prints the built-in kernels, their edge constants
and a few moments.
"""

import numpy as np

from atomdecon import BUILTIN_KERNELS, kernel_moment
from atomdecon.errors import NonIntegrableMoment
from atomdecon.kernels import eval_closed_form, fourier_pair_residual

# The w-type kernels estimate the density, the k-type kernel estimates the atom.
for name, kernel in BUILTIN_KERNELS.items():
    print(f"{name:9s} kind={kernel.kind} alpha={kernel.alpha:g} edge const={kernel.edge_const:g}")

# Kernel values come from closed forms away from zero and quadrature near it.
x = np.linspace(-6, 6, 7)
for name, kernel in BUILTIN_KERNELS.items():
    print(name, np.round(eval_closed_form(kernel, x), 5))

# Both representations agree to rounding error.
for name, kernel in BUILTIN_KERNELS.items():
    print(f"{name}: max pair residual {fourier_pair_residual(kernel):.1e}")

# The tails decay like |x|^-(alpha+1), so only low moments exist.
for name, kernel in BUILTIN_KERNELS.items():
    row = []
    for j in range(5):
        try:
            row.append(f"{round(kernel_moment(kernel, j), 9) + 0.0:+.4f}")
        except NonIntegrableMoment:
            row.append("   --  ")
    print(f"{name:9s}", " ".join(row))

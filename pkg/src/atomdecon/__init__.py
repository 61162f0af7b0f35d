"""Kernel deconvolution of a density observed through a zero-inflated, noisy product.

Observations follow X = U V + sigma Z with P(U = 0) = p, V ~ f and Z
standard normal with known sigma. The package estimates both the atom
mass p and the density f.
"""

from .asymptotics import (BandwidthSchedule, asymptotic_sd_f, asymptotic_sd_p, bias_f,
                          corrected_sd_f, corrected_sd_p, default_schedule, expected_fhat,
                          lemma51_integral, lemma51_ratio, lemma51_rhs, smoothed_density)
from .errors import (CoverageError, DegenerateModel, DeconvolutionError, DomainError, EmptyInput,
                     ExponentOverflow, MaxDepthExceeded, NonIntegrableMoment, NumericalError)
from .estimators import (EstimatorConfig, PEstimate, f_known_p, f_known_p_grid, f_star,
                         f_star_grid, fhat_direct, fhat_grid, p_hat, p_raw, truncate_p, w_h,
                         w_h_grid)
from .kernels import (ATOM_K, BUILTIN_KERNELS, DECONV_W, SEXTIC_W, Kernel, get_kernel,
                      kernel_moment)
from .numerics import (DensityGrid, GridConfig, Sample, empirical_cf, fft_grid_eval, integrate,
                       simpson_weights)
from .simulation import (GammaFamily, MCSummary, MixtureFamily, ModelSpec, NormalFamily,
                         draw_sample, histogram, mc_study, nsr, parse_family)

__version__ = "0.1.0"

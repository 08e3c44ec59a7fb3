"""Continuous wavelet transforms over planar matrix dilation groups.

Subpackage map:

* :mod:`coorbitkit.groups`      chart arithmetic, Haar data, affine action
* :mod:`coorbitkit.orbits`      open dual orbit geometry and the envelope A
* :mod:`coorbitkit.fields`      sample grids, transforms, field file IO
* :mod:`coorbitkit.wavelets`    bump and vanishing-moment wavelet factories
* :mod:`coorbitkit.cwt`         FFT analysis/synthesis, Calderon diagnostics
* :mod:`coorbitkit.weights`     affine weights and control weights
* :mod:`coorbitkit.norms`       mixed norms, embeddedness checker, decay ratio
* :mod:`coorbitkit.frames`      sampling sets, oscillation, frame iteration
* :mod:`coorbitkit.experiments` scripted experiment drivers behind the CLI
"""

from .groups import (AffinePoint, DilationParams, FamilyMismatchError,
                     GroupFamily, InvalidElementError, UnsupportedFamilyError,
                     affine_apply, affine_compose, affine_identity,
                     affine_invert, compose, determinant, dual_action,
                     group_norm, haar_density, invert, modular_G, modular_H,
                     operator_norm, to_matrix)
from .orbits import (OrbitDomainError, aux_A, aux_A_closed, base_point,
                     dist_complement, in_orbit, orbit_polynomial)
from .fields import (FrequencyGrid, GridMismatchError, SampledField,
                     bilinear_sample, field_from_profile, inner, l2_norm,
                     read_field, rim_mass_fraction, to_frequency, to_space,
                     write_field)
from .wavelets import (WaveletSpec, WaveletSupportError, bump_wavelet,
                       counterexample_pair, moment_slope, moment_wavelet,
                       radial_bump_field, schwartz_seminorm)
from .cwt import (HGrid, TransformArray, analyze, build_hgrid,
                  calderon_constant, calderon_function, iter_analyze,
                  parseval_ratio, read_transform, synthesize,
                  write_transform)
from .weights import (WeightSpec, control_weight_eval,
                      control_weight_symmetric, hweight_ab, weight_eval)
from .norms import (MixedNormParams, decay_ratio, embeddedness_condition,
                    embeddedness_integrand, embeddedness_verdict,
                    flat_lp_norm, lps_norm, mixed_norm, mixed_norm_stream)

__version__ = "0.1.0"

"""Spectral functional calculus over generic rings via formal Laurent series."""

from .errors import (BackendError, DecayCertificateError, GrowthClassError, MissingHalfError,
                     NotInvertibleError, PairingError, PencilInversionError, SpecringError,
                     SpectralClassError, UnknownSeminormError)
from .rings import (ComplexMatrixRing, ComplexRing, IntegerRing, MatrixRing, NoHalf, RationalRing,
                    Ring, SeminormFamily, axiom_check, cayley, cayley_inv, seminorm_eval)
from .laurent import (GrowthClass, LaurentSeries, WeightClass, integrate_z0, lambda_combinator,
                      limit_at_one, series_arith, weighted_seminorm)
from .kernels import TransformationKernel, kernel_coefficients, resolvent_analytic_check
from .spectral import (Oracle, Quadrature, SeriesCayley, aux_integral, class_membership,
                       derived_decomposition, fsqrt_spec, geometric_mean, homotopy_eval, idem_spec,
                       pencil_inverse_expansion, sgn, spectral_split, sqrt_real_segment, sqrt_spec)
from .halffree import (SymmetrizedSeries, fsqrt_nohalf, fsqrt_pencil_expansion, hilbert_product_double,
                       hilbert_product_single, idem_from_fsqrt, idem_nohalf, integral_pairing,
                       normal_order_double, normal_order_single)
from .identities import MultiPoly, verify_all, verify_identity

__version__ = "0.1.0"

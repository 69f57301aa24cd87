"""caz: a numerical laboratory for invariant Gaussian analytic functions.

Three models (elliptic, flat, hyperbolic) of random analytic functions with
symmetry-invariant zero sets; tools to sample them, locate and certify their
zeroes, evaluate linear statistics with their mean/variance predictions, run
normality experiments, work the exact diagram calculus behind the moment
bounds, and contrast everything with three perturbed-lattice toy processes.
"""

from .errors import (CazError, CertificationError, ConfigError,
                     DegenerateSampleError, DomainError, QuadratureError,
                     TruncationError)
from .models import (ComplexGaussianStream, Family, GafSample, GroupElement,
                     ModelSpec, TruncationInfo, deterministic_sample,
                     phase_multiplier, sample_coefficients, sample_with_radius,
                     truncation_tail_rms)
from .zeros import (Certificate, Region, RegionKind, ZeroSet,
                    count_zeros_argument_principle, find_zeros_elliptic,
                    find_zeros_in_region, truncation_order)
from .testfuncs import TestFunction, TestFunctionKind
from .stats import (default_region, dstar_norm_sq, expected_linear_statistic,
                    invariant_laplacian, invariant_measure_density,
                    linear_statistic, run_normality_experiment,
                    variance_prediction)
from .wick import (kappa, kappa_partial, kappa_tail_estimate,
                   log_abs_gaussian_variance, parseval_partial, parseval_tail,
                   wick_log_coeff, wick_log_coeff_pattern)
from .diagrams import (Diagram, ReducedDiagram, classify,
                       correlated_field_samples, count_diagrams,
                       cyclic_diagram, diagram_value, enumerate_diagrams,
                       enumerate_pair_partitions,
                       exact_moment_polynomial_functional,
                       irregular_bound_check, pair_partition_count,
                       reduced_multiplicity, regular_diagram_count,
                       wick_moment)
from .toys import (ToySpec, ToyVariant, direction_average_identity,
                   matched_scatter_amplitude, run_toy_experiment, sample_toy,
                   toy_expected_mean, toy_linear_statistic,
                   toy_variance_prediction)
from .geometry import (disk_to_hyperboloid, edelman_kostlan_density,
                       embedding_inner_product, fubini_study_distance,
                       hyperboloid_to_disk, induced_metric_ratio,
                       invariant_line_element, plane_to_sphere,
                       sphere_to_plane)
from .report import ExperimentReport

__version__ = "0.1.0"

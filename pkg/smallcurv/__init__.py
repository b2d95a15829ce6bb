from .version import __version__
from .spectral import SpectralParams, eigen_dimension, lambda_iso, rho, spectral_triple
from .measure import (Atom, CurvatureData, MeasureFormatError, ProblemInstance, VeroneseMeasure,
                      ambient_dimension, curvature_data, expectations, immersion_check,
                      load_measure, mix, permute_factors, save_measure, validate)
from .copositivity import (CopositivityCertificate, ProblemSizeError, b_matrix, bisect_critical_s,
                           critical_s, is_copositive, is_isotropic, simplex_quadratic_min)
from .designs import (DesignError, DesignInput, check_design_moments, design_to_measure, load_design,
                      torus_design_bound)
from .optimizer import SearchConfig, load_search_config, minimize_s, solve_isotropic_system

from .frames import (FramePoint, SffSample, frame_point, random_rotation, rotate_sample, sff_at,
                     sff_sample)
from .harmonics import UnsupportedFactorError, monomial_sphere_moment, veronese_components
from .maps import ExplicitImmersion, build_sns1, build_sns1_optimal, build_tensor, build_veronese
from .sampling import (CurvatureEstimate, closed_form_sff_norm2, estimate_normal_curvature,
                       measure_pullback_metric, random_base_point, round_norms2)

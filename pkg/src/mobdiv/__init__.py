"""Coverage statistics of a mobile sensor among Wiener-mobile sink nodes."""

from ._backend import name as backend_name
from .analytic import (CoverageCurve, coverage_prob, coverage_prob_at, ell,
                       en_saturation_approx, expected_covered, sink_hit_prob, sink_miss_prob)
from .model import (ConfigError, IndicatorSequence, Realization, ScaleWarning, ScenarioConfig,
                    build_time_grid, config_from_mapping, load_config, validate_config)
from .montecarlo import (MetricEstimates, TransitionEstimates, estimate_metrics,
                         estimate_transitions, simulate_indicators, simulate_realization)
from .numerics import QuadratureSpec, gaussian_pdf, integrate, q_function
from .planar import (PlanarConfig, circle_coverage_bounds, coverage_prob_2d_square,
                     simulate_2d)
from .runlength import (RunLengthDistribution, TransitionSchedule, beta_marginal, beta_pmf,
                        brute_force_runlength, outage_from_chain, runlength_distribution,
                        runs_of_zeros)

__version__ = "0.1.0"

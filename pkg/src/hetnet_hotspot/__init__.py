"""Mean user throughput in a hexagonal HetNet with a Gaussian traffic hotspot."""

from .config import Config, ConfigError, dump_config, load_config
from .evaluator import (ABSENT, EvalResult, Placement, absorption_mu, eval_scenario1,
                        eval_scenario2, eval_scenario3, offloading_gain, served_fractions)
from .hexnet import HexLattice, g, g_inverse, interference_factor, omega
from .linkbudget import (LinkCurve, NetworkModel, RadioParams, build_network_model,
                         cell_radius, db_to_linear, link_throughput)
from .numerics import (QuadratureError, QuadratureSpec, bessel_i0, hurwitz_zeta, integrate_1d,
                       invert_monotone, riemann_zeta)
from .simkernel import McResult, McSpec, associate, mc_absorption_ci, mc_evaluate
from .traffic import Hotspot, HotspotOutsideRegion, normalization_s0, sample_hotspot

__version__ = "0.1.0"

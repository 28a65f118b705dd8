"""Riemann-Liouville fractional calculus on uniform grids of a bounded interval.

Fractional integrals and derivatives of piecewise-linear grid data by exact
product integration, their measure-valued extensions for BV data, fractional
Sobolev-type norms, and a verification suite for the classical identities and
inequalities.
"""

from .corpus import AnalyticFunction, Singularity, Tag, parse_function, sample
from .derivative import (DerivKind, check_caputo_duality, check_ftc, check_marchaud_equiv,
                         check_representability, estimate_trace, frac_deriv, higher_frac_int,
                         higher_order_constant)
from .grid import (EPS_S, EndpointPolicy, Grid, GridFunction, Interval, UNIT, eval_pw_linear,
                   frac_order, read_csv, write_csv)
from .integral import (OracleError, Side, check_duality, check_reflection, check_semigroup,
                       frac_int, frac_int_oracle, kernel_moments, pair, reflect, sweep_s_to_0)
from .measures import (BVFunction, Hat, RadonMeasure, bv_corpus, check_atom_detection,
                       check_bv_embedding, check_measure_duality, check_weak_type_measure,
                       derivative_measure, detect_atoms, distributional_frac_deriv,
                       embedding_constant, frac_int_measure, hat_panel, pairing, sweep_s_to_1)
from .norms import (NormReport, gagliardo_seminorm, hardy_quotient, holder_seminorm, lp_norm,
                    rl_sobolev_norm, weak_lp_quasinorm)
from .report import VerificationReport, Verdict
from .special import beta_fn, gamma_fn, log_gamma_fn

__version__ = "0.1.0"

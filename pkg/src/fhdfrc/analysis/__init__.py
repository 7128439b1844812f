"""Closed-form statistics of the scrambled eavesdropper metric and radar ambiguity tools."""

from .ambiguity import (
    CAPPED_DB, AmbiguityGrid, SirResult, autocorrelation_oracle, chi, conventional_plan,
    draw_target_delays, hfcs_plan, msr_db, processed_plan, range_ambiguity, sampled_pulse,
    sir_vs_targets,
)
from .statistics import (
    HMonoReport, Prop1Empirical, Prop1Params, fb_re, fb_samples, h_fn, h_mono_check,
    np_lower_bound, prop1_empirical, prop1_exact_moments, prop1_params, region_mu_max,
)

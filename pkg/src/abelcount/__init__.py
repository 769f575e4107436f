"""Exact curve counts on abelian surfaces and threefolds."""

from .series import PLaurent, QSeries, USeries
from .lattice import FiniteAbelianGroup, nu_closed, nu_isotropic, nu_subgroup_formula
from .surface import hyp_h_table, n_fls, n_quotient
from .threefold import DTSeries, dt_1, dt_2, dt_hat_1, dt_hat_2_closed
from .verify import run_check, run_checks

__all__ = [
    "PLaurent", "QSeries", "USeries", "FiniteAbelianGroup", "nu_closed", "nu_isotropic",
    "nu_subgroup_formula", "hyp_h_table", "n_fls", "n_quotient", "DTSeries", "dt_1", "dt_2",
    "dt_hat_1", "dt_hat_2_closed", "run_check", "run_checks",
]

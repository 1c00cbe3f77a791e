"""Unramified cohomology H^3_nr(C(G), Q/Z) of finite groups via free resolutions."""

from .groups import FiniteGroup, Subgroup, from_presentation
from .resolutions import FreeResolution, generic_finite_resolution, normal_series_resolution, resolution_for
from .cohomology import ClassVector, CohomologyData
from .negligible import RefusedError, SubgroupOfH4, h4n, h4p, stable_cohomology_h3s
from .unramified import bogomolov_multiplier, choose_hi_pairs, h3nr_of_function_field, h4nr, is_unramified, residue

__version__ = "0.1.0"

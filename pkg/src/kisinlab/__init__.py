"""Lattice combinatorics of rank-2 phi-modules over F_q((u)).

The package computes, for a module given by a normal form or a raw
matrix, the sets of admissible lattices in the tree for GL2: typed loci
with their stratification by elementary divisors, ordinary component
partitions, zero-stratum ball decompositions, and minimal/maximal
lattices under a divisor bound — each closed form cross-checked against
brute-force enumeration.
"""

from .field import FieldCtx, get_ctx
from .series import (InsufficientPrecision, TruncatedSeries, format_series,
                     from_terms, get_default_prec, monomial, one,
                     parse_series, set_default_prec, zero)
from .latmod import (ElemDiv, Lattice, d1d2, format_lattice, hermite_form,
                     lattice_from_columns, parse_lattice, phi_image,
                     rel_position, smith_basis, standard_lattice)
from .building import (BuildingPoint, NotALattice, apartment_point,
                       lattice_to_point, phi_point, point_to_lattice,
                       project_to_apartment, project_to_lines, render_dot,
                       tree_d1, tree_d2)
from .phimod import (NonSplit, NormalForm, PhiModule, Simple, SplitIso,
                     SplitNonIso, UnrecognizedShape, VParams, classify,
                     maximize_gamma, parse_matrix, parse_normal_form,
                     stable_line_solver, transform)
from .oracle import (DEFAULT_BUDGET, BudgetExceeded, ball_enumerate,
                     ball_level_count, ball_vertex_count, ball_vertices,
                     brute_divisors, brute_is_integral_admissible,
                     brute_is_split, brute_is_v_admissible,
                     brute_line_constants, brute_stable_line, diff_reports,
                     materialize)
from .kisin import (AdmissibleSet, compare_relaxed_locus, component_report,
                    connectivity_certificate, distance_routes,
                    enumerate_admissible, enumerate_level, enumerate_relaxed,
                    fixed_point, is_locally_admissible, is_v_admissible,
                    m_of_v, observed_x0, p1_family, phi_distance_formulas,
                    predict_components, predict_dimension, predict_empty,
                    predict_singleton, predict_x0_decomposition, ray_family,
                    s_rank_with_labels, stratify, stratum_candidates,
                    x0_irredundancy, x0_point_set)
from .raynaud import (NoAdmissibleLattice, UnsupportedCase, descent_check,
                      enumerate_admissible_all, find_extremal, is_admissible,
                      lattice_join, lattice_meet, minimal_table_variant,
                      predict_extremal_divisors, verify_extremal)

__version__ = "0.1.0"

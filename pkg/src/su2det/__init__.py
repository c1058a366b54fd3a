"""Determinant formulas for SU(2) Bethe-state scalar products and tree-level structure constants."""

from .algebraic_bethe import (BetheRoots, BetheState, MonodromyBlocks, bethe_residual, build_bethe_state,
                              build_monodromy, continue_roots, eigencheck, find_bethe_solutions, solve_bethe)
from .determinants import (SlavnovInput, gaudin_matrix, gaudin_norm, izergin, izergin_hom, slavnov_hom,
                           slavnov_restricted)
from .errors import *  # noqa: F401,F403
from .gauge_map import (OperatorWord, StructureConstantResult, ThreePointGeometry, flip, make_geometry,
                        oracle_contraction, parse_trace, structure_constant, word_to_basis)
from .numerics import PowerSeries, det, newton_solve, pole_series, series_mul
from .vertex_model import (VertexWeights, apply_b_line, apply_c_line, brute_dwpf, brute_restricted, dual_dwpf,
                           weight)

__version__ = "0.1.0"

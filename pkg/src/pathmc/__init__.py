"""Uniform sampling of constrained +a/-b lattice paths.

Peak/valley Markov chain with concave site weights, monotone coupling from
the past, and a brute-force oracle for small instances.
"""

from .cftp import CftpResult, cftp_sample, cftp_samples, longest_chain_bound
from .chain import (FUNCTIONALS, NotCoalesced, coupling_time, coupling_times, estimate_functional,
                    mcmc_many, mcmc_run, bound_steps)
from .flip import FlipInstruction, chain_step, flip_raw
from .paths import (Culminating, EmptyFamilyError, Excursion, FamilySpec, InvariantError,
                    LatticePath, Meander, SizeGuardError, StepParams, Wall, d1, extremal_paths,
                    is_member, partial_le, pointwise_max, pointwise_min)
from .weights import build_weight_table, effective_kappa, sample_index

__version__ = "0.1.0"

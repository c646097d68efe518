"""Exact simulation of the quantum hiding procedure and Fourier sampling."""

from .cyclotomic import CycInt
from .fourier import (Distribution, SampleBudgetExceeded, abelian_hsp, distribution_from_gram,
                      fourier_distribution_from_labels, fourier_sample_distribution)
from .pipeline import (HSPFailure, HSPResult, coset_representatives, eigenvalue_identities_hold,
                       find_hidden_subgroup, hiding_set_holds)
from .states import (CosetOracle, FactorState, HidingTuple, PromiseError, act, coset_state_family,
                     hiding_state, inner, left_coset, make_appropriate_triple, sample_u, scale,
                     tensor_equal, tensor_inner)

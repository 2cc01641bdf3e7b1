"""S-adic subshifts built from the substitutions tau_(m,n,r).

Word generation, exact complexity, continued-fraction spectra, maximal
equicontinuous factor descriptors, balance data and a realizer for
prescribed factors.
"""
from .errors import (
    AmbiguousParse,
    BudgetExceeded,
    InsufficientDepth,
    InvalidParameters,
    NonPrimitive,
    NotAFactor,
    NotLowComplexity,
    PeriodicInput,
    SadicError,
)
from .words import SadicSystem, Substitution, TauParams, build_tau, compose, factor_set, identity, prefix
from .fixtures import example, example_1_2, example_1_3, example_1_4, repeated
from .structure import check_constraints, derive_ab, decay_report
from .complexity import brute_complexity, calibrate, complexity_formula, limsup_estimate, predicted_increment
from .spectrum import alpha_enclosure, convergents, eigenvalue_group, eigenvalue_membership, group_exponents
from .mef import compare_eigenvalue_groups, factor_orbit_check, mef
from .balance import (
    balance_series,
    dimension_group,
    empirical_balance,
    incidence,
    letter_frequency,
    measure_cylinder,
    perron,
)
from .realizer import TargetSpec, realize, verify_realization

__version__ = "0.1.0"

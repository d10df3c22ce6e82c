"""Squarefree parts of polynomial values, twist solvability, and surveys."""

from .arith import (
    Congruence,
    Factorization,
    Rat,
    chi_d,
    crt,
    factor,
    height,
    is_prime,
    kronecker,
    ord_p,
    prime_in_ap,
    squarefree_part,
)
from .classify import (
    CurveFamily,
    ZeroClassVerdict,
    divisible_class_elements,
    find_R_f,
    make_family,
    witness_multi,
    witness_odd_valuation,
    zero_class_decide,
)
from .construct import (
    ClassElement,
    TernaryForm,
    gen_degree1,
    gen_degree2,
    legendre_solvable,
    legendre_solve,
    reduce_A_from_I,
)
from .local import (
    LocalSearchParams,
    TwistLocalReport,
    count_points_Fl,
    everywhere_local_d,
    has_nontrivial_Ql_point,
    has_real_point,
    hensel_lift,
    is_square_in_Ql,
    pointless_obstruction,
)
from .poly import (
    BiForm,
    IntPoly,
    content_split,
    derivative,
    discriminant,
    eval_rat,
    genus,
    homogenize,
    is_good_prime,
    is_separable,
    reduce_mod_p,
    reverse,
    roots_mod_p,
    taylor_shift,
)
from .survey import (
    CountSeries,
    CoverageReport,
    SurveyConfig,
    count_series,
    coverage,
    enumerate_heights,
    exceptional_primes,
    family_scan,
    s_tilde,
)

__version__ = "0.1.0"

"""twirl: twisted orbital integral residue library.

Exact arithmetic over totally ramified extensions of Q_p, volume weight
factors, twisted conjugacy and discriminants, a ramified-induction test
function on GL_2, stratified orbital integration, and closed-form residue
extraction for the resulting coefficient series.
"""

from .cyclotomic import CharacterValue, MeasureValue
from .errors import (
    ClubsuitViolated,
    DomainError,
    NoStabilization,
    NotEisenstein,
    NotRegular,
    PrecisionExhausted,
    PrecisionTooSmall,
    RelationViolated,
    Singular,
    SingularGammaMinusOne,
    TailNonzero,
    TwirlError,
    UnexpectedPole,
    WindowOverflow,
)
from .integrator import (
    TruncationSpec,
    assemble_coefficients,
    coefficient_A_B,
    orbit_weight_integral,
    orbital_twisted,
    rg_term,
)
from .localfield import (
    Elem,
    LocalFieldCtx,
    SquareClassSet,
    additive_char,
    is_square,
    make_field,
    ord_of,
    parse_context,
    parse_elem,
    square_class_reps,
)
from .matlattice import (
    CosetRep,
    GroupForm,
    LatticeSpec,
    Mat,
    delta,
    delta_vector,
    eps,
    gnorm,
    iwasawa,
    lattice_ord,
    lattice_ord_star,
    mat_ord,
    n_of,
    nu,
    orthogonal_form,
    symplectic_form,
    vdash,
)
from .residue import (
    LaurentData,
    RationalSeries,
    ResidueSeries,
    closed_form,
    fit_polynomial,
    laurent_at_zero,
    residue_report,
)
from .supercuspidal import (
    CuspidalData,
    ScanReport,
    level_character,
    member,
    support_scan,
)
from .twisted import (
    DiscriminantReport,
    TorusElem,
    is_eps_symmetric,
    norm_preimage,
    nu_of_norm_check,
    twisted_centralizer_sample,
    twisted_conj,
    twisted_discriminant,
    twisted_discriminant_oracle,
    weyl_discriminant,
)
from .weights import (
    WeightQuery,
    scaling_block,
    square_class_weight,
    square_class_weight_symbolic,
    torus_cap_volume,
    weight_closed,
    weight_oracle,
)

__version__ = "0.1.0"

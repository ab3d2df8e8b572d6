"""Normalization ratios, LOCC condensation and a Fock-space oracle for composite bosons."""
from .errors import (
    ConsistencyError,
    DomainError,
    PauliBlockingError,
    ResourceLimitError,
    UndefinedRatioError,
)
from .majorization import (
    MajorizationVerdict,
    Outcome,
    check_majorization,
    first_element_test,
    gamma_condition,
    geometric_prefix_proof,
    single_crossing_test,
    uniform_final_test,
)
from .schmidt import (
    SchmidtDistribution,
    entropy,
    from_weights,
    full_purity,
    geometric_family,
    geometric_for_tail,
    power_sum,
    purity,
    purity_closed_form,
    random_distribution,
    uniform_family,
    zeta_family,
)
from .spectrum import SpectrumStream, final_spectrum, initial_spectrum
from .symfun import (
    ChiSequence,
    QualityReport,
    chi_from_newton,
    chi_lower_chain,
    chi_sequence,
    departure_expectation,
    elementary_symmetric,
    epsilon_norm,
    f_bounds,
    f_ratio,
    f_series_approx,
    number_expectation,
    quality_report,
)
from .zeta import riemann_zeta, zeta_tail

__version__ = "0.1.0"

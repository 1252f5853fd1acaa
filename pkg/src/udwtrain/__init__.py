"""Delta-coupling train approximations of Unruh-DeWitt detector observables."""

from .core_model import (
    Bump,
    DeltaTrain,
    Gaussian,
    HardSphere,
    Heaviside,
    PairParams,
    SingleParams,
    TruncatedGaussian,
    smearing_ft,
    switching_ft,
    switching_value,
)
from .delta_train import build_train, build_train_window, train_ft
from .errors import (
    CellBudgetExceeded,
    DomainError,
    InsufficientPoints,
    NumericFailure,
    ReferenceTooCoarse,
)
from .single_detector import kernel_gaussian, pe_exact, pe_train, pe_train_oracle
from .two_detector import (
    PairState2,
    assemble_rho,
    l_ab_exact,
    l_ii_exact,
    m_exact,
    pair_train,
    pair_train_oracle,
)

__version__ = "0.1.0"

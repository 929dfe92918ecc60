"""Renyi-entropy bounds on information combining for binary-input channels."""

from .channels import (
    BinaryChannel,
    JointDistribution,
    channel_entropy,
    channel_to_joint,
    compress_identical_outputs,
    cond_entropy,
    load_channel,
    make_bec,
    make_bsc,
    merge_equivalent_outputs,
    random_channel,
    random_joint,
    save_channel,
)
from .combining import (
    BoundReport,
    bec_bound,
    bsc_bound,
    check_bounds,
    combine_pair,
    expected_order,
    gap_delta,
    regime,
)
from .core import (
    Alpha,
    EntropyKind,
    KKKind,
    binary_renyi,
    binary_renyi_inverse,
    convolve,
    delta_const,
    k_inverse,
    k_value,
    kk,
)
from .errors import (
    ChannelParseError,
    ConfigError,
    DomainError,
    RenyiError,
    UnsupportedOrderError,
)
from .polarization import (
    PolarConfig,
    check_polar_conditions,
    kappa_estimate,
    mutual_info_J,
    polar_minus,
    polar_plus,
    polarize_tree,
)
from .precision import DOUBLE, EXTENDED, get_precision

__version__ = "0.1.0"

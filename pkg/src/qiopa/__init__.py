"""Desk-scale simulator of an optical parametric amplifier seeded with a
polarization-entangled photon pair.

Core pieces: a truncated four-mode Fock space (fock), the amplifier
evolution with its closed forms (opa), the parity-filtering interferometer
and its coincidence rates (neif), phase-space functions with a
displaced-parity oracle (wigner), temporal scan envelopes (envelope), and
artifact writers plus the command-line front end (report, cli).
"""

from .envelope import TemporalParams, coherence_time_from_filter, x_scan_envelope, z_fringe
from .fock import (
    FockBasis,
    ModeId,
    ResourceError,
    StateVector,
    TruncationError,
    fidelity,
    make_basis,
    pair_state,
    swap_parity,
    vacuum_state,
)
from .neif import (
    DetectorMode,
    NeifConfig,
    complementary_coincidence,
    double_coincidence,
    mode_unitary,
    noise_rate_closed_form,
    rate_closed_form,
    same_beam_coincidence,
    transform_state,
    triple_coincidence_rate,
    xor_suppressed_rate,
)
from .opa import (
    OpaParams,
    bogoliubov_check,
    cat_output_closed_form,
    double_pair_ratio,
    evolve,
    squeezed_vacuum_closed_form,
    stimulated_pairs,
)
from .wigner import (
    PhasePoint,
    SqueezedVars,
    bogoliubov_point,
    characteristic_fn,
    wigner_closed_form,
    wigner_numeric,
)

__version__ = "1.0.0"

__all__ = [
    "DetectorMode",
    "FockBasis",
    "ModeId",
    "NeifConfig",
    "OpaParams",
    "PhasePoint",
    "ResourceError",
    "SqueezedVars",
    "StateVector",
    "TemporalParams",
    "TruncationError",
    "bogoliubov_check",
    "bogoliubov_point",
    "cat_output_closed_form",
    "characteristic_fn",
    "coherence_time_from_filter",
    "complementary_coincidence",
    "double_coincidence",
    "double_pair_ratio",
    "evolve",
    "fidelity",
    "make_basis",
    "mode_unitary",
    "noise_rate_closed_form",
    "pair_state",
    "rate_closed_form",
    "same_beam_coincidence",
    "squeezed_vacuum_closed_form",
    "stimulated_pairs",
    "swap_parity",
    "transform_state",
    "triple_coincidence_rate",
    "vacuum_state",
    "wigner_closed_form",
    "wigner_numeric",
    "x_scan_envelope",
    "xor_suppressed_rate",
    "z_fringe",
]

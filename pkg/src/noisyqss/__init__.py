"""Simulation and analysis of GHZ-based three-party secret sharing over noisy qubit channels."""
from .channels import (
    CATALOGUE,
    ChannelStructureReport,
    KrausChannel,
    apply_channel,
    classify_channel_structure,
    phase_damping,
    sample_kraus_branch,
    standard_channel,
)
from .measurement import (
    MeasurementBasis,
    Povm,
    apply_povm,
    bell_measure,
    charlie_basis,
    helstrom,
    measure_qubit,
    block_povm,
    parity_projectors,
)
from .protocol import (
    ProtocolConfig,
    ProtocolReport,
    alice_sends_to_bob,
    analytic_bits,
    analytic_error_rate,
    analytic_success,
    encode_secret,
    evolve_noisy_ghz,
    run_campaign,
    run_noisy_protocol_trial,
    run_pure_protocol,
)
from .states import Encoding, bell_states, ghz3, pauli

__version__ = "0.1.0"

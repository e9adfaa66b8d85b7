"""Temporal steerable weight of qubit channels and non-Markovianity measures."""

from .channels import (
    Exchange,
    KrausChannel,
    LorentzianAD,
    Propagator,
    RabiDecay,
    apply_channel,
    exchange_apply,
    lorentzian_G,
    lorentzian_apply,
    lorentzian_gamma,
    propagate_assemblage,
    rabi_decay_apply,
    random_kraus_channel,
)
from .measures import (
    NmResult,
    TraceSeries,
    TswResult,
    concurrence,
    n_abs,
    n_tsw,
    nc_trace,
    tsw,
    tsw_trace,
)
from .sdp import (
    SdpProblem,
    SdpSolution,
    SolveStatus,
    build_sw_sdp,
    dual_certificate,
    primal_ascent_bound,
    solve,
)
from .steering import (
    Assemblage,
    MeasurementSet,
    StrategyTable,
    assemblage_from_json,
    assemblage_to_json,
    depolarized_assemblage,
    lhs_assemblage,
    pauli_measurement_set,
    premeasure,
    strategy_table,
    validate,
)

__version__ = "0.1.0"

"""Automatic sequences through permutation-weighted transducers.

The package turns a deterministic finite automaton with output into a
transducer whose letters carry permutations, measures the walk-weight
structure (periods, weight groups, value classes), and uses that
structure to predict and verify the behavior of the sequence along the
primes: letter frequencies, Moebius correlations, Fourier decay, and
stability under digit truncation.
"""

from .automaton import (
    Dfao,
    SchemaError,
    automaton_to_doc,
    digits_of,
    find_sync_word,
    is_strongly_connected,
    load_automaton,
    parse_automaton,
    power_automaton,
    scc_decompose,
    sequence_term,
    value_of,
)
from .harmonic import (
    DecayFit,
    FourierValue,
    PrimeFourierResidual,
    RepresentationSpec,
    abelian_character,
    carry_eta,
    carry_violation_count,
    decay_fit,
    phi,
    prime_fourier_residual,
    psi,
    regular_indicator,
    sign_character,
    value_class_character,
)
from .numbertheory import (
    EmpiricalPrimeFrequencies,
    MobiusCorrelation,
    PrimePrediction,
    SieveTables,
    WindowedMobiusSum,
    batch_states,
    empirical_prime_frequencies,
    kloosterman,
    mobius_correlation,
    predict_prime_frequencies,
    sieve,
    stationary_distribution,
    windowed_mobius_sum,
)
from .perms import (
    GroupSizeError,
    GroupTable,
    Perm,
    act,
    closure,
    compose,
    cycle_notation,
    identity,
    inverse,
    perm_order,
)
from .structure import (
    StabilizationError,
    StructureReport,
    StructureResult,
    analyze,
    brute_force_families,
    compute_d,
    compute_l0,
    compute_m0,
    final_component_invariants,
    inverse_path,
    reduce_to_special,
    verify_structure,
)
from .transducer import (
    InducedReport,
    InducedTransducer,
    batch_weight_state,
    build_naturally_induced,
    reconstruct_many,
    reconstruct_output,
    reorder,
    transduce,
    transducer_to_doc,
    verify_induced,
    weight_group,
)

__version__ = "0.1.0"

__all__ = [
    "Dfao",
    "DecayFit",
    "EmpiricalPrimeFrequencies",
    "FourierValue",
    "GroupSizeError",
    "GroupTable",
    "InducedReport",
    "InducedTransducer",
    "MobiusCorrelation",
    "Perm",
    "PrimeFourierResidual",
    "PrimePrediction",
    "RepresentationSpec",
    "SchemaError",
    "SieveTables",
    "StabilizationError",
    "StructureReport",
    "StructureResult",
    "WindowedMobiusSum",
    "abelian_character",
    "act",
    "analyze",
    "automaton_to_doc",
    "batch_states",
    "batch_weight_state",
    "brute_force_families",
    "build_naturally_induced",
    "carry_eta",
    "carry_violation_count",
    "closure",
    "compose",
    "compute_d",
    "compute_l0",
    "compute_m0",
    "cycle_notation",
    "decay_fit",
    "digits_of",
    "empirical_prime_frequencies",
    "final_component_invariants",
    "find_sync_word",
    "identity",
    "inverse",
    "inverse_path",
    "is_strongly_connected",
    "kloosterman",
    "load_automaton",
    "mobius_correlation",
    "parse_automaton",
    "perm_order",
    "phi",
    "power_automaton",
    "predict_prime_frequencies",
    "prime_fourier_residual",
    "psi",
    "reconstruct_many",
    "reconstruct_output",
    "reduce_to_special",
    "regular_indicator",
    "reorder",
    "scc_decompose",
    "sequence_term",
    "sieve",
    "sign_character",
    "stationary_distribution",
    "transduce",
    "transducer_to_doc",
    "value_class_character",
    "value_of",
    "verify_induced",
    "verify_structure",
    "weight_group",
    "windowed_mobius_sum",
]

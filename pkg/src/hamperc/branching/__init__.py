"""Galton-Watson processes bracketing the cluster exploration."""
from .events import (
    EventFrequencies,
    PathClass,
    PathLabel,
    ProgenyEstimate,
    classify_path,
    estimate_large_finite_progeny,
    event_frequencies,
    score_progeny,
)
from .laws import (
    POLICIES,
    AlternatingAdversarial,
    Band,
    BandPolicy,
    ConstantLower,
    ConstantUpper,
    OffspringLaw,
    UniformInBand,
    extinction_probability,
    make_policy,
    survival_from_k,
)
from .process import (
    CoupledStep,
    EnsembleResult,
    ProgenyOutcome,
    TripleEnsemble,
    coupled_step,
    coupled_steps,
    coupled_triple_ensemble,
    progeny_ensemble,
    simulate_coupled_triple,
    simulate_gw,
    simulate_narrow_band,
)

__all__ = [
    "AlternatingAdversarial",
    "Band",
    "BandPolicy",
    "ConstantLower",
    "ConstantUpper",
    "CoupledStep",
    "EnsembleResult",
    "EventFrequencies",
    "OffspringLaw",
    "POLICIES",
    "PathClass",
    "PathLabel",
    "ProgenyEstimate",
    "ProgenyOutcome",
    "TripleEnsemble",
    "UniformInBand",
    "classify_path",
    "coupled_step",
    "coupled_steps",
    "coupled_triple_ensemble",
    "estimate_large_finite_progeny",
    "event_frequencies",
    "extinction_probability",
    "make_policy",
    "progeny_ensemble",
    "score_progeny",
    "simulate_coupled_triple",
    "simulate_gw",
    "simulate_narrow_band",
    "survival_from_k",
]

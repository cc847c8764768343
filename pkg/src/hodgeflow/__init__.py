"""Signals on simplicial 2-complexes.

Incidence structure and Hodge Laplacians, spectral bases with the
irrotational/solenoidal/harmonic split, Hodge decomposition of edge
flows, bandlimited sampling and recovery across layers, smooth+sparse
flow filtering, triangle-structure inference from flow data, and
seeded generators for the Monte-Carlo experiments.  The `hodgeflow`
console script exposes all of it on files.
"""

from .complexes import (IncidencePair, LayerSignal, SimplicialComplex2,
                        betti_numbers, build_incidence, connected_components,
                        enumerate_3cliques, load_complex, save_complex)
from .errors import (BudgetTooSmall, ClassificationAmbiguity,
                     ClosureViolation, DisconnectedAfterRetries,
                     HodgeflowError, Infeasible, InvalidComplex,
                     LayerMismatch, NotConverged, NotPositiveDefinite,
                     NotRecoverable, SingularSystem, TStarTooLarge)
from .flowfilter import MetricSet, PfResult, solve_pf, weighted_l1
from .hodge import HodgeComponents, decompose, project_component
from .inference import (CliqueCandidates, InferenceResult, assemble_b2,
                        basis_pursuit, clique_candidates,
                        cross_validate_tstar, mtv_infer, pca_bfmtv_infer,
                        sol_harm_energy_test)
from .sampling import (BandModel, SampleSet, check_recoverable,
                       lift_irr_basis, lift_sol_basis, recover_single_layer,
                       recover_three_layer, recover_two_layer,
                       select_samples_greedy)
from .spectral import (HodgeBasis, curl, divergence, gft, gradient,
                       hodge_basis, inverse_gft, laplacian, lovasz_tv,
                       relaxed_tv)
from .synth import (ExperimentConfig, ExperimentTable, add_noise,
                    experiment_pe_vs_snr, experiment_recovery_vs_samples,
                    random_bandlimited, random_complex, table_to_csv,
                    write_table)

__version__ = "0.1.0"

__all__ = [
    "BandModel", "BudgetTooSmall", "ClassificationAmbiguity",
    "CliqueCandidates", "ClosureViolation", "DisconnectedAfterRetries",
    "ExperimentConfig", "ExperimentTable", "HodgeBasis", "HodgeComponents",
    "HodgeflowError", "IncidencePair", "Infeasible", "InferenceResult",
    "InvalidComplex", "LayerMismatch", "LayerSignal", "MetricSet",
    "NotConverged", "NotPositiveDefinite", "NotRecoverable", "PfResult",
    "SampleSet", "SimplicialComplex2", "SingularSystem", "TStarTooLarge",
    "add_noise", "assemble_b2", "basis_pursuit", "betti_numbers",
    "build_incidence", "check_recoverable", "clique_candidates",
    "connected_components", "cross_validate_tstar", "curl", "decompose",
    "divergence", "enumerate_3cliques", "experiment_pe_vs_snr",
    "experiment_recovery_vs_samples", "gft", "gradient", "hodge_basis",
    "inverse_gft", "laplacian", "lift_irr_basis", "lift_sol_basis",
    "load_complex", "lovasz_tv", "mtv_infer", "pca_bfmtv_infer",
    "project_component", "random_bandlimited", "random_complex",
    "recover_single_layer", "recover_three_layer", "recover_two_layer",
    "relaxed_tv", "save_complex", "select_samples_greedy",
    "sol_harm_energy_test", "solve_pf", "table_to_csv", "weighted_l1",
    "write_table",
]

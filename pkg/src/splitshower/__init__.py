"""Splitting-circuit laboratory.

A two-qubit circuit encodes one parton splitting: its sigma3 expectations
give the momentum fractions (z, 1-z) and its entanglement matches the
gluon-vertex concurrence. The package simulates the block and its
multi-prong compositions exactly, calibrates parameters to momentum-fraction
data, declusters user-supplied jet constituents into prong fractions, and
emulates noisy-hardware execution with the readout-recovery rules.
"""
from .calibrate import (
    CalibrationRecord,
    ParamDistribution,
    calibrate_dataset,
    gamma3_of,
    solve_params,
)
from .entanglement import c_circuit, c_qcd, concurrence_pure, concurrence_wootters
from .histograms import CompareReport, Histogram, compare_samples, ks_statistic
from .jets import (
    Algorithm,
    ClusterSpec,
    FractionMode,
    PseudoJet,
    SelectionCuts,
    cluster,
    decluster,
    momentum_fractions,
    select,
)
from .noise import NoiseModel, ProngFractions, Rejected, RunBatch, noisy_sample
from .qcd import C_A, p_gg, rho_sc
from .qsim import Circuit, DensityMatrix, StateVector, partial_trace, run, sample_shots
from .splitter import (
    ShowerTopology,
    SplittingParams,
    TopologyKind,
    build_block,
    build_topology,
    composed_concurrence_scan,
    gamma2_from_gamma1,
    z_of,
)

__version__ = "0.1.0"

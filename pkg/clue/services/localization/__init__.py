"""Conflict-guided neuron localization and its brute-force oracle"""
from .report import LocalizationReport, NeuronClass
from .cardinality import SequentialCounter
from .localizer import SplitProblem, classify, enumerate_conflict_sets, localize, shared_neurons
from .oracle import ORACLE_NEURON_LIMIT, brute_force_localize, check_soundness, verify_localization

__all__ = [
    'LocalizationReport', 'NeuronClass', 'SequentialCounter', 'SplitProblem', 'classify',
    'enumerate_conflict_sets', 'localize', 'shared_neurons', 'ORACLE_NEURON_LIMIT',
    'brute_force_localize', 'check_soundness', 'verify_localization',
]

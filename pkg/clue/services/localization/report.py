"""Neuron classes and the localization report"""
from enum import Enum
from typing import Dict, List, Optional


class NeuronClass(str, Enum):
    SAFE_ABSENT = 'safe_absent'
    SAFE_RETAIN = 'safe_retain'
    FORGET = 'forget'
    CONFLICT = 'conflict'

    @property
    def is_safe(self) -> bool:
        return self in (NeuronClass.SAFE_ABSENT, NeuronClass.SAFE_RETAIN)


class LocalizationReport:
    """
    Classification of every neuron plus the evidence behind it.

    assignment holds the value of every consistent neuron; split_values holds
    the per-side values of each conflict neuron.
    """

    def __init__(self, classes: Dict[str, NeuronClass], assignment: Dict[str, int],
                 split_values: Dict[str, Dict[str, int]], outputs: Dict[str, Dict],
                 satisfiable: bool, stats: Optional[Dict] = None, seed: int = 0,
                 search: Optional[List[Dict]] = None, method: str = 'cdcl'):
        self.classes = {neuron: NeuronClass(value) for neuron, value in classes.items()}
        self.assignment = dict(assignment)
        self.split_values = {neuron: dict(values) for neuron, values in split_values.items()}
        self.outputs = dict(outputs)
        self.satisfiable = satisfiable
        self.stats = dict(stats or {})
        self.seed = seed
        self.search = list(search or [])
        self.method = method

    @property
    def conflict_set(self) -> List[str]:
        return sorted(n for n, c in self.classes.items() if c is NeuronClass.CONFLICT)

    @property
    def conflict_count(self) -> int:
        return len(self.conflict_set)

    def neurons_of(self, neuron_class: NeuronClass) -> List[str]:
        return sorted(n for n, c in self.classes.items() if c is neuron_class)

    def fraction_of(self, neuron_class: NeuronClass) -> float:
        """Share of the classified neurons in the given class, 0.0 for an empty report"""
        if not self.classes:
            return 0.0
        return round(len(self.neurons_of(neuron_class)) / len(self.classes), 6)

    def __repr__(self) -> str:
        return (f"LocalizationReport(neurons={len(self.classes)}, conflicts={self.conflict_set}, "
                f"satisfiable={self.satisfiable})")

    def to_dict(self) -> Dict:
        return {
            'method': self.method,
            'satisfiable': self.satisfiable,
            'conflict_count': self.conflict_count,
            'conflict_set': self.conflict_set,
            'classes': {neuron: self.classes[neuron].value for neuron in sorted(self.classes)},
            'forget_fraction': self.fraction_of(NeuronClass.FORGET),
            'conflict_fraction': self.fraction_of(NeuronClass.CONFLICT),
            'assignment': {neuron: self.assignment[neuron] for neuron in sorted(self.assignment)},
            'split_values': {neuron: self.split_values[neuron] for neuron in sorted(self.split_values)},
            'outputs': self.outputs,
            'search': self.search,
            'stats': dict(sorted(self.stats.items())),
            'seed': self.seed,
        }

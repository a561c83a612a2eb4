"""
Parameter masks and the two-stage fine-tuning schedule.

A layout names the model's parameter matrices in order and maps each neuron to
a set of flat indices inside one of them. The forget mask covers the indices of
Forget neurons, the conflict mask those of Conflict neurons; the schedule
updates the forget mask with the forget loss only, then the conflict mask with
the forget loss plus lambda times the retain loss.
"""
import logging
import re
from collections import OrderedDict
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from clue import __version__
from clue.errors import IndexOutOfBounds, InvalidConfig, MaskError, UnmappedNeuron
from clue.services.localization import LocalizationReport, NeuronClass

logger = logging.getLogger(__name__)

TRANSFORMER_MATRICES = ('q', 'k', 'v', 'o', 'mlp_gate', 'mlp_up', 'mlp_down')
MLP_NEURON = re.compile(r'^L(\d+)\.mlp\.n(\d+)$')

FORGET_STAGE = 'forget'
CONFLICT_STAGE = 'conflict'
FORGET_ONLY = 'forget_only'
FORGET_PLUS_RETAIN = 'forget_plus_retain'
DEGENERATE_RETAIN_TERM = 'degenerate_retain_term'

MASK_FILES = {FORGET_STAGE: 'masks_forget.json', CONFLICT_STAGE: 'masks_conflict.json'}


class ForgetLoss(str, Enum):
    """Forget-loss objective a training stage is run with"""
    PO = 'PO'
    GA = 'GA'
    NPO = 'NPO'


def parse_forget_losses(value: str) -> Tuple[ForgetLoss, ForgetLoss]:
    """'PO+GA' -> (PO, GA); a single name applies to both stages"""
    names = [name.strip().upper() for name in value.split('+')]
    if len(names) == 1:
        names = names * 2
    if len(names) != 2:
        raise InvalidConfig(f"Expected one forget loss per stage, got {value!r}", field='forget_loss')
    try:
        return ForgetLoss(names[0]), ForgetLoss(names[1])
    except ValueError:
        raise InvalidConfig(f"Unknown forget loss in {value!r}, expected PO, GA or NPO", field='forget_loss')


def provenance(inputs: Optional[Mapping[str, str]] = None, seed: int = 0) -> Dict:
    """Header recording input hashes, tool version and seed"""
    return {
        'inputs': dict(sorted((inputs or {}).items())),
        'seed': seed,
        'tool': 'clue',
        'version': __version__,
    }


class ModelLayout:
    """
    Ordered parameter groups plus the neuron -> (group, indices) map.

    Indices are flat (row-major) positions inside the group's matrix. No two
    neurons may share an index.
    """

    def __init__(self, groups: Sequence[Tuple[str, Sequence[int]]],
                 neurons: Optional[Mapping[str, Tuple[str, Iterable[int]]]] = None,
                 hidden: Optional[int] = None):
        self.groups: 'OrderedDict[str, Tuple[int, ...]]' = OrderedDict()
        for name, shape in groups:
            if name in self.groups:
                raise InvalidConfig(f"Duplicate parameter group '{name}'", field='groups')
            shape = tuple(int(dim) for dim in shape)
            if not shape or any(dim < 1 for dim in shape):
                raise InvalidConfig(f"Group '{name}' needs a positive shape, got {list(shape)}", field=name)
            self.groups[name] = shape
        self.hidden = hidden

        self.neurons: Dict[str, Tuple[str, Tuple[int, ...]]] = {}
        owner: Dict[Tuple[str, int], str] = {}
        for neuron, (group, indices) in (neurons or {}).items():
            checked = self._check_indices(group, indices)
            for index in checked:
                if (group, index) in owner:
                    raise MaskError(f"Neurons '{owner[(group, index)]}' and '{neuron}' share index {index} "
                                    f"of '{group}'", field=neuron)
                owner[(group, index)] = neuron
            self.neurons[neuron] = (group, checked)

    @classmethod
    def transformer(cls, layers: int, hidden: int, intermediate: int,
                    neurons: Optional[Mapping[str, Tuple[str, Iterable[int]]]] = None) -> 'ModelLayout':
        """
        Seven matrices per layer: attention q, k, v, o and the gated MLP.

        Neurons named L<layer>.mlp.n<i> that are not mapped explicitly resolve
        to row i of that layer's mlp_up matrix.
        """
        if min(layers, hidden, intermediate) < 1:
            raise InvalidConfig("layers, hidden and intermediate must be positive", field='layout')
        shapes = {
            'q': (hidden, hidden), 'k': (hidden, hidden), 'v': (hidden, hidden), 'o': (hidden, hidden),
            'mlp_gate': (intermediate, hidden), 'mlp_up': (intermediate, hidden), 'mlp_down': (hidden, intermediate),
        }
        groups = [(f'layers.{layer}.{matrix}', shapes[matrix])
                  for layer in range(layers) for matrix in TRANSFORMER_MATRICES]
        return cls(groups, neurons, hidden=hidden)

    def _check_indices(self, group: str, indices: Iterable[int]) -> Tuple[int, ...]:
        if group not in self.groups:
            raise MaskError(f"Unknown parameter group '{group}'", field=group)
        size = self.size(group)
        checked = sorted(set(int(index) for index in indices))
        for index in checked:
            if not 0 <= index < size:
                raise IndexOutOfBounds(group, index, size)
        return tuple(checked)

    def size(self, group: str) -> int:
        return int(np.prod(self.groups[group]))

    def resolve(self, neuron: str) -> Tuple[str, Tuple[int, ...]]:
        if neuron in self.neurons:
            return self.neurons[neuron]
        match = MLP_NEURON.match(neuron)
        if match and self.hidden is not None:
            group = f'layers.{match.group(1)}.mlp_up'
            row = int(match.group(2))
            if group in self.groups:
                start = row * self.hidden
                return group, self._check_indices(group, range(start, start + self.hidden))
        raise UnmappedNeuron(neuron)

    def to_dict(self) -> Dict:
        data = {
            'groups': [{'name': name, 'shape': list(shape)} for name, shape in self.groups.items()],
            'neurons': {neuron: {'group': group, 'indices': list(indices)}
                        for neuron, (group, indices) in sorted(self.neurons.items())},
        }
        if self.hidden is not None:
            data['hidden'] = self.hidden
        return data

    def __len__(self) -> int:
        return len(self.groups)


class MaskSpec:
    """Sparse binary mask: group -> sorted indices whose mask value is 1"""

    def __init__(self, groups: Optional[Mapping[str, Iterable[int]]] = None, header: Optional[Dict] = None):
        self.groups: Dict[str, List[int]] = {}
        for name, indices in (groups or {}).items():
            values = sorted(set(int(index) for index in indices))
            if values:
                self.groups[name] = values
        self.provenance = dict(header or {})

    @property
    def index_count(self) -> int:
        return sum(len(indices) for indices in self.groups.values())

    def pairs(self) -> set:
        return {(name, index) for name, indices in self.groups.items() for index in indices}

    def is_disjoint(self, other: 'MaskSpec') -> bool:
        return not (self.pairs() & other.pairs())

    def densify(self, layout: ModelLayout) -> 'OrderedDict[str, np.ndarray]':
        """Dense uint8 mask per layout group, shaped like the parameter"""
        dense = OrderedDict()
        for name, shape in layout.groups.items():
            flat = np.zeros(layout.size(name), dtype=np.uint8)
            if name in self.groups:
                flat[np.asarray(self.groups[name], dtype=np.int64)] = 1
            dense[name] = flat.reshape(shape)
        return dense

    def coverage(self, layout: ModelLayout) -> Dict:
        """Fraction of each group's parameters under the mask and of all parameters together"""
        dense = self.densify(layout)
        size = sum(mask.size for mask in dense.values())
        covered = sum(int(mask.sum()) for mask in dense.values())
        return {
            'groups': {name: round(float(mask.mean()), 6) for name, mask in dense.items()},
            'total': round(covered / size, 6) if size else 0.0,
        }

    def to_dict(self) -> Dict:
        return {
            'groups': {name: list(self.groups[name]) for name in sorted(self.groups)},
            'provenance': self.provenance,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'MaskSpec':
        return cls(data.get('groups', {}), data.get('provenance', {}))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MaskSpec):
            return NotImplemented
        return self.groups == other.groups

    def __repr__(self) -> str:
        return f"MaskSpec(groups={len(self.groups)}, indices={self.index_count})"


def emit_masks(report: LocalizationReport, layout: ModelLayout,
               header: Optional[Dict] = None) -> Tuple[MaskSpec, MaskSpec]:
    """
    Build the forget mask and the conflict mask.

    Args:
        report: Localization report
        layout: Model layout mapping neurons to parameter indices
        header: Provenance header copied onto both masks

    Returns:
        (M_f, M_c); safe neurons contribute nothing
    """
    collected = {NeuronClass.FORGET: {}, NeuronClass.CONFLICT: {}}
    for neuron in sorted(report.classes):
        neuron_class = report.classes[neuron]
        if neuron_class not in collected:
            continue
        group, indices = layout.resolve(neuron)
        collected[neuron_class].setdefault(group, set()).update(indices)

    forget_mask = MaskSpec(collected[NeuronClass.FORGET], header)
    conflict_mask = MaskSpec(collected[NeuronClass.CONFLICT], header)
    if not forget_mask.is_disjoint(conflict_mask):
        raise MaskError("Forget and conflict masks overlap", field='layout')
    logger.info(f"Emitted masks: M_f {forget_mask.index_count} indices, M_c {conflict_mask.index_count} indices")
    return forget_mask, conflict_mask


class ScheduleConfig:
    """Hyperparameters of the two-stage schedule"""

    def __init__(self, stage_one_epochs: int = 1, stage_two_epochs: int = 5, learning_rate: float = 1e-5,
                 retain_weight: float = 1.0, optimizer: str = 'AdamW',
                 stage_order: Sequence[str] = (FORGET_STAGE, CONFLICT_STAGE),
                 stage_one_loss: ForgetLoss = ForgetLoss.PO, stage_two_loss: ForgetLoss = ForgetLoss.PO):
        if list(stage_order) != [FORGET_STAGE, CONFLICT_STAGE]:
            raise InvalidConfig(f"Stage order must be forget then conflict, got {list(stage_order)}",
                                field='stage_order')
        for name, value in (('stage_one_epochs', stage_one_epochs), ('stage_two_epochs', stage_two_epochs)):
            if int(value) != value or value < 1:
                raise InvalidConfig(f"{name} must be a positive integer, got {value}", field=name)
        if not learning_rate > 0:
            raise InvalidConfig(f"learning_rate must be positive, got {learning_rate}", field='learning_rate')
        if not retain_weight >= 0:
            raise InvalidConfig(f"lambda must be >= 0, got {retain_weight}", field='lambda')
        if not optimizer:
            raise InvalidConfig("optimizer must be named", field='optimizer')
        losses = []
        for name, value in (('stage_one_loss', stage_one_loss), ('stage_two_loss', stage_two_loss)):
            try:
                losses.append(ForgetLoss(value))
            except ValueError:
                raise InvalidConfig(f"{name} must be PO, GA or NPO, got {value!r}", field=name)

        self.stage_one_epochs = int(stage_one_epochs)
        self.stage_two_epochs = int(stage_two_epochs)
        self.learning_rate = float(learning_rate)
        self.retain_weight = float(retain_weight)
        self.optimizer = optimizer
        self.stage_order = tuple(stage_order)
        self.stage_one_loss, self.stage_two_loss = losses


class Stage:
    def __init__(self, name: str, mask: str, epochs: int, losses: str, retain_weight: float,
                 learning_rate: float, optimizer: str, flags: Sequence[str] = (),
                 forget_loss: ForgetLoss = ForgetLoss.PO):
        self.name = name
        self.mask = mask
        self.epochs = epochs
        self.losses = losses
        self.retain_weight = retain_weight
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self.flags = sorted(flags)
        self.forget_loss = ForgetLoss(forget_loss)

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'mask': self.mask,
            'mask_file': MASK_FILES[self.name],
            'epochs': self.epochs,
            'losses': self.losses,
            'forget_loss': self.forget_loss.value,
            'lambda': self.retain_weight,
            'learning_rate': self.learning_rate,
            'optimizer': self.optimizer,
            'flags': list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'Stage':
        return cls(data['name'], data['mask'], data['epochs'], data['losses'], data['lambda'],
                   data['learning_rate'], data['optimizer'], data.get('flags', ()),
                   data.get('forget_loss', ForgetLoss.PO))


class ScheduleSpec:
    """Ordered fine-tuning stages; data only, nothing here trains a model"""

    def __init__(self, stages: Sequence[Stage], masks: Optional[Dict[str, int]] = None,
                 header: Optional[Dict] = None):
        self.stages = list(stages)
        self.masks = dict(masks or {})
        self.provenance = dict(header or {})
        self._validate()

    def _validate(self) -> None:
        layout = [(stage.name, stage.mask, stage.losses) for stage in self.stages]
        expected = [(FORGET_STAGE, 'M_f', FORGET_ONLY), (CONFLICT_STAGE, 'M_c', FORGET_PLUS_RETAIN)]
        if layout != expected:
            raise InvalidConfig(f"Stages must be {expected}, got {layout}", field='stages')
        for stage in self.stages:
            if stage.retain_weight < 0:
                raise InvalidConfig(f"lambda must be >= 0 in stage '{stage.name}'", field='lambda')
            if stage.epochs < 1:
                raise InvalidConfig(f"epochs must be positive in stage '{stage.name}'", field='epochs')

    def to_dict(self) -> Dict:
        return {
            'masks': dict(sorted(self.masks.items())),
            'provenance': self.provenance,
            'stages': [stage.to_dict() for stage in self.stages],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'ScheduleSpec':
        return cls([Stage.from_dict(stage) for stage in data['stages']], data.get('masks', {}),
                   data.get('provenance', {}))


def emit_schedule(masks: Tuple[MaskSpec, MaskSpec], config: Optional[ScheduleConfig] = None,
                  header: Optional[Dict] = None) -> ScheduleSpec:
    """
    Two stages: M_f with the forget loss only, then M_c with forget loss plus
    lambda times retain loss. lambda = 0 is emitted but flagged.
    """
    config = config or ScheduleConfig()
    forget_mask, conflict_mask = masks
    flags = [DEGENERATE_RETAIN_TERM] if config.retain_weight == 0 else []
    if flags:
        logger.warning("lambda = 0: the conflict stage degenerates to the forget loss only")

    stages = [
        Stage(FORGET_STAGE, 'M_f', config.stage_one_epochs, FORGET_ONLY, 0.0,
              config.learning_rate, config.optimizer, forget_loss=config.stage_one_loss),
        Stage(CONFLICT_STAGE, 'M_c', config.stage_two_epochs, FORGET_PLUS_RETAIN, config.retain_weight,
              config.learning_rate, config.optimizer, flags, config.stage_two_loss),
    ]
    counts = {'M_f': forget_mask.index_count, 'M_c': conflict_mask.index_count}
    return ScheduleSpec(stages, counts, header)

"""Marshmallow schemas for every JSON document the toolkit reads"""
from marshmallow import RAISE, Schema, ValidationError, fields, post_load, validate, validates_schema

from clue.services.circuit import build_circuit
from clue.services.discovery import GateNetwork, SamplePair
from clue.services.localization import LocalizationReport, NeuronClass
from clue.services.masks import ForgetLoss, MaskSpec, ModelLayout, ScheduleConfig, ScheduleSpec

GATE_KINDS = ['AND', 'OR', 'ADDER']
ROLES = ['forget', 'retain']
NEURON_CLASSES = [neuron_class.value for neuron_class in NeuronClass]
FORGET_LOSSES = [loss.value for loss in ForgetLoss]


class StrictSchema(Schema):
    class Meta:
        unknown = RAISE


# Circuits and networks

class CircuitSchema(StrictSchema):
    """Circuit JSON: nodes, edges, gates, output and role"""
    nodes = fields.List(fields.Str(validate=validate.Length(min=1)), required=True,
                        validate=validate.Length(min=1))
    edges = fields.List(fields.List(fields.Str(), validate=validate.Length(equal=2)), required=True)
    gates = fields.Dict(keys=fields.Str(), values=fields.Str(validate=validate.OneOf(GATE_KINDS)), required=True)
    output = fields.Str(required=True, validate=validate.Length(min=1))
    role = fields.Str(required=False, allow_none=True, load_default=None, validate=validate.OneOf(ROLES))

    @validates_schema
    def validate_output_declared(self, data, **kwargs):
        if data['output'] not in data['nodes']:
            raise ValidationError(f"Output '{data['output']}' is not in nodes", field_name='output')

    @post_load
    def make_circuit(self, data, **kwargs):
        return build_circuit(data['nodes'], data['edges'], data['gates'], data['output'], data.get('role'))


class NetworkSchema(CircuitSchema):
    """Network JSON: a circuit whose gates are the hidden ground truth"""

    @post_load
    def make_circuit(self, data, **kwargs):
        return GateNetwork(build_circuit(data['nodes'], data['edges'], data['gates'], data['output'], None))


# Discovery

class SamplePairSchema(StrictSchema):
    clean = fields.Dict(keys=fields.Str(), values=fields.Int(validate=validate.OneOf([0, 1])), required=True)
    corrupt = fields.Dict(keys=fields.Str(), values=fields.Int(validate=validate.OneOf([0, 1])), required=True)

    @post_load
    def make_pair(self, data, **kwargs):
        return SamplePair(data['clean'], data['corrupt'])


class DiscoveryConfigSchema(StrictSchema):
    """Optional discovery settings file; samples default to the exhaustive set"""
    effect_threshold = fields.Float(load_default=0.05,
                                    validate=validate.Range(min=0.0, max=1.0, min_inclusive=False))
    sparsity = fields.Float(load_default=0.0, validate=validate.Range(min=0.0, max=1.0, max_inclusive=False))
    seed = fields.Int(load_default=0)
    measure = fields.Str(load_default='output', validate=validate.OneOf(['output', 'receiver']))
    input_samples = fields.List(fields.Nested(SamplePairSchema), load_default=None, allow_none=True)


# Layouts, masks and schedules

class GroupSchema(StrictSchema):
    name = fields.Str(required=True, validate=validate.Length(min=1))
    shape = fields.List(fields.Int(validate=validate.Range(min=1)), required=True, validate=validate.Length(min=1))


class NeuronMappingSchema(StrictSchema):
    group = fields.Str(required=True)
    indices = fields.List(fields.Int(validate=validate.Range(min=0)), required=True)


class TransformerSchema(StrictSchema):
    layers = fields.Int(required=True, validate=validate.Range(min=1))
    hidden = fields.Int(required=True, validate=validate.Range(min=1))
    intermediate = fields.Int(required=True, validate=validate.Range(min=1))


class LayoutSchema(StrictSchema):
    """Either explicit parameter groups or a transformer shorthand"""
    groups = fields.List(fields.Nested(GroupSchema), load_default=None)
    transformer = fields.Nested(TransformerSchema, load_default=None)
    hidden = fields.Int(load_default=None, validate=validate.Range(min=1))
    neurons = fields.Dict(keys=fields.Str(), values=fields.Nested(NeuronMappingSchema), load_default=dict)

    @validates_schema
    def validate_one_source(self, data, **kwargs):
        if (data.get('groups') is None) == (data.get('transformer') is None):
            raise ValidationError("Give exactly one of 'groups' or 'transformer'", field_name='groups')

    @post_load
    def make_layout(self, data, **kwargs):
        neurons = {name: (entry['group'], entry['indices']) for name, entry in data['neurons'].items()}
        if data.get('transformer') is not None:
            shape = data['transformer']
            return ModelLayout.transformer(shape['layers'], shape['hidden'], shape['intermediate'], neurons)
        groups = [(group['name'], group['shape']) for group in data['groups']]
        return ModelLayout(groups, neurons, hidden=data.get('hidden'))


class ProvenanceSchema(StrictSchema):
    """Empty for documents built without a header"""
    inputs = fields.Dict(keys=fields.Str(), values=fields.Str())
    seed = fields.Int()
    tool = fields.Str()
    version = fields.Str()


class MaskSchema(StrictSchema):
    groups = fields.Dict(keys=fields.Str(), values=fields.List(fields.Int(validate=validate.Range(min=0))),
                         required=True)
    provenance = fields.Nested(ProvenanceSchema, load_default=dict)

    @post_load
    def make_mask(self, data, **kwargs):
        return MaskSpec(data['groups'], data['provenance'])


class StageSchema(StrictSchema):
    name = fields.Str(required=True, validate=validate.OneOf(['forget', 'conflict']))
    mask = fields.Str(required=True, validate=validate.OneOf(['M_f', 'M_c']))
    mask_file = fields.Str(required=True)
    epochs = fields.Int(required=True, validate=validate.Range(min=1))
    losses = fields.Str(required=True, validate=validate.OneOf(['forget_only', 'forget_plus_retain']))
    retain_weight = fields.Float(required=True, data_key='lambda', validate=validate.Range(min=0.0))
    learning_rate = fields.Float(required=True, validate=validate.Range(min=0.0, min_inclusive=False))
    optimizer = fields.Str(required=True, validate=validate.Length(min=1))
    flags = fields.List(fields.Str(), load_default=list)
    forget_loss = fields.Str(load_default='PO', validate=validate.OneOf(FORGET_LOSSES))

    @post_load
    def restore_key(self, data, **kwargs):
        data['lambda'] = data.pop('retain_weight')
        return data


class ScheduleSchema(StrictSchema):
    stages = fields.List(fields.Nested(StageSchema), required=True, validate=validate.Length(equal=2))
    masks = fields.Dict(keys=fields.Str(), values=fields.Int(), load_default=dict)
    provenance = fields.Nested(ProvenanceSchema, load_default=dict)

    @post_load
    def make_schedule(self, data, **kwargs):
        return ScheduleSpec.from_dict(data)


class ScheduleConfigSchema(StrictSchema):
    """Schedule hyperparameters as given on the command line or in a file"""
    stage_one_epochs = fields.Int(load_default=1, validate=validate.Range(min=1))
    stage_two_epochs = fields.Int(load_default=5, validate=validate.Range(min=1))
    learning_rate = fields.Float(load_default=1e-5, validate=validate.Range(min=0.0, min_inclusive=False))
    retain_weight = fields.Float(load_default=1.0, data_key='lambda', validate=validate.Range(min=0.0))
    optimizer = fields.Str(load_default='AdamW', validate=validate.Length(min=1))
    stage_order = fields.List(fields.Str(), load_default=lambda: ['forget', 'conflict'])
    stage_one_loss = fields.Str(load_default='PO', validate=validate.OneOf(FORGET_LOSSES))
    stage_two_loss = fields.Str(load_default='PO', validate=validate.OneOf(FORGET_LOSSES))

    @post_load
    def make_config(self, data, **kwargs):
        return ScheduleConfig(**data)


# Localization reports

class ReportSchema(StrictSchema):
    method = fields.Str(load_default='cdcl', validate=validate.OneOf(['cdcl', 'oracle']))
    satisfiable = fields.Bool(required=True)
    conflict_count = fields.Int(required=True, validate=validate.Range(min=0))
    conflict_set = fields.List(fields.Str(), required=True)
    classes = fields.Dict(keys=fields.Str(), values=fields.Str(validate=validate.OneOf(NEURON_CLASSES)),
                          required=True)
    assignment = fields.Dict(keys=fields.Str(), values=fields.Int(validate=validate.OneOf([0, 1])),
                             load_default=dict)
    split_values = fields.Dict(keys=fields.Str(), values=fields.Dict(keys=fields.Str(), values=fields.Int()),
                               load_default=dict)
    outputs = fields.Dict(load_default=dict)
    search = fields.List(fields.Dict(), load_default=list)
    stats = fields.Dict(load_default=dict)
    forget_fraction = fields.Float(load_default=None, validate=validate.Range(min=0.0, max=1.0))
    conflict_fraction = fields.Float(load_default=None, validate=validate.Range(min=0.0, max=1.0))
    all_sets = fields.List(fields.List(fields.Str()), load_default=None)
    seed = fields.Int(load_default=0)

    @validates_schema
    def validate_conflicts(self, data, **kwargs):
        conflicts = sorted(n for n, c in data['classes'].items() if c == NeuronClass.CONFLICT.value)
        if conflicts != sorted(data['conflict_set']) or len(conflicts) != data['conflict_count']:
            raise ValidationError("conflict_count and conflict_set must match the Conflict classes",
                                  field_name='conflict_count')
        total = len(data['classes'])
        fractions = (('forget_fraction', NeuronClass.FORGET), ('conflict_fraction', NeuronClass.CONFLICT))
        for field_name, neuron_class in fractions:
            if data.get(field_name) is None:
                continue
            count = sum(1 for c in data['classes'].values() if c == neuron_class.value)
            expected = round(count / total, 6) if total else 0.0
            if abs(data[field_name] - expected) > 1e-6:
                raise ValidationError(f"{field_name} must be {expected} for these classes", field_name=field_name)

    @post_load
    def make_report(self, data, **kwargs):
        return LocalizationReport(data['classes'], data['assignment'], data['split_values'], data['outputs'],
                                  data['satisfiable'], data['stats'], data['seed'], data['search'], data['method'])

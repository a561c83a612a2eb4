"""
Unit tests for input schemas and the validation decorator
"""
import json

import click
import pytest
from click.testing import CliRunner

from clue.errors import InputValidationError
from clue.services.circuit import Role
from clue.services.discovery import GateNetwork, SamplePair
from clue.services.localization import NeuronClass, localize
from clue.services.masks import MaskSpec, ScheduleConfig, ScheduleSpec
from clue.utils import canonical_json, sha256_file
from clue.validation import (
    CircuitSchema, DiscoveryConfigSchema, LayoutSchema, MaskSchema, NetworkSchema, ReportSchema,
    ScheduleConfigSchema, ScheduleSchema, load_document, validate_input,
)

CIRCUIT = {
    'nodes': ['A', 'B', 'out_f'],
    'edges': [['A', 'out_f'], ['B', 'out_f']],
    'gates': {'out_f': 'AND'},
    'output': 'out_f',
    'role': 'forget',
}


@pytest.mark.unit
class TestCircuitSchema:
    """Test suite for circuit documents"""

    def test_load(self):
        """Test a valid document becomes a LogicalCircuit"""
        circuit = CircuitSchema().load(CIRCUIT)

        assert circuit.role is Role.FORGET
        assert circuit.to_dict() == CIRCUIT

    def test_unknown_field(self, write_input):
        """Test unknown keys are rejected"""
        path = write_input('bad.json', dict(CIRCUIT, colour='red'))
        with pytest.raises(InputValidationError) as info:
            load_document(CircuitSchema, path, 'forget')

        assert 'colour' in info.value.messages

    def test_bad_gate_kind(self, write_input):
        """Test gate kinds are validated"""
        path = write_input('bad.json', dict(CIRCUIT, gates={'out_f': 'NAND'}))
        with pytest.raises(InputValidationError):
            load_document(CircuitSchema, path, 'forget')

    def test_malformed_json(self, tmp_path):
        """Test unparseable files"""
        path = tmp_path / 'broken.json'
        path.write_text('{"nodes": [', encoding='utf-8')
        with pytest.raises(InputValidationError) as info:
            load_document(CircuitSchema, str(path), 'forget')

        assert info.value.to_dict()['field'] == 'forget'

    def test_network(self):
        """Test network documents become GateNetworks"""
        network = NetworkSchema().load(dict(CIRCUIT, role=None))

        assert isinstance(network, GateNetwork)
        assert network.sources == ('A', 'B')


@pytest.mark.unit
class TestOtherSchemas:
    """Test suite for the remaining document schemas"""

    def test_discovery_config_defaults(self):
        """Test an empty discovery config falls back to defaults"""
        data = DiscoveryConfigSchema().load({})

        assert data == {'effect_threshold': 0.05, 'sparsity': 0.0, 'seed': 0, 'measure': 'output',
                        'input_samples': None}

    def test_discovery_samples(self):
        """Test samples load as SamplePairs"""
        data = DiscoveryConfigSchema().load({'input_samples': [{'clean': {'a': 1}, 'corrupt': {'a': 0}}]})

        assert data['input_samples'] == [SamplePair({'a': 1}, {'a': 0})]

    def test_layout_needs_exactly_one_source(self):
        """Test groups and transformer are mutually exclusive"""
        from marshmallow import ValidationError
        with pytest.raises(ValidationError):
            LayoutSchema().load({'groups': [{'name': 'w', 'shape': [2]}],
                                 'transformer': {'layers': 1, 'hidden': 2, 'intermediate': 2}})

    def test_layout_neurons(self):
        """Test explicit neuron mappings"""
        layout = LayoutSchema().load({'groups': [{'name': 'w', 'shape': [2, 2]}],
                                      'neurons': {'A': {'group': 'w', 'indices': [3]}}})

        assert layout.resolve('A') == ('w', (3,))

    def test_report_round_trip(self, shared_b_pair):
        """Test a report document loads back with the same classes"""
        data = localize(*shared_b_pair).to_dict()
        loaded = ReportSchema().load(json.loads(canonical_json(data)))

        assert loaded.classes['B'] is NeuronClass.CONFLICT
        assert canonical_json(loaded.to_dict()) == canonical_json(data)

    def test_report_count_mismatch(self, shared_b_pair):
        """Test conflict_count must agree with the classes"""
        from marshmallow import ValidationError
        data = localize(*shared_b_pair).to_dict()
        data['conflict_count'] = 0
        with pytest.raises(ValidationError):
            ReportSchema().load(data)

    def test_report_fraction_mismatch(self, shared_b_pair):
        """Test stated fractions must match the classes"""
        from marshmallow import ValidationError
        data = localize(*shared_b_pair).to_dict()
        data['forget_fraction'] = 0.5
        with pytest.raises(ValidationError):
            ReportSchema().load(data)

    def test_report_with_all_sets(self, shared_b_pair):
        """Test a report carrying enumerated minimum sets still loads"""
        data = localize(*shared_b_pair).to_dict()
        data['all_sets'] = [['B']]

        assert ReportSchema().load(data).conflict_set == ['B']

    def test_mask_document(self):
        """Test mask documents load as MaskSpec"""
        mask = MaskSchema().load({'groups': {'w': [3, 1]}})

        assert mask == MaskSpec({'w': [1, 3]})

    def test_schedule_document(self):
        """Test a schedule document round-trips byte for byte"""
        from clue.services.masks import emit_schedule, provenance
        data = emit_schedule((MaskSpec(), MaskSpec()), ScheduleConfig(), provenance({}, 0)).to_dict()
        loaded = ScheduleSchema().load(json.loads(canonical_json(data)))

        assert isinstance(loaded, ScheduleSpec)
        assert canonical_json(loaded.to_dict()) == canonical_json(data)

    def test_schedule_config_lambda_key(self):
        """Test the file uses 'lambda' for the retain weight"""
        config = ScheduleConfigSchema().load({'lambda': 0.5, 'stage_two_epochs': 2})

        assert config.retain_weight == 0.5
        assert config.stage_two_epochs == 2

    def test_schedule_config_forget_losses(self):
        """Test per-stage forget losses load and unknown ones are rejected"""
        from marshmallow import ValidationError
        config = ScheduleConfigSchema().load({'stage_one_loss': 'GA'})

        assert (config.stage_one_loss.value, config.stage_two_loss.value) == ('GA', 'PO')
        with pytest.raises(ValidationError):
            ScheduleConfigSchema().load({'stage_two_loss': 'SGD'})


@pytest.mark.unit
class TestValidateInput:
    """Test suite for the validate_input decorator"""

    def test_replaces_path_and_records_hash(self, write_input):
        """Test the command receives the loaded circuit and the hash is kept"""
        path = write_input('forget.json', CIRCUIT)
        seen = {}

        @click.command()
        @click.option('--forget', 'forget')
        @validate_input(CircuitSchema, 'forget')
        @click.pass_context
        def command(ctx, forget):
            seen['circuit'] = forget
            seen['inputs'] = dict(ctx.obj['inputs'])

        result = CliRunner().invoke(command, ['--forget', path])

        assert result.exit_code == 0
        assert seen['circuit'].output == 'out_f'
        assert seen['inputs'] == {'forget': sha256_file(path)}

    def test_missing_option_passes_none(self):
        """Test optional inputs stay None"""
        @click.command()
        @click.option('--retain', 'retain', default=None)
        @validate_input(CircuitSchema, 'retain')
        def command(retain):
            assert retain is None

        assert CliRunner().invoke(command, []).exit_code == 0

"""
Pytest configuration and fixtures for CLUE tests
"""
import pytest

from clue.config import reset_config
from clue.services.circuit import build_circuit
from clue.utils import write_json


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep CLUE_* variables from the developer's shell out of the tests"""
    for name in ('CLUE_SEED', 'CLUE_LOG_LEVEL', 'CLUE_LOG_FILE', 'CLUE_VERIFY_WORKERS',
                 'CLUE_EFFECT_THRESHOLD', 'CLUE_SPARSITY'):
        monkeypatch.delenv(name, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def and_or_pair():
    """out_f = A AND B, out_r = A OR B (Phi satisfiable)"""
    forget = build_circuit(['A', 'B', 'out_f'], [('A', 'out_f'), ('B', 'out_f')], {'out_f': 'AND'},
                           'out_f', 'forget')
    retain = build_circuit(['A', 'B', 'out_r'], [('A', 'out_r'), ('B', 'out_r')], {'out_r': 'OR'},
                           'out_r', 'retain')
    return forget, retain


@pytest.fixture
def shared_b_pair():
    """out_f = A OR B, out_r = B AND C (Phi unsatisfiable, B in conflict)"""
    forget = build_circuit(['A', 'B', 'out_f'], [('A', 'out_f'), ('B', 'out_f')], {'out_f': 'OR'},
                           'out_f', 'forget')
    retain = build_circuit(['B', 'C', 'out_r'], [('B', 'out_r'), ('C', 'out_r')], {'out_r': 'AND'},
                           'out_r', 'retain')
    return forget, retain


TOY_EDGES = [
    ('C1', 'out'), ('C2', 'out'),
    ('B1', 'C1'), ('B2', 'C1'),
    ('B2', 'C2'), ('B3', 'C2'),
    ('A3', 'B1'), ('A4', 'B1'),
    ('A1', 'B2'), ('A2', 'B2'),
    ('A5', 'B3'), ('A6', 'B3'),
]
TOY_GATES = {'out': 'AND', 'C1': 'AND', 'C2': 'ADDER', 'B1': 'AND', 'B2': 'OR', 'B3': 'ADDER'}


@pytest.fixture
def toy_circuit():
    """Factory for the six-source toy circuit with the given role"""
    def make(role=None, output='out'):
        rename = {'out': output}
        edges = [(rename.get(s, s), rename.get(r, r)) for s, r in TOY_EDGES]
        gates = {rename.get(node, node): kind for node, kind in TOY_GATES.items()}
        nodes = {node for edge in edges for node in edge}
        return build_circuit(nodes, edges, gates, output, role)
    return make


@pytest.fixture
def write_input(tmp_path):
    """Write a JSON document under tmp_path and return its path as a string"""
    def write(name, data):
        path = tmp_path / name
        write_json(path, data)
        return str(path)
    return write

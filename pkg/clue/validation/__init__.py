from .decorators import load_document, validate_input
from .schemas import (
    CircuitSchema, DiscoveryConfigSchema, LayoutSchema, MaskSchema, NetworkSchema, ReportSchema,
    ScheduleConfigSchema, ScheduleSchema,
)

__all__ = [
    'load_document', 'validate_input', 'CircuitSchema', 'DiscoveryConfigSchema', 'LayoutSchema',
    'MaskSchema', 'NetworkSchema', 'ReportSchema', 'ScheduleConfigSchema', 'ScheduleSchema',
]

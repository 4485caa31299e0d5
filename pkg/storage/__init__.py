
from .codec import (
    load_instance,
    dump_instance,
    instance_from_dict,
    instance_to_dict,
    instance_digest,
    detect_kind,
    read_json,
    write_json,
)
from .report_storage import ReportStorage

__all__ = [
    'load_instance',
    'dump_instance',
    'instance_from_dict',
    'instance_to_dict',
    'instance_digest',
    'detect_kind',
    'read_json',
    'write_json',
    'ReportStorage',
]

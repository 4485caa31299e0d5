
from .dot_writer import DOT_KINDS, space_to_dot, etale_to_dot, groupoid_to_dot, write_dot

__all__ = ['DOT_KINDS', 'space_to_dot', 'etale_to_dot', 'groupoid_to_dot', 'write_dot']

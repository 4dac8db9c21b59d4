from .dataset import *
from .enums import *
from .graph import *
from .record import *

__all__ = ["Graph", "GraphError", "Dataset", "DatasetError", "Split",
           "triangle_row_offsets", "encode_triangle_slots", "decode_triangle_slots",
           "Setting", "Phase", "ModelKind", "AdjacencyMode", "SelectionMode", "parse_enum",
           "RecordMixin", "to_plain"]

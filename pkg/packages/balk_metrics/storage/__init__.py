"""Canonical JSON codecs and flat-file storage."""

from .file_store import (
    load_g_table,
    load_metric,
    load_partial,
    load_scenario,
    load_set_function,
    read_document,
    write_document,
)
from .json_codec import decode, encode, to_document

__all__ = [
    "load_g_table",
    "load_metric",
    "load_partial",
    "load_scenario",
    "load_set_function",
    "read_document",
    "write_document",
    "decode",
    "encode",
    "to_document",
]

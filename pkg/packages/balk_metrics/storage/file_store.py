"""
Flat-file reading and writing of canonical documents.

Every loader reports failures as InputError prefixed with the file path.
"""

from pathlib import Path
from typing import Any, Callable, Dict, TypeVar, Union

import structlog

from ..construct.partial import PartialSetFunction
from ..core.tables import FiniteMetric, GMetricTable, SetFunction
from ..exceptions import InputError
from ..pretangent.scenario import PretangentScenario
from .json_codec import (
    Encodable,
    decode,
    encode,
    g_table_from_document,
    metric_from_document,
    partial_from_document,
    scenario_from_document,
    set_function_from_document,
)

logger = structlog.get_logger()

T = TypeVar("T")
PathLike = Union[str, Path]


def read_document(path: PathLike) -> Dict[str, Any]:
    """
    Read and parse one JSON document.

    Raises:
        InputError: the file is missing, unreadable or malformed
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: cannot read ({e.strerror or e})") from e
    document = decode(text, str(path))
    logger.debug("document_read", path=str(path), keys=sorted(document))
    return document


def write_document(obj: Encodable, path: PathLike) -> Path:
    """Write the canonical text of obj, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(encode(obj), encoding="utf-8")
    logger.info("document_written", path=str(path))
    return path


def _load(path: PathLike, parse: Callable[[Dict[str, Any], str], T]) -> T:
    where = str(path)
    document = read_document(path)
    try:
        return parse(document, where)
    except InputError as e:
        if str(e).startswith(where):
            raise
        raise InputError(f"{where}: {e}") from e


def load_set_function(path: PathLike) -> SetFunction:
    return _load(path, set_function_from_document)


def load_partial(path: PathLike) -> PartialSetFunction:
    return _load(path, partial_from_document)


def load_metric(path: PathLike) -> FiniteMetric:
    return _load(path, metric_from_document)


def load_g_table(path: PathLike) -> GMetricTable:
    return _load(path, g_table_from_document)


def load_scenario(path: PathLike) -> PretangentScenario:
    return _load(path, scenario_from_document)

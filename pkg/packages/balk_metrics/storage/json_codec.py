"""
Canonical JSON documents for tables and reports.

Documents are plain dicts; encode() renders them with sorted keys, two-space
indentation and shortest round-trip floats, so encode -> parse -> encode is
byte-identical. Parsers reject missing and unexpected keys.

Formats:
    SetFunction         {"universe": [...], "values": {"a": 0.0, "a,b": 1.5, ...}}
    PartialSetFunction  {"universe": [...], "k_cap": 3, "values": {...}}
    FiniteMetric        {"points": [...], "dist": [[...], ...]}
    GMetricTable        {"points": [...], "values": {"a,a,b": 1.0, ...}}

A ConstructionResult whose precondition failed is written as
{"table": ..., "precondition": <report>, "check": <report>}; otherwise as
the bare table.
"""

import json
from typing import Any, Dict, Iterable, List, Union

from pydantic import BaseModel, ValidationError

from ..config import ConstructionResult
from ..construct.partial import PartialSetFunction
from ..core.tables import FiniteMetric, GMetricTable, SetFunction, multisets
from ..core.universe import Universe, canonical_subset_key, parse_subset_key
from ..exceptions import InputError
from ..pretangent.scenario import PretangentScenario

Encodable = Union[SetFunction, PartialSetFunction, FiniteMetric, GMetricTable, BaseModel, Dict[str, Any]]


def encode(obj: Encodable) -> str:
    """Canonical text of an object or document, newline terminated."""
    document = obj if isinstance(obj, dict) else to_document(obj)
    try:
        return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"
    except ValueError as e:
        raise InputError(f"document is not representable as JSON: {e}") from e


def decode(text: str, source: str = "<string>") -> Dict[str, Any]:
    """
    Parse document text.

    Raises:
        InputError: malformed JSON (with source:line:column) or a non-object top level
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(document, dict):
        raise InputError(f"{source}:1:1: top level must be a JSON object")
    return document


def to_document(obj: Encodable) -> Dict[str, Any]:
    """Document form of any table or report."""
    if isinstance(obj, SetFunction):
        return set_function_to_document(obj)
    if isinstance(obj, PartialSetFunction):
        return partial_to_document(obj)
    if isinstance(obj, FiniteMetric):
        return metric_to_document(obj)
    if isinstance(obj, GMetricTable):
        return g_table_to_document(obj)
    if isinstance(obj, ConstructionResult):
        if obj.guaranteed:
            return to_document(obj.table)
        return {
            "table": to_document(obj.table),
            "precondition": to_document(obj.precondition),
            "check": to_document(obj.check),
        }
    if isinstance(obj, BaseModel):
        return obj.model_dump(by_alias=True, exclude_none=True, mode="json")
    if isinstance(obj, dict):
        return obj
    raise TypeError(f"no document form for {type(obj).__name__}")


# ============================================================================
# Field helpers
# ============================================================================

def _require_keys(document: Dict[str, Any], required: Iterable[str], where: str) -> None:
    required = set(required)
    missing = sorted(required - document.keys())
    extra = sorted(document.keys() - required)
    if missing:
        raise InputError(f"{where}: missing key {missing[0]!r}")
    if extra:
        raise InputError(f"{where}: unexpected key {extra[0]!r}")


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _universe(labels: Any, where: str) -> Universe:
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise InputError(f"{where}: expected a list of labels")
    return Universe.from_labels(labels)


def _keyed_values(values: Any, universe: Universe, where: str) -> Dict[int, float]:
    if not isinstance(values, dict):
        raise InputError(f"{where}: values must be an object keyed by subset")
    return {
        parse_subset_key(key, universe): _number(value, f"{where}: values[{key!r}]")
        for key, value in values.items()
    }


def _multiset_key(key: str, universe: Universe, where: str) -> tuple:
    index = universe.index_map()
    labels = key.split(",")
    if len(labels) != 3 or any(label not in index for label in labels):
        raise InputError(f"{where}: {key!r} is not a triple of known labels")
    triple = tuple(index[label] for label in labels)
    if list(triple) != sorted(triple):
        raise InputError(f"{where}: {key!r} is not in canonical universe order")
    return triple


# ============================================================================
# Tables
# ============================================================================

def set_function_to_document(tau: SetFunction) -> Dict[str, Any]:
    u = tau.universe
    return {
        "universe": list(u.names),
        "values": {canonical_subset_key(mask, u): value for mask, value in tau.items()},
    }


def set_function_from_document(document: Dict[str, Any], where: str = "set function") -> SetFunction:
    _require_keys(document, ("universe", "values"), where)
    universe = _universe(document["universe"], where)
    return SetFunction.from_mapping(universe, _keyed_values(document["values"], universe, where))


def partial_to_document(pt: PartialSetFunction) -> Dict[str, Any]:
    u = pt.universe
    return {
        "universe": list(u.names),
        "k_cap": pt.k_cap,
        "values": {canonical_subset_key(mask, u): value for mask, value in pt.items()},
    }


def partial_from_document(document: Dict[str, Any], where: str = "partial table") -> PartialSetFunction:
    _require_keys(document, ("universe", "k_cap", "values"), where)
    universe = _universe(document["universe"], where)
    k_cap = document["k_cap"]
    if isinstance(k_cap, bool) or not isinstance(k_cap, int):
        raise InputError(f"{where}: k_cap must be an integer")
    return PartialSetFunction(universe, k_cap, _keyed_values(document["values"], universe, where))


def metric_to_document(d: FiniteMetric) -> Dict[str, Any]:
    return {"points": list(d.universe.names), "dist": d.dist.tolist()}


def metric_from_document(document: Dict[str, Any], where: str = "metric") -> FiniteMetric:
    _require_keys(document, ("points", "dist"), where)
    universe = _universe(document["points"], where)
    rows = document["dist"]
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise InputError(f"{where}: dist must be a list of rows")
    dist: List[List[float]] = [
        [_number(v, f"{where}: dist[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(rows)
    ]
    if any(len(row) != len(rows) for row in dist):
        raise InputError(f"{where}: dist must be square")
    return FiniteMetric(universe, dist)


def g_table_to_document(g: GMetricTable) -> Dict[str, Any]:
    names = g.universe.names
    return {
        "points": list(names),
        "values": {",".join(names[i] for i in key): value for key, value in g.values().items()},
    }


def g_table_from_document(document: Dict[str, Any], where: str = "G table") -> GMetricTable:
    _require_keys(document, ("points", "values"), where)
    universe = _universe(document["points"], where)
    values = document["values"]
    if not isinstance(values, dict):
        raise InputError(f"{where}: values must be an object keyed by multiset")
    parsed = {
        _multiset_key(key, universe, where): _number(value, f"{where}: values[{key!r}]")
        for key, value in values.items()
    }
    expected = set(multisets(universe.n))
    if len(parsed) != len(expected):
        missing = sorted(expected - parsed.keys())
        if missing:
            key = ",".join(universe.names[i] for i in missing[0])
            raise InputError(f"{where}: missing key {key!r}")
    return GMetricTable(universe, parsed)


def scenario_from_document(document: Dict[str, Any], where: str = "scenario") -> PretangentScenario:
    try:
        return PretangentScenario.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "(top level)"
        raise InputError(f"{where}: {location}: {first['msg']}") from e

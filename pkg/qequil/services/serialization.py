"""
Reading and writing games, distributions, states and reports.

Input files are validated through the pydantic schemas in models.files.
Output JSON prints every float with a fixed number of significant digits
and keeps keys in insertion order, so identical runs write identical bytes.
"""

import csv
import dataclasses
import io
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Type, TypeVar, Union

import numpy as np
import pydantic

from ..constants import FLOAT_SIGNIFICANT_DIGITS, OUTPUT_FORMATS
from ..exceptions import FileOperationError, ParseError, QEquilError, ValidationError
from ..models.files import DistributionFile, GameFile, ProductFile, StateFile
from ..models.game import Game, JointDistribution
from ..models.incentive import Povm
from ..models.quantum import DensityState, LocalChannel, PureState

logger = logging.getLogger(__name__)

FileModel = TypeVar("FileModel", bound=pydantic.BaseModel)
PathLike = Union[str, Path]


# Domain objects <-> file models

def game_to_file(g: Game) -> GameFile:
    return GameFile(
        players=g.players,
        strategyCounts=list(g.strategy_counts),
        utilities=[g.utilities[i].tolist() for i in range(g.players)],
        normalized=g.normalized,
    )


def game_from_file(model: GameFile) -> Game:
    try:
        payoffs = [np.asarray(u, dtype=np.float64) for u in model.utilities]
    except (TypeError, ValueError) as e:
        raise ParseError(f"Utilities are not rectangular numeric tensors: {e}")
    expected = tuple(model.strategy_counts)
    for player, payoff in enumerate(payoffs):
        if payoff.shape != expected:
            raise ParseError(f"Utility tensor of player {player} has shape {payoff.shape}, expected {expected}")
    return Game.from_payoffs(payoffs, model.normalized)


def distribution_to_file(p: JointDistribution) -> DistributionFile:
    return DistributionFile(shape=list(p.shape), probabilities=p.flat.tolist())


def distribution_from_file(model: DistributionFile) -> JointDistribution:
    return JointDistribution.from_weights(np.asarray(model.probabilities).reshape(model.shape))


def _pairs(values: np.ndarray) -> list:
    values = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in values]


def _complex(entries: Sequence[Sequence[float]]) -> np.ndarray:
    array = np.asarray(entries, dtype=np.float64)
    return array[:, 0] + 1j * array[:, 1]


def state_to_file(state: Union[DensityState, PureState]) -> StateFile:
    if isinstance(state, PureState):
        return StateFile(kind="pure", dims=list(state.dims), entries=_pairs(state.amplitudes))
    return StateFile(kind="density", dims=list(state.dims), entries=_pairs(state.matrix))


def state_from_file(model: StateFile) -> Union[DensityState, PureState]:
    values = _complex(model.entries)
    dims = tuple(model.dims)
    if model.kind == "pure":
        return PureState(dims, values)
    size = int(np.prod(dims))
    return DensityState(dims, values.reshape(size, size))


def product_from_file(model: ProductFile) -> list:
    return [np.asarray(f, dtype=np.float64) for f in model.factors]


# Loading

def _read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FileOperationError(f"Cannot read {path}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}")


def _validate(model: Type[FileModel], data: Any, source: str) -> FileModel:
    try:
        return model.model_validate(data)
    except pydantic.ValidationError as e:
        raise ParseError(f"{source} is not a valid {model.__name__}", details=str(e))


def load_game(path: PathLike) -> Game:
    return game_from_file(_validate(GameFile, _read_json(path), str(path)))


def load_distribution(path: PathLike) -> JointDistribution:
    return distribution_from_file(_validate(DistributionFile, _read_json(path), str(path)))


def load_state(path: PathLike) -> Union[DensityState, PureState]:
    return state_from_file(_validate(StateFile, _read_json(path), str(path)))


def load_product(path: PathLike) -> list:
    return product_from_file(_validate(ProductFile, _read_json(path), str(path)))


def load_distribution_or_state(path: PathLike) -> Union[JointDistribution, DensityState, PureState]:
    """Load a file holding either a distribution or a state, decided by its keys."""
    data = _read_json(path)
    if isinstance(data, dict) and "entries" in data:
        return state_from_file(_validate(StateFile, data, str(path)))
    return distribution_from_file(_validate(DistributionFile, data, str(path)))


# Report conversion

def to_jsonable(value: Any) -> Any:
    """Convert results, models and arrays into plain JSON structures.

    Complex arrays become {"shape", "entries"} with [re, im] pairs.
    """
    if isinstance(value, pydantic.BaseModel):
        return value.model_dump(by_alias=True)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (Game, JointDistribution)):
        model = game_to_file(value) if isinstance(value, Game) else distribution_to_file(value)
        return model.model_dump(by_alias=True)
    if isinstance(value, (DensityState, PureState)):
        return state_to_file(value).model_dump()
    if isinstance(value, Povm):
        return {"elements": [to_jsonable(e) for e in value.elements]}
    if isinstance(value, LocalChannel):
        return {"player": value.player, "kraus": [to_jsonable(k) for k in value.kraus_ops]}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            if np.all(value.imag == 0.0):
                return value.real.tolist()
            return {"shape": list(value.shape), "entries": _pairs(value)}
        return value.tolist()
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValidationError(f"Cannot serialize non-finite value {x!r}")
    if x == 0.0:
        return "0.0"
    text = f"{x:.{FLOAT_SIGNIFICANT_DIGITS}g}"
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _emit(value: Any, level: int, parts: list) -> None:
    pad = "  " * (level + 1)
    if isinstance(value, dict):
        if not value:
            parts.append("{}")
            return
        parts.append("{\n")
        for index, (key, item) in enumerate(value.items()):
            parts.append(f"{pad}{json.dumps(key)}: ")
            _emit(item, level + 1, parts)
            parts.append(",\n" if index < len(value) - 1 else "\n")
        parts.append("  " * level + "}")
    elif isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            parts.append("[" + ", ".join(_scalar(v) for v in value) + "]")
            return
        parts.append("[\n")
        for index, item in enumerate(value):
            parts.append(pad)
            _emit(item, level + 1, parts)
            parts.append(",\n" if index < len(value) - 1 else "\n")
        parts.append("  " * level + "]")
    else:
        parts.append(_scalar(value))


def _scalar(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, int):
        return str(value)
    return json.dumps(str(value))


def dumps_json(data: Any) -> str:
    parts: list = []
    _emit(to_jsonable(data), 0, parts)
    return "".join(parts) + "\n"


def dumps_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _csv_cell(row.get(c, "")) for c in columns})
    return buffer.getvalue()


def _csv_cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return "" if value is None else str(value)


def _flatten_rows(data: Any) -> tuple:
    """Rows and columns for CSV output of a report mapping or row list."""
    if isinstance(data, Mapping) and "rows" in data:
        rows = list(data["rows"])
    elif isinstance(data, list):
        rows = data
    elif isinstance(data, Mapping):
        rows = [{k: v for k, v in to_jsonable(data).items() if not isinstance(v, (dict, list))}]
    else:
        raise QEquilError("Report cannot be written as CSV")
    columns: list = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return rows, columns


def render(data: Any, fmt: str, columns: Optional[Sequence[str]] = None) -> str:
    if fmt not in OUTPUT_FORMATS:
        raise ValidationError(f"Unknown output format {fmt!r}; expected one of {', '.join(OUTPUT_FORMATS)}")
    if fmt == "json":
        return dumps_json(data)
    rows, found = _flatten_rows(data)
    return dumps_csv(rows, columns or found)


def write_text(text: str, path: PathLike) -> Path:
    path = Path(path).expanduser()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise FileOperationError(f"Cannot write {path}: {e}")
    logger.debug("Wrote %d bytes to %s", len(text), path)
    return path


def write_report(
    data: Any, path: PathLike, fmt: str = "json", columns: Optional[Sequence[str]] = None
) -> Path:
    return write_text(render(data, fmt, columns), path)


def write_bundle(files: Dict[str, Any], directory: PathLike) -> Dict[str, Path]:
    """Write several JSON documents into one directory, keyed by file name."""
    directory = Path(directory).expanduser()
    return {name: write_text(dumps_json(content), directory / name) for name, content in files.items()}

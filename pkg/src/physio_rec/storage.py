"""On-disk formats: weight matrices, sign priors, catalogs, preferences and simulation traces."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator

from .condition_inference import CONDITION_CODES, ConditionVector
from .errors import ParseError, SchemaError
from .recommender_core import (
    CATEGORY_CODES,
    DEFAULT_W_MAX,
    ActivityCategory,
    UserPreferences,
    Venue,
    WeightMatrix,
    check_catalog,
)
from .sensor_stream import Channel, SensorSample, validate_sample
from .tourist_sim import SimStep
from .weight_learning import SignPrior


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_json(path: str | os.PathLike, what: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(what, f"{path} is not valid JSON ({exc.msg}, line {exc.lineno})") from None


def _matrix_payload(obj: Any, where: str) -> list[list[float]]:
    if not isinstance(obj, dict):
        raise SchemaError(where, "must be a JSON object with rows, cols and data")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise SchemaError(f"{where}.{key}", "missing")
    if list(obj["rows"]) != list(CONDITION_CODES):
        raise SchemaError(f"{where}.rows", f"expected {list(CONDITION_CODES)}, got {obj['rows']!r}")
    if list(obj["cols"]) != list(CATEGORY_CODES):
        raise SchemaError(f"{where}.cols", f"expected {list(CATEGORY_CODES)}, got {obj['cols']!r}")
    data = obj["data"]
    if not (isinstance(data, list) and len(data) == 6 and all(isinstance(r, list) and len(r) == 5 for r in data)):
        raise SchemaError(f"{where}.data", "must be 6 arrays of 5 numbers")
    for row in data:
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise SchemaError(f"{where}.data", f"non-numeric or non-finite entry {v!r}")
    return data


def weights_from_dict(obj: Any, w_max: float = DEFAULT_W_MAX, where: str = "weights") -> WeightMatrix:
    data = _matrix_payload(obj, where)
    try:
        return WeightMatrix(data, w_max)
    except ValueError as exc:
        raise SchemaError(f"{where}.data", str(exc)) from None


def sign_prior_from_dict(obj: Any, where: str = "prior") -> SignPrior:
    data = _matrix_payload(obj, where)
    try:
        return SignPrior(data)
    except ValueError as exc:
        raise SchemaError(f"{where}.data", str(exc)) from None


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def save_weights(path: str | os.PathLike, w: WeightMatrix | SignPrior) -> None:
    atomic_write_text(path, dump_json(w.to_dict()))


def load_weights(path: str | os.PathLike, w_max: float = DEFAULT_W_MAX) -> WeightMatrix:
    return weights_from_dict(_read_json(path, "weights"), w_max)


def load_sign_prior(path: str | os.PathLike) -> SignPrior:
    return sign_prior_from_dict(_read_json(path, "prior"))


def catalog_from_list(obj: Any) -> list[Venue]:
    if not isinstance(obj, list):
        raise SchemaError("catalog", "must be a JSON array of venue objects")
    venues = []
    for i, item in enumerate(obj):
        where = f"catalog[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(where, "must be an object")
        for key in ("id", "name", "category", "base_quality"):
            if key not in item:
                raise SchemaError(f"{where}.{key}", "missing")
        try:
            category = ActivityCategory(item["category"])
        except ValueError:
            raise SchemaError(f"{where}.category", f"unknown category {item['category']!r}") from None
        try:
            venues.append(Venue(str(item["id"]), str(item["name"]), category, float(item["base_quality"])))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{where}.base_quality", str(exc)) from None
    try:
        check_catalog(venues)
    except ValueError as exc:
        raise SchemaError("catalog.id", str(exc)) from None
    return venues


def load_catalog(path: str | os.PathLike) -> list[Venue]:
    return catalog_from_list(_read_json(path, "catalog"))


def save_catalog(path: str | os.PathLike, venues: Iterable[Venue]) -> None:
    atomic_write_text(path, dump_json([v.to_dict() for v in venues]))


def load_preferences(path: str | os.PathLike) -> UserPreferences:
    obj = _read_json(path, "preferences")
    if not isinstance(obj, dict):
        raise SchemaError("preferences", "must be a JSON object mapping venue id to affinity")
    try:
        return UserPreferences({str(k): float(v) for k, v in obj.items()})
    except (TypeError, ValueError) as exc:
        raise SchemaError("preferences", str(exc)) from None


def save_preferences(path: str | os.PathLike, prefs: UserPreferences) -> None:
    atomic_write_text(path, dump_json(dict(prefs.affinities)))


# -- simulation traces ------------------------------------------------------


def step_to_json(step: SimStep) -> str:
    return json.dumps(
        {
            "t": step.t,
            "pc": list(step.pc),
            "chosen": step.chosen.value,
            "samples": [{"t": s.timestamp, "ch": s.channel.value, "v": s.value} for s in step.samples],
            "tourist": step.tourist,
        }
    )


def write_trace(path: str | os.PathLike, steps: Iterable[SimStep]) -> None:
    atomic_write_text(path, "".join(step_to_json(s) + "\n" for s in steps))


def _step_from_obj(obj: Any, lineno: int) -> SimStep:
    if not isinstance(obj, dict):
        raise SchemaError(f"line {lineno}", "trace record must be an object")
    for key in ("t", "pc", "chosen", "samples"):
        if key not in obj:
            raise SchemaError(f"line {lineno}: {key}", "missing")
    t = obj["t"]
    if isinstance(t, bool) or not isinstance(t, int):
        raise SchemaError(f"line {lineno}: t", "must be an integer")
    try:
        pc = ConditionVector.from_sequence(obj["pc"])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"line {lineno}: pc", str(exc)) from None
    try:
        chosen = ActivityCategory(obj["chosen"])
    except ValueError:
        raise SchemaError(f"line {lineno}: chosen", f"unknown category {obj['chosen']!r}") from None
    if not isinstance(obj["samples"], list):
        raise SchemaError(f"line {lineno}: samples", "must be an array")
    samples = []
    for s in obj["samples"]:
        try:
            sample = SensorSample(int(s["t"]), Channel(s["ch"]), float(s["v"]))
            validate_sample(sample, lineno)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"line {lineno}: samples", f"bad sample {s!r} ({exc})") from None
        samples.append(sample)
    tourist = obj.get("tourist", 0)
    if isinstance(tourist, bool) or not isinstance(tourist, int):
        raise SchemaError(f"line {lineno}: tourist", "must be an integer")
    return SimStep(tourist, t, pc, chosen, tuple(samples))


def iter_trace(path: str | os.PathLike) -> Iterator[SimStep]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(lineno, f"invalid JSON ({exc.msg})") from None
            yield _step_from_obj(obj, lineno)


def read_trace(path: str | os.PathLike) -> list[SimStep]:
    return list(iter_trace(path))

"""Structured result records: schema, hashing, atomic CSV/JSON emission.

A record carries the experiment id, the full configuration and its
canonical hash, the convention tag, per-sample rows and a certificate
summary.  Re-running with an identical configuration and seed reproduces
rows and summary bit-for-bit on one platform (timestamps and wall time
are excluded from that contract and from the hash).

Files are written atomically (temp file + rename); an interrupted run
leaves no partial output.  Overwriting a file that carries a different
schema version requires an explicit force flag.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, asdict
from typing import Optional

from .conventions import CONVENTION_TAG, SCHEMA_VERSION
from .errors import SchemaError, ValidationError

_VERSION = "0.1.0"


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON serialization (sorted keys)."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class ResultRecord:
    experiment: str
    config: dict
    rows: list                  # list of dicts, one per sample
    summary: dict               # pass/fail, margins, sups
    wall_time: float = 0.0
    schema_version: int = SCHEMA_VERSION
    convention: str = CONVENTION_TAG
    version: str = _VERSION
    config_hash: str = ""

    def __post_init__(self):
        if not self.config_hash:
            self.config_hash = config_hash(self.config)

    def passed(self) -> bool:
        return bool(self.summary.get("passed", False))


# one shipped schema; hand-validated to avoid a dependency
RECORD_SCHEMA = {
    "type": "object",
    "required": ["experiment", "config", "rows", "summary", "schema_version",
                 "convention", "version", "config_hash"],
    "properties": {
        "experiment": {"type": "string"},
        "config": {"type": "object"},
        "rows": {"type": "array", "items": {"type": "object"}},
        "summary": {"type": "object", "required": ["passed"]},
        "schema_version": {"type": "integer"},
        "convention": {"type": "string"},
        "version": {"type": "string"},
        "config_hash": {"type": "string"},
        "wall_time": {"type": "number"},
    },
}

_TYPES = {"object": dict, "array": list, "string": str, "integer": int,
          "number": (int, float), "boolean": bool}


def validate_record(data: dict, schema: dict = RECORD_SCHEMA, path: str = "$"):
    """Validate a decoded record against the shipped schema."""
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: expected object")
    for key in schema.get("required", []):
        if key not in data:
            raise SchemaError(f"{path}: missing required key {key!r}")
    for key, spec in schema.get("properties", {}).items():
        if key not in data:
            continue
        expected = _TYPES[spec["type"]]
        if spec["type"] == "number" and isinstance(data[key], bool):
            raise SchemaError(f"{path}.{key}: boolean is not a number")
        if not isinstance(data[key], expected):
            raise SchemaError(f"{path}.{key}: expected {spec['type']}")
        if spec["type"] == "array":
            item_t = _TYPES[spec["items"]["type"]]
            for i, item in enumerate(data[key]):
                if not isinstance(item, item_t):
                    raise SchemaError(f"{path}.{key}[{i}]: expected {spec['items']['type']}")
        if spec["type"] == "object" and "required" in spec:
            for sub in spec["required"]:
                if sub not in data[key]:
                    raise SchemaError(f"{path}.{key}: missing required key {sub!r}")
    return True


def record_to_json(record: ResultRecord) -> str:
    data = asdict(record)
    validate_record(data)
    return json.dumps(data, indent=2, sort_keys=True)


def record_from_json(text: str) -> ResultRecord:
    data = json.loads(text)
    validate_record(data)
    return ResultRecord(**data)


def record_to_csv(record: ResultRecord) -> str:
    """Flat per-sample rows with a commented header carrying the context."""
    buf = io.StringIO()
    buf.write(f"# curvcert-csv schema={record.schema_version} "
              f"experiment={record.experiment} config_hash={record.config_hash}\n")
    buf.write(f"# convention={record.convention}\n")
    buf.write(f"# units: chart coordinates dimensionless; norms in the "
              f"h-induced Lambda-k inner-product norm\n")
    buf.write("# summary: " + json.dumps(record.summary, sort_keys=True, default=str) + "\n")
    if record.rows:
        fields = list(record.rows[0].keys())
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        for row in record.rows:
            writer.writerow(row)
    return buf.getvalue()


def read_csv_record(path: str):
    """Parse an emitted CSV back into (meta, summary, rows)."""
    meta = {}
    summary = None
    body = []
    with open(path, "r", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                text = line[1:].strip()
                if text.startswith("summary:"):
                    summary = json.loads(text[len("summary:"):].strip())
                elif text.startswith("curvcert-csv"):
                    for tokens in text.split()[1:]:
                        k, _, v = tokens.partition("=")
                        meta[k] = v
                elif text.startswith("convention="):
                    meta["convention"] = text[len("convention="):]
            else:
                body.append(line)
    rows = []
    if body:
        reader = csv.DictReader(io.StringIO("".join(body)))
        for row in reader:
            parsed = {}
            for k, v in row.items():
                try:
                    parsed[k] = float(v)
                except (TypeError, ValueError):
                    parsed[k] = v
            rows.append(parsed)
    return meta, summary, rows


def atomic_write(path: str, text: str):
    """Write via a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".curvcert-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _existing_schema_version(path: str) -> Optional[int]:
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError:
        return None
    head = text[:4096]
    if head.lstrip().startswith("{"):
        try:
            return int(json.loads(text).get("schema_version"))
        except (ValueError, TypeError, json.JSONDecodeError):
            return None
    for line in head.splitlines():
        if line.startswith("# curvcert-csv"):
            for tok in line.split():
                if tok.startswith("schema="):
                    try:
                        return int(tok.split("=", 1)[1])
                    except ValueError:
                        return None
    return None


def emit(record: ResultRecord, path: str, fmt: str = "csv", force: bool = False) -> str:
    """Atomically write the record; refuse to clobber other schema versions."""
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown output format {fmt!r}")
    if os.path.exists(path):
        existing = _existing_schema_version(path)
        if existing is not None and existing != SCHEMA_VERSION and not force:
            raise ValidationError(
                f"refusing to overwrite {path}: it carries schema version {existing}, "
                f"current is {SCHEMA_VERSION}; pass force to override")
    text = record_to_json(record) if fmt == "json" else record_to_csv(record)
    atomic_write(path, text)
    return path

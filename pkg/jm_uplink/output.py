"""
CSV and JSON writers for command results
"""
import csv
import json
import math
import os

import numpy as np

from . import app_settings


def _schema_version(schema_version):
    if schema_version is None:
        return app_settings.JM_UPLINK_SCHEMA_VERSION
    return schema_version


def _plain(value):
    """
    Numpy scalars and non-finite floats in a JSON-safe form
    """
    if isinstance(value, np.ndarray):
        value = value.tolist()
    elif isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(path, fieldnames, rows, schema_version=None):
    """
    Write ``rows`` (dicts) under a ``# schema_version=N`` comment line
    """
    with open(path, "w", newline="") as handle:
        handle.write("# schema_version={}\n".format(_schema_version(schema_version)))
        csv_writer = csv.DictWriter(handle, fieldnames=fieldnames)
        csv_writer.writeheader()
        for row in rows:
            csv_writer.writerow({key: _csv_value(value) for key, value in row.items()})
    return path


def _csv_value(value):
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def read_csv(path):
    """
    Rows of a file written by ``write_csv``, values left as strings
    """
    with open(path, newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_json(path, data, schema_version=None):
    document = {"schema_version": _schema_version(schema_version)}
    document.update(_plain(data))
    with open(path, "w") as handle:
        json.dump(document, handle, indent=2, sort_keys=False)
        handle.write("\n")
    return path


def read_json(path):
    with open(path) as handle:
        return json.load(handle)

"""Reading and writing models and result tables.

Model files come in two formats:

* JSON: ``{"n_modes": N, "V": [[...], ...]}``
* CSV: a header line ``# quadstab V n_modes=N`` followed by ``2N`` rows of
  ``2N`` comma-separated numbers.

Model entries are written with ``repr`` so that reading a file and writing
it again reproduces the same bytes. Result tables use 12 significant digits.
"""
import csv
import io
import json
import math
import re

import numpy as np

from .core import QuadraticModel
from .errors import InvalidArgument, InvalidModel

_CSV_HEADER = re.compile(r"#\s*quadstab V n_modes=(\d+)\s*$")


def fmt(x):
    """Format a number with 12 significant digits; booleans and strings pass through."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    return str(x)


def round_floats(obj):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt(x)
        return float(format(x, ".12g"))
    if isinstance(obj, complex):
        return [round_floats(obj.real), round_floats(obj.imag)]
    return obj


def dumps_json(obj):
    return json.dumps(round_floats(obj), indent=2, sort_keys=True) + "\n"


def model_to_json(model):
    rows = ", ".join("[" + ", ".join(repr(float(v)) for v in row) + "]" for row in model.V)
    return f'{{"n_modes": {model.n_modes}, "V": [{rows}]}}\n'


def model_to_csv(model):
    lines = [f"# quadstab V n_modes={model.n_modes}"]
    lines += [",".join(repr(float(v)) for v in row) for row in model.V]
    return "\n".join(lines) + "\n"


def dumps_model(model, fmt="json"):
    if fmt == "json":
        return model_to_json(model)
    if fmt == "csv":
        return model_to_csv(model)
    raise InvalidArgument(f"unknown model format {fmt!r}")


def _check_n(n, V):
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidModel(f"n_modes must be a positive integer, got {n!r}")
    if V.shape != (2 * n, 2 * n):
        raise InvalidModel(f"V has shape {V.shape}, expected {(2 * n, 2 * n)} for n_modes={n}")


def loads_model(text):
    """Parse a model from JSON or CSV text (the format is detected)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidModel(f"malformed JSON: {exc}") from exc
        if not isinstance(data, dict) or "V" not in data or "n_modes" not in data:
            raise InvalidModel('JSON model needs keys "n_modes" and "V"')
        try:
            V = np.array(data["V"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidModel(f"V is not a numeric matrix: {exc}") from exc
        _check_n(data["n_modes"], V)
        return QuadraticModel(data["n_modes"], V)
    lines = stripped.splitlines()
    if not lines:
        raise InvalidModel("empty model file")
    m = _CSV_HEADER.match(lines[0].strip())
    if not m:
        raise InvalidModel("CSV model must start with '# quadstab V n_modes=N'")
    n = int(m.group(1))
    try:
        rows = [[float(v) for v in r] for r in csv.reader(io.StringIO("\n".join(lines[1:]))) if r]
        V = np.array(rows, dtype=float)
    except ValueError as exc:
        raise InvalidModel(f"malformed CSV model: {exc}") from exc
    _check_n(n, V)
    return QuadraticModel(n, V)


def read_model(path):
    try:
        with open(path) as fh:
            return loads_model(fh.read())
    except OSError as exc:
        raise InvalidArgument(f"cannot read model file {path}: {exc}") from exc


def write_model(model, path, fmt=None):
    if fmt is None:
        fmt = "csv" if str(path).endswith(".csv") else "json"
    with open(path, "w") as fh:
        fh.write(dumps_model(model, fmt))


def dumps_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()

"""Report emission: atomic CSV/JSON writers with reproducible formatting."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt_float(x: float) -> str:
    """17 significant digits: round-trip exact at double precision."""
    return format(float(x), ".17g")


def write_csv(path: str, header, rows) -> None:
    """CSV with a header row; floats serialized at full precision, None as
    an empty cell."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else
                         fmt_float(v) if isinstance(v, float) else v
                         for v in row])
    _atomic_write(path, buf.getvalue())


def write_json(path: str, obj) -> None:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    _atomic_write(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

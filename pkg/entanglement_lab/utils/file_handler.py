import csv
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from entanglement_lab.exceptions import IntensityTableError


def to_local_path(value, base_dir=None):
    """
    Convert a user-supplied path to a normalized absolute filesystem path.
    Handles:
      - "~" expansion
      - paths relative to `base_dir` (e.g. the directory of a config file)
      - absolute local paths
    """
    if not value:
        raise ValueError("Path is empty")

    path = os.path.expanduser(str(value).strip())
    if not os.path.isabs(path) and base_dir:
        path = os.path.join(base_dir, path)

    return os.path.normpath(os.path.abspath(path))


@contextmanager
def atomic_open(path):
    """
    Open a temporary file next to `path` for writing, then rename it over the
    target on success so readers never see a partial file.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            yield f
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write(path, text):
    with atomic_open(path) as f:
        f.write(text)
    return Path(path)


def write_click_csv(path, batches):
    """
    Stream click batches to `path` as `trial,c1,c2,...` rows (clicks as 0/1).
    Returns the number of rows written.
    """
    rows = 0
    with atomic_open(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        for batch in batches:
            clicks = np.asarray(batch.clicks, dtype=np.int64)
            if rows == 0:
                writer.writerow(["trial"] + [f"c{k}" for k in range(1, clicks.shape[1] + 1)])
            trials = np.arange(batch.first_trial, batch.first_trial + clicks.shape[0])
            writer.writerows(np.column_stack((trials, clicks)).tolist())
            rows += clicks.shape[0]
    return rows


def clicks_path(out_path):
    target = Path(out_path)
    return target.with_name(f"{target.stem}.clicks.csv")


def read_intensity_table(path):
    """
    Read a custom intensity table with header `trial,i1,i2[,i3...]`.
    Returns an array of shape (rows, channels). Errors carry the CSV line number.
    """
    path = to_local_path(path)
    if not os.path.exists(path):
        raise IntensityTableError(f"Intensity table not found: {path}")

    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = [column.strip() for column in next(reader, [])]
        channels = header[1:]
        if not header or header[0] != "trial" or len(channels) < 1 or any(
            column != f"i{k}" for k, column in enumerate(channels, start=1)
        ):
            raise IntensityTableError(
                f"Expected header 'trial,i1,i2,...', got '{','.join(header)}'", line=1
            )
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise IntensityTableError(
                    f"Expected {len(header)} columns, got {len(row)}", line=reader.line_num
                )
            try:
                values = [float(cell) for cell in row[1:]]
            except ValueError:
                raise IntensityTableError(
                    f"Non-numeric intensity in {row!r}", line=reader.line_num
                )
            if any(not np.isfinite(v) or v < 0 for v in values):
                raise IntensityTableError(
                    f"Intensities must be finite and non-negative, got {values}",
                    line=reader.line_num,
                )
            rows.append(values)

    if not rows:
        raise IntensityTableError("Intensity table has no data rows", line=2)
    return np.array(rows, dtype=np.float64)

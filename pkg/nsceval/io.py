"""
File formats of nsceval.

Records and curves are comma-separated text with `# key = value` comment lines for
metadata; the base period of a record is given by a `# tau0 = <seconds>` line. Budgets
and scenarios are TOML. All writers replace their target atomically and embed
provenance metadata (version, command line, seeds).

Record file:
```
# tau0 = 1.0
# seed = 7
y,xI
1.02e-13,3.1e-14
...
```

Curve file, omitted points appear as comment lines:
```
# omitted: m=500000, tau=500000.0, reason=insufficient-data
m,tau,k,sigma_k,edf,style,variant
1,1.0,1.0061,0.0046,500000.0,overlap,nsc
```

Budget file, one table per effect:
```
[zeeman]
k = 6.47e-14
sigma_x = 1e-3
sigma_x_b = 2e-4
```
"""

import io
import os
import re
import tempfile
import tomllib
from pathlib import Path

import numpy as np
import pandas as pd
import tomlkit
import xarray as xr
from loguru import logger

from nsceval.allan import TimeSeries
from nsceval.budget import BudgetEntry
from nsceval.errors import (
    DomainError,
    InsufficientDataError,
    NscError,
    OutputError,
    ParseError,
    ShapeError,
)
from nsceval.sensitivity import KCurve, KCurvePoint, OmittedPoint
from nsceval.simulation import scenario_from_dict

CURVE_COLUMNS = ["m", "tau", "k", "sigma_k", "edf", "style", "variant"]

_META_LINE = re.compile(r"^#\s*([A-Za-z_][\w.-]*)\s*=\s*(.*?)\s*$")
_FIELD_COUNT = re.compile(r"line (\d+)")
_OMITTED_LINE = re.compile(
    r"^#\s*omitted:\s*m=(\d+),\s*tau=([^,]+),\s*reason=([\w-]+)\s*$"
)


def make_dataset(columns, tau0, metadata=None):
    """
    Build a record dataset.

    Parameters
    ----------
    columns : mapping of str to array_like
        Equal-length columns
    tau0 : float
        Base period in seconds
    metadata : dict, optional
        Free key-value metadata stored in the attributes

    Returns
    -------
    xarray.Dataset
        Variables on a `time` dimension with coordinate `time = j * tau0` and
        attribute `tau0`
    """
    if not tau0 > 0:
        raise DomainError(f"tau0 must be positive, got {tau0}")
    lengths = {name: len(values) for name, values in columns.items()}
    if len(set(lengths.values())) > 1:
        raise ShapeError(f"Columns differ in length: {lengths}")
    n = next(iter(lengths.values()), 0)
    ds = xr.Dataset(
        {
            name: ("time", np.asarray(values, dtype=np.float64))
            for name, values in columns.items()
        },
        coords={"time": np.arange(n) * tau0},
    )
    ds.attrs = {**(metadata or {}), "tau0": float(tau0)}
    return ds


def series(dataset, column):
    """Return a column of a record dataset as `TimeSeries`."""
    if column not in dataset:
        raise ParseError(
            f"Column '{column}' not found, available: {', '.join(dataset.data_vars)}"
        )
    return TimeSeries(dataset[column].values, dataset.attrs["tau0"])


def _atomic_write(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
        ) as f:
            f.write(text)
            tmp = f.name
        os.replace(tmp, path)
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e.strerror or e}") from e
    logger.info("Wrote {}", path)


def _metadata_lines(metadata):
    lines = []
    for key, value in metadata.items():
        if isinstance(value, float):
            value = repr(float(value))
        for line in str(value).splitlines() or [""]:
            lines.append(f"# {key} = {line}\n")
    return "".join(lines)


def _read_lines(path):
    try:
        with open(path, encoding="utf-8") as f:
            return f.read().splitlines()
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not a text file") from e


def _split_comments(lines):
    """Separate comment lines from data lines, keeping one-based line numbers."""
    comments = []
    data = []
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comments.append((number, stripped))
        else:
            data.append((number, stripped))
    return comments, data


def _metadata(comments):
    res = {}
    for _, line in comments:
        match = _META_LINE.match(line)
        if match:
            res[match.group(1)] = match.group(2)
    return res


def _numeric_frame(frame, numbers):
    """Convert string columns to floats, rejecting bad cells by line number."""
    coerced = frame.apply(pd.to_numeric, errors="coerce").astype(np.float64)
    bad = ~np.isfinite(coerced.to_numpy())
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise ParseError(
            f"column '{frame.columns[col]}' has non-numeric or non-finite value"
            f" '{frame.iat[row, col]}'",
            line=numbers[row],
        )
    # exact round trip of written values
    return frame.astype(np.float64)


def _string_frame(text):
    """Parse header-free CSV text into string cells."""
    return pd.read_csv(
        io.StringIO(text),
        header=None,
        dtype=str,
        keep_default_na=False,
        skipinitialspace=True,
    )


def _record_rows(rows, header, numbers):
    """String cells of the data rows, checked against the header width."""
    if not rows:
        return pd.DataFrame(columns=header, dtype=str)
    try:
        frame = _string_frame("\n".join(line for _, line in rows))
    except pd.errors.ParserError as e:
        # pandas counts lines of the comment-free text from one
        match = _FIELD_COUNT.search(str(e))
        line = numbers[int(match.group(1)) - 1] if match else None
        raise ParseError(
            f"row has more fields than the header: {e}", line=line
        ) from e
    # missing trailing fields are the only NaN cells
    counts = frame.notna().to_numpy().sum(axis=1)
    ragged = counts != len(header)
    if ragged.any():
        row = int(np.argmax(ragged))
        raise ParseError(
            f"row has {counts[row]} fields, header has {len(header)}", line=numbers[row]
        )
    frame.columns = header
    return frame


def read_csv(path, tau0_override=None):
    """
    Read a record file.

    Parameters
    ----------
    path : str or pathlib.Path
        Comma-separated file with a header row
    tau0_override : float, optional
        Base period replacing the `# tau0` line

    Returns
    -------
    xarray.Dataset
        See `make_dataset`; comment metadata is kept in the attributes
    """
    comments, data = _split_comments(_read_lines(path))
    if not data:
        raise ParseError(f"{path} has no header row", line=1)
    header_line, header_text = data[0]
    header = [h.strip() for h in _string_frame(header_text).iloc[0]]
    if len(set(header)) != len(header) or not all(header):
        raise ParseError(f"invalid header '{header_text}'", line=header_line)

    numbers = [number for number, _ in data[1:]]
    frame = _record_rows(data[1:], header, numbers)
    values = _numeric_frame(frame.apply(lambda column: column.str.strip()), numbers)

    metadata = _metadata(comments)
    tau0 = tau0_override
    if tau0 is None:
        if "tau0" not in metadata:
            raise ParseError("missing '# tau0 = <seconds>' line", line=header_line)
        try:
            tau0 = float(metadata["tau0"])
        except ValueError as e:
            raise ParseError(f"invalid tau0 '{metadata['tau0']}'") from e
    metadata.pop("tau0", None)
    try:
        return make_dataset({c: values[c].to_numpy() for c in header}, tau0, metadata)
    except NscError as e:
        raise ParseError(str(e)) from e


def write_dataset(dataset, path, metadata=None):
    """Write a record dataset with `# tau0` and metadata comment lines."""
    attrs = {"tau0": dataset.attrs["tau0"]}
    attrs.update(
        {
            k: v
            for k, v in dataset.attrs.items()
            if k != "tau0" and isinstance(v, str | int | float)
        }
    )
    attrs.update(metadata or {})
    frame = dataset.reset_coords(drop=True).to_dataframe().reset_index(drop=True)
    text = _metadata_lines(attrs) + frame.to_csv(index=False)
    _atomic_write(path, text)


def write_curve(curve, path, metadata=None):
    """
    Write a sensitivity curve.

    Values are written in shortest round-trip precision, omitted points as
    `# omitted:` comment lines.
    """
    if len(curve) == 0:
        raise InsufficientDataError("Curve has no points")
    attrs = dict(metadata or {})
    if curve.noise_kind:
        attrs["noise_kind"] = curve.noise_kind
    attrs.update({k: v for k, v in curve.provenance.items() if k not in attrs})
    omitted = "".join(
        f"# omitted: m={p.m}, tau={float(p.tau)!r}, reason={p.reason}\n"
        for p in curve.omitted
    )
    body = curve.to_frame()[CURVE_COLUMNS].to_csv(index=False)
    _atomic_write(path, _metadata_lines(attrs) + omitted + body)


def read_curve(path):
    """Read a sensitivity curve written by `write_curve`."""
    lines = _read_lines(path)
    comments, _ = _split_comments(lines)
    omitted = []
    for number, line in comments:
        match = _OMITTED_LINE.match(line)
        if match:
            try:
                omitted.append(
                    OmittedPoint(
                        int(match.group(1)), float(match.group(2)), match.group(3)
                    )
                )
            except ValueError as e:
                raise ParseError(f"invalid omitted point '{line}'", line=number) from e
    metadata = _metadata(comments)
    try:
        frame = pd.read_csv(
            io.StringIO("\n".join(lines)),
            comment="#",
            dtype={"m": np.int64, "style": str, "variant": str},
            float_precision="round_trip",
        )
    except (ValueError, pd.errors.ParserError) as e:
        raise ParseError(f"{path}: {e}") from e
    if list(frame.columns) != CURVE_COLUMNS:
        raise ParseError(f"curve header must be {','.join(CURVE_COLUMNS)}", line=1)
    if frame.empty:
        raise InsufficientDataError(f"{path} contains no curve points")
    if frame["style"].nunique() != 1 or frame["variant"].nunique() != 1:
        raise ParseError("curve mixes styles or variants")
    points = tuple(
        KCurvePoint(int(r.m), float(r.tau), float(r.k), float(r.sigma_k), float(r.edf))
        for r in frame.itertuples()
    )
    try:
        return KCurve(
            points,
            style=frame["style"].iloc[0],
            variant=frame["variant"].iloc[0],
            noise_kind=metadata.pop("noise_kind", None),
            omitted=tuple(omitted),
            provenance=metadata,
        )
    except NscError as e:
        raise ParseError(f"{path}: {e}") from e


def _load_toml(path):
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ParseError(f"{path}: {e}") from e


def read_budget(path):
    """
    Read budget entries from a TOML file with one table per effect.

    Each table has `k`, `sigma_x` and optionally `sigma_x_b`, the type-B
    uncertainty of the NIV.

    Returns
    -------
    list of BudgetEntry
    """
    entries = []
    for name, table in _load_toml(path).items():
        if not isinstance(table, dict):
            raise ParseError(f"budget entry '{name}' must be a table")
        unknown = set(table) - {"k", "sigma_x", "sigma_x_b"}
        if unknown or not {"k", "sigma_x"} <= set(table):
            raise ParseError(
                f"budget entry '{name}' needs keys k, sigma_x and optional sigma_x_b"
            )
        try:
            entries.append(
                BudgetEntry.from_components(
                    name,
                    float(table["k"]),
                    float(table["sigma_x"]),
                    float(table.get("sigma_x_b", 0.0)),
                )
            )
        except (TypeError, ValueError) as e:
            raise ParseError(f"budget entry '{name}': {e}") from e
    return entries


def read_scenario(path):
    """Read a scenario TOML file, see `nsceval.simulation.scenario_from_dict`."""
    return scenario_from_dict(_load_toml(path))


def write_toml(data, path, metadata=None):
    """Write nested dictionaries as TOML with leading provenance comments."""
    document = tomlkit.document()
    for key, value in (metadata or {}).items():
        document.add(tomlkit.comment(f"{key} = {value}"))
    for key, value in data.items():
        document.add(key, value)
    _atomic_write(path, tomlkit.dumps(document))

"""Text formats for snapshots, radial profiles, flow histories and reports.

Every file starts with a block of ``# key = value`` comment lines carrying
the resolved run configuration. Floats are written with 17 significant
digits so that reading a file back reproduces the stored values exactly.
All paths go through smart_open and may be local files or S3 URIs.
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, TextIO, Tuple

import numpy as np

from .common import format_float, open_path
from .errors import SnapshotFormatError
from .fields import FieldState, Grid2D, ModelParams
from .flow import FlowRecord
from .potentials import PotentialTable
from .radial import RadialProfile, Termination

log = logging.getLogger(__name__)

Header = Mapping[str, object]


def _header_value(value: object) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_header(stream: TextIO, header: Optional[Header]) -> None:
    """Write ``# key = value`` lines."""
    for key, value in (header or {}).items():
        stream.write(f"# {key} = {_header_value(value)}\n")


def _parse_header_line(text: str, header: Dict[str, str]) -> None:
    key, sep, value = text[1:].partition("=")
    if sep:
        header[key.strip()] = value.strip()


def _floats(text: str, count: int, line_number: int) -> List[float]:
    parts = text.split(",")
    if len(parts) != count:
        raise SnapshotFormatError(
            f"expected {count} comma-separated values, got {len(parts)}", line_number
        )
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise SnapshotFormatError(f"not a number: {e}", line_number) from e
    return values


def write_snapshot(
    path: str, state: FieldState, header: Optional[Header] = None
) -> None:
    """Write a field snapshot, one node per row, row-major in y then x."""
    grid = state.grid
    X, Y = grid.mesh()
    with open_path(path, "w") as out:
        write_header(out, header)
        out.write(
            "# grid {} {} {}\n".format(
                grid.nx,
                grid.ny,
                " ".join(
                    format_float(v)
                    for v in (grid.x_min, grid.x_max, grid.y_min, grid.y_max)
                ),
            )
        )
        columns = (X, Y, state.omega.real, state.omega.imag, state.a1, state.a2)
        for row in zip(*(np.ravel(c) for c in columns)):
            out.write(",".join(format_float(v) for v in row) + "\n")
    log.info("Wrote snapshot %s (%dx%d)", path, grid.nx, grid.ny)


def read_snapshot(path: str) -> Tuple[FieldState, Dict[str, str]]:
    """Read a snapshot written by :func:`write_snapshot`.

    Raises:
        SnapshotFormatError: On malformed content, with the offending line.
    """
    header: Dict[str, str] = {}
    grid: Optional[Grid2D] = None
    rows: List[List[float]] = []
    with open_path(path, "r") as stream:
        for line_number, raw in enumerate(stream, start=1):
            text = raw.strip()
            if not text:
                continue
            if text.startswith("# grid ") and "=" not in text:
                parts = text.split()[2:]
                if len(parts) != 6:
                    raise SnapshotFormatError(
                        "grid line needs nx ny x_min x_max y_min y_max", line_number
                    )
                try:
                    grid = Grid2D(
                        int(parts[0]), int(parts[1]), *(float(p) for p in parts[2:])
                    )
                except ValueError as e:
                    raise SnapshotFormatError(f"bad grid line: {e}", line_number) from e
                continue
            if text.startswith("#"):
                _parse_header_line(text, header)
                continue
            if grid is None:
                raise SnapshotFormatError("data row before the grid line", line_number)
            values = _floats(text, 6, line_number)
            index = len(rows)
            if index >= grid.size:
                raise SnapshotFormatError(
                    f"more than {grid.size} node rows", line_number
                )
            j, i = divmod(index, grid.nx)
            tol = 1e-9 * max(grid.hx, grid.hy)
            if abs(values[0] - grid.x[i]) > tol or abs(values[1] - grid.y[j]) > tol:
                raise SnapshotFormatError(
                    f"node ({values[0]:g}, {values[1]:g}) does not match grid"
                    f" position ({grid.x[i]:g}, {grid.y[j]:g})",
                    line_number,
                )
            rows.append(values)
    if grid is None:
        raise SnapshotFormatError("missing '# grid' line")
    if len(rows) != grid.size:
        raise SnapshotFormatError(
            f"expected {grid.size} node rows, found {len(rows)}"
        )
    data = np.asarray(rows).reshape(grid.ny, grid.nx, 6)
    state = FieldState(
        grid,
        data[..., 2] + 1j * data[..., 3],
        data[..., 4],
        data[..., 5],
    )
    return state, header


def write_profile(
    path: str,
    profile: RadialProfile,
    params: ModelParams,
    family: str,
    header: Optional[Header] = None,
) -> None:
    """Write ``r,u,a`` rows under a ``# radial ...`` line."""
    with open_path(path, "w") as out:
        write_header(out, {**(header or {}), "branch": profile.branch})
        out.write(
            "# radial {} {} {} {} {} {}\n".format(
                params.n,
                format_float(params.lambda1),
                format_float(params.lambda2),
                format_float(params.lambda4),
                family,
                profile.termination.value,
            )
        )
        for row in zip(profile.r, profile.u, profile.a):
            out.write(",".join(format_float(v) for v in row) + "\n")
    log.info("Wrote profile %s (%d samples)", path, profile.r.size)


def read_profile(path: str) -> Tuple[RadialProfile, Dict[str, str]]:
    """Read a profile CSV; radial-line fields are returned in the header dict."""
    header: Dict[str, str] = {}
    radial_line: Optional[List[str]] = None
    rows: List[List[float]] = []
    with open_path(path, "r") as stream:
        for line_number, raw in enumerate(stream, start=1):
            text = raw.strip()
            if not text:
                continue
            if text.startswith("# radial ") and "=" not in text:
                radial_line = text.split()[2:]
                if len(radial_line) != 6:
                    raise SnapshotFormatError(
                        "radial line needs n lambda1 lambda2 lambda4"
                        " family termination",
                        line_number,
                    )
                continue
            if text.startswith("#"):
                _parse_header_line(text, header)
                continue
            rows.append(_floats(text, 3, line_number))
    if radial_line is None:
        raise SnapshotFormatError("missing '# radial' line")
    keys = ("n", "lambda1", "lambda2", "lambda4", "family", "termination")
    header.update(zip(keys, radial_line))
    if len(rows) < 2:
        raise SnapshotFormatError(f"profile needs >= 2 rows, found {len(rows)}")
    try:
        termination = Termination(header["termination"])
        n = int(header["n"])
    except ValueError as e:
        raise SnapshotFormatError(f"bad radial line: {e}") from e
    data = np.asarray(rows)
    profile = RadialProfile(
        r=data[:, 0],
        u=data[:, 1],
        a=data[:, 2],
        termination=termination,
        n=n,
        branch=int(header.get("branch", 1)),
    )
    return profile, header


def write_history(
    path: str, history: Iterable[FlowRecord], header: Optional[Header] = None
) -> None:
    """Write the ``iter,energy,grad_norm`` history CSV."""
    with open_path(path, "w") as out:
        write_header(out, header)
        out.write("iter,energy,grad_norm\n")
        for record in history:
            out.write(
                f"{record.iteration},{format_float(record.energy)},"
                f"{format_float(record.grad_norm)}\n"
            )


def read_history(path: str) -> List[FlowRecord]:
    """Read a history CSV back into records."""
    records = []
    with open_path(path, "r") as stream:
        for line_number, raw in enumerate(stream, start=1):
            text = raw.strip()
            if not text or text.startswith("#") or text.startswith("iter"):
                continue
            it, energy, grad = _floats(text, 3, line_number)
            records.append(FlowRecord(int(it), energy, grad))
    return records


def write_potential_table(
    path: str, table: PotentialTable, header: Optional[Header] = None
) -> None:
    """Write ``u,V,Vprime,target`` rows for plotting."""
    with open_path(path, "w") as out:
        write_header(out, header)
        out.write("u,V,Vprime,target\n")
        for row in zip(table.u, table.v, table.vprime, table.target):
            out.write(",".join(format_float(v) for v in row) + "\n")


def read_potential_table(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Read the first two columns (u, V) of a potential CSV."""
    us, vs = [], []
    with open_path(path, "r") as stream:
        for line_number, raw in enumerate(stream, start=1):
            text = raw.strip()
            if not text or text.startswith("#") or text[0].isalpha():
                continue
            parts = text.split(",")
            if len(parts) < 2:
                raise SnapshotFormatError("potential rows need u,V", line_number)
            u, v = _floats(",".join(parts[:2]), 2, line_number)
            us.append(u)
            vs.append(v)
    return np.asarray(us), np.asarray(vs)


def format_report(title: str, values: Mapping[str, object]) -> str:
    """Flat ``key = value`` block under a ``[title]`` line.

    >>> print(format_report("bogomolny", {"sup_norm": 0.5, "pass": True}))
    [bogomolny]
    sup_norm = 0.5
    pass = True
    """
    lines = [f"[{title}]"]
    lines.extend(f"{key} = {_header_value(value)}" for key, value in values.items())
    return "\n".join(lines)

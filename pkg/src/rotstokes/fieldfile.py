"""Plain-text field serialization, format tag "SCFIELD 1".

A field file is a header (format tag, period, grid dims, component names)
followed by one record per grid point: three indices, three coordinates,
then the component values. Values are written with 17 significant digits,
which round-trips IEEE doubles exactly, so write(read(f)) reproduces f byte
for byte. Coordinates are stored explicitly because channel grids follow
the bottom surface: the vertical coordinate varies with the horizontal
point and the file stays self-describing.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FieldFormatError
from .fields import BoundaryTrace, grid_points

FORMAT_TAG = "SCFIELD 1"

__all__ = [
    "FieldData",
    "read_field",
    "write_field",
    "trace_to_field",
    "field_to_trace",
    "channel_to_field",
    "pressure_to_field",
]


@dataclass(frozen=True)
class FieldData:
    """In-memory form of a field file.

    coords: (3, n1, n2, n3) physical coordinates per grid point.
    values: (ncomp, n1, n2, n3) component samples, ordered as components.
    """

    period: float
    components: tuple
    coords: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.coords.shape[0] != 3 or self.coords.shape[1:] != self.values.shape[1:]:
            raise ValueError("coords and values must share grid dims")
        if len(self.components) != self.values.shape[0]:
            raise ValueError("component names must match value count")


def _format_value(x):
    return "%.17g" % x


def write_field(path, data):
    """Write a FieldData to disk in canonical formatting."""
    dims = data.values.shape[1:]
    ncomp = data.values.shape[0]
    idx = np.stack(np.meshgrid(*[np.arange(d) for d in dims], indexing="ij"))
    table = np.concatenate(
        [
            idx.reshape(3, -1),
            data.coords.reshape(3, -1),
            data.values.reshape(ncomp, -1),
        ]
    ).T
    lines = [
        FORMAT_TAG,
        "period " + _format_value(data.period),
        "dims %d %d %d" % dims,
        "components " + " ".join(data.components),
    ]
    fmt = "%d %d %d " + " ".join(["%.17g"] * (3 + ncomp))
    lines.extend(fmt % tuple(row) for row in table)
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def _parse_error(lineno, message):
    return FieldFormatError("line %d: %s" % (lineno, message))


def read_field(path):
    """Parse a field file; errors carry the offending line number."""
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0] != FORMAT_TAG:
        raise _parse_error(1, "expected format tag %r" % FORMAT_TAG)
    if len(lines) < 4:
        raise _parse_error(len(lines), "incomplete header")
    head = lines[1].split()
    if len(head) != 2 or head[0] != "period":
        raise _parse_error(2, "expected 'period <value>'")
    try:
        period = float(head[1])
    except ValueError:
        raise _parse_error(2, "unreadable period %r" % head[1])
    head = lines[2].split()
    if len(head) != 4 or head[0] != "dims":
        raise _parse_error(3, "expected 'dims <n1> <n2> <n3>'")
    try:
        dims = tuple(int(v) for v in head[1:])
    except ValueError:
        raise _parse_error(3, "unreadable dims %r" % lines[2])
    if any(d <= 0 for d in dims):
        raise _parse_error(3, "dims must be positive, got %s" % (dims,))
    head = lines[3].split()
    if len(head) < 2 or head[0] != "components":
        raise _parse_error(4, "expected 'components <name>...'")
    components = tuple(head[1:])
    ncomp = len(components)

    count = dims[0] * dims[1] * dims[2]
    body = lines[4:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != count:
        raise _parse_error(
            5 + min(len(body), count),
            "expected %d records for dims %s, found %d" % (count, dims, len(body)),
        )
    coords = np.empty((3, count))
    values = np.empty((ncomp, count))
    width = 6 + ncomp
    for pos, line in enumerate(body):
        lineno = 5 + pos
        parts = line.split()
        if len(parts) != width:
            raise _parse_error(
                lineno, "expected %d fields per record, found %d" % (width, len(parts))
            )
        try:
            ids = [int(parts[k]) for k in range(3)]
            nums = [float(v) for v in parts[3:]]
        except ValueError:
            raise _parse_error(lineno, "unreadable record %r" % line)
        expect = (
            pos // (dims[1] * dims[2]),
            (pos // dims[2]) % dims[1],
            pos % dims[2],
        )
        if tuple(ids) != expect:
            raise _parse_error(
                lineno, "record indices %s do not match position %s" % (ids, expect)
            )
        coords[:, pos] = nums[:3]
        values[:, pos] = nums[3:]
    return FieldData(
        period=period,
        components=components,
        coords=coords.reshape((3,) + dims),
        values=values.reshape((ncomp,) + dims),
    )


def trace_to_field(trace):
    """Boundary trace as a one-level field file payload."""
    n = trace.n
    x = grid_points(n, trace.period)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    coords = np.stack([xx, yy, np.zeros_like(xx)])[:, :, :, None]
    return FieldData(
        period=trace.period,
        components=("u1", "u2", "u3"),
        coords=coords,
        values=trace.v0[:, :, :, None],
    )


def field_to_trace(data):
    """Rebuild a BoundaryTrace from a one-level velocity field file."""
    if data.components != ("u1", "u2", "u3"):
        raise FieldFormatError(
            "trace files need components u1 u2 u3, got %s" % (data.components,)
        )
    if data.values.shape[-1] != 1:
        raise FieldFormatError("trace files hold a single level")
    return BoundaryTrace(data.period, data.values[:, :, :, 0])


def grid_to_field(grid):
    """Half-space samples (velocity and pressure) at a stack of heights."""
    n = grid.velocity.shape[-1]
    x = grid_points(n, grid.period)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    nlev = grid.x3.size
    coords = np.stack(
        [
            np.broadcast_to(xx[:, :, None], (n, n, nlev)),
            np.broadcast_to(yy[:, :, None], (n, n, nlev)),
            np.broadcast_to(grid.x3[None, None, :], (n, n, nlev)),
        ]
    )
    values = np.concatenate(
        [np.moveaxis(grid.velocity, 0, -1), np.moveaxis(grid.pressure, 0, -1)[None]]
    )
    return FieldData(
        period=grid.period,
        components=("u1", "u2", "u3", "p"),
        coords=coords,
        values=values,
    )


def channel_to_field(solution):
    """Channel velocity on the sigma-nodes with surface-following coords."""
    disc = solution.discretization
    x = grid_points(disc.n, disc.period)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    hts = disc.heights()  # (nv, n, n)
    coords = np.stack(
        [
            np.broadcast_to(xx[:, :, None], (disc.n, disc.n, disc.nv)),
            np.broadcast_to(yy[:, :, None], (disc.n, disc.n, disc.nv)),
            np.moveaxis(hts, 0, -1),
        ]
    )
    return FieldData(
        period=disc.period,
        components=("u1", "u2", "u3"),
        coords=coords,
        values=np.moveaxis(solution.u, 1, -1),
    )


def pressure_to_field(solution):
    """Channel pressure on the midcells, same layout as channel_to_field."""
    disc = solution.discretization
    x = grid_points(disc.n, disc.period)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    hts = disc.eta[None] * (disc.sigma_mid[:, None, None] - 1.0)
    coords = np.stack(
        [
            np.broadcast_to(xx[:, :, None], (disc.n, disc.n, disc.J)),
            np.broadcast_to(yy[:, :, None], (disc.n, disc.n, disc.J)),
            np.moveaxis(hts, 0, -1),
        ]
    )
    return FieldData(
        period=disc.period,
        components=("p",),
        coords=coords,
        values=np.moveaxis(solution.p, 0, -1)[None],
    )

import numpy as np
import pytest

from rotstokes import fieldfile as ff
from rotstokes.channel import solve_channel_flat_discrete
from rotstokes.errors import FieldFormatError
from rotstokes.fields import BoundaryTrace


def _sample_field(seed=0, n=8):
    trace = BoundaryTrace.random(n, 2.0 * np.pi, seed=seed)
    return ff.trace_to_field(trace)


def test_write_read_roundtrip_bytes(tmp_path):
    data = _sample_field()
    path = tmp_path / "trace.scfield"
    ff.write_field(path, data)
    first = path.read_bytes()
    back = ff.read_field(path)
    ff.write_field(path, back)
    assert path.read_bytes() == first
    assert back.period == data.period
    assert back.components == data.components
    np.testing.assert_array_equal(back.values, data.values)
    np.testing.assert_array_equal(back.coords, data.coords)


def test_trace_roundtrip_exact(tmp_path):
    trace = BoundaryTrace.random(16, 5.0, seed=3)
    path = tmp_path / "t.scfield"
    ff.write_field(path, ff.trace_to_field(trace))
    back = ff.field_to_trace(ff.read_field(path))
    assert back.period == trace.period
    np.testing.assert_array_equal(back.v0, trace.v0)


def test_channel_roundtrip(tmp_path):
    trace = BoundaryTrace.random(8, 2.0 * np.pi, seed=1)
    sol = solve_channel_flat_discrete(trace.v0, 1.0, 9, period=trace.period)
    for conv in (ff.channel_to_field, ff.pressure_to_field):
        data = conv(sol)
        path = tmp_path / "c.scfield"
        ff.write_field(path, data)
        back = ff.read_field(path)
        np.testing.assert_array_equal(back.values, data.values)
        np.testing.assert_array_equal(back.coords, data.coords)


def test_truncated_file_reports_record_line(tmp_path):
    path = tmp_path / "t.scfield"
    ff.write_field(path, _sample_field())
    lines = path.read_text().splitlines()
    cut = len(lines) - 10
    path.write_text("\n".join(lines[:cut]) + "\n")
    with pytest.raises(FieldFormatError, match="line %d" % (cut + 1)):
        ff.read_field(path)


def test_index_mismatch_names_line(tmp_path):
    path = tmp_path / "t.scfield"
    ff.write_field(path, _sample_field())
    lines = path.read_text().splitlines()
    parts = lines[7].split()
    parts[2] = "7"  # wrong third index for this record position
    lines[7] = " ".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FieldFormatError, match="line 8"):
        ff.read_field(path)


def test_header_errors(tmp_path):
    path = tmp_path / "t.scfield"
    ff.write_field(path, _sample_field())
    text = path.read_text()

    path.write_text(text.replace("SCFIELD 1", "SCFIELD 9", 1))
    with pytest.raises(FieldFormatError, match="line 1"):
        ff.read_field(path)

    path.write_text(text.replace("dims 8 8 1", "dims 8 9 1", 1))
    with pytest.raises(FieldFormatError):
        ff.read_field(path)

    path.write_text(text.replace("period", "perlod", 1))
    with pytest.raises(FieldFormatError, match="line 2"):
        ff.read_field(path)


def test_record_width_checked(tmp_path):
    path = tmp_path / "t.scfield"
    ff.write_field(path, _sample_field())
    lines = path.read_text().splitlines()
    lines[5] = lines[5] + " 1.0"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FieldFormatError, match="line 6"):
        ff.read_field(path)


def test_trace_conversion_guards():
    data = _sample_field()
    bad = ff.FieldData(
        period=data.period,
        components=("a", "b", "c"),
        coords=data.coords,
        values=data.values,
    )
    with pytest.raises(FieldFormatError, match="components"):
        ff.field_to_trace(bad)

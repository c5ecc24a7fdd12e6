import numpy as np
import pytest

from bps_workbench.errors import SnapshotFormatError
from bps_workbench.flow import FlowRecord
from bps_workbench.io_formats import (
    read_history,
    read_potential_table,
    read_profile,
    read_snapshot,
    write_history,
    write_potential_table,
    write_profile,
    write_snapshot,
)
from bps_workbench.potentials import potential_from_g, tabulate
from bps_workbench.radial import Termination


def test_snapshot_is_reproduced_exactly(tmp_path, smooth_state):
    path = str(tmp_path / "state.csv")
    write_snapshot(path, smooth_state, {"lambda2": 10.0, "grid": "ignored", "seed": 3})
    state, header = read_snapshot(path)
    assert state.grid == smooth_state.grid
    assert np.array_equal(state.omega, smooth_state.omega)
    assert np.array_equal(state.a1, smooth_state.a1)
    assert np.array_equal(state.a2, smooth_state.a2)
    assert header["lambda2"] == "10"
    assert header["grid"] == "ignored"
    assert header["seed"] == "3"


def test_snapshot_layout(tmp_path, small_grid):
    from bps_workbench.fields import FieldState

    path = tmp_path / "vacuum.csv"
    write_snapshot(str(path), FieldState.vacuum(small_grid))
    lines = path.read_text().splitlines()
    assert lines[0] == "# grid 21 17 -2 2 -1.5 1.7"
    assert lines[1] == "-2,-1.5,0,0,0,0"
    assert len(lines) == 1 + small_grid.size


def _corrupt(path, line_number, text):
    lines = path.read_text().splitlines()
    lines[line_number - 1] = text
    path.write_text("\n".join(lines) + "\n")


@pytest.mark.parametrize(
    "line_number, text, message",
    [
        (3, "-2,-1.5,0,0,0", "line 3: expected 6"),
        (4, "-1.6,-1.5,0,zero,0,0", "line 4: not a number"),
        (5, "0.5,-1.5,0,0,0,0", "line 5: node (0.5, -1.5) does not match"),
        (2, "# grid 21 17 -2 2", "line 2: grid line"),
    ],
)
def test_snapshot_errors_carry_line_numbers(
    tmp_path, smooth_state, line_number, text, message
):
    path = tmp_path / "state.csv"
    write_snapshot(str(path), smooth_state, {"note": "x"})
    _corrupt(path, line_number, text)
    with pytest.raises(SnapshotFormatError) as info:
        read_snapshot(str(path))
    assert message in str(info.value)


def test_truncated_snapshot(tmp_path, smooth_state):
    path = tmp_path / "state.csv"
    write_snapshot(str(path), smooth_state)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(SnapshotFormatError, match="expected 357 node rows"):
        read_snapshot(str(path))


def test_profile_file(tmp_path, acceptance_profile, acceptance_params):
    path = str(tmp_path / "profile.csv")
    write_profile(path, acceptance_profile, acceptance_params, "power:2", {"seed": 1})
    profile, header = read_profile(path)
    assert profile.termination is Termination.VACUUM
    assert profile.n == 1
    assert profile.branch == 1
    assert np.array_equal(profile.r, acceptance_profile.r)
    assert np.array_equal(profile.u, acceptance_profile.u)
    assert np.array_equal(profile.a, acceptance_profile.a)
    assert header["family"] == "power:2"
    assert header["lambda2"] == "10"


def test_profile_without_radial_line(tmp_path):
    path = tmp_path / "profile.csv"
    path.write_text("0,2,0\n0.1,1.9,-0.01\n")
    with pytest.raises(SnapshotFormatError, match="radial"):
        read_profile(str(path))


def test_history_file(tmp_path):
    path = str(tmp_path / "history.csv")
    records = [FlowRecord(0, 7.5, 0.25), FlowRecord(1, 7.0, 0.125)]
    write_history(path, records, {"command": "flow"})
    assert read_history(path) == records


def test_potential_table_file(tmp_path, power2, acceptance_params):
    path = str(tmp_path / "potential.csv")
    pot = potential_from_g(power2, acceptance_params)
    table = tabulate(pot, power2, acceptance_params)
    write_potential_table(path, table, {"g1": "power:2"})
    u, v = read_potential_table(path)
    assert np.array_equal(u, table.u)
    assert np.array_equal(v, table.v)

import csv
import json

import numpy as np
import pytest

from hubbard_ring import io
from hubbard_ring.evolution import TimeGrid
from hubbard_ring.hamiltonian import ModelParams
from hubbard_ring.scenarios import InitialStateSpec, run_alpha_scan


@pytest.fixture(scope="module")
def series(sim):
    return sim.run(ModelParams(), InitialStateSpec(), TimeGrid(5.0, 0.05))


def test_header():
    assert io.timeseries_header(2) == ["t", "J_up", "J_dn", "Q_up", "Q_dn", "n_1", "n_2", "nup_1", "nup_2",
                                       "ndn_1", "ndn_2"]


def test_fmt():
    assert io.fmt(0.0) == "0" and io.fmt(-0.0) == "0"
    assert io.fmt(1 / 3) == "0.333333333333"
    assert io.fmt(1e-20) == "1e-20"


def test_csv_first_row_and_shape(series, tmp_path):
    (path, _) = io.write_timeseries(series, tmp_path / "run", ("csv", "json"))
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == io.timeseries_header(8)
    assert len(rows) == 1 + len(series)
    first = dict(zip(rows[0], rows[1]))
    assert first["t"] == "0" and first["Q_up"] == "0" and first["Q_dn"] == "0"
    assert [first[f"nup_{i}"] for i in range(1, 9)] == ["0.5", "0", "0", "0.5", "0.5", "0", "0", "0.5"]
    assert [first[f"ndn_{i}"] for i in range(1, 9)] == ["0", "0", "0", "0.5", "0.5", "0", "0", "0"]


def test_csv_round_trip(series, tmp_path):
    (path,) = io.write_timeseries(series, tmp_path / "run")
    back = io.read_timeseries_csv(path)
    for name, ref in (("t", series.t), ("J_up", series.J_up), ("Q_dn", series.Q_dn), ("nup_4", series.n_up[:, 3])):
        np.testing.assert_allclose(back[name], ref, rtol=1e-11, atol=1e-300)


def test_json_mirrors_csv(series, tmp_path):
    csv_path, json_path = io.write_timeseries(series, tmp_path / "run", ("csv", "json"))
    records = json.loads(json_path.read_text())
    back = io.read_timeseries_csv(csv_path)
    assert list(records[0]) == io.timeseries_header(8)
    assert [r["Q_up"] for r in records] == list(back["Q_up"])


def test_symmetric_run_has_vanishing_charge_columns(sim, tmp_path):
    s = sim.run(ModelParams().with_alpha(1.0), InitialStateSpec(), TimeGrid())
    (path,) = io.write_timeseries(s, tmp_path / "sym")
    back = io.read_timeseries_csv(path)
    assert np.abs(back["Q_up"]).max() < 1e-9 and np.abs(back["Q_dn"]).max() < 1e-9


def test_rerun_is_byte_identical(sim, tmp_path):
    a = sim.run(ModelParams(), InitialStateSpec(), TimeGrid(5.0, 0.05))
    io.write_timeseries(a, tmp_path / "a")
    io.write_timeseries(a, tmp_path / "b")
    b = sim.run(ModelParams(), InitialStateSpec(), TimeGrid(5.0, 0.05))
    io.write_timeseries(b, tmp_path / "c")
    ref = (tmp_path / "a.csv").read_bytes()
    assert (tmp_path / "b.csv").read_bytes() == ref == (tmp_path / "c.csv").read_bytes()
    assert not list(tmp_path.glob("*.tmp"))


def test_summary(sim, tmp_path):
    scan = run_alpha_scan((0.5, 1.0), "A", grid=TimeGrid(40.0, 0.05), workers=1, simulator=sim)
    (path, jpath) = io.write_summary(scan, tmp_path / "sum", ("csv", "json"))
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["alpha", "Qbar_up", "Qbar_dn", "counterprop_flag"]
    assert [r[0] for r in rows[1:]] == ["0.5", "1"]
    assert [r[3] for r in rows[1:]] == ["1", "0"]
    assert json.loads(jpath.read_text())[0]["counterprop_flag"] == 1


def test_unknown_format_rejected(series, tmp_path):
    with pytest.raises(ValueError):
        io.write_timeseries(series, tmp_path / "x", ("xml",))


def test_unwritable_destination(series, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError):
        io.write_timeseries(series, blocker / "run")

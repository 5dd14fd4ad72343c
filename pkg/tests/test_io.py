import json
import os

import numpy as np
import pytest

from tomoprob import io as tio
from tomoprob.errors import InvalidParameter
from tomoprob.homodyne import sample_quadratures
from tomoprob.statekit import StateSpec, build_state
from tomoprob.tomography import default_thetas, optical_tomogram

from conftest import pipeline


def _write(path, text):
    tio.atomic_write(path, text)
    return path


def test_density_round_trip(tmp_path):
    rho = build_state(StateSpec.cat(1.0 + 0.5j, -1))
    back = tio.read_density(_write(tmp_path / "d.csv", tio.density_csv(rho)))
    assert np.array_equal(back.elements, rho.elements)


def test_wigner_round_trip(tmp_path):
    _, w, _ = pipeline(StateSpec.fock(1))
    back = tio.read_wigner(_write(tmp_path / "w.csv", tio.wigner_csv(w)))
    assert back.grid == w.grid
    assert np.array_equal(back.values, w.values)


def test_tomogram_round_trip(tmp_path):
    _, w, _ = pipeline(StateSpec.coherent(1.0 + 1.0j))
    opt = optical_tomogram(w, default_thetas(8))
    back = tio.read_tomogram(_write(tmp_path / "t.csv", tio.tomogram_csv(opt)))
    assert np.array_equal(back.x, opt.x) and np.array_equal(back.thetas, opt.thetas)
    assert np.array_equal(back.values, opt.values)


def test_dataset_round_trip_with_sidecar(tmp_path, vacuum):
    data = sample_quadratures(vacuum[2], default_thetas(4), 200, seed=3, source={"state": {"kind": "fock", "n": 0}})
    path = _write(tmp_path / "ds.csv", tio.dataset_csv(data))
    _write(tio.sidecar_path(path), tio.json_text(tio.dataset_json(data)))
    back = tio.read_dataset(path)
    assert np.array_equal(back.x, data.x) and np.array_equal(back.theta, data.theta)
    assert back.seed == 3 and back.source == data.source
    meta = json.loads(tio.sidecar_path(path).read_text())
    assert [n for _, n in meta["counts"]] == [200] * 4


def test_headers_and_kind_detection(tmp_path):
    rho = build_state(StateSpec.fock(0))
    path = _write(tmp_path / "d.csv", tio.density_csv(rho))
    assert path.read_text().splitlines()[0] == "m,n,re,im"
    assert tio.csv_kind(path) == "density"
    with pytest.raises(InvalidParameter):
        tio.read_tomogram(path)
    bad = _write(tmp_path / "bad.csv", "a,b\n1,2\n")
    with pytest.raises(InvalidParameter):
        tio.csv_kind(bad)


def test_incomplete_grid_is_rejected(tmp_path):
    path = _write(tmp_path / "w.csv", "q,p,w\n0,0,1\n0,1,1\n1,0,1\n")
    with pytest.raises(InvalidParameter):
        tio.read_wigner(path)


def test_output_is_byte_identical():
    _, w, opt = pipeline(StateSpec.squeezed_vacuum(0.5))
    assert tio.tomogram_csv(opt) == tio.tomogram_csv(opt)
    assert tio.wigner_csv(w) == tio.wigner_csv(w)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    tio.write_many({tmp_path / "a.txt": "x\n", tmp_path / "sub" / "b.txt": "y\n"})
    names = sorted(p.name for p in tmp_path.rglob("*"))
    assert names == ["a.txt", "b.txt", "sub"]


def test_failed_write_keeps_old_file(tmp_path, monkeypatch):
    target = _write(tmp_path / "keep.txt", "old\n")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        tio.atomic_write(target, "new\n")
    assert target.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["keep.txt"]

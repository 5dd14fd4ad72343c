"""
CSV and JSON artifacts.

Column contracts
----------------
density     ``m,n,re,im``   one row per matrix element, row-major
wigner      ``q,p,w``       q outer, p inner
tomogram    ``theta,X,w``   theta outer, X inner
dataset     ``theta,X``     one row per sample; sidecar JSON ``{seed, source, counts}``

Numbers are written with ``%.17g`` so files round-trip exactly and are
byte-identical across reruns. Every file is written to a temporary name in
the target directory and moved into place with :func:`os.replace`.
"""

from __future__ import annotations

import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InvalidParameter
from .homodyne import QuadratureDataset
from .phasespace import GridSpec, WignerGrid
from .statekit import FockDensityMatrix
from .tomography import OpticalTomogram

HEADERS = {
    "density": "m,n,re,im",
    "wigner": "q,p,w",
    "tomogram": "theta,X,w",
    "dataset": "theta,X",
}


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_many(artifacts: dict) -> list[str]:
    """Write ``{path: text}``; all texts are rendered before the first write."""
    for path, text in artifacts.items():
        atomic_write(path, text)
    return [str(p) for p in artifacts]


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _table(header: str, columns) -> str:
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack(columns), fmt="%.17g", delimiter=",", header=header, comments="")
    return buf.getvalue()


def density_csv(rho: FockDensityMatrix) -> str:
    d = rho.dim
    m, n = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    e = rho.elements
    return _table(HEADERS["density"], [m.ravel(), n.ravel(), e.real.ravel(), e.imag.ravel()])


def wigner_csv(w: WignerGrid) -> str:
    Q, P = np.meshgrid(w.grid.q, w.grid.p, indexing="ij")
    return _table(HEADERS["wigner"], [Q.ravel(), P.ravel(), w.values.ravel()])


def wigner_json(w: WignerGrid) -> dict:
    return {
        "grid": w.grid.to_json(),
        "normalization": w.normalization(),
        "purity": w.overlap_purity(),
        "imag_residue": w.imag_residue,
    }


def tomogram_csv(opt: OpticalTomogram) -> str:
    T, X = np.meshgrid(opt.thetas, opt.x, indexing="ij")
    return _table(HEADERS["tomogram"], [T.ravel(), X.ravel(), opt.values.ravel()])


def tomogram_json(opt: OpticalTomogram) -> dict:
    return {
        "n_theta": int(opt.thetas.size),
        "x_min": float(opt.x[0]),
        "x_max": float(opt.x[-1]),
        "n_x": int(opt.x.size),
        "clipped_mass": opt.clipped_mass,
        "max_mass_error": float(np.max(np.abs(opt.masses() - 1.0))),
    }


def dataset_csv(data: QuadratureDataset) -> str:
    return _table(HEADERS["dataset"], [data.theta, data.x])


def dataset_json(data: QuadratureDataset) -> dict:
    return {
        "seed": data.seed,
        "source": data.source,
        "counts": [[th, n] for th, n in data.counts().items()],
    }


# ------------------------------------------------------------------- reading


def csv_kind(path) -> str:
    """Name of the column contract matching the file's header line."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().replace(" ", "")
    for kind, h in HEADERS.items():
        if header == h:
            return kind
    raise InvalidParameter(f"{path}: unrecognised CSV header {header!r}")


def _load(path, kind: str) -> np.ndarray:
    if csv_kind(path) != kind:
        raise InvalidParameter(f"{path} is not a {kind} CSV")
    try:
        arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise InvalidParameter(f"{path}: {exc}") from None
    if arr.shape[1] != len(HEADERS[kind].split(",")):
        raise InvalidParameter(f"{path}: expected columns {HEADERS[kind]}")
    return arr


def _grid_axes(a: np.ndarray, b: np.ndarray, path) -> tuple[np.ndarray, np.ndarray]:
    ua, ub = np.unique(a), np.unique(b)
    if ua.size * ub.size != a.size:
        raise InvalidParameter(f"{path}: rows do not form a complete grid")
    aa, bb = np.meshgrid(ua, ub, indexing="ij")
    if not (np.array_equal(aa.ravel(), a) and np.array_equal(bb.ravel(), b)):
        raise InvalidParameter(f"{path}: rows are not in grid order")
    return ua, ub


def read_density(path) -> FockDensityMatrix:
    arr = _load(path, "density")
    d = int(round(np.sqrt(arr.shape[0])))
    if d * d != arr.shape[0]:
        raise InvalidParameter(f"{path}: row count is not a square")
    el = np.zeros((d, d), dtype=complex)
    el[arr[:, 0].astype(int), arr[:, 1].astype(int)] = arr[:, 2] + 1j * arr[:, 3]
    return FockDensityMatrix(el, label=Path(path).stem)


def read_wigner(path) -> WignerGrid:
    arr = _load(path, "wigner")
    q, p = _grid_axes(arr[:, 0], arr[:, 1], path)
    g = GridSpec(float(q[0]), float(q[-1]), float(p[0]), float(p[-1]), q.size, p.size)
    return WignerGrid(g, arr[:, 2].reshape(q.size, p.size))


def read_tomogram(path, norm_tol: float | None = 1e-6) -> OpticalTomogram:
    arr = _load(path, "tomogram")
    th, x = _grid_axes(arr[:, 0], arr[:, 1], path)
    return OpticalTomogram(x, th, arr[:, 2].reshape(th.size, x.size), norm_tol=norm_tol)


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def read_dataset(path) -> QuadratureDataset:
    arr = _load(path, "dataset")
    side = sidecar_path(path)
    seed, source = None, {"kind": "external", "path": str(path)}
    if side.exists():
        meta = json.loads(side.read_text(encoding="utf-8"))
        seed = meta.get("seed")
        source = meta.get("source", source)
    return QuadratureDataset(arr[:, 0], arr[:, 1], seed, source)

"""
Command-line front end.

Exit status: 0 when the command succeeds and every check it runs is
satisfied, 1 when some check fails, 2 on invalid input. Errors are
reported on stderr as one JSON object ``{"error": ..., "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as tio
from .errors import InvalidParameter, TomoError
from .evolution import (
    QuadraticHamiltonian,
    classical_residual_optical,
    propagate_quadratic,
    quantum_residual,
)
from .homodyne import checked_inequalities, clip_dataset, estimate_tomogram, sample_quadratures
from .inequalities import (
    CutPoints,
    four_functionals,
    four_probs,
    subadditivity_check,
    wigner_subadditivity_check,
)
from .phasespace import GridSpec, rho_from_wigner, suggest_grid, wigner_from_rho
from .statekit import ClassicalDensity, StateSpec, build_state, purity, recommended_cutoff
from .statistics import ANALYTIC_TOL, entropic_check, heisenberg_check
from .tomography import classical_tomogram, default_thetas, default_x_grid, optical_tomogram, rho_from_symplectic

COMMANDS = ("state", "wigner", "tomogram", "check", "ineq", "evolve", "simulate", "roundtrip")
RESIDUAL_LIMIT = 1e-2
ROUNDTRIP_LIMITS = {"wigner": 1e-3, "tomogram": 5e-3}


@dataclass
class RunConfig:
    command: str
    out: Path = Path("out")
    seed: int = 0
    tol: float | None = None
    grid: GridSpec | None = None
    options: dict = field(default_factory=dict)


@dataclass
class Outcome:
    artifacts: dict = field(default_factory=dict)
    stdout: list[str] = field(default_factory=list)
    ok: bool = True


# --------------------------------------------------------------------- inputs


def _read_json_arg(text: str) -> dict:
    """Inline JSON if ``text`` starts with ``{``, else a path to a JSON file."""
    try:
        if text.lstrip().startswith("{"):
            return json.loads(text)
        return json.loads(Path(text).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"cannot parse JSON from {text!r}: {exc}") from None


def load_source(text: str):
    obj = _read_json_arg(text)
    if isinstance(obj, dict) and obj.get("kind") == "gaussian":
        return ClassicalDensity.from_json(obj)
    return StateSpec.from_json(obj)


def _need_state(cfg: RunConfig) -> StateSpec:
    src = cfg.options.get("state")
    if src is None:
        raise InvalidParameter(f"'{cfg.command}' needs --state")
    if not isinstance(src, StateSpec):
        raise InvalidParameter(f"'{cfg.command}' needs a quantum state, not a classical density")
    return src


def _float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InvalidParameter(f"expected comma-separated numbers, got {text!r}") from None


def _wigner(cfg: RunConfig, rho):
    return wigner_from_rho(rho, cfg.grid or suggest_grid(rho))


def _tomogram_for(cfg: RunConfig, w):
    n = cfg.options.get("thetas", 64)
    step = cfg.options.get("x_step", 1 / 16)
    g = w.grid
    extent = max(8.0, math.ceil(max(abs(g.q_min), g.q_max, abs(g.p_min), g.p_max)))
    return optical_tomogram(w, default_thetas(n), default_x_grid(extent, step), method=cfg.options.get("method", "fourier"))


def _lines(reports) -> list[str]:
    return [json.dumps(r.to_json()) for r in reports]


# ------------------------------------------------------------------- commands


def cmd_state(cfg: RunConfig) -> Outcome:
    spec = _need_state(cfg)
    rho = build_state(spec)
    summary = {
        "state": spec.to_json(),
        "label": spec.label,
        "cutoff": rho.dim,
        "recommended_cutoff": recommended_cutoff(spec),
        "trace": rho.trace,
        "purity": purity(rho),
        "min_eigenvalue": rho.min_eigenvalue,
    }
    return Outcome(
        {cfg.out / "density.csv": tio.density_csv(rho), cfg.out / "state.json": tio.json_text(summary)},
        [json.dumps(summary)],
    )


def cmd_wigner(cfg: RunConfig) -> Outcome:
    spec = _need_state(cfg)
    w = _wigner(cfg, build_state(spec))
    meta = {"state": spec.to_json(), **tio.wigner_json(w)}
    return Outcome(
        {cfg.out / "wigner.csv": tio.wigner_csv(w), cfg.out / "wigner.json": tio.json_text(meta)},
        [json.dumps(meta)],
    )


def cmd_tomogram(cfg: RunConfig) -> Outcome:
    src = cfg.options.get("state")
    if isinstance(src, ClassicalDensity):
        opt = classical_tomogram(src, default_thetas(cfg.options.get("thetas", 64)))
        meta = {"state": src.to_json()}
    else:
        spec = _need_state(cfg)
        opt = _tomogram_for(cfg, _wigner(cfg, build_state(spec)))
        meta = {"state": spec.to_json()}
    meta.update(tio.tomogram_json(opt))
    return Outcome(
        {cfg.out / "tomogram.csv": tio.tomogram_csv(opt), cfg.out / "tomogram.json": tio.json_text(meta)},
        [json.dumps(meta)],
    )


def _analytic_tomogram(cfg: RunConfig):
    if cfg.options.get("tomogram"):
        return tio.read_tomogram(cfg.options["tomogram"])
    spec = _need_state(cfg)
    return _tomogram_for(cfg, _wigner(cfg, build_state(spec)))


def cmd_check(cfg: RunConfig) -> Outcome:
    opt = _analytic_tomogram(cfg)
    tol = ANALYTIC_TOL if cfg.tol is None else cfg.tol
    th = cfg.options.get("theta", 0.0)
    reports = [heisenberg_check(opt, th, tol), entropic_check(opt, th, tol)]
    text = tio.json_text([r.to_json() for r in reports])
    return Outcome({cfg.out / "check.json": text}, [text.rstrip("\n")], all(r.satisfied for r in reports))


def cmd_ineq(cfg: RunConfig) -> Outcome:
    th = cfg.options.get("theta", 0.0)
    cuts = [CutPoints.parse(c) for c in cfg.options.get("cuts") or ["-1,0,1"]]
    reports = []
    path = cfg.options.get("tomogram")
    kind = tio.csv_kind(path) if path else None
    if kind == "dataset":
        est = estimate_tomogram(tio.read_dataset(path))
        for c in cuts:
            reports += checked_inequalities(est, c, th)
    elif kind == "tomogram" or kind is None:
        opt = _analytic_tomogram(cfg)
        tol = ANALYTIC_TOL if cfg.tol is None else cfg.tol
        sub_tol = 1e-12 if cfg.tol is None else cfg.tol
        for c in cuts:
            r = subadditivity_check(four_probs(opt, th, c), sub_tol)
            r.details.update({"theta": th, "cuts": list(c.as_tuple())})
            reports.append(r)
        reports += [heisenberg_check(opt, th, tol), entropic_check(opt, th, tol)]
        if kind is None:
            spec = _need_state(cfg)
            if spec.is_pure:
                w = _wigner(cfg, build_state(spec))
                for c in cuts:
                    r = wigner_subadditivity_check(four_functionals(w, c), sub_tol)
                    r.details["cuts"] = list(c.as_tuple())
                    reports.append(r)
    else:
        raise InvalidParameter(f"'ineq' cannot read a {kind} CSV")
    lines = _lines(reports)
    return Outcome({cfg.out / "ineq.jsonl": "\n".join(lines) + "\n"}, lines, all(r.satisfied for r in reports))


def cmd_evolve(cfg: RunConfig) -> Outcome:
    src = cfg.options.get("state")
    if src is None:
        raise InvalidParameter("'evolve' needs --state")
    h = cfg.options["hamiltonian"]
    times = cfg.options.get("times") or [0.0]
    dt = cfg.options.get("dt", 0.01)
    thetas = default_thetas(cfg.options.get("thetas", 64))
    state = src if isinstance(src, ClassicalDensity) else build_state(src)
    grid = None
    if not isinstance(state, ClassicalDensity):
        grid = cfg.grid or suggest_grid(state)
    traj = propagate_quadratic(state, h, times, thetas=thetas, grid=grid)
    residual = classical_residual_optical if isinstance(state, ClassicalDensity) else quantum_residual
    limit = RESIDUAL_LIMIT if cfg.tol is None else cfg.tol
    rows = []
    for t in times:
        local = propagate_quadratic(state, h, [t - dt, t, t + dt], thetas=thetas, grid=grid)
        rows.append({"time": t, "residual": residual(local, h)})
    report = {
        "state": src.to_json(),
        "hamiltonian": h.to_json(),
        "dt": dt,
        "residual_limit": limit,
        "normalization_drift": traj.normalization_drift(),
        "residuals": rows,
        "satisfied": all(r["residual"] < limit for r in rows),
    }
    arts = {cfg.out / f"frame_{i:03d}.csv": tio.tomogram_csv(f) for i, f in enumerate(traj.frames)}
    arts[cfg.out / "evolve.json"] = tio.json_text(report)
    return Outcome(arts, [json.dumps(report)], report["satisfied"])


def cmd_simulate(cfg: RunConfig) -> Outcome:
    spec = _need_state(cfg)
    w = _wigner(cfg, build_state(spec))
    phases = default_thetas(cfg.options.get("phases", 16))
    opt = _tomogram_for(cfg, w)
    sampled = optical_tomogram(w, phases, opt.x)
    data = sample_quadratures(sampled, phases, cfg.options.get("samples", 100000), cfg.seed, {"state": spec.to_json()})
    clip = cfg.options.get("clip_x")
    if clip:
        lo, hi = clip
        data = clip_dataset(data, lo, hi)
    meta = tio.dataset_json(data)
    return Outcome(
        {cfg.out / "dataset.csv": tio.dataset_csv(data), cfg.out / "dataset.json": tio.json_text(meta)},
        [json.dumps({"samples": int(data.x.size), "phases": int(phases.size), "seed": cfg.seed})],
    )


def cmd_roundtrip(cfg: RunConfig) -> Outcome:
    spec = _need_state(cfg)
    rho = build_state(spec)
    w = _wigner(cfg, rho)
    back_w = rho_from_wigner(w, rho.dim)
    opt = _tomogram_for(cfg, w)
    back_t = rho_from_symplectic(opt, rho.dim)
    err_w = float(np.linalg.norm(back_w.elements - rho.elements))
    err_t = float(np.linalg.norm(back_t.elements - rho.elements))
    report = {
        "state": spec.to_json(),
        "cutoff": rho.dim,
        "grid": str(w.grid),
        "wigner_error": err_w,
        "tomogram_error": err_t,
        "limits": ROUNDTRIP_LIMITS,
        "satisfied": err_w < ROUNDTRIP_LIMITS["wigner"] and err_t < ROUNDTRIP_LIMITS["tomogram"],
    }
    return Outcome({cfg.out / "roundtrip.json": tio.json_text(report)}, [json.dumps(report)], report["satisfied"])


HANDLERS = {
    "state": cmd_state,
    "wigner": cmd_wigner,
    "tomogram": cmd_tomogram,
    "check": cmd_check,
    "ineq": cmd_ineq,
    "evolve": cmd_evolve,
    "simulate": cmd_simulate,
    "roundtrip": cmd_roundtrip,
}


# ----------------------------------------------------------------- arguments


class _Parser(argparse.ArgumentParser):
    """Argument errors become :class:`InvalidParameter` so they are
    reported as JSON like every other input error."""

    def error(self, message):
        raise InvalidParameter(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    common.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    common.add_argument("--grid", default=None, help="phase-space grid 'qmin,qmax,pmin,pmax,nq,np'")

    parser = _Parser(prog="tomoprob", description="Phase-space tomography toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("state", "build a density matrix")
    p.add_argument("--spec", "--state", dest="state", required=True, help="state JSON file or inline JSON")

    for name, text in (("wigner", "sample the Wigner function"), ("roundtrip", "reconstruction errors")):
        p = add(name, text)
        p.add_argument("--state", required=True)
        p.add_argument("--thetas", type=int, default=64)

    p = add("tomogram", "optical tomogram of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--thetas", type=int, default=64)
    p.add_argument("--x-step", type=float, default=1 / 16)
    p.add_argument("--method", choices=("fourier", "line"), default="fourier")

    p = add("check", "uncertainty checks")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state")
    src.add_argument("--tomogram")
    p.add_argument("--theta", type=float, default=0.0)

    p = add("ineq", "four-cut inequality checks")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state")
    src.add_argument("--tomogram", help="tomogram or dataset CSV (detected from the header)")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--cuts", action="append", help="x1,x2,x3; repeatable (default -1,0,1)")

    p = add("evolve", "propagate under a quadratic Hamiltonian")
    p.add_argument("--state", required=True, help="state JSON or a gaussian density JSON")
    ham = p.add_mutually_exclusive_group(required=True)
    ham.add_argument("--free", action="store_true")
    ham.add_argument("--harmonic", type=float, metavar="OMEGA")
    p.add_argument("--times", default="0", help="comma-separated times")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--thetas", type=int, default=64)

    p = add("simulate", "simulated homodyne samples")
    p.add_argument("--state", required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--phases", type=int, default=16)
    p.add_argument("--clip-x", default=None, metavar="LO,HI")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    """Parse and validate every input before any computation."""
    opts: dict = {}
    if getattr(ns, "state", None):
        opts["state"] = load_source(ns.state)
    if getattr(ns, "tomogram", None):
        path = Path(ns.tomogram)
        if not path.is_file():
            raise InvalidParameter(f"no such file: {path}")
        tio.csv_kind(path)
        opts["tomogram"] = str(path)
    for key in ("thetas", "x_step", "method", "theta", "dt", "samples", "phases"):
        if getattr(ns, key, None) is not None:
            opts[key] = getattr(ns, key)
    if getattr(ns, "cuts", None):
        for c in ns.cuts:
            CutPoints.parse(c)
        opts["cuts"] = ns.cuts
    if ns.command == "evolve":
        opts["times"] = _float_list(ns.times)
        opts["hamiltonian"] = QuadraticHamiltonian.free() if ns.free else QuadraticHamiltonian.harmonic(ns.harmonic)
    if getattr(ns, "clip_x", None):
        lim = _float_list(ns.clip_x)
        if len(lim) != 2 or lim[0] >= lim[1]:
            raise InvalidParameter("--clip-x needs LO,HI with LO < HI")
        opts["clip_x"] = lim
    if opts.get("thetas") is not None and opts["thetas"] < 4:
        raise InvalidParameter("--thetas must be at least 4")
    if opts.get("samples") is not None and opts["samples"] < 1:
        raise InvalidParameter("--samples must be positive")
    grid = GridSpec.parse(ns.grid) if ns.grid else None
    return RunConfig(ns.command, Path(ns.out), ns.seed, ns.tol, grid, opts)


def run(cfg: RunConfig) -> int:
    outcome = HANDLERS[cfg.command](cfg)
    tio.write_many(outcome.artifacts)
    for line in outcome.stdout:
        print(line)
    return 0 if outcome.ok else 1


def _fail(exc: Exception) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return 2


NUMERIC_FLAGS = ("--cuts", "--clip-x", "--times", "--theta", "--harmonic", "--tol", "--grid")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--cuts -1,0,1`` into ``--cuts=-1,0,1`` so argparse does not
    read the value as an option."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok in NUMERIC_FLAGS and nxt is not None and re.match(r"-\.?\d", nxt):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
        cfg = config_from_args(ns)
        return run(cfg)
    except (TomoError, OSError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())

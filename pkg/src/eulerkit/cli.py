"""Command-line front end.

Subcommands:
    run        -- advance one problem and emit field CSVs plus report.json
    converge   -- uniform-refinement ladder with the consolidated L1 error
    wavespeed  -- `wavespeed probe`: inspect the estimate for one state pair
    validate   -- admissibility report for an emitted fields CSV

Configuration comes from an optional JSON file (flat keys, see RunConfig);
command-line flags override file values.  Exit codes: 0 ok, 2 configuration
error, 3 invariant violation, 4 EOS failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import _csvio, problems, validate as validate_mod, wavespeed
from .eos import EosError, make_model
from .scheme import InvariantViolationError, conserved_from_primitive
from .timeloop import run_to_time

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_EOS = 4


@dataclass
class RunConfig:
    problem: str = "smooth_wave_macaw"
    eos: dict = dc_field(default_factory=dict)
    cells: object = None          # int, or [nx, ny]
    cfl: float = 0.9
    t_final: float | None = None
    outdir: str = "out"
    dump_every: int = 0           # 0: initial + final only
    trace_every: int = 1
    enforce: bool = True
    seed: int = 0
    refinements: int = 6

    def validated(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl!r}")
        cells = self.cells
        if cells is not None:
            values = cells if isinstance(cells, (list, tuple)) else [cells]
            if any(int(c) < 2 for c in values):
                raise ConfigError(f"cells must be >= 2, got {cells!r}")
        if self.problem == "smooth_wave":
            self.problem = f"smooth_wave_{self.eos.get('kind', 'macaw')}"
        if self.problem not in problems.PROBLEM_NAMES:
            raise ConfigError(
                f"unknown problem {self.problem!r}; known: {', '.join(problems.PROBLEM_NAMES)} "
                f"(smooth_wave picks its EOS from --eos)"
            )
        return self


class ConfigError(ValueError):
    pass


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        for key, val in raw.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, val)
    for key in ("problem", "cells", "cfl", "t_final", "outdir", "dump_every",
                "trace_every", "seed", "refinements"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "eos", None):
        text = args.eos.strip()
        if text.startswith("{"):
            try:
                cfg.eos = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--eos expects a kind name or JSON object: {exc}") from exc
        else:
            cfg.eos = {"kind": text}
    if getattr(args, "no_enforce", False):
        cfg.enforce = False
    return cfg.validated()


def _resolve(cfg: RunConfig):
    spec = problems.get_problem(cfg.problem)
    if cfg.eos:
        kind = cfg.eos.get("kind", spec.model.kind)
        if kind != spec.model.kind:
            raise ConfigError(
                f"problem {cfg.problem!r} is defined for EOS {spec.model.kind!r}, not {kind!r}"
            )
        spec.model = make_model(kind, **{k: v for k, v in cfg.eos.items() if k != "kind"})
    if cfg.t_final is not None:
        spec.t_final = float(cfg.t_final)
    return spec


def _fmt_t(t: float) -> str:
    return f"{t:.9g}"


def _run_once(spec, cfg: RunConfig, outdir: Path, emit=print):
    mesh = spec.make_mesh(tuple(cfg.cells) if isinstance(cfg.cells, (list, tuple)) else cfg.cells)
    bc = spec.make_bc()
    field0 = spec.initial_field(mesh)
    outdir.mkdir(parents=True, exist_ok=True)
    _csvio.write_field_csv(outdir / f"fields_{_fmt_t(field0.t)}.csv", spec.model, field0, mesh, spec.name)

    observers = []
    if cfg.dump_every > 0:
        def dump(step, fld):
            if step % cfg.dump_every == 0:
                _csvio.write_field_csv(outdir / f"fields_{_fmt_t(fld.t)}.csv", spec.model, fld, mesh, spec.name)
        observers.append(dump)

    final, report = run_to_time(
        spec.model, field0, mesh, bc, spec.t_final, cfl=cfg.cfl,
        observers=observers, trace_every=cfg.trace_every, enforce=cfg.enforce,
    )
    _csvio.write_field_csv(outdir / f"fields_{_fmt_t(final.t)}.csv", spec.model, final, mesh, spec.name)

    adm0 = validate_mod.check_admissible(spec.model, field0)
    adm1 = validate_mod.check_admissible(spec.model, final)
    result = {
        "config": {**asdict(cfg), "cells": list(mesh.shape)},
        "problem": spec.name,
        "eos": spec.model.params_dict(),
        "run": report.to_dict(),
        "admissibility": {"initial": adm0.to_dict(), "final": adm1.to_dict()},
    }

    if spec.exact is not None:
        err = problems.delta1(final, spec.exact_field(mesh, final.t))
        result["delta1"] = err
        emit(f"delta1({final.t:.6g}) = {err:.8g} at {mesh.shape[0]} cells")

    if spec.name.startswith("entropy_test"):
        sigma0 = float(np.min(np.asarray(spec.model.sigma_extended(1.0 / field0.rho, field0.specific_internal_energy()))))
        # dense enough that linear interpolation of the curve stays well
        # below the 1e-6 on-curve verification tolerance
        taus = np.geomspace(0.9 / np.max(final.rho), 1.1 / np.min(final.rho), 20_000)
        curve = np.asarray(spec.model.isentrope_energy(taus, sigma0))
        with open(outdir / "isentrope_curve.csv", "w") as fh:
            fh.write(f"# problem: {spec.name}\n# sigma: {sigma0:.17g}\n")
            fh.write("tau,e\n")
            for tv, ev in zip(taus, curve):
                fh.write(f"{tv:.17g},{ev:.17g}\n")

    (outdir / "report.json").write_text(json.dumps(result, indent=2))
    emit(json.dumps(result["config"], indent=2))
    if not (adm1.ok and adm0.ok) and cfg.enforce:
        raise InvariantViolationError("admissibility report not ok")
    return final, report, result


def cmd_run(args) -> int:
    cfg = _load_config(args)
    spec = _resolve(cfg)
    _run_once(spec, cfg, Path(cfg.outdir))
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _load_config(args)
    spec = _resolve(cfg)
    if spec.exact is None:
        raise ConfigError(f"problem {cfg.problem!r} has no exact solution to converge against")
    base = int(cfg.cells) if cfg.cells else spec.default_cells[0]
    rows = []
    prev = None
    for level in range(cfg.refinements + 1):
        cells = base * (2**level)
        mesh = spec.make_mesh((cells,))
        field0 = spec.initial_field(mesh)
        final, _ = run_to_time(spec.model, field0, mesh, spec.make_bc(), spec.t_final,
                               cfl=cfg.cfl, trace_every=0, enforce=cfg.enforce)
        err = problems.delta1(final, spec.exact_field(mesh, final.t))
        rate = math.log2(prev / err) if prev else None
        rows.append({"cells": cells, "delta1": err, "rate": rate})
        prev = err
        print(f"{cells:>8d}  {err:.6e}  {'--' if rate is None else f'{rate:.2f}'}")
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "convergence.json").write_text(json.dumps({"problem": spec.name, "table": rows}, indent=2))
    return EXIT_OK


def _parse_primitive(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) < 3:
        raise ConfigError(f"expected rho,v[,vy],p triplet, got {text!r}")
    return parts[0], parts[1:-1], parts[-1]


def cmd_wavespeed_probe(args) -> int:
    model = make_model(args.eos)
    rho_l, v_l, p_l = _parse_primitive(args.left)
    rho_r, v_r, p_r = _parse_primitive(args.right)
    normal = np.asarray([float(v) for v in args.normal.split(",")])
    u_l = conserved_from_primitive(model, rho_l, v_l, p_l)
    u_r = conserved_from_primitive(model, rho_r, v_r, p_r)
    left = wavespeed.make_side_data(model, u_l, normal)
    right = wavespeed.make_side_data(model, u_r, normal)
    est = wavespeed.estimate(left, right)
    p_star = wavespeed.p_star_bisect(left, right)
    lam_l_star, lam_r_star = wavespeed.wave_speeds(left, right, p_star)
    out = {
        "left": vars(left).copy(),
        "right": vars(right).copy(),
        "p_hat_rr": wavespeed.p_hat_rr(left, right),
        "p_hat_ss": wavespeed.p_hat_ss(left, right),
        "p_hat_star": est.p_hat_star,
        "p_star_bisect": p_star,
        "lambda_left": est.lambda_left,
        "lambda_right": est.lambda_right,
        "lambda_left_at_p_star": lam_l_star,
        "lambda_right_at_p_star": lam_r_star,
        "lambda_max": est.lambda_max,
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    meta, _, model, mesh, field = _csvio.read_field_csv(args.csv)
    report = validate_mod.check_admissible(model, field)
    print(json.dumps({"file": args.csv, "problem": meta.get("problem"), **report.to_dict()}, indent=2))
    return EXIT_OK if report.ok else EXIT_INVARIANT


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--problem", help="problem name")
    parser.add_argument("--eos", help="EOS parameter overrides as JSON")
    parser.add_argument("--cells", type=int, help="cells per dimension")
    parser.add_argument("--cfl", type=float)
    parser.add_argument("--t-final", dest="t_final", type=float)
    parser.add_argument("--outdir")
    parser.add_argument("--dump-every", dest="dump_every", type=int)
    parser.add_argument("--trace-every", dest="trace_every", type=int)
    parser.add_argument("--no-enforce", dest="no_enforce", action="store_true",
                        help="report invariant violations instead of aborting")
    parser.add_argument("--seed", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="eulerkit", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one problem")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("converge", help="uniform-refinement error table")
    _add_common(p_conv)
    p_conv.add_argument("--refinements", type=int, help="number of mesh doublings")
    p_conv.set_defaults(func=cmd_converge)

    p_ws = sub.add_parser("wavespeed", help="wave-speed tools")
    ws_sub = p_ws.add_subparsers(dest="ws_command", required=True)
    p_probe = ws_sub.add_parser("probe", help="estimate for one left/right pair")
    p_probe.add_argument("--eos", default="macaw")
    p_probe.add_argument("--left", required=True, help="rho,v[,vy],p")
    p_probe.add_argument("--right", required=True, help="rho,v[,vy],p")
    p_probe.add_argument("--normal", default="1", help="unit normal components")
    p_probe.set_defaults(func=cmd_wavespeed_probe)

    p_val = sub.add_parser("validate", help="admissibility report for a fields CSV")
    p_val.add_argument("csv")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    threads = os.environ.get("EULERKIT_THREADS")
    if threads:
        import numba

        numba.set_num_threads(int(threads))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (problems.SetupError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except EosError as exc:
        print(f"EOS failure: {exc}", file=sys.stderr)
        return EXIT_EOS


if __name__ == "__main__":
    sys.exit(main())

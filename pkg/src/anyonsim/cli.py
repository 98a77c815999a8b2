"""Command-line front end: ``anyonsim {braid,correlate,budget,oracle}``.

Exit codes: 0 success, 2 configuration error, 3 prediction/execution
mismatch, 4 numerical-tolerance failure.  Every artifact is written with
sorted keys and no timestamps, so a rerun with the same config and seed is
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .lattice import Boundary, LatticeError, build
from .pauli import Protocol, reduce_protocol

log = logging.getLogger("anyonsim")

EXIT_OK, EXIT_CONFIG, EXIT_MISMATCH, EXIT_NUMERIC = 0, 2, 3, 4
SCHEMA_VERSION = 1

DEFAULTS = {
    "schema": SCHEMA_VERSION,
    "lattice": None,
    "boundary": None,
    "engine": "stabilizer",
    "jx": 0.2,
    "jy": 0.2,
    "jz": 1.0,
    "shots": 10_000,
    "seed": 0,
    "out": "anyonsim-out",
    "experiment": "fig3",
    "variant": "em",
    "detour": 0,
    "central_m": True,
    "wrong": False,
    "protocol": None,
    "n_ops": 60,
    "count": 200,
    "length": 12,
    "atom": {},
}


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = str(text).lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _parse_lattice(text: str) -> tuple[int, int]:
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError:
        raise ConfigError(f"--lattice expects RxC, got {text!r}") from None


def load_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if data.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema {data.get('schema')!r}")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    return cfg


def _lattice(cfg, default=(6, 6, "open")):
    rows, cols = _parse_lattice(cfg["lattice"]) if cfg["lattice"] else default[:2]
    boundary = cfg["boundary"] or (default[2] if not cfg["lattice"] else "open")
    try:
        return build(rows, cols, Boundary(boundary))
    except (LatticeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _write(out: Path, name: str, payload) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    if isinstance(payload, str):
        path.write_text(payload)
    else:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _check_dense(lat):
    from .statevector import dense_cap

    if lat.site_count > dense_cap():
        raise ConfigError(f"{lat!r} has {lat.site_count} sites, above the dense cap {dense_cap()}")


def _recompile(cfg, lat):
    from . import braid

    if cfg["experiment"] == "fig3":
        variant = str(cfg["variant"]).upper()
        other = "EE" if variant == "EM" else "EM"
        return (braid.protocol_fig3(lat, variant, int(cfg["detour"])),
                braid.protocol_fig3(lat, other, int(cfg["detour"])))
    return braid.protocol_fig4(lat, bool(cfg["central_m"]), bool(cfg["wrong"])), None


# -- braid ---------------------------------------------------------------------

def _expected_ratio(ex, partner) -> int:
    # Each variant's predicted ratio is relative to EE, so ex/partner is their product.
    return ex.predicted_phase_ratio * partner.predicted_phase_ratio

def cmd_braid(cfg: dict) -> int:
    from . import braid, render
    from . import stabilizer as stab

    engine = cfg["engine"]
    if engine not in ("stabilizer", "dense", "both"):
        raise ConfigError(f"unknown engine {engine!r}")
    lat = _lattice(cfg)
    out = Path(cfg["out"])

    if cfg["experiment"] == "custom" or cfg["protocol"] is not None:
        protocol = Protocol.from_list(cfg["protocol"] or [])
        ex = braid.BraidExperiment("custom", lat, protocol, stab.predict_syndrome(lat, protocol),
                                   None, [])
        partner = None
    elif cfg["experiment"] in ("fig3", "fig4"):
        ex, partner = _recompile(cfg, lat)
    else:
        raise ConfigError(f"unknown experiment {cfg['experiment']!r}")

    report = {"experiment": ex.name, "lattice": repr(lat), "pulses": len(ex.protocol),
              "crossing_sites": ex.crossing_sites, "predicted_phase_ratio": ex.predicted_phase_ratio,
              "version": __version__}
    red = reduce_protocol(ex.protocol)
    report["reduction"] = {
        "irreducible": red.irreducible,
        "phase": None if red.irreducible else str(red.phase),
        "residual": None if red.irreducible else str(red.residual),
        "pulse_count": red.pulse_count,
    }
    ok = True
    ground = stab.prepare_ground(lat)
    if engine in ("stabilizer", "both"):
        final = stab.apply_protocol(ground.copy(), ex.protocol)
        measured = stab.syndrome(final, lat)
        match = measured == ex.predicted_syndrome
        report["stabilizer"] = {"syndrome": sorted(measured.flipped()), "matches_prediction": match}
        _write(out, "syndrome.json", measured.to_dict(lat))
        ok &= match
        if partner is not None:
            a, b = ex.ground_scalar(ground), partner.ground_scalar(ground)
            ratio = None if a is None or b is None else a / b
            report["stabilizer"]["phase_ratio"] = None if ratio is None else [ratio.real, ratio.imag]
            ok &= ratio is not None and abs(ratio - _expected_ratio(ex, partner)) < 1e-12
    numeric_ok = True
    if engine in ("dense", "both"):
        from . import statevector as sv

        dlat, dex, dpartner = lat, ex, partner
        if engine == "both" and lat.site_count > sv.dense_cap() and ex.name != "custom":
            # Too big for vectors: repeat the experiment on the smallest torus.
            dlat = build(4, 2, Boundary.TORUS)
            dex, dpartner = _recompile(cfg, dlat)
        _check_dense(dlat)
        g = sv.toric_ground_state(dlat)
        f = sv.apply_protocol(g, dex.protocol)
        dense = {"lattice": repr(dlat), "overlap": [g.overlap(f).real, g.overlap(f).imag]}
        if dpartner is not None:
            f2 = sv.apply_protocol(g, dpartner.protocol)
            ratio = g.overlap(f) / g.overlap(f2)
            dense["phase_ratio"] = [ratio.real, ratio.imag]
            numeric_ok &= abs(ratio - _expected_ratio(dex, dpartner)) < 1e-10
        if dex.name == "fig4-interference":
            wrong = braid.protocol_fig4(dlat, True, True)
            fw = sv.apply_protocol(g, wrong.protocol)
            dense["fidelity_vs_wrong_protocol"] = f.fidelity(fw)
        report["dense"] = dense
    _write(out, "protocol.json", ex.to_dict())
    _write(out, "diagram.svg", render.experiment_svg(ex))
    report["passed"] = bool(ok and numeric_ok)
    _write(out, "report.json", report)
    print(json.dumps(report, indent=2, sort_keys=True))
    if not ok:
        return EXIT_MISMATCH
    return EXIT_OK if numeric_ok else EXIT_NUMERIC


# -- correlate -----------------------------------------------------------------

def correlate_states(lat, params):
    """Ground state and the pair of final states of the interference braid."""
    from . import braid
    from . import statevector as sv

    if params.jx == 0 and params.jy == 0:
        g = sv.toric_ground_state(lat)
    else:
        _, g = sv.ground_state(lat, params, "ground")
    ex = braid.protocol_fig4(lat, True)
    vac = braid.protocol_fig4(lat, False)
    psi1 = sv.apply_protocol(g, vac.protocol)
    psi2 = sv.apply_protocol(g, ex.protocol)
    d = ex.crossing_sites[0]
    return g, psi1, psi2, d, d ^ 1


def cmd_correlate(cfg: dict) -> int:
    from . import readout
    from .statevector import ModelParams

    lat = _lattice(cfg, (4, 2, "torus"))
    _check_dense(lat)
    shots = int(cfg["shots"])
    if shots < 1:
        raise ConfigError("--shots must be >= 1")
    params = ModelParams(float(cfg["jx"]), float(cfg["jy"]), float(cfg["jz"]))
    _, psi1, psi2, d, f = correlate_states(lat, params)
    seed = int(cfg["seed"])
    rows, results = [], {}
    verdict_parts, flags = [], []
    for basis, (a, b) in (("XX", "xx"), ("YX", "yx")):
        exact1 = readout.correlator_exact(psi1, a, b, d, f)
        exact2 = readout.correlator_exact(psi2, a, b, d, f)
        e1 = readout.run_fig5(psi1, basis, d, f, shots, seed)
        e2 = readout.run_fig5(psi2, basis, d, f, shots, seed + 1)
        flipped = abs(exact1 + exact2) < 1e-12
        consistent = all(abs(e.value - x) <= 5 * e.std_error + 1e-12 for e, x in ((e1, exact1), (e2, exact2)))
        resolvable = 5 * max(e1.std_error, e2.std_error) < 1
        if not resolvable:
            flags.append(f"{basis}: {shots} shots cannot resolve any sign at 5 sigma")
        resolved = (abs(exact1) > 0.1 and e1.value * e2.value < 0
                    and min(e1.significance(), e2.significance()) >= 5)
        results[basis] = {
            "psi1": e1.to_dict(), "psi2": e2.to_dict(),
            "exact": [exact1, exact2], "exact_sign_flip": flipped,
            "consistent_5sigma": consistent, "signs_resolved": resolved,
        }
        verdict_parts.append(flipped and consistent and (resolved or abs(exact1) <= 0.1))
        rows += [(basis, "psi1", e1), (basis, "psi2", e2)]
    if all(max(abs(x) for x in r["exact"]) < 1e-6 for r in results.values()):
        # X_D' X_F and Y_D' X_F anticommute with a plaquette, so they vanish in W_p eigenstates.
        flags.append("exact correlators vanish in this state; there is no sign to compare")
    verdict = all(verdict_parts) if not flags else None
    report = {"lattice": repr(lat), "d_site": d, "f_site": f, "shots": shots, "seed": seed,
              "couplings": {"jx": params.jx, "jy": params.jy, "jz": params.jz},
              "bases": results, "sign_flip_verdict": verdict, "warnings": flags,
              "version": __version__}
    out = Path(cfg["out"])
    _write(out, "correlate.json", report)
    readout.write_csv(out / "correlate.csv", [r[2] for r in rows],
                      [{"basis_state": r[1]} for r in rows])
    for w in flags:
        log.warning(w)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if verdict is not False else EXIT_MISMATCH


# -- budget --------------------------------------------------------------------

def cmd_budget(cfg: dict) -> int:
    from . import pulsecraft as pc

    try:
        atom = pc.AtomLattice(**cfg.get("atom", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad atom constants: {exc}") from None
    n_ops = int(cfg["n_ops"])
    if n_ops < 0:
        raise ConfigError("--n-ops must be non-negative")
    try:
        b = pc.budget(atom, None, n_ops)
    except pc.PulseError as exc:
        log.error(str(exc))
        return EXIT_NUMERIC
    out = Path(cfg["out"])
    _write(out, "budget.json", dict(b.to_dict(), version=__version__))
    _write(out, "budget.txt", b.table() + "\n")
    print(b.table())
    return EXIT_OK


# -- oracle --------------------------------------------------------------------

def cmd_oracle(cfg: dict) -> int:
    from .oracle import run_oracle

    lat = _lattice(cfg, (4, 2, "torus"))
    _check_dense(lat)
    report = run_oracle(lat, int(cfg["count"]), int(cfg["seed"]), int(cfg["length"]))
    out = Path(cfg["out"])
    _write(out, "oracle.json", dict(report.to_dict(), version=__version__))
    print(json.dumps({k: v for k, v in report.to_dict().items() if k != "mismatches"}, sort_keys=True))
    if not report.passed:
        m = report.mismatches[0]
        print(f"mismatch on {m.probe} = {m.op}: stabilizer {m.stabilizer}, dense {m.dense}", file=sys.stderr)
        print(json.dumps(m.protocol, indent=2), file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (flags override its values)")
    common.add_argument("--lattice", help="RxC rows and columns of z-links")
    common.add_argument("--boundary", choices=["open", "torus"])
    common.add_argument("--engine", choices=["stabilizer", "dense", "both"])
    common.add_argument("--jx", type=float)
    common.add_argument("--jy", type=float)
    common.add_argument("--jz", type=float)
    common.add_argument("--shots", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="anyonsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"anyonsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("braid", parents=[common], help="compile and run a braid experiment")
    b.add_argument("--experiment", choices=["fig3", "fig4", "custom"])
    b.add_argument("--variant", type=str.lower, choices=["ee", "em"])
    b.add_argument("--detour", type=int)
    b.add_argument("--central-m", dest="central_m", type=_bool)
    b.add_argument("--wrong", type=_bool, help="fig4: single initial pi/2 pulse variant")

    sub.add_parser("correlate", parents=[common], help="simulated two-site correlator readout")

    g = sub.add_parser("budget", parents=[common], help="pulse and scattering error budget")
    g.add_argument("--n-ops", dest="n_ops", type=int)

    o = sub.add_parser("oracle", parents=[common], help="stabilizer vs dense equivalence suite")
    o.add_argument("--count", type=int)
    o.add_argument("--length", type=int)
    return p


COMMANDS = {"braid": cmd_braid, "correlate": cmd_correlate, "budget": cmd_budget, "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"anyonsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # compile errors from the braid layer are config problems too
        from .braid import BraidError
        from .statevector import ConvergenceError, SizeCapError

        if isinstance(exc, (BraidError, SizeCapError)):
            print(f"anyonsim: config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if isinstance(exc, ConvergenceError):
            print(f"anyonsim: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        raise


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every subcommand is turned into a one-analysis scenario and goes through the
same validation and execution path as ``g2qkd run scenario.toml``.

Exit status: 0 success, 1 configuration error, 2 numerical error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import Scenario, check_scenario, load_presets, parse_grid, resolve_source, validate_config, jsonable
from .config import load_scenario
from .detection import DEFAULT_K_SIGMA, DEFAULT_N_REQUIRED, DEFAULT_REP_RATE, DEFAULT_THRESHOLD
from .errors import ConfigError, DomainError, NumericalError
from .hbt import DEFAULT_MAX_LAG, DetectorParams
from .photon_stats import SourceParams, build_distribution
from .sampling import DEFAULT_RUNS, DEFAULT_SAMPLES, DEFAULT_SEED, SamplingPlan
from . import tables

log = logging.getLogger("g2qkd")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _plan(s: dict) -> SamplingPlan:
    return SamplingPlan(
        int(s.get("n_samples", DEFAULT_SAMPLES)),
        int(s.get("n_runs", DEFAULT_RUNS)),
        int(s.get("master_seed", DEFAULT_SEED)),
    )


def _link(scen: Scenario, presets: dict) -> tuple[dict, float | None]:
    link = dict(scen.link)
    flyover = link.pop("flyover_s", None)
    name = link.pop("preset", None)
    if name is not None:
        entry = presets["links"][str(name).lower()]
        flyover = entry.get("flyover_s", flyover) if flyover is None else flyover
        scen.channel.setdefault("loss_db", entry.get("loss_db"))
    return {
        "repetition_rate": float(link.get("repetition_rate", DEFAULT_REP_RATE)),
        "n_required": int(link.get("n_required", DEFAULT_N_REQUIRED)),
    }, flyover


def _channel(scen: Scenario) -> dict:
    return {k: v for k, v in scen.channel.items() if k != "loss_db"}


def run_analysis(name: str, scen: Scenario, presets: dict):
    """Compute one analysis; returns ``(columns, rows, parameters)``."""
    src = SourceParams(**resolve_source(scen.source, presets))
    d = build_distribution(src)
    link, flyover = _link(scen, presets)
    s = scen.sampling
    kind = scen.attack.get("kind", "soft")
    xs = parse_grid(scen.attack.get("x", "0:1:0.25"))
    eta = float(s.get("eta", 1.0))
    params = {"analysis": name, "source": src.__dict__, "distribution": d.p.tolist()}

    if name == "attack-sweep":
        plan = _plan(s)
        params.update(attack_kind=kind, x=xs, eta=eta, plan=plan.__dict__)
        cols, rows = tables.attack_sweep_table(d, kind, xs, plan, eta)
    elif name == "keyrate":
        losses = parse_grid(scen.channel.get("loss_db", "0:40:1"))
        params.update(channel=scen.channel, link=link)
        cols, rows = tables.keyrate_table(d, losses, _channel(scen), link)
    elif name == "convergence":
        plan = _plan(s)
        sizes = [int(v) for v in parse_grid(s.get("sizes", [1e3, 1e4, 1e5, 1e6, 1e7]))]
        ref = int(s.get("reference_size", 10**8))
        params.update(sizes=sizes, reference_size=ref, n_runs=plan.n_runs, master_seed=plan.master_seed, eta=eta)
        cols, rows = tables.convergence_table(d, sizes, plan.n_runs, plan.master_seed, ref, eta)
    elif name == "waiting-time":
        losses = parse_grid(scen.channel.get("loss_db", 38.0))
        eta_det = float(scen.channel.get("detector_efficiency", 0.9))
        params.update(loss_db=losses, eta_det=eta_det, link=link, flyover_s=flyover)
        cols, rows = tables.waiting_time_table(d.mu, losses, eta_det, link, flyover)
    elif name == "hbt":
        h = scen.hbt
        det = DetectorParams(
            float(h.get("efficiency", 0.1)), float(h.get("dark_click_prob", 1e-6)), float(h.get("split_ratio", 0.5))
        )
        n_pulses = int(h.get("n_pulses", 10**8))
        max_lag = int(h.get("max_lag", DEFAULT_MAX_LAG))
        seed = int(s.get("master_seed", DEFAULT_SEED))
        params.update(detector=det.__dict__, n_pulses=n_pulses, max_lag=max_lag, master_seed=seed)
        cols, rows = tables.hbt_table(d, n_pulses, det, max_lag, seed)
    elif name == "detect":
        plan = _plan(s)
        thr = float(scen.detect.get("threshold", DEFAULT_THRESHOLD))
        ks = float(scen.detect.get("k_sigma", DEFAULT_K_SIGMA))
        params.update(attack_kind=kind, x=xs, eta=eta, plan=plan.__dict__, threshold=thr, k_sigma=ks)
        cols, rows = tables.detect_table(d, kind, xs, plan, eta, thr, ks)
    else:  # pragma: no cover - rejected by validation
        raise ConfigError([f"analyses: unknown analysis {name!r}"])
    return cols, rows, jsonable(params)


def _write(text: str, target) -> None:
    if target is None or str(target) == "-":
        sys.stdout.write(text)
        return
    path = Path(target)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    log.info("wrote %s", path)


def _execute(scen: Scenario, presets: dict, out=None) -> None:
    out_dir = scen.output.get("directory")
    for name in scen.analyses:
        cols, rows, params = run_analysis(name, scen, presets)
        text = tables.render_csv(cols, rows, {"master_seed": scen.sampling.get("master_seed", DEFAULT_SEED), "parameters": params})
        target = out if out is not None else (Path(out_dir) / f"{name}.csv" if out_dir else None)
        _write(text, target)


def _guard(fn) -> int:
    try:
        fn()
    except ConfigError as exc:
        for line in exc.diagnostics:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error in {exc.quantity}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def run_scenario(path, presets_file=None) -> int:
    """Run every analysis listed in a scenario file; returns the exit status."""

    def go():
        try:
            scen = load_scenario(path)
        except OSError as exc:
            raise ConfigError([f"<file>: {exc}"]) from None
        presets_path = scen.raw.get("presets", presets_file)
        _execute(scen, load_presets(presets_path))

    return _guard(go)


# --- argument parsing -----------------------------------------------------


def _common(p: argparse.ArgumentParser, sampling: bool = True) -> None:
    p.add_argument("--preset", default="our-hbn", help="source preset name (default: our-hbn)")
    p.add_argument("--presets", help="extra presets TOML file")
    p.add_argument("--qe", type=float, help="inline source: quantum efficiency (overrides --preset)")
    p.add_argument("--g2", type=float, help="inline source: g2(0)")
    p.add_argument("--g3", type=float, help="inline source: g3(0,0)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    if sampling:
        p.add_argument("--runs", type=int, default=DEFAULT_RUNS, help="repeated runs")
        p.add_argument("--samples", type=float, default=DEFAULT_SAMPLES, help="pulses per run")
        p.add_argument("--eta", type=float, default=1.0, help="channel transmission before estimation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="g2qkd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attack-sweep", help="photon statistics vs attack strength")
    _common(p)
    p.add_argument("--kind", default="soft", choices=["soft", "hard"])
    p.add_argument("--x", default="0:1:0.1", help="start:stop:step or comma list")

    p = sub.add_parser("keyrate", help="key rates and waiting time vs channel loss")
    _common(p, sampling=False)
    p.add_argument("--loss", default="0:40:1")
    p.add_argument("--eta-det", type=float, default=0.9)
    p.add_argument("--dark-yield", type=float, default=1e-6)
    p.add_argument("--e-int", type=float, default=0.03)
    p.add_argument("--f-ec", type=float, default=1.22)
    p.add_argument("--rep-rate", type=float, default=DEFAULT_REP_RATE, help="rate used for the waiting time")
    p.add_argument("--n-required", type=float, default=DEFAULT_N_REQUIRED)

    p = sub.add_parser("convergence", help="g2 estimate vs number of samples")
    _common(p)
    p.add_argument("--sizes", default="1e3,1e4,1e5,1e6,1e7")
    p.add_argument("--reference-size", type=float, default=1e8)

    p = sub.add_parser("waiting-time", help="time to detect N photons, satellite feasibility")
    _common(p, sampling=False)
    p.add_argument("--loss", default=None, help="channel loss grid in dB (default: link preset)")
    p.add_argument("--link", default="micius", help="link preset supplying loss and flyover")
    p.add_argument("--flyover", type=float, help="flyover duration in seconds")
    p.add_argument("--eta-det", type=float, default=0.9)
    p.add_argument("--rep-rate", type=float, default=DEFAULT_REP_RATE)
    p.add_argument("--n-required", type=float, default=DEFAULT_N_REQUIRED)

    p = sub.add_parser("hbt", help="simulated HBT measurement of g2(0)")
    _common(p, sampling=False)
    p.add_argument("--pulses", type=float, default=1e8)
    p.add_argument("--efficiency", type=float, default=0.1)
    p.add_argument("--dark", type=float, default=1e-6)
    p.add_argument("--split", type=float, default=0.5)
    p.add_argument("--max-lag", type=int, default=DEFAULT_MAX_LAG)

    p = sub.add_parser("detect", help="attack alarm from Monte Carlo g2 estimates")
    _common(p)
    p.add_argument("--kind", default="soft", choices=["soft", "hard"])
    p.add_argument("--x", default="0,0.25,0.5,0.75,1")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--k-sigma", type=float, default=DEFAULT_K_SIGMA)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("config")
    p.add_argument("--presets", help="extra presets TOML file")

    p = sub.add_parser("run", help="run every analysis of a scenario file")
    p.add_argument("config")
    p.add_argument("--presets", help="extra presets TOML file")
    return parser


def _source_from_args(a) -> dict:
    if a.qe is not None or a.g2 is not None or a.g3 is not None:
        return {"quantum_efficiency": a.qe, "g2": a.g2, "g3": a.g3}
    return {"preset": a.preset}


def _num(v):
    return int(v) if float(v).is_integer() else v


def scenario_from_args(a) -> dict:
    raw = {"analyses": [a.command], "source": {k: v for k, v in _source_from_args(a).items() if v is not None}}
    raw["sampling"] = {"master_seed": a.seed}
    if hasattr(a, "runs"):
        raw["sampling"].update(n_runs=a.runs, n_samples=_num(a.samples), eta=a.eta)
    if a.command in ("attack-sweep", "detect"):
        raw["attack"] = {"kind": a.kind, "x": a.x}
    if a.command == "detect":
        raw["detect"] = {"threshold": a.threshold, "k_sigma": a.k_sigma}
    if a.command == "keyrate":
        raw["channel"] = {
            "loss_db": a.loss,
            "detector_efficiency": a.eta_det,
            "dark_yield": a.dark_yield,
            "intrinsic_error": a.e_int,
            "ec_efficiency": a.f_ec,
        }
        raw["link"] = {"repetition_rate": a.rep_rate, "n_required": _num(a.n_required)}
    if a.command == "convergence":
        raw["sampling"].update(sizes=a.sizes, reference_size=_num(a.reference_size))
    if a.command == "waiting-time":
        raw["channel"] = {"detector_efficiency": a.eta_det}
        if a.loss is not None:
            raw["channel"]["loss_db"] = a.loss
        raw["link"] = {"repetition_rate": a.rep_rate, "n_required": _num(a.n_required)}
        if a.link:
            raw["link"]["preset"] = a.link
        if a.flyover is not None:
            raw["link"]["flyover_s"] = a.flyover
    if a.command == "hbt":
        raw["hbt"] = {
            "n_pulses": _num(a.pulses),
            "efficiency": a.efficiency,
            "dark_click_prob": a.dark,
            "split_ratio": a.split,
            "max_lag": a.max_lag,
        }
    return raw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "validate":
        try:
            diag = validate_config(args.config)
        except OSError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for line in diag:
            print(line)
        return EXIT_CONFIG if diag else EXIT_OK
    if args.command == "run":
        return run_scenario(args.config, args.presets)

    def go():
        presets = load_presets(args.presets)
        raw = scenario_from_args(args)
        diag = check_scenario(raw, presets)
        if diag:
            raise ConfigError(diag)
        scen = Scenario(
            source=raw["source"],
            analyses=raw["analyses"],
            attack=raw.get("attack", {}),
            channel=raw.get("channel", {}),
            sampling=raw.get("sampling", {}),
            link=raw.get("link", {}),
            hbt=raw.get("hbt", {}),
            detect=raw.get("detect", {}),
            raw=raw,
        )
        _execute(scen, presets, out=args.out if args.out else "-")

    return _guard(go)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

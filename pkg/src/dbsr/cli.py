"""Command-line entry point: config parsing, experiment runs, CSV emission.

Config files are flat ``key = value`` lines with ``#`` comments; flags
override file values. Every run is fully determined by (config file, flags,
seed) and re-running reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from .ga import GaParams
from .protocols import HeedParams, LeachParams, ProtocolKind
from .sim import BatchResult, DbsrPolicy, StaticPolicy, batch
from .world import NetworkConfig, Position

CSV_HEADER = "scenario,run,round,bs_x,bs_y,total_residual_j,alive_count,consumed_j,heads_count"
SUMMARY_HEADER = "scenario,metric,value"

_CONFIG_KEYS = (
    "protocol", "dbsr", "nodes", "area", "rounds", "runs", "seed", "out",
    "ga_pop", "ga_gens", "ga_cx", "ga_mut", "ga_elitism", "ga_big_m",
    "initial_energy", "data_packet_bits", "control_packet_bits",
    "sensing_radius", "e_elec", "e_fs", "e_da", "static_bs",
    "leach_p", "heed_c_prob", "heed_p_min", "heed_max_iterations",
)


@dataclass(frozen=True)
class RunSpec:
    network: NetworkConfig
    protocol: ProtocolKind
    dbsr: bool
    static_bs: Position | None
    ga: GaParams
    leach: LeachParams
    heed: HeedParams
    runs: int
    max_rounds: int
    out: str | None
    compare: bool

    def policy(self, dbsr: bool | None = None):
        use_dbsr = self.dbsr if dbsr is None else dbsr
        return DbsrPolicy(self.ga) if use_dbsr else StaticPolicy(self.static_bs)

    def scenario_name(self, dbsr: bool | None = None) -> str:
        use_dbsr = self.dbsr if dbsr is None else dbsr
        return self.protocol.name + ("-DBSR" if use_dbsr else "")


def load_config_file(path: str) -> dict[str, str]:
    """Read a flat key = value file, rejecting unknown keys."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got '{line}'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key '{key}'")
            values[key] = value
    return values


def _parse_area(text: str) -> tuple[float, float]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"area must look like WIDTHxHEIGHT (got '{text}')")
    return float(parts[0]), float(parts[1])


def _parse_position(text: str) -> Position:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"static_bs must look like X,Y (got '{text}')")
    return Position(float(parts[0]), float(parts[1]))


def _parse_bool(key: str, text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "1", "yes"):
        return True
    if t in ("off", "false", "0", "no"):
        return False
    raise ValueError(f"{key} must be on or off (got '{text}')")


def _get(file_values: dict, flags: argparse.Namespace, key: str, flag_attr: str | None = None):
    """Flag value if given, else file value, else None."""
    flag = getattr(flags, flag_attr or key, None)
    if flag is not None:
        return flag
    return file_values.get(key)


def parse_config(args: argparse.Namespace) -> RunSpec:
    """Merge defaults, config file, environment, and flags into a RunSpec."""
    file_values = load_config_file(args.config) if args.config else {}

    width, height = 200.0, 200.0
    area = _get(file_values, args, "area")
    if area is not None:
        width, height = _parse_area(str(area))

    seed = args.seed
    if seed is None:
        env_seed = os.environ.get("DBSR_SEED")
        if env_seed is not None:
            try:
                seed = int(env_seed)
            except ValueError:
                raise ValueError(f"DBSR_SEED must be an integer (got '{env_seed}')")
    if seed is None and "seed" in file_values:
        seed = int(file_values["seed"])
    if seed is None:
        seed = 1

    def fval(key, conv, default):
        v = file_values.get(key)
        return default if v is None else conv(v)

    nodes = _get(file_values, args, "nodes")
    network = NetworkConfig(
        field_width=width,
        field_height=height,
        node_count=int(nodes) if nodes is not None else 200,
        initial_energy=fval("initial_energy", float, 1.0),
        data_packet_bits=fval("data_packet_bits", int, 1600),
        control_packet_bits=fval("control_packet_bits", int, 0),
        sensing_radius=fval("sensing_radius", float, 15.0),
        e_elec=fval("e_elec", float, 50e-9),
        e_fs=fval("e_fs", float, 10e-9),
        e_da=fval("e_da", float, 5e-9),
        seed=seed,
    )

    pop = _get(file_values, args, "ga_pop")
    gens = _get(file_values, args, "ga_gens")
    cx = _get(file_values, args, "ga_cx")
    mut = _get(file_values, args, "ga_mut")
    ga = GaParams(
        population_size=int(pop) if pop is not None else network.node_count,
        generations=int(gens) if gens is not None else network.node_count,
        crossover_rate=float(cx) if cx is not None else 0.80,
        mutation_rate=float(mut) if mut is not None else 0.09,
        big_m=fval("ga_big_m", float, None),
        elitism=fval("ga_elitism", int, 1),
    )

    protocol_value = _get(file_values, args, "protocol")
    protocol_text = str(protocol_value).lower() if protocol_value is not None else "leach"
    try:
        protocol = ProtocolKind(protocol_text)
    except ValueError:
        raise ValueError(f"protocol must be leach or heed (got '{protocol_text}')")

    dbsr_value = _get(file_values, args, "dbsr")
    dbsr = _parse_bool("dbsr", str(dbsr_value)) if dbsr_value is not None else False

    static_bs = None
    if "static_bs" in file_values:
        static_bs = _parse_position(file_values["static_bs"])
        if not (0 <= static_bs.x <= width and 0 <= static_bs.y <= height):
            raise ValueError(
                f"static_bs must lie within 0..{width} x 0..{height}"
                f" (got {static_bs.x},{static_bs.y})")

    runs_value = _get(file_values, args, "runs")
    runs = int(runs_value) if runs_value is not None else 1
    if runs < 1:
        raise ValueError(f"runs must be >= 1 (got {runs})")
    rounds_value = _get(file_values, args, "rounds")
    max_rounds = int(rounds_value) if rounds_value is not None else 20
    if max_rounds < 0:
        raise ValueError(f"rounds must be >= 0 (got {max_rounds})")

    return RunSpec(
        network=network,
        protocol=protocol,
        dbsr=dbsr,
        static_bs=static_bs,
        ga=ga,
        leach=LeachParams(fval("leach_p", float, 0.05)),
        heed=HeedParams(
            c_prob=fval("heed_c_prob", float, 0.05),
            p_min=fval("heed_p_min", float, 1e-4),
            max_iterations=fval("heed_max_iterations", int, 20),
        ),
        runs=runs,
        max_rounds=max_rounds,
        out=_get(file_values, args, "out"),
        compare=bool(args.compare),
    )


def _run_batch(spec: RunSpec, protocol: ProtocolKind, dbsr: bool) -> BatchResult:
    policy = DbsrPolicy(spec.ga) if dbsr else StaticPolicy(spec.static_bs)
    return batch(spec.network, protocol, policy, spec.runs, spec.max_rounds,
                 leach_params=spec.leach, heed_params=spec.heed)


def improvement_pct(base_median: float, dbsr_median: float) -> float:
    """Percentage lifetime gain of a DBSR variant over its static baseline."""
    return (dbsr_median - base_median) / base_median * 100.0


def compare(spec: RunSpec):
    """Run all four scenarios on identical paired seeds.

    Returns the scenario -> BatchResult map (insertion-ordered) and the
    improvement rows for each DBSR variant relative to its baseline.
    """
    scenarios = [
        ("LEACH", ProtocolKind.LEACH, False),
        ("LEACH-DBSR", ProtocolKind.LEACH, True),
        ("HEED", ProtocolKind.HEED, False),
        ("HEED-DBSR", ProtocolKind.HEED, True),
    ]
    results = {name: _run_batch(spec, kind, dbsr) for name, kind, dbsr in scenarios}
    improvements = {}
    for dbsr_name, base_name in (("LEACH-DBSR", "LEACH"), ("HEED-DBSR", "HEED")):
        improvements[dbsr_name] = (
            improvement_pct(results[base_name].fnd_median, results[dbsr_name].fnd_median),
            improvement_pct(results[base_name].hna_median, results[dbsr_name].hna_median),
        )
    return results, improvements


def _fmt(value: float) -> str:
    return format(value, ".9g")


def render_csv(scenario_batches: dict[str, BatchResult],
               improvements: dict[str, tuple[float, float]] | None = None) -> str:
    """Per-round rows for every scenario/run, then a summary section."""
    lines = [CSV_HEADER]
    for name, result in scenario_batches.items():
        for run in result.results:
            for m in run.metrics:
                lines.append(",".join((
                    name, str(run.run_index), str(m.round),
                    _fmt(m.bs_pos.x), _fmt(m.bs_pos.y),
                    _fmt(m.total_residual), str(m.alive_count),
                    _fmt(m.consumed_this_round), str(m.heads_count),
                )))
    lines.append("")
    lines.append(SUMMARY_HEADER)
    for name, result in scenario_batches.items():
        lines.append(f"{name},fnd_median,{_fmt(result.fnd_median)}")
        lines.append(f"{name},hna_median,{_fmt(result.hna_median)}")
        lines.append(f"{name},fnd_mean,{_fmt(result.fnd_mean)}")
        lines.append(f"{name},hna_mean,{_fmt(result.hna_mean)}")
        if improvements and name in improvements:
            fnd_pct, hna_pct = improvements[name]
            lines.append(f"{name},improvement_fnd_pct,{_fmt(fnd_pct)}")
            lines.append(f"{name},improvement_hna_pct,{_fmt(hna_pct)}")
    return "\n".join(lines) + "\n"


def emit_csv(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dbsr",
        description="Round-based WSN lifetime simulator with a mobile, "
                    "GA-repositioned base station.")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--protocol", choices=["leach", "heed"], help="clustering protocol")
    p.add_argument("--dbsr", choices=["on", "off"],
                   help="reposition the BS each round (default off)")
    p.add_argument("--nodes", type=int, help="number of sensor nodes")
    p.add_argument("--area", help="field size as WIDTHxHEIGHT in meters")
    p.add_argument("--rounds", type=int, help="maximum rounds per run")
    p.add_argument("--runs", type=int, help="independent seeded runs to average")
    p.add_argument("--seed", type=int, help="base seed (env DBSR_SEED is the fallback)")
    p.add_argument("--ga-pop", dest="ga_pop", type=int, help="GA population size")
    p.add_argument("--ga-gens", dest="ga_gens", type=int, help="GA generations")
    p.add_argument("--ga-cx", dest="ga_cx", type=float, help="GA crossover rate")
    p.add_argument("--ga-mut", dest="ga_mut", type=float, help="GA mutation rate")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--compare", action="store_true",
                   help="run LEACH, LEACH-DBSR, HEED, HEED-DBSR on paired seeds")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = parse_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if spec.compare:
            results, improvements = compare(spec)
            text = render_csv(results, improvements)
        else:
            result = _run_batch(spec, spec.protocol, spec.dbsr)
            text = render_csv({spec.scenario_name(): result})
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        emit_csv(text, spec.out)
    except OSError as exc:
        print(f"error: cannot write {spec.out}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

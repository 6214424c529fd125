"""Command-line front end: ``ofalab {solve,sweep,simulate,verify}``.

Configs are TOML.  Exit codes: 0 success, 1 a check failed, 2 invalid config.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .equilibrium import solve_m_player, solve_two_player_closed_form
from .errors import ConvergenceError, DomainError, ParameterError
from .game import AuctionConfig
from .seeding import SeedPolicy
from .stakes import (
    RewardModel,
    StakeConfig,
    growth_rate,
    martingale_statistics,
    simulate,
    simulate_ensemble,
)
from .verify import FULL, QUICK, run_checks, summarize, write_report

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str
    raw: dict = field(default_factory=dict)
    output_dir: Path = Path("out")
    seed: int = 0
    replications: int = 1000
    threads: int = 1
    quick: bool = False
    trajectories: str | None = None   # overrides output.trajectories

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def header(self) -> str:
        return f"ofalab {__version__} config_sha256={self.config_hash} seed={self.seed}"


# -- config parsing -------------------------------------------------------------------

def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file is not valid TOML: {exc}") from exc


def _vector(spec: dict, key: str, n: int | None = None) -> np.ndarray | None:
    if key not in spec:
        return None
    value = np.atleast_1d(np.asarray(spec[key], dtype=float))
    if n is not None and value.size == 1:
        value = np.full(n, value[0])
    return value


def game_from_dict(spec: dict) -> AuctionConfig:
    """``v_bar`` directly or ``v_bar_weights * v_bar_scale``; ``f_bar`` directly or ``f_over_v * v_bar``."""
    if not spec:
        raise ConfigError("missing [game] section")
    v = _vector(spec, "v_bar")
    if v is None:
        weights = _vector(spec, "v_bar_weights")
        if weights is None:
            raise ConfigError("[game] needs v_bar or v_bar_weights")
        v = weights * float(spec.get("v_bar_scale", 1.0))
    f = _vector(spec, "f_bar")
    if f is None:
        ratio = _vector(spec, "f_over_v", v.size)
        if ratio is None:
            raise ConfigError("[game] needs f_bar or f_over_v")
        f = ratio * v
    if f.size != v.size:
        raise ConfigError("f_bar and v_bar must have the same length")
    return AuctionConfig.from_arrays(f, v, mu=float(spec.get("mu", 0.5)), epsilon=spec.get("epsilon"))


def stakes_from_dict(spec: dict) -> StakeConfig:
    if not spec:
        raise ConfigError("missing [stakes] section")
    r = spec.get("reward")
    if not r:
        raise ConfigError("missing [stakes.reward] section")
    try:
        reward = RewardModel(
            mu=float(r["mu"]), beta_v=float(r["beta_v"]), builder_bids=tuple(r["builder_bids"]),
            builder_supports=tuple(map(tuple, r["builder_supports"])) if "builder_supports" in r else None,
            spread=float(r.get("spread", 0.0)), validator_payment=r.get("validator_payment", "mu"),
        )
        return StakeConfig(tuple(spec["initial_stakes"]), float(spec["alpha"]), float(spec["gamma"]),
                           reward, int(spec.get("horizon", 1000)))
    except KeyError as exc:
        raise ConfigError(f"missing stake setting {exc.args[0]!r}") from exc


def _set_path(tree: dict, path: str, value) -> dict:
    out = copy.deepcopy(tree)
    node = out
    keys = path.split(".")
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value
    return out


# -- output helpers -------------------------------------------------------------------

def _writer(path: Path, header: str):
    fh = open(path, "w", newline="")
    fh.write(f"# {header}\n")
    return fh, csv.writer(fh, lineterminator="\n")


def _solve(game: AuctionConfig):
    if game.n_builders == 2:
        return solve_two_player_closed_form(game)
    return solve_m_player(game)


def _print_equilibrium(game: AuctionConfig, res) -> None:
    print(f"{'builder':>7} {'f_bar':>12} {'v_bar':>12} {'h*':>12} {'E[pi]':>12}")
    for i, b in enumerate(game.builders):
        print(f"{i + 1:>7} {b.f_bar:>12.2f} {b.v_bar:>12.2f} {res.h_star[i]:>12.2f} {res.utilities[i]:>12.2f}")
    print(f"method={res.method} converged={res.converged}")


# -- subcommands ----------------------------------------------------------------------

def cmd_solve(run: RunConfig) -> int:
    game = game_from_dict(run.raw.get("game", {}))
    res = _solve(game)
    run.output_dir.mkdir(parents=True, exist_ok=True)
    payload = {"meta": {"tool": "ofalab", "version": __version__, "config_sha256": run.config_hash,
                        "seed": run.seed}, **res.to_dict()}
    (run.output_dir / "equilibrium.json").write_text(json.dumps(payload, indent=2) + "\n")
    fh, w = _writer(run.output_dir / "equilibrium.csv", run.header())
    with fh:
        w.writerow(["builder", "f_bar", "v_bar", "h_star", "utility", "foc_residual", "clamped"])
        for i, b in enumerate(game.builders):
            w.writerow([i + 1, b.f_bar, b.v_bar, float(res.h_star[i]), float(res.utilities[i]),
                        float(res.foc_residuals[i]), bool(res.clamped[i])])
    _print_equilibrium(game, res)
    return EXIT_OK if res.converged else EXIT_CHECK_FAILED


def cmd_sweep(run: RunConfig) -> int:
    spec = run.raw.get("sweep")
    if not spec or "parameter" not in spec:
        raise ConfigError("missing [sweep] section with a parameter path")
    values = list(spec.get("values", []))
    if not values:
        raise ConfigError("sweep grid is empty")
    path = spec["parameter"]
    if not path.startswith("game."):
        raise ConfigError("sweep parameter must be a path inside [game], e.g. game.f_over_v")
    run.output_dir.mkdir(parents=True, exist_ok=True)
    fh, w = _writer(run.output_dir / "sweep.csv", run.header())
    failures = 0
    with fh:
        w.writerow([path, "builder", "f_bar", "v_bar", "h_star", "utility", "foc_residual", "clamped",
                    "converged", "error"])
        for value in values:
            tree = _set_path(run.raw, path, value)
            try:
                game = game_from_dict(tree.get("game", {}))
                res = _solve(game)
            except (ParameterError, DomainError, ConvergenceError) as exc:
                failures += 1
                w.writerow([value, "", "", "", "", "", "", "", False, str(exc)])
                print(f"{path}={value}: error: {exc}")
                continue
            for i, b in enumerate(game.builders):
                w.writerow([value, i + 1, b.f_bar, b.v_bar, float(res.h_star[i]), float(res.utilities[i]),
                            float(res.foc_residuals[i]), bool(res.clamped[i]), res.converged, ""])
            failures += int(not res.converged)
            print(f"{path}={value}: h* = ({', '.join(f'{h:.2f}' for h in res.h_star)}), "
                  f"E[pi] = ({', '.join(f'{u:.2f}' for u in res.utilities)})")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def cmd_simulate(run: RunConfig) -> int:
    spec = run.raw.get("stakes", {})
    config = stakes_from_dict(spec)
    out_spec = run.raw.get("output", {})
    reps = run.replications
    policy = SeedPolicy(run.seed)
    ens = simulate_ensemble(config, reps, policy, task="simulate")
    run.output_dir.mkdir(parents=True, exist_ok=True)
    n = config.n_validators
    fh, w = _writer(run.output_dir / "aggregate.csv", run.header())
    with fh:
        w.writerow(["t", "mean_S", "sd_S"] + [f"mean_w_{j + 1}" for j in range(n)] + [f"sd_w_{j + 1}" for j in range(n)])
        for t in range(config.horizon + 1):
            w.writerow([t, float(ens.mean_totals[t]), float(ens.sd_totals[t]),
                        *map(float, ens.mean_shares[t]), *map(float, ens.sd_shares[t])])
    bins = int(out_spec.get("histogram_bins", 50))
    edges = np.linspace(0.0, 1.0, bins + 1)
    fh, w = _writer(run.output_dir / "histogram.csv", run.header())
    with fh:
        w.writerow(["validator", "bin_lo", "bin_hi", "count"])
        for j in range(n):
            counts, _ = np.histogram(ens.final_shares[:, j], bins=edges)
            for k in range(bins):
                w.writerow([j + 1, float(edges[k]), float(edges[k + 1]), int(counts[k])])
    layout = run.trajectories or out_spec.get("trajectories", "none")
    if layout not in ("none", "per_replication", "long"):
        raise ConfigError("output.trajectories must be none, per_replication or long")
    if layout != "none":
        _write_trajectories(run, config, policy, reps, layout)
    print(f"{reps} replications, T={config.horizon}, N={n}")
    for s in martingale_statistics(ens.final_shares, config.initial_shares) if reps > 1 else []:
        print(f"validator {s.validator + 1}: mean final share {s.mean:.2f} (initial {s.initial:.2f})")
    est = growth_rate(ens.mean_totals, config)
    print(f"tail slope of mean S_t {est.slope:.2f} (limit {est.target:.2f})"
          + ("" if est.sufficient else " [horizon too short]"))
    return EXIT_OK


def _write_trajectories(run, config, policy, reps, layout):
    if layout == "long":
        fh, w = _writer(run.output_dir / "trajectories.csv", run.header())
    for r in range(reps):
        tr = simulate(config, policy.seed_sequence("simulate", r))
        if layout == "per_replication":
            fh, w = _writer(run.output_dir / f"trajectory_{r:05d}.csv", run.header())
            with fh:
                w.writerow(tr.header())
                w.writerows(tr.rows())
        else:
            if r == 0:
                w.writerow(["rep"] + tr.header())
            w.writerows([r] + row for row in tr.rows())
    if layout == "long":
        fh.close()


def cmd_verify(run: RunConfig, tables: bool, properties: bool, stakes: bool, inject_fault: bool) -> int:
    if not (tables or properties or stakes):
        tables = properties = stakes = True
    reports = run_checks(tables=tables, properties=properties, stakes=stakes, seed_policy=SeedPolicy(run.seed),
                         sizes=QUICK if run.quick else FULL, threads=run.threads, inject_fault=inject_fault)
    write_report(reports, run.output_dir, run.header())
    print(summarize(reports))
    return EXIT_CHECK_FAILED if any(r.failed for r in reports) else EXIT_OK


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--threads", type=int, default=1, help="cap on worker threads")
    common.add_argument("--quick", action="store_true", help="reduced sample sizes")
    parser = argparse.ArgumentParser(prog="ofalab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ofalab {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    sub.add_parser("solve", parents=[common], help="equilibrium bids for one game")
    sub.add_parser("sweep", parents=[common], help="equilibria over a parameter grid")
    sim = sub.add_parser("simulate", parents=[common], help="stake-share simulation")
    sim.add_argument("--replications", type=int, help="number of replications")
    sim.add_argument("--trajectories", choices=["none", "per_replication", "long"],
                     help="also write per-replication trajectories")
    ver = sub.add_parser("verify", parents=[common], help="run the check suites")
    ver.add_argument("--tables", action="store_true")
    ver.add_argument("--properties", action="store_true")
    ver.add_argument("--stakes", action="store_true")
    ver.add_argument("--all", action="store_true")
    ver.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load_config(args.config)
        if args.mode in ("solve", "sweep", "simulate") and not raw:
            raise ConfigError(f"'{args.mode}' needs --config")
        seed = args.seed if args.seed is not None else int(raw.get("seed", 0))
        if not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        reps = getattr(args, "replications", None) or int(raw.get("stakes", {}).get("replications", 1000))
        if reps < 1:
            raise ConfigError("replications must be at least 1")
        out = Path(args.out or raw.get("output", {}).get("dir", "out"))
        run = RunConfig(args.mode, raw, out, seed, reps, args.threads, args.quick,
                        getattr(args, "trajectories", None))
        if args.mode == "solve":
            return cmd_solve(run)
        if args.mode == "sweep":
            return cmd_sweep(run)
        if args.mode == "simulate":
            return cmd_simulate(run)
        everything = args.all
        return cmd_verify(run, args.tables or everything, args.properties or everything,
                          args.stakes or everything, args.inject_fault)
    except (ConfigError, ParameterError, DomainError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())

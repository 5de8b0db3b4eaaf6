"""Command-line entry point.

Subcommands: model, classify, noise, fault, suite, crossbar-compare,
dump-state.  Values resolve as flags > config file > defaults; the config
file is INI-style with [network], [experiment] and [crossbar] sections and
unknown keys are rejected.  Reports are CSV, written atomically except for
the streaming suite files; human progress goes to stderr, machine output to
files and stdout.  Exit codes: 0 ok, 1 configuration error, 2 runtime
failure.
"""

import argparse
import configparser
import csv
import io
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import benchmarks, crossbar, experiments, network
from .crossbar import MemristorParams
from .errors import ConfigError, NeuroFuzzyError, UnknownDatasetId
from .experiments import REPORT_COLUMNS, ExperimentConfig
from .fuzzy import triangular_matrix

OUT_DIR_ENV = "NEUROFUZZY_OUT_DIR"

CONFIG_SCHEMA = {
    "network": {
        "p": int, "alpha": float, "threshold": float, "nx": int, "ny": int,
        "nz": int, "input_hs_scale": float, "input_hs_shrink_exp": float,
        "output_hs_mult": float,
    },
    "experiment": {
        "function": str, "dataset": int, "n_train": int, "n_test": int,
        "seed": int, "test_seed": int, "noise_variance": float,
        "fault_fraction": float, "fault_seed": int, "backend": str,
    },
    "crossbar": {
        "r_on": float, "r_off": float, "d": float, "mu_v": float,
        "v_threshold": float, "dt": float, "r_f": float,
        "scale_in": float, "scale_out": float,
    },
}


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def load_config_file(path: str) -> dict:
    """Parse and type-check an INI config; unknown sections/keys fail fast."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    out: dict = {}
    for section in parser.sections():
        if section not in CONFIG_SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        out[section] = {}
        for key, raw in parser.items(section):
            if key not in CONFIG_SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            typ = CONFIG_SCHEMA[section][key]
            try:
                out[section][key] = typ(raw)
            except ValueError as e:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from e
    return out


def _merged(file_cfg: dict, section: str, key: str, flag_value, default):
    if flag_value is not None:
        return flag_value
    if section in file_cfg and key in file_cfg[section]:
        return file_cfg[section][key]
    return default


def _device_params(file_cfg: dict) -> tuple:
    cb = file_cfg.get("crossbar", {})
    params = MemristorParams(
        r_on=cb.get("r_on", 100.0), r_off=cb.get("r_off", 16e3),
        d=cb.get("d", 10e-9), mu_v=cb.get("mu_v", 1e-14),
        v_threshold=cb.get("v_threshold", 1.0), dt=cb.get("dt", 1e-5),
    )
    return params, cb.get("r_f", params.r_off)


_PAPER_PINNED = {
    "network": ("p", "alpha", "threshold", "nx", "ny", "nz", "input_hs_scale",
                "input_hs_shrink_exp", "output_hs_mult"),
    "experiment": ("n_train", "n_test"),
}


def build_experiment_config(args, file_cfg: dict, needs: str) -> ExperimentConfig:
    """Resolve one run configuration; needs is 'function' or 'dataset'."""
    if getattr(args, "paper_defaults", False):
        # --paper-defaults pins every table parameter: drop competing overrides
        file_cfg = {sec: {k: v for k, v in d.items()
                          if k not in _PAPER_PINNED.get(sec, ())}
                    for sec, d in file_cfg.items()}
        for flag in ("n_train", "n_test", "p", "alpha", "threshold"):
            if hasattr(args, flag):
                setattr(args, flag, None)
    get = lambda sec, key, flag, default: _merged(file_cfg, sec, key, flag, default)
    fields = dict(
        n_train=get("experiment", "n_train", getattr(args, "n_train", None), None),
        n_test=get("experiment", "n_test", getattr(args, "n_test", None), None),
        seed=get("experiment", "seed", args.seed, 1),
        test_seed=get("experiment", "test_seed", None, experiments.DEFAULT_TEST_SEED),
        p=get("network", "p", getattr(args, "p", None), 7),
        alpha=get("network", "alpha", getattr(args, "alpha", None), 5e-4),
        threshold=get("network", "threshold", getattr(args, "threshold", None), None),
        nx=get("network", "nx", None, None),
        ny=get("network", "ny", None, None),
        nz=get("network", "nz", None, None),
        input_hs_scale=get("network", "input_hs_scale", None, 10.0),
        input_hs_shrink_exp=get("network", "input_hs_shrink_exp", None, 0.1),
        output_hs_mult=get("network", "output_hs_mult", None, 3.0),
        noise_variance=get("experiment", "noise_variance",
                           getattr(args, "noise_variance", None), 0.0),
        fault_fraction=get("experiment", "fault_fraction",
                           getattr(args, "fault_fraction", None), 0.0),
        fault_seed=get("experiment", "fault_seed", None, None),
        backend=get("experiment", "backend", args.backend, "ideal"),
    )
    params, _ = _device_params(file_cfg)
    fields["device"] = params
    if needs == "function":
        fn = get("experiment", "function", getattr(args, "fn", None), None)
        if fn is None:
            raise ConfigError("no benchmark function given (use --fn or the config file)")
        if fn not in benchmarks.FUNCTIONS:
            raise ConfigError(f"unknown benchmark function {fn!r}")
        fields["function"] = fn
        if fields["n_train"] is None:
            fields["n_train"] = 225
        if fields["n_test"] is None:
            fields["n_test"] = 10_000
    else:
        ds = get("experiment", "dataset", getattr(args, "dataset", None), None)
        if ds is None:
            raise ConfigError("no dataset id given (use --dataset or the config file)")
        if ds not in benchmarks.CLASSIFICATION:
            raise ConfigError(f"classification dataset id must be 1..4, got {ds}")
        fields["dataset"] = int(ds)
        if fields["n_train"] is None:
            fields["n_train"] = benchmarks.CLASSIFICATION[int(ds)]["n_train"]
        if fields["n_test"] is None:
            fields["n_test"] = 2000
    try:
        return ExperimentConfig(**fields)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _out_dir(args) -> Path:
    d = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def atomic_write(path: Path, text: str) -> None:
    """Write via temp file + rename so interrupted runs never truncate output."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_csv_text(reports, with_runtime: bool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row(with_runtime=with_runtime))
    return buf.getvalue()


def _emit_report(args, reports, filename: str) -> Path:
    text = report_csv_text(reports, with_runtime=args.timing)
    out = _out_dir(args) / filename
    atomic_write(out, text)
    sys.stdout.write(text)
    _progress(f"wrote {out}")
    return out


# --- subcommands --------------------------------------------------------------


def cmd_model(args, file_cfg) -> int:
    cfg = build_experiment_config(args, file_cfg, needs="function")
    _progress(f"modeling {cfg.function}: {cfg.n_train} train / {cfg.n_test} test, "
              f"seed {cfg.seed}, backend {cfg.backend}")
    report = experiments.run_modeling(cfg)
    _emit_report(args, [report], f"model_{cfg.function}.csv")
    if args.surface or args.save_state:
        state = experiments.rebuild_trained_state(cfg)
        if args.surface:
            rows = experiments.surface_grid(cfg, state)
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["x", "y", "predicted", "actual"])
            for row in rows:
                writer.writerow([repr(float(v)) for v in row])
            out = _out_dir(args) / f"surface_{cfg.function}.csv"
            atomic_write(out, buf.getvalue())
            _progress(f"wrote {out}")
        if args.save_state:
            Path(args.save_state).write_bytes(network.serialize(state))
            _progress(f"wrote {args.save_state}")
    return 0


def cmd_noise(args, file_cfg) -> int:
    if getattr(args, "noise_variance", None) is None and \
            "noise_variance" not in file_cfg.get("experiment", {}):
        args.noise_variance = 0.01
    cfg = build_experiment_config(args, file_cfg, needs="function")
    _progress(f"noise study {cfg.function}: variance {cfg.noise_variance}")
    report = experiments.run_noise(cfg)
    _emit_report(args, [report], f"noise_{cfg.function}.csv")
    return 0


def cmd_fault(args, file_cfg) -> int:
    if getattr(args, "fault_fraction", None) is None and \
            "fault_fraction" not in file_cfg.get("experiment", {}):
        args.fault_fraction = 0.2
    cfg = build_experiment_config(args, file_cfg, needs="function")
    _progress(f"fault study {cfg.function}: fraction {cfg.fault_fraction}")
    report = experiments.run_fault(cfg)
    _emit_report(args, [report], f"fault_{cfg.function}.csv")
    return 0


def cmd_classify(args, file_cfg) -> int:
    cfg = build_experiment_config(args, file_cfg, needs="dataset")
    _progress(f"classification set {cfg.dataset}: {cfg.n_train} train, seed {cfg.seed}")
    report = experiments.run_classification(cfg)
    _emit_report(args, [report], f"classify_set{cfg.dataset}.csv")
    return 0


def cmd_suite(args, file_cfg) -> int:
    seed = args.seed if args.seed is not None else 1
    backend = args.backend or "ideal"
    jobs = experiments.suite_jobs(seed=seed, backend=backend)
    if args.only:
        if args.only not in jobs:
            raise ConfigError(f"--only must be one of {sorted(jobs)}, got {args.only!r}")
        jobs = {args.only: jobs[args.only]}
    workers = args.jobs or os.cpu_count() or 1
    out_dir = _out_dir(args)
    for table, rows in jobs.items():
        out = out_dir / f"suite_{table}.csv"
        _progress(f"suite {table}: {len(rows)} rows -> {out}")
        # streaming write, flushed per completed row, in fixed row order
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS + ["status"])
            fh.flush()
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_safe_job, kind, cfg) for kind, cfg in rows]
                for (kind, cfg), fut in zip(rows, futures):
                    report, err = fut.result()
                    if err is not None:
                        label = cfg.function or f"set{cfg.dataset}"
                        writer.writerow([label] + [""] * (len(REPORT_COLUMNS) - 1)
                                        + [f"error:{err}"])
                    else:
                        writer.writerow(report.csv_row(with_runtime=args.timing) + ["ok"])
                    fh.flush()
                    _progress(f"  {table} row done: {cfg.function or cfg.dataset}")
    return 0


def _safe_job(kind, cfg):
    try:
        return experiments.run_job(kind, cfg), None
    except Exception as e:  # keep the suite streaming past bad rows
        return None, f"{type(e).__name__}: {e}"


def cmd_crossbar_compare(args, file_cfg) -> int:
    params, r_f = _device_params(file_cfg)
    out_dir = _out_dir(args)
    volts, dws = crossbar.delta_weight_sweep(params, r_f)
    sweep_path = out_dir / "device_weight_sweep.csv"
    atomic_write(sweep_path, crossbar.sweep_csv(volts, dws))
    _progress(f"wrote {sweep_path}")
    if args.sweep_only:
        return 0
    cfg = build_experiment_config(args, file_cfg, needs="function")
    _progress(f"training ideal {cfg.function} model for crossbar comparison")
    state = experiments.rebuild_trained_state(cfg)
    cb_keys = file_cfg.get("crossbar", {})
    cb1, cb2, mapping = crossbar.map_network(
        state, params, r_f,
        scale_in=cb_keys.get("scale_in"), scale_out=cb_keys.get("scale_out"))
    rng = np.random.default_rng(cfg.seed + 777)
    probes = rng.uniform(0.0, 1.0, size=(args.n_probes, 2))
    mats = [triangular_matrix(g.universe, probes[:, i], g.half_support)
            for i, g in enumerate(state.config.groups)]
    ideal_hidden = network._hidden_batch(state, mats)
    ideal_out = ideal_hidden @ state.w_out.T
    cb_out = crossbar.crossbar_forward_batch(cb1, cb2, mapping, mats)
    scale = np.abs(ideal_out).max(axis=1, keepdims=True)
    denom = np.maximum(np.abs(ideal_out), 1e-9 * np.maximum(scale, 1e-300))
    rel = np.abs(cb_out - ideal_out) / denom
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["probe", "max_rel_deviation", "mean_rel_deviation"])
    for i in range(args.n_probes):
        writer.writerow([i, repr(float(rel[i].max())), repr(float(rel[i].mean()))])
    out = out_dir / f"crossbar_compare_{cfg.function}.csv"
    atomic_write(out, buf.getvalue())
    _progress(f"wrote {out}")
    print(f"max relative output deviation over {args.n_probes} probes: {rel.max():.3e}")
    return 0


def cmd_dump_state(args, file_cfg) -> int:
    payload = Path(args.state).read_bytes()
    state = network.deserialize(payload)
    out_dir = _out_dir(args)
    print(f"min-terms: {state.n_minterms}")
    print(f"output universe: [{state.config.output_universe.lo}, "
          f"{state.config.output_universe.hi}] x {state.config.output_universe.count}")
    for g, grp in enumerate(state.config.groups):
        print(f"group {grp.name}: [{grp.universe.lo}, {grp.universe.hi}] "
              f"x {grp.universe.count}, half_support {grp.half_support}")
        rows = state.w_in(g)
        text = "\n".join(",".join(repr(float(v)) for v in row) for row in rows) + "\n"
        path = out_dir / f"state_w_in_{grp.name}.csv"
        atomic_write(path, text)
        _progress(f"wrote {path}")
    text = "\n".join(",".join(repr(float(v)) for v in row) for row in state.w_out) + "\n"
    path = out_dir / "state_w_out.csv"
    atomic_write(path, text)
    _progress(f"wrote {path}")
    return 0


# --- parser -------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="INI config file")
    sub.add_argument("--out-dir", help=f"output directory (or ${OUT_DIR_ENV})")
    sub.add_argument("--seed", type=int, help="experiment seed")
    sub.add_argument("--backend", choices=["ideal", "crossbar"])
    sub.add_argument("--timing", action="store_true",
                     help="fill the runtime_ms column (off by default so repeated "
                          "runs stay byte-identical)")


def _add_model_flags(sub):
    sub.add_argument("--fn", help="benchmark function g1..g5")
    sub.add_argument("--paper-defaults", action="store_true",
                     help="pin every table parameter for the chosen function")
    sub.add_argument("--n-train", type=int, dest="n_train")
    sub.add_argument("--n-test", type=int, dest="n_test")
    sub.add_argument("--p", type=int)
    sub.add_argument("--alpha", type=float)
    sub.add_argument("--threshold", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neurofuzzy",
                                     description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    p_model = subs.add_parser("model", help="model one benchmark function")
    _add_common(p_model)
    _add_model_flags(p_model)
    p_model.add_argument("--surface", action="store_true",
                         help="also write a (x,y,predicted,actual) grid CSV")
    p_model.add_argument("--save-state", help="serialize the trained network here")
    p_model.set_defaults(func=cmd_model)

    p_classify = subs.add_parser("classify", help="run one classification set")
    _add_common(p_classify)
    p_classify.add_argument("--dataset", type=int, help="dataset id 1..4")
    p_classify.add_argument("--n-train", type=int, dest="n_train")
    p_classify.add_argument("--n-test", type=int, dest="n_test")
    p_classify.add_argument("--threshold", type=float)
    p_classify.set_defaults(func=cmd_classify)

    p_noise = subs.add_parser("noise", help="noisy-training study")
    _add_common(p_noise)
    _add_model_flags(p_noise)
    p_noise.add_argument("--noise-variance", type=float, dest="noise_variance")
    p_noise.set_defaults(func=cmd_noise)

    p_fault = subs.add_parser("fault", help="distorted-cross-point study")
    _add_common(p_fault)
    _add_model_flags(p_fault)
    p_fault.add_argument("--fault-fraction", type=float, dest="fault_fraction")
    p_fault.set_defaults(func=cmd_fault)

    p_suite = subs.add_parser("suite", help="reproduce every table")
    _add_common(p_suite)
    p_suite.add_argument("--only", help="run a single table "
                         "(table1, table3, classification, noise, fault)")
    p_suite.add_argument("--jobs", type=int, help="worker pool size")
    p_suite.set_defaults(func=cmd_suite)

    p_cmp = subs.add_parser("crossbar-compare",
                            help="map a trained model onto crossbars and compare")
    _add_common(p_cmp)
    _add_model_flags(p_cmp)
    p_cmp.add_argument("--sweep-only", action="store_true",
                       help="only emit the device weight-change sweep CSV")
    p_cmp.add_argument("--n-probes", type=int, default=100)
    p_cmp.set_defaults(func=cmd_crossbar_compare)

    p_dump = subs.add_parser("dump-state", help="inspect a serialized network")
    _add_common(p_dump)
    p_dump.add_argument("--state", required=True, help="serialized state file")
    p_dump.set_defaults(func=cmd_dump_state)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_cfg = load_config_file(args.config) if args.config else {}
        return args.func(args, file_cfg)
    except (ConfigError, UnknownDatasetId) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NeuroFuzzyError as e:
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

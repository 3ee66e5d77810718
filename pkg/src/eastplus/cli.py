"""Command-line front end.

Subcommands: plan, project, reconstruct, simulate, conjecture, evaluate.
Every run is a pure function of (config, seed): rerunning a command with
the same inputs rewrites byte-identical output files. Settings resolve in
three layers: built-in defaults, then a flat key=value config file, then
command-line flags of the same name.
"""

import argparse
import csv
import json
import pathlib
import platform
import sys

import numpy as np
import scipy

from . import __version__
from .analysis import E_OVER_C4_SWEEP, conjecture_experiment
from .backends import BACKEND
from .core import EnergyProfile, ModelConstants, relative_error, vectorize
from .decoder import partition, reconstruct
from .experiments import evaluate_methods, method_plans
from .netsim import BASE, run
from .planner import east_plus_plan
from .projection import project
from .signals import eta_best_k, ingest_energy, ingest_signal, segment_signal, synth_signal
from .transform import TransformBasis, peak_to_total_check

DEFAULTS = {
    "k": 8,
    "gamma": 0.5,
    "c": 0.5,
    "eta": "auto",
    "mu": "auto",
    "s": 0.8,
    "r": 1.0,
    "voltage": 1.0,
    "current": 1.0,
    "acquisition_time": 1.0,
    "basis": "dct",
    "nodes": 8,
    "energy_budget": 0.5,
    "nhat": "auto",
    "nhat_values": "64,128,256,512,1024,2048",
    "n_seeds": 20,
    "seed": 0,
    "segment": 0,
    "trials": 1000,
    "alpha": 2.0,
    "beta": 20.0,
    "e_over_c4": "0.1,0.5,0.9",
    "signal": "",
    "energy": "",
    "out": "out",
}

_INT_KEYS = ("k", "nodes", "n_seeds", "seed", "segment", "trials")
_FLOAT_KEYS = (
    "gamma",
    "c",
    "s",
    "r",
    "voltage",
    "current",
    "acquisition_time",
    "energy_budget",
    "alpha",
    "beta",
)
_HELP = {
    "k": "coefficients kept by the decoder",
    "gamma": "confidence exponent (failure probability nhat^-gamma)",
    "c": "median-of-means partition constant in (0,1)",
    "eta": "best-k energy fraction bound, or 'auto' for the closed form",
    "mu": "peak-to-total ratio, or 'auto' (measured; 1.0 when no signal)",
    "s": "compressibility exponent of synthetic signals",
    "r": "magnitude scale of synthetic signals",
    "voltage": "sampling voltage V (c4 = V*I*T)",
    "current": "sampling current I",
    "acquisition_time": "per-sample acquisition time T",
    "basis": "transform basis: dct or haar",
    "nodes": "node count for synthetic profiles/signals",
    "energy_budget": "per-instant energy of the synthetic uniform profile",
    "nhat": "signal length, or 'auto' (whole file / 256 synthetic)",
    "nhat_values": "comma-separated sweep lengths for plan/evaluate",
    "n_seeds": "runs per sweep point in evaluate",
    "seed": "master seed",
    "segment": "which full segment of an ingested signal to use",
    "trials": "conjecture trials per skew",
    "alpha": "beta-distribution shape alpha",
    "beta": "beta-distribution shape beta",
    "e_over_c4": "comma-separated E_j/c4 sweep for conjecture",
    "signal": "signal CSV (header = node ids, one row per instant)",
    "energy": "energy CSV (node_id,energy rows; per-instant budgets)",
    "out": "output directory",
}


def _coerce(key, value):
    """Parse one config value; strings come from files or flags."""
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in ("eta", "mu", "nhat"):
            if isinstance(value, str) and value.strip().lower() == "auto":
                return "auto"
            return int(value) if key == "nhat" else float(value)
        if key == "nhat_values":
            if isinstance(value, str):
                return [int(part) for part in value.split(",") if part.strip()]
            return [int(v) for v in value]
        if key == "e_over_c4":
            if isinstance(value, str):
                return [float(part) for part in value.split(",") if part.strip()]
            return [float(v) for v in value]
        return str(value)
    except (TypeError, ValueError):
        raise ValueError(f"bad value for {key}: {value!r}") from None


def read_config(path):
    """Flat key=value file; blank lines and # comments ignored."""
    out = {}
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = value.strip()
    return out


def resolve_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            cfg[key] = flag_value
    cfg = {key: _coerce(key, value) for key, value in cfg.items()}
    for key in ("k", "nodes", "n_seeds", "trials"):
        if cfg[key] < 1:
            raise ValueError(f"{key} must be >= 1")
    return cfg


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract reserves 2 for crashes."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", default=None, help="key=value settings file")
    for key in DEFAULTS:
        common.add_argument(
            f"--{key.replace('_', '-')}",
            dest=key,
            default=None,
            metavar="V",
            help=_HELP[key],
        )
    parser = _Parser(
        prog="eastplus",
        description="Energy-aware sparse random projection pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("plan", "solve the (ell, kappa) optimum and the reference plans"),
        ("project", "project a signal through the planned sparse matrix"),
        ("reconstruct", "project, decode, and score a signal"),
        ("simulate", "run the distributed protocol with energy accounting"),
        ("conjecture", "derivative-sign Monte-Carlo over beta profiles"),
        ("evaluate", "method comparison sweep over signal lengths"),
    ):
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def write_manifest(out_dir, command, cfg, derived):
    manifest = _jsonable(
        {
            "command": command,
            "config": cfg,
            "derived": derived,
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "eastplus": __version__,
                "backend": BACKEND,
            },
        }
    )
    text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    (out_dir / "manifest.json").write_text(text)


def load_profile(cfg):
    if cfg["energy"]:
        return ingest_energy(cfg["energy"])
    return EnergyProfile(np.full(cfg["nodes"], cfg["energy_budget"]))


def load_signal(cfg, profile, sig_seed):
    """Signal plus its vector length; files are segmented to fit nhat."""
    n = profile.n
    if cfg["signal"]:
        signal = ingest_signal(cfg["signal"])
        if signal.n != n:
            raise ValueError(
                f"signal has {signal.n} nodes but the energy profile has {n}"
            )
        if cfg["nhat"] == "auto":
            return signal, signal.m * signal.n
        m = _segment_length(cfg["nhat"], n)
        if signal.m < m:
            raise ValueError(
                f"signal provides {signal.m} instants, nhat={cfg['nhat']} needs {m}"
            )
        segments = segment_signal(signal, m)
        index = cfg["segment"]
        if not 0 <= index < len(segments):
            raise ValueError(
                f"segment {index} out of range ({len(segments)} available)"
            )
        return segments[index], cfg["nhat"]
    if cfg["segment"] != 0:
        raise ValueError("segment indexes a signal file; none was given")
    nhat = 256 if cfg["nhat"] == "auto" else cfg["nhat"]
    _segment_length(nhat, n)
    return synth_signal(nhat, cfg["s"], cfg["r"], cfg["basis"], sig_seed, n=n), nhat


def _segment_length(nhat, n):
    if nhat % n:
        raise ValueError(f"nhat {nhat} is not a multiple of the node count {n}")
    return nhat // n


def _resolve_eta(cfg, nhat):
    if cfg["eta"] == "auto":
        eta = eta_best_k(nhat, cfg["s"], cfg["k"])
        if eta == 0.0:
            raise ValueError(
                f"auto eta is 0 when k ({cfg['k']}) >= nhat ({nhat}); "
                "pass --eta explicitly or lower k"
            )
        return eta
    return cfg["eta"]


def _resolve_mu(cfg, u):
    if cfg["mu"] == "auto":
        if u is None:
            return 1.0
        return peak_to_total_check(u, cfg["s"]).ratio
    return cfg["mu"]


def _constants(cfg, eta, mu):
    return ModelConstants(
        k=cfg["k"],
        gamma=cfg["gamma"],
        eta=eta,
        c=cfg["c"],
        mu=mu,
        voltage=cfg["voltage"],
        current=cfg["current"],
        acquisition_time=cfg["acquisition_time"],
    )


def _seeds(master):
    state = np.random.SeedSequence([master]).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def cmd_plan(cfg, out_dir):
    profile = load_profile(cfg)
    mu = _resolve_mu(cfg, None)
    rows = []
    for nhat in cfg["nhat_values"]:
        _segment_length(nhat, profile.n)
        constants = _constants(cfg, _resolve_eta(cfg, nhat), mu)
        for name, plan in method_plans(profile, constants, nhat):
            rows.append((nhat, name, plan.ell, plan.kappa))
    write_csv(out_dir / "plan.csv", ["nhat", "method", "ell", "kappa"], rows)
    write_manifest(out_dir, "plan", cfg, {"mu": mu})
    print(f"wrote {out_dir / 'plan.csv'} ({len(rows)} plans)")


def _planned_projection(cfg):
    """Shared front half of project/reconstruct: plan the optimum, apply it."""
    profile = load_profile(cfg)
    sig_seed, mat_seed = _seeds(cfg["seed"])
    signal, nhat = load_signal(cfg, profile, sig_seed)
    u = vectorize(signal)
    eta = _resolve_eta(cfg, nhat)
    mu = _resolve_mu(cfg, u)
    constants = _constants(cfg, eta, mu)
    result = east_plus_plan(profile, constants, nhat, seed=mat_seed)
    m = nhat // profile.n
    x = project(u, result.plan, m)
    derived = {
        "nhat": nhat,
        "ell": result.plan.ell,
        "kappa": result.plan.kappa,
        "predicted_epsilon": result.epsilon,
        "eta": eta,
        "mu": mu,
        "signal_seed": sig_seed,
        "matrix_seed": mat_seed,
    }
    return profile, signal, u, constants, result, x, derived


def cmd_project(cfg, out_dir):
    _, _, _, _, _, x, derived = _planned_projection(cfg)
    write_csv(out_dir / "projections.csv", ["row", "value"], list(enumerate(x)))
    write_manifest(out_dir, "project", cfg, derived)
    print(f"wrote {out_dir / 'projections.csv'} ({x.size} rows)")


def cmd_reconstruct(cfg, out_dir):
    profile, _, u, constants, result, x, derived = _planned_projection(cfg)
    nhat = derived["nhat"]
    basis = TransformBasis(kind=cfg["basis"], dimension=nhat)
    part = partition(result.plan.ell, constants.gamma, constants.c, nhat)
    u_hat = reconstruct(x, result.plan, basis, constants.k, part)
    error = relative_error(u, u_hat)
    n = profile.n
    rows = [
        (q, q // (nhat // n), q % (nhat // n), u[q], u_hat[q]) for q in range(nhat)
    ]
    write_csv(
        out_dir / "reconstruction.csv",
        ["index", "node", "instant", "actual", "estimate"],
        rows,
    )
    derived.update(
        {
            "relative_error": error,
            "group_size": part.l1,
            "group_count": part.l2,
            "below_theory": part.below_theory,
        }
    )
    write_manifest(out_dir, "reconstruct", cfg, derived)
    print(f"relative error {error:.6f}; wrote {out_dir / 'reconstruction.csv'}")


def cmd_simulate(cfg, out_dir):
    profile = load_profile(cfg)
    sig_seed, mat_seed = _seeds(cfg["seed"])
    signal, nhat = load_signal(cfg, profile, sig_seed)
    u = vectorize(signal)
    constants = _constants(cfg, _resolve_eta(cfg, nhat), _resolve_mu(cfg, u))
    result = east_plus_plan(profile, constants, nhat, seed=mat_seed)
    m = nhat // profile.n
    horizon = profile.scaled(m) if m > 1 else profile
    x, ledger, trace = run(signal, result.plan, horizon, constants.c4)
    write_csv(out_dir / "x_base.csv", ["row", "value"], list(enumerate(x)))
    write_csv(
        out_dir / "ledger.csv",
        ["node", "harvested", "sample_count", "consumed", "neutral"],
        [
            (j, ledger.harvested[j], ledger.sample_count[j], ledger.consumed[j], bool(ledger.neutral[j]))
            for j in range(profile.n)
        ],
    )
    name = lambda node: "base" if node == BASE else node
    write_csv(
        out_dir / "trace.csv",
        ["sender", "receiver", "kind", "size"],
        [(name(msg.sender), name(msg.receiver), msg.kind, msg.size) for msg in trace.messages],
    )
    write_manifest(
        out_dir,
        "simulate",
        cfg,
        {
            "nhat": nhat,
            "ell": result.plan.ell,
            "kappa": result.plan.kappa,
            "signal_seed": sig_seed,
            "matrix_seed": mat_seed,
            "all_neutral": bool(np.all(ledger.neutral)),
            "sample_requests": trace.n_sample_requests,
            "sample_values": trace.n_sample_values,
            "row_scalars": trace.n_row_scalars,
        },
    )
    print(
        f"simulated ell={result.plan.ell}: {trace.n_sample_values} samples, "
        f"all nodes neutral: {bool(np.all(ledger.neutral))}"
    )


def cmd_conjecture(cfg, out_dir):
    sweep_values = tuple(cfg["e_over_c4"]) or E_OVER_C4_SWEEP
    report = conjecture_experiment(
        cfg["trials"], cfg["alpha"], cfg["beta"], cfg["seed"], sweep_values
    )
    tag = "right" if cfg["beta"] > cfg["alpha"] else "left"
    rows = [
        (sweep.e_over_c4, s.trial, s.ratio, s.kappa, s.left, s.right, s.sign)
        for sweep in report.sweeps
        for s in sweep.samples
    ]
    write_csv(
        out_dir / "conjecture.csv",
        ["e_over_c4", "trial", "ratio", "kappa", "left", "right", "sign"],
        rows,
    )
    lines = [
        f"alpha={report.alpha} beta={report.beta} trials={report.trials} seed={report.seed} ({tag}-skewed)"
    ]
    for sweep in report.sweeps:
        lines.append(
            f"E_j/c4={sweep.e_over_c4}: non-positive={sweep.n_nonpositive} "
            f"min(left-right)={sweep.min_margin!r}"
        )
    lines.append(f"all positive: {report.all_positive}")
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n")
    write_manifest(
        out_dir,
        "conjecture",
        cfg,
        {
            "all_positive": report.all_positive,
            "min_margins": {
                _cell(sweep.e_over_c4): sweep.min_margin for sweep in report.sweeps
            },
        },
    )
    print("\n".join(lines))


def cmd_evaluate(cfg, out_dir):
    profile = load_profile(cfg)
    mu = _resolve_mu(cfg, None)
    eta = _resolve_eta(cfg, max(cfg["nhat_values"]))
    constants = _constants(cfg, eta, mu)
    rows, runs = evaluate_methods(
        profile,
        constants,
        cfg["nhat_values"],
        cfg["n_seeds"],
        cfg["seed"],
        s=cfg["s"],
        r=cfg["r"],
        basis_kind=cfg["basis"],
    )
    write_csv(
        out_dir / "evaluate.csv",
        ["nhat", "method", "median_error", "iqr", "n_seeds"],
        [(row.nhat, row.method, row.median_error, row.iqr, row.n_seeds) for row in rows],
    )
    write_csv(
        out_dir / "runs.csv",
        ["nhat", "method", "run", "ell", "kappa", "error"],
        [(r.nhat, r.method, r.run, r.ell, r.kappa, r.error) for r in runs],
    )
    write_manifest(out_dir, "evaluate", cfg, {"eta": eta, "mu": mu})
    print(f"wrote {out_dir / 'evaluate.csv'} ({len(rows)} sweep rows)")


COMMANDS = {
    "plan": cmd_plan,
    "project": cmd_project,
    "reconstruct": cmd_reconstruct,
    "simulate": cmd_simulate,
    "conjecture": cmd_conjecture,
    "evaluate": cmd_evaluate,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out_dir = pathlib.Path(cfg["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, out_dir)
        return 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Subcommands:

* ``simulate``   generate a synthetic dataset (scaling or misspec scenario)
* ``run``        run Gibbs chains from a JSON config, persist chains + report
* ``diagnose``   batch-means diagnostics for a stored chain CSV
* ``validate``   joint-distribution (Geweke-style) test plus the
                 analytic identity/bound self-checks
* ``experiment`` canned studies fig1 / fig2 / fig3 emitting summary CSVs

Any failure exits nonzero with a single machine-readable JSON object on
stderr: ``{"error": <class name>, "message": <text>}``.

The environment variable EIV_GIBBS_THREADS caps the number of worker
processes used for replicate fan-out (default 1, i.e. sequential).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import batch_means_cov, diagnose, mess
from .errors import ConfigError, EivError
from .geweke import geweke_validate
from .io import (
    load_config,
    model_from_config,
    read_chain_csv,
    runspec_from_config,
    write_chain_csv,
    write_dataset_csv,
    write_json,
)
from .model import ModelConfig, build_general, proof_identities_check
from .rng import RngStream
from .sampler import RunSpec, run_chain, simulate_dataset


def _workers() -> int:
    raw = os.environ.get("EIV_GIBBS_THREADS", "1")
    try:
        w = int(raw)
    except ValueError:
        raise ConfigError(f"EIV_GIBBS_THREADS={raw!r} is not an integer")
    return max(1, w)


def _replicate_job(args):
    g, spec, r, variant = args
    rep = RunSpec(T=spec.T, burn_in=spec.burn_in, thin=spec.thin,
                  seed=spec.seed + r, replicates=1, store=spec.store)
    return run_chain(g, rep, variant=variant)


def _run_replicates_parallel(g, spec: RunSpec, variant: str):
    jobs = [(g, spec, r, variant) for r in range(spec.replicates)]
    workers = min(_workers(), spec.replicates)
    if workers == 1:
        return [_replicate_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replicate_job, jobs))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    rng = RngStream(args.seed)
    params = {"n": args.n}
    if args.scenario == "scaling":
        params.update(m=args.m, p=args.p)
    else:
        params.update(df=args.df)
    config, truth = simulate_dataset(args.scenario, rng, **params)
    out = Path(args.out)
    prov = {"command": "simulate", "scenario": args.scenario,
            "seed": args.seed, **params, "version": __version__}
    write_dataset_csv(out / "dataset.csv", config.Y, config.X, config.Z,
                      xvar=np.diagonal(config.V, axis1=1, axis2=2),
                      provenance=prov)
    write_json(out / "groundtruth.json", {
        "A": truth.A.tolist(), "Theta": truth.Theta.tolist(),
        "B": truth.B.tolist(), "Sigma": truth.Sigma.tolist(),
    })
    print(f"wrote {out / 'dataset.csv'} and groundtruth.json")
    return 0


_OVERRIDE_KEYS = ("seed", "T", "burn_in", "thin", "replicates", "store")


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    base = Path(args.config).resolve().parent
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    spec = runspec_from_config(cfg, overrides)
    model = model_from_config(cfg, base)
    g = build_general(model)
    out = Path(args.out) if args.out else base / cfg["output"]
    resolved = dict(cfg)
    resolved["run"] = {"T": spec.T, "burn_in": spec.burn_in, "thin": spec.thin,
                       "seed": spec.seed, "replicates": spec.replicates,
                       "store": spec.store}
    outputs = _run_replicates_parallel(g, spec, model.variant)
    files = []
    for r, chain in enumerate(outputs):
        name = f"chain_r{r + 1}.csv"
        write_chain_csv(out / name, chain, provenance={"config": resolved,
                                                       "version": __version__})
        files.append(name)
    write_json(out / "run_report.json", {
        "config": resolved,
        "chains": files,
        "wall_time": [c.wall_time for c in outputs],
        "stored_rows": [int(c.draws.shape[0]) for c in outputs],
        "version": __version__,
    })
    print(f"wrote {len(files)} chain file(s) to {out}")
    return 0


def _cmd_diagnose(args) -> int:
    draws, labels, prov = read_chain_csv(args.chain)
    if args.coords:
        sel = [i for i, lab in enumerate(labels)
               if any(lab == c or lab.startswith(c) for c in args.coords)]
        if not sel:
            raise ConfigError(f"no stored coordinates match {args.coords}")
        draws, labels = draws[:, sel], [labels[i] for i in sel]
    report = diagnose(draws, max_lag=args.max_lag, labels=labels)
    payload = report.to_dict()
    payload["chain_provenance"] = prov
    if args.out:
        write_json(Path(args.out), payload)
        print(f"wrote {args.out}")
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    base = Path(args.config).resolve().parent
    model = model_from_config(cfg, base)
    rng = RngStream(args.seed if args.seed is not None else cfg["run"]["seed"])
    geweke = geweke_validate(model, iterations=args.iterations,
                             rng=rng.child("geweke"))
    proofs = proof_identities_check(rng.child("proofs"))
    payload = {
        "geweke": geweke.to_dict(),
        "identities": {c.name: {"kind": c.kind, "worst": float(c.worst),
                                "passed": bool(c.passed)}
                       for c in proofs.checks},
        "passed": bool(geweke.passed() and proofs.passed),
        "version": __version__,
    }
    if args.out:
        write_json(Path(args.out), payload)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0 if payload["passed"] else 1


def _beta_summary(chain):
    """mESS and batch-means SE eigenvalue extremes on the slope block."""
    beta = chain.columns("gamma.beta.")
    cov, _ = batch_means_cov(beta)
    eig = np.linalg.eigvalsh((cov + cov.T) / 2.0)
    labels = [lab for lab in chain.labels if lab.startswith("gamma.beta.")]
    return {
        "mess": mess(beta, labels=labels),
        "se_sqrt_eig_min": float(np.sqrt(max(eig[0], 0.0))),
        "se_sqrt_eig_max": float(np.sqrt(max(eig[-1], 0.0))),
    }


def _write_summary_csv(path, rows, provenance):
    cols = list(rows[0])
    lines = ["# provenance: " + json.dumps(provenance, sort_keys=True),
             ",".join(cols)]
    for row in rows:
        lines.append(",".join(
            f"{v:.17g}" if isinstance(v, float) else str(v) for v in
            (row[c] for c in cols)))
    from .io import atomic_write_text
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def _replicated_study(args, tag: str, scenario: str, params: dict):
    """Independently re-simulate the dataset for each replicate and run
    one chain per dataset (the replicates vary both data and chain)."""
    jobs = []
    for r in range(args.replicates):
        config, _ = simulate_dataset(
            scenario,
            RngStream(args.seed).child(tag, r, *(params[k] for k in sorted(params))),
            **params)
        g = build_general(config)
        spec = RunSpec(T=args.T, burn_in=args.burn_in, thin=1,
                       seed=args.seed, replicates=1, store="gamma")
        jobs.append((g, spec, r, config.variant))
    workers = min(_workers(), len(jobs))
    if workers == 1:
        return [_replicate_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replicate_job, jobs))


def _cmd_experiment_fig1(args, out: Path, prov: dict) -> None:
    rows = []
    for m, p in ((1, 1), (2, 7), (3, 7)):
        chains = _replicated_study(args, "fig1", "scaling", {"m": m, "p": p})
        for r, chain in enumerate(chains):
            rows.append({"config": f"{m}x{p}", "m": m, "p": p,
                         "replicate": r + 1, "seed": chain.seed,
                         "T": chain.T, "burn_in": chain.burn_in,
                         **_beta_summary(chain),
                         "wall_time": chain.wall_time})
    _write_summary_csv(out / "fig1_summary.csv", rows, prov)


def _cmd_experiment_fig2(args, out: Path, prov: dict) -> None:
    rows = []
    for df in (2.0, 10.0):
        chains = _replicated_study(args, "fig2", "misspec", {"df": df})
        for r, chain in enumerate(chains):
            rows.append({"df": df, "m": 3, "p": 3,
                         "replicate": r + 1, "seed": chain.seed,
                         "T": chain.T, "burn_in": chain.burn_in,
                         **_beta_summary(chain),
                         "wall_time": chain.wall_time})
    _write_summary_csv(out / "fig2_summary.csv", rows, prov)


def galaxy_model() -> ModelConfig:
    """The bundled univariate classical-error model (46 objects)."""
    from .io import load_dataset

    with resources.as_file(resources.files("eivgibbs.data") / "galaxy.csv") as path:
        ds = load_dataset(path)
    n = ds["Y"].shape[0]
    return ModelConfig(
        variant="classical-xy",
        Y=ds["Y"], X=ds["X"], Z=ds["Z"], V=ds["V"], U=ds["U"],
        a0=2e-3, B0=np.array([[2e-3]]),
        j0=np.zeros(2), J0=1e3 * np.eye(2),
        k=np.zeros((n, 1)), K=np.broadcast_to(1e3 * np.eye(1), (n, 1, 1)).copy(),
    )


def _cmd_experiment_fig3(args, out: Path, prov: dict) -> None:
    config = galaxy_model()
    g = build_general(config)
    spec = RunSpec(T=args.T, burn_in=args.burn_in, thin=1,
                   seed=args.seed, replicates=1, store="all")
    chain = run_chain(g, spec, variant=config.variant)
    series = {
        "alpha": chain.column("gamma.theta.1.1"),
        "beta": chain.column("gamma.beta.1.1"),
        "sigma2": np.exp(chain.column("logdetSigma")),
    }
    max_lag = 20
    acf_rows = []
    summary_rows = []
    acf_cols = {}
    for name, x in series.items():
        from .diagnostics import autocorrelation

        acf_cols[name] = autocorrelation(x[:, None], max_lag)[0]
        cov, _ = batch_means_cov(x[:, None])
        Tk = x.shape[0]
        summary_rows.append({
            "param": name,
            "mean": float(x.mean()),
            "mcse": float(np.sqrt(cov[0, 0] / Tk)),
            "ess": mess(x[:, None], labels=[name]),
        })
    for lag in range(max_lag + 1):
        acf_rows.append({"lag": lag,
                         **{k: float(acf_cols[k][lag]) for k in series}})
    _write_summary_csv(out / "fig3_acf.csv", acf_rows, prov)
    _write_summary_csv(out / "fig3_summary.csv", summary_rows, prov)
    write_chain_csv(out / "fig3_chain.csv", chain, provenance=prov)


_EXPERIMENTS = {"fig1": _cmd_experiment_fig1, "fig2": _cmd_experiment_fig2,
                "fig3": _cmd_experiment_fig3}

_EXPERIMENT_DEFAULTS = {
    "fig1": {"T": 100_000, "burn_in": 10_000, "replicates": 5},
    "fig2": {"T": 100_000, "burn_in": 10_000, "replicates": 5},
    "fig3": {"T": 100_000, "burn_in": 10_000, "replicates": 1},
}


def _cmd_experiment(args) -> int:
    defaults = _EXPERIMENT_DEFAULTS[args.which]
    if args.T is None:
        args.T = defaults["T"]
    if args.burn_in is None:
        args.burn_in = min(defaults["burn_in"], args.T // 10)
    if args.replicates is None:
        args.replicates = defaults["replicates"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prov = {"command": f"experiment {args.which}", "seed": args.seed,
            "T": args.T, "burn_in": args.burn_in,
            "replicates": args.replicates, "version": __version__}
    _EXPERIMENTS[args.which](args, out, prov)
    print(f"wrote {args.which} outputs to {out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eiv-gibbs",
        description="Gibbs sampling for multivariate errors-in-variables regression",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic dataset")
    sim.add_argument("scenario", choices=["scaling", "misspec"])
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--n", type=int, default=50)
    sim.add_argument("--m", type=int, default=1)
    sim.add_argument("--p", type=int, default=1)
    sim.add_argument("--df", type=float, default=2.0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    run = sub.add_parser("run", help="run chains from a JSON config")
    run.add_argument("config")
    run.add_argument("--seed", type=int)
    run.add_argument("--T", type=int, dest="T")
    run.add_argument("--burn-in", type=int, dest="burn_in")
    run.add_argument("--thin", type=int)
    run.add_argument("--replicates", type=int)
    run.add_argument("--store", choices=["gamma", "all"])
    run.add_argument("--out")
    run.set_defaults(func=_cmd_run)

    diag = sub.add_parser("diagnose", help="diagnostics for a stored chain")
    diag.add_argument("chain")
    diag.add_argument("--max-lag", type=int, default=20, dest="max_lag")
    diag.add_argument("--coords", nargs="+",
                      help="restrict to labels (or label prefixes)")
    diag.add_argument("--out")
    diag.set_defaults(func=_cmd_diagnose)

    val = sub.add_parser("validate",
                         help="joint-distribution test + analytic self-checks")
    val.add_argument("config")
    val.add_argument("--iterations", type=int, default=10_000)
    val.add_argument("--seed", type=int)
    val.add_argument("--out")
    val.set_defaults(func=_cmd_validate)

    exp = sub.add_parser("experiment", help="canned studies")
    exp.add_argument("which", choices=sorted(_EXPERIMENTS))
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--T", type=int, dest="T")
    exp.add_argument("--burn-in", type=int, dest="burn_in")
    exp.add_argument("--replicates", type=int)
    exp.add_argument("--out", required=True)
    exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EivError, OSError, np.linalg.LinAlgError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

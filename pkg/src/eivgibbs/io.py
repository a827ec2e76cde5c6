"""Configuration schema, dataset ingestion, and chain/report persistence.

File formats:

* Experiment config: JSON, validated against CONFIG_SCHEMA before any
  computation. Matrices may be given inline (nested lists) for small
  priors; observed data lives in a referenced CSV.
* Dataset CSV: header row of column names ``y.1..y.m``, ``x.1..x.p``,
  ``z.1..z.q`` plus one error-variance encoding per error family:
  ``xvar`` (scalar, expands to v*I), ``xvar.1..xvar.p`` (diagonal), or a
  sidecar file ``<stem>.xvar.csv`` of row-major flattened full matrices
  (likewise ``yvar`` for response error). ``#``-prefixed lines are
  comments.
* Chain CSV: ``#``-prefixed provenance lines (resolved config + seed as
  JSON), then a header of coordinate labels, then one row per stored
  iteration with 17-significant-digit decimals (exact round trip).
* Diagnostics report: JSON with matrices as nested arrays.

All writes are atomic (temp file in the target directory, then rename).
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np
import jsonschema

from .errors import ConfigError, SpdError
from .linalg import as_spd
from .model import ModelConfig
from .sampler import ChainOutput, RunSpec

_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_vector = {"type": "array", "items": {"type": "number"}}
_num_or_vec = {"anyOf": [{"type": "number"}, _vector]}
_num_or_mat = {"anyOf": [{"type": "number"}, _matrix]}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["model", "run", "output"],
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "required": ["variant", "data", "priors"],
            "additionalProperties": False,
            "properties": {
                "variant": {
                    "enum": ["berkson-x", "classical-x", "berkson-xy", "classical-xy"]
                },
                "data": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "path": {"type": "string"},
                        "inline": {
                            "type": "object",
                            "required": ["Y", "X", "Z"],
                            "additionalProperties": False,
                            "properties": {
                                "Y": _matrix, "X": _matrix, "Z": _matrix,
                                "xvar": _num_or_mat, "yvar": _num_or_mat,
                            },
                        },
                    },
                },
                "priors": {
                    "type": "object",
                    "required": ["a0", "B0", "j0", "J0"],
                    "additionalProperties": False,
                    "properties": {
                        "a0": {"type": "number", "exclusiveMinimum": 0},
                        "B0": _num_or_mat,
                        "j0": _num_or_vec,
                        "J0": _num_or_mat,
                        "k": _num_or_vec,
                        "K": _num_or_mat,
                    },
                },
            },
        },
        "run": {
            "type": "object",
            "required": ["T", "seed"],
            "additionalProperties": False,
            "properties": {
                "T": {"type": "integer", "minimum": 1},
                "burn_in": {"type": "integer", "minimum": 0},
                "thin": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "replicates": {"type": "integer", "minimum": 1},
                "store": {
                    "anyOf": [{"enum": ["gamma", "all"]},
                              {"type": "array", "items": {"type": "string"}}]
                },
            },
        },
        "diagnostics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"max_lag": {"type": "integer", "minimum": 1}},
        },
        "output": {"type": "string"},
    },
}


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_config(path) -> dict:
    """Read and schema-validate an experiment config; raises ConfigError
    with a field path on any violation."""
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "$" + "".join(f"[{p!r}]" for p in exc.absolute_path)
        raise ConfigError(f"{path}: config invalid at {where}: {exc.message}") from exc
    data = cfg["model"]["data"]
    if ("path" in data) == ("inline" in data):
        raise ConfigError(
            f"{path}: model.data must have exactly one of 'path' or 'inline'"
        )
    return cfg


# ---------------------------------------------------------------------------
# dataset CSV


def _parse_rows(path: Path) -> tuple[list[str], list[list[float]]]:
    header = None
    rows = []
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            if not raw or raw[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in raw]
                continue
            if len(raw) != len(header):
                raise ConfigError(
                    f"{path}:{lineno}: ragged row, {len(raw)} cells vs "
                    f"{len(header)} header columns"
                )
            vals = []
            for col, cell in zip(header, raw):
                try:
                    vals.append(float(cell))
                except ValueError as exc:
                    raise ConfigError(
                        f"{path}:{lineno}: non-numeric cell in column {col!r}: "
                        f"{cell!r}"
                    ) from exc
            rows.append(vals)
    if header is None or not rows:
        raise ConfigError(f"{path}: no data rows")
    return header, rows


def _group(header: list[str], prefix: str) -> list[int]:
    exact = [i for i, h in enumerate(header) if h == prefix]
    numbered = sorted(
        (int(h.split(".", 1)[1]), i)
        for i, h in enumerate(header)
        if h.startswith(prefix + ".") and h.split(".", 1)[1].isdigit()
    )
    if exact and numbered:
        raise ConfigError(
            f"columns use both {prefix!r} and {prefix}.j encodings; pick one"
        )
    return exact or [i for _, i in numbered]


def _expand_variances(
    path: Path, header, data: np.ndarray, prefix: str, dim: int
) -> np.ndarray | None:
    """Expand per-row variance columns (or a sidecar of full matrices)
    into an (n, dim, dim) SPD stack."""
    n = data.shape[0]
    sidecar = path.with_suffix("") if path.suffix else path
    sidecar = sidecar.parent / (sidecar.name + f".{prefix}.csv")
    cols = _group(header, prefix)
    if cols and sidecar.exists():
        raise ConfigError(
            f"{path}: both {prefix} columns and sidecar {sidecar.name} present; "
            "exactly one encoding per dataset"
        )
    if sidecar.exists():
        _, rows = _parse_rows(sidecar)
        flat = np.asarray(rows, dtype=float)
        if flat.shape != (n, dim * dim):
            raise ConfigError(
                f"{sidecar}: expected {n} rows of {dim * dim} entries, "
                f"got shape {flat.shape}"
            )
        out = flat.reshape(n, dim, dim)
        for i in range(n):
            try:
                as_spd(out[i], f"{prefix} matrix")
            except SpdError as exc:
                raise ConfigError(f"{sidecar}: row {i + 1}: {exc}") from exc
        return out
    if not cols:
        return None
    vals = data[:, cols]
    if len(cols) == 1:
        out = vals[:, 0, None, None] * np.eye(dim)
    elif len(cols) == dim:
        out = np.zeros((n, dim, dim))
        idx = np.arange(dim)
        out[:, idx, idx] = vals
    else:
        raise ConfigError(
            f"{path}: {prefix} has {len(cols)} columns, expected 1 (scalar) "
            f"or {dim} (diagonal)"
        )
    for i in range(n):
        if np.any(np.diag(out[i]) <= 0):
            raise ConfigError(f"{path}: row {i + 1}: nonpositive {prefix} variance")
    return out


def load_dataset(path) -> dict:
    """Read a dataset CSV into matrices Y, X, Z and variance stacks V, U.

    Returns a dict with keys Y (n, m), X (n, p), Z (n, q), V (n, p, p)
    or None, U (n, m, m) or None.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"dataset file not found: {path}")
    header, rows = _parse_rows(path)
    data = np.asarray(rows, dtype=float)
    out = {}
    for name, prefix in (("Y", "y"), ("X", "x"), ("Z", "z")):
        cols = _group(header, prefix)
        if not cols:
            raise ConfigError(f"{path}: no {prefix!r} columns found")
        out[name] = data[:, cols]
    n, m = out["Y"].shape
    p = out["X"].shape[1]
    out["V"] = _expand_variances(path, header, data, "xvar", p)
    out["U"] = _expand_variances(path, header, data, "yvar", m)
    return out


def write_dataset_csv(path, Y, X, Z, xvar=None, yvar=None, provenance: dict | None = None):
    """Write a dataset CSV with scalar or diagonal variance columns."""
    Y, X, Z = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (Y, X, Z))
    n = Y.shape[0]
    header = (
        [f"y.{j+1}" for j in range(Y.shape[1])]
        + [f"x.{j+1}" for j in range(X.shape[1])]
        + [f"z.{j+1}" for j in range(Z.shape[1])]
    )
    blocks = [Y, X, Z]
    for name, arr in (("xvar", xvar), ("yvar", yvar)):
        if arr is None:
            continue
        arr = np.asarray(arr, dtype=float)
        if arr.ndim <= 1:
            header.append(name)
            blocks.append(np.broadcast_to(arr, (n,)).reshape(n, 1))
        else:
            header += [f"{name}.{j+1}" for j in range(arr.shape[1])]
            blocks.append(arr)
    table = np.hstack(blocks)
    lines = []
    if provenance:
        lines.append("# provenance: " + json.dumps(provenance, sort_keys=True))
    lines.append(",".join(header))
    for row in table:
        lines.append(",".join(f"{v:.17g}" for v in row))
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# model assembly from config


def _as_matrix(value, dim: int, what: str) -> np.ndarray:
    if np.isscalar(value):
        return float(value) * np.eye(dim)
    arr = np.asarray(value, dtype=float)
    if arr.shape != (dim, dim):
        raise ConfigError(f"{what}: expected {dim}x{dim} matrix, got {arr.shape}")
    return arr


def _as_vector(value, dim: int, what: str) -> np.ndarray:
    if np.isscalar(value):
        return np.full(dim, float(value))
    arr = np.asarray(value, dtype=float).ravel()
    if arr.size != dim:
        raise ConfigError(f"{what}: expected length {dim}, got {arr.size}")
    return arr


def model_from_config(cfg: dict, base_dir) -> ModelConfig:
    """Assemble a ModelConfig from a validated config dict."""
    spec = cfg["model"]
    variant = spec["variant"]
    data = spec["data"]
    if "path" in data:
        ds = load_dataset(Path(base_dir) / data["path"])
    else:
        inline = data["inline"]
        ds = {
            "Y": np.atleast_2d(np.asarray(inline["Y"], dtype=float)),
            "X": np.atleast_2d(np.asarray(inline["X"], dtype=float)),
            "Z": np.atleast_2d(np.asarray(inline["Z"], dtype=float)),
        }
        n, p = ds["X"].shape
        m = ds["Y"].shape[1]
        for key, prefix, dim in (("V", "xvar", p), ("U", "yvar", m)):
            raw = inline.get(prefix)
            if raw is None:
                ds[key] = None
            elif np.isscalar(raw):
                ds[key] = np.broadcast_to(float(raw) * np.eye(dim), (n, dim, dim)).copy()
            else:
                arr = np.asarray(raw, dtype=float)
                ds[key] = np.broadcast_to(arr, (n, dim, dim)).copy()
    n, m = ds["Y"].shape
    p, q = ds["X"].shape[1], ds["Z"].shape[1]
    if ds["V"] is None:
        raise ConfigError("dataset carries no feature error variances (xvar)")
    if variant.endswith("xy") and ds["U"] is None:
        raise ConfigError(f"variant {variant} needs response error variances (yvar)")
    priors = spec["priors"]
    kwargs = dict(
        variant=variant,
        Y=ds["Y"], X=ds["X"], Z=ds["Z"], V=ds["V"], U=ds["U"],
        a0=float(priors["a0"]),
        B0=_as_matrix(priors["B0"], m, "priors.B0"),
        j0=_as_vector(priors["j0"], m * (q + p), "priors.j0"),
        J0=_as_matrix(priors["J0"], m * (q + p), "priors.J0"),
    )
    if variant.startswith("classical"):
        if "k" not in priors or "K" not in priors:
            raise ConfigError(f"variant {variant} requires priors.k and priors.K")
        k = np.asarray(priors["k"], dtype=float)
        if k.ndim <= 1 and k.size in (1, p):
            k = np.broadcast_to(_as_vector(priors["k"], p, "priors.k"), (n, p))
        elif k.shape != (n, p):
            raise ConfigError(f"priors.k: expected scalar, length-{p}, or {n}x{p}")
        kwargs["k"] = np.array(k, dtype=float)
        K = _as_matrix(priors["K"], p, "priors.K")
        kwargs["K"] = np.broadcast_to(K, (n, p, p)).copy()
    return ModelConfig(**kwargs)


def runspec_from_config(cfg: dict, overrides: dict | None = None) -> RunSpec:
    run = dict(cfg["run"])
    if overrides:
        run.update({k: v for k, v in overrides.items() if v is not None})
    T = int(run["T"])
    return RunSpec(
        T=T,
        burn_in=int(run.get("burn_in", T // 10)),
        thin=int(run.get("thin", 1)),
        seed=int(run["seed"]),
        replicates=int(run.get("replicates", 1)),
        store=run.get("store", "gamma"),
    )


# ---------------------------------------------------------------------------
# chain CSV


def write_chain_csv(path, output: ChainOutput, provenance: dict | None = None) -> None:
    prov = {
        "seed": output.seed,
        "T": output.T,
        "burn_in": output.burn_in,
        "thin": output.thin,
        "variant": output.variant,
        "dims": output.dims,
    }
    if provenance:
        prov.update(provenance)
    lines = ["# provenance: " + json.dumps(prov, sort_keys=True)]
    lines.append(",".join(output.labels))
    for row in output.draws:
        lines.append(",".join(f"{v:.17g}" for v in row))
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def read_chain_csv(path) -> tuple[np.ndarray, list[str], dict]:
    """Read a chain CSV back into (draws, labels, provenance)."""
    path = Path(path)
    prov = {}
    with open(path) as fh:
        header = None
        rows = []
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("#"):
                if "provenance:" in line:
                    prov = json.loads(line.split("provenance:", 1)[1])
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append([float(c) for c in line.split(",")])
    if header is None:
        raise ConfigError(f"{path}: empty chain file")
    return np.asarray(rows, dtype=float), header, prov

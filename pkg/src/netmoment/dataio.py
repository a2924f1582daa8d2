"""CSV ingestion, covariate derivation, and result serialization.

File conventions: comma separator, ``.`` decimal point, mandatory header
row, 0-based integer node ids.  Edge lists carry one row per unordered
pair with nonzero weight; covariate files carry every unordered pair
exactly once, so they also fix the node count.  Floats are written with
``repr`` so a write/read round trip is bit-exact.
"""

import csv
import json
import math

import numpy as np

from .errors import DataError
from .estimation import FitResult, SolverConfig
from .network import NetworkData, pair_count, pair_indices
from .simulation import CovariateRule, GenSpec, McStudyReport

TRANSFORMS = ("none", "euclidean_distance", "match_indicator")


def _open_rows(path):
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from exc
    with handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise DataError(f"{path}: file is empty, expected a header row")
    return rows


def _parse_int(text, path, line, what):
    try:
        return int(text)
    except ValueError as exc:
        raise DataError(f"{path} line {line}: {what} {text!r} is not an integer") from exc


def _parse_float(text, path, line, what):
    try:
        value = float(text)
    except ValueError as exc:
        raise DataError(f"{path} line {line}: {what} {text!r} is not a number") from exc
    if not math.isfinite(value):
        raise DataError(f"{path} line {line}: {what} must be finite")
    return value


def read_edges(path, n):
    """Read an edge-list CSV (header ``i,j,weight``) into an adjacency matrix.

    Pairs absent from the file get weight zero.  Self-loops, duplicate
    unordered pairs, and node ids outside [0, n) are rejected.
    """
    rows = _open_rows(path)
    if [c.strip() for c in rows[0]] != ["i", "j", "weight"]:
        raise DataError(f"{path}: expected header 'i,j,weight', got {','.join(rows[0])!r}")
    adjacency = np.zeros((n, n))
    seen = set()
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataError(f"{path} line {line}: expected 3 fields, got {len(row)}")
        i = _parse_int(row[0], path, line, "node id")
        j = _parse_int(row[1], path, line, "node id")
        w = _parse_float(row[2], path, line, "weight")
        if i == j:
            raise DataError(f"{path} line {line}: self-loop at node {i} is not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise DataError(f"{path} line {line}: node id out of range [0, {n})")
        key = (max(i, j), min(i, j))
        if key in seen:
            raise DataError(f"{path} line {line}: duplicate unordered pair {key}")
        seen.add(key)
        adjacency[i, j] = w
        adjacency[j, i] = w
    return adjacency


def read_pair_covariates(path):
    """Read a covariate CSV (header ``i,j,z1,...,zp``).

    Every unordered pair must appear exactly once; the node count is
    inferred from the largest id and validated against the row count.
    Returns (n, covariates) with covariates in pair-offset order.
    """
    rows = _open_rows(path)
    header = [c.strip() for c in rows[0]]
    if len(header) < 3 or header[:2] != ["i", "j"]:
        raise DataError(f"{path}: expected header 'i,j,z1,...,zp'")
    expected_z = [f"z{k}" for k in range(1, len(header) - 1)]
    if header[2:] != expected_z:
        raise DataError(f"{path}: covariate columns must be named {','.join(expected_z)}")
    p = len(header) - 2
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no covariate rows")

    max_id = -1
    parsed = []
    for line, row in enumerate(body, start=2):
        if len(row) != 2 + p:
            raise DataError(f"{path} line {line}: expected {2 + p} fields, got {len(row)}")
        i = _parse_int(row[0], path, line, "node id")
        j = _parse_int(row[1], path, line, "node id")
        if i == j:
            raise DataError(f"{path} line {line}: self-pair at node {i} is not allowed")
        if i < 0 or j < 0:
            raise DataError(f"{path} line {line}: node ids must be nonnegative")
        values = [_parse_float(v, path, line, "covariate") for v in row[2:]]
        parsed.append((line, i, j, values))
        max_id = max(max_id, i, j)

    n = max_id + 1
    if len(body) != pair_count(n):
        raise DataError(
            f"{path}: {len(body)} rows but {pair_count(n)} unordered pairs "
            f"exist for the {n} nodes referenced; every pair must appear exactly once"
        )
    covariates = np.full((pair_count(n), p), np.nan)
    for line, i, j, values in parsed:
        hi, lo = max(i, j), min(i, j)
        offset = hi * (hi - 1) // 2 + lo
        if not np.isnan(covariates[offset]).all():
            raise DataError(f"{path} line {line}: duplicate unordered pair ({hi}, {lo})")
        covariates[offset] = values
    # duplicates were rejected and the row count matches, so no pair is missing
    return n, covariates


def read_node_attrs(path):
    """Read a node-attribute CSV (header ``i,x1,...,xk``), one row per node."""
    rows = _open_rows(path)
    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or header[0] != "i":
        raise DataError(f"{path}: expected header 'i,x1,...,xk'")
    expected_x = [f"x{k}" for k in range(1, len(header))]
    if header[1:] != expected_x:
        raise DataError(f"{path}: attribute columns must be named {','.join(expected_x)}")
    k = len(header) - 1
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no attribute rows")
    n = len(body)
    attrs = np.full((n, k), np.nan)
    seen = set()
    for line, row in enumerate(body, start=2):
        if len(row) != 1 + k:
            raise DataError(f"{path} line {line}: expected {1 + k} fields, got {len(row)}")
        i = _parse_int(row[0], path, line, "node id")
        if not 0 <= i < n:
            raise DataError(
                f"{path} line {line}: node id {i} outside [0, {n}); ids must "
                f"cover every node exactly once"
            )
        if i in seen:
            raise DataError(f"{path} line {line}: node {i} appears twice")
        seen.add(i)
        attrs[i] = [_parse_float(v, path, line, "attribute") for v in row[1:]]
    return attrs


def derive_pair_covariates(node_attrs, transform):
    """Build symmetric pair covariates from per-node attributes.

    ``euclidean_distance`` gives one column with the distance between the
    two nodes' attribute vectors; ``match_indicator`` gives one column that
    is 1.0 when the vectors are identical and 0.0 otherwise.
    """
    attrs = np.asarray(node_attrs, dtype=float)
    if attrs.ndim != 2 or attrs.shape[0] < 2:
        raise DataError("node attributes must be a 2-D array with at least 2 rows")
    if not np.isfinite(attrs).all():
        raise DataError("node attributes must be finite")
    rows, cols = pair_indices(attrs.shape[0])
    if transform == "euclidean_distance":
        return np.linalg.norm(attrs[rows] - attrs[cols], axis=1)[:, None]
    if transform == "match_indicator":
        return np.all(attrs[rows] == attrs[cols], axis=1).astype(float)[:, None]
    raise DataError(f"unknown transform {transform!r}; choose euclidean_distance or match_indicator")


def write_edges(path, data):
    """Write the nonzero unordered pairs of a network as an edge-list CSV."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["i", "j", "weight"])
        weights = data.pair_weights
        for i, j, w in zip(data.rows, data.cols, weights):
            if w != 0.0:
                writer.writerow([int(i), int(j), repr(float(w))])


def write_pair_covariates(path, data):
    """Write every unordered pair's covariate row as a CSV."""
    z = data.covariates
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["i", "j"] + [f"z{k}" for k in range(1, z.shape[1] + 1)])
        for offset, (i, j) in enumerate(zip(data.rows, data.cols)):
            writer.writerow([int(i), int(j)] + [repr(float(v)) for v in z[offset]])


def fit_result_to_dict(result, bias_correct=True):
    """JSON-ready dict of a fit with stable field names."""
    out = {
        "beta": result.beta.tolist(),
        "gamma": result.gamma.tolist(),
        "gamma_bc": result.gamma_bc.tolist() if bias_correct else None,
        "se_beta": result.se_beta.tolist(),
        "se_gamma": result.se_gamma.tolist(),
        "bias": result.bias.tolist() if bias_correct else None,
        "converged": result.converged,
        "iterations": result.iterations,
        "residual_degree": result.residual_degree,
        "residual_covariate": result.residual_covariate,
        "diagnostics": dict(result.diagnostics),
        "trace": list(result.trace),
    }
    return out


def write_fit_result_json(path, result, bias_correct=True):
    with open(path, "w") as handle:
        json.dump(fit_result_to_dict(result, bias_correct), handle, indent=2)
        handle.write("\n")


def fit_result_csv_rows(result, bias_correct=True):
    """Flat rows (parameter, index, estimate, std_error) for a fit."""
    rows = [["parameter", "index", "estimate", "std_error"]]
    for i, (b, se) in enumerate(zip(result.beta, result.se_beta)):
        rows.append(["beta", i, repr(float(b)), repr(float(se))])
    for k, (g, se) in enumerate(zip(result.gamma, result.se_gamma)):
        rows.append(["gamma", k, repr(float(g)), repr(float(se))])
    if bias_correct:
        for k, (g, se) in enumerate(zip(result.gamma_bc, result.se_gamma)):
            rows.append(["gamma_bc", k, repr(float(g)), repr(float(se))])
    return rows


def write_fit_result_csv(path, result, bias_correct=True):
    with open(path, "w", newline="") as handle:
        csv.writer(handle).writerows(fit_result_csv_rows(result, bias_correct))


def report_to_dict(report):
    """JSON-ready dict of a Monte Carlo study report."""
    return {
        "family": report.family,
        "n_grid": list(report.n_grid),
        "replicates": report.replicates,
        "records": list(report.records),
        "summaries": list(report.summaries),
        "slope_beta": report.slope_beta,
        "slope_gamma_bc": report.slope_gamma_bc,
        "errors": list(report.errors),
    }


def write_report_json(path, report):
    with open(path, "w") as handle:
        json.dump(report_to_dict(report), handle, indent=2)
        handle.write("\n")


def report_csv_rows(report):
    """One flat CSV row per replicate; coverage expands per coefficient."""
    p = 0
    for record in report.records:
        if record["cover_gamma"] is not None:
            p = max(p, len(record["cover_gamma"]))
    header = [
        "spec_index",
        "n",
        "replicate",
        "failed",
        "failure_reason",
        "err_beta",
        "err_gamma",
        "err_gamma_bc",
    ]
    header += [f"cover_gamma_{k}" for k in range(1, p + 1)]
    header += [f"cover_gamma_bc_{k}" for k in range(1, p + 1)]
    rows = [header]
    for record in report.records:
        row = [
            record["spec_index"],
            record["n"],
            record["replicate"],
            int(record["failed"]),
            record["failure_reason"],
        ]
        for key in ("err_beta", "err_gamma", "err_gamma_bc"):
            row.append("" if record[key] is None else repr(record[key]))
        for key in ("cover_gamma", "cover_gamma_bc"):
            values = record[key]
            for k in range(p):
                if values is None or k >= len(values):
                    row.append("")
                else:
                    row.append(int(values[k]))
        rows.append(row)
    return rows


def write_report_csv(path, report):
    with open(path, "w", newline="") as handle:
        csv.writer(handle).writerows(report_csv_rows(report))


_STUDY_KEYS = {
    "family": str,
    "n_grid": "int_list",
    "replicates": int,
    "gamma_star": "float_list",
    "beta_range": float,
    "covariate_rule": str,
    "covariate_p": int,
    "covariate_low": float,
    "covariate_high": float,
    "covariate_dim": int,
    "dependence": str,
    "rho": float,
    "noise_free": "bool",
    "seed": int,
    "tol_f": float,
    "tol_q": float,
    "max_outer": int,
    "max_inner_beta": int,
    "damping": float,
}

_REQUIRED_STUDY_KEYS = ("family", "n_grid", "replicates", "gamma_star")


def _parse_config_value(key, raw, path, line):
    kind = _STUDY_KEYS[key]
    try:
        if kind is str:
            return raw
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind == "bool":
            lowered = raw.lower()
            if lowered in ("true", "yes", "1"):
                return True
            if lowered in ("false", "no", "0"):
                return False
            raise ValueError(raw)
        if kind == "int_list":
            return [int(v.strip()) for v in raw.split(",") if v.strip()]
        if kind == "float_list":
            return [float(v.strip()) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise DataError(f"{path} line {line}: cannot parse {key} = {raw!r}") from exc
    raise DataError(f"unhandled config key kind for {key}")


def parse_study_config(path, seed_override=None):
    """Parse a flat ``key = value`` study config into run_mc_study inputs.

    Lines are ``key = value`` with ``#`` comments and blank lines ignored.
    Returns (specs, replicates, solver_config); spec k in the n-grid uses
    seed ``seed + k`` so grid points draw from distinct streams.
    """
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from exc

    values = {}
    for line_no, raw_line in enumerate(lines, start=1):
        text = raw_line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise DataError(f"{path} line {line_no}: expected 'key = value'")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in _STUDY_KEYS:
            raise DataError(f"{path} line {line_no}: unknown config key {key!r}")
        if key in values:
            raise DataError(f"{path} line {line_no}: duplicate key {key!r}")
        values[key] = _parse_config_value(key, raw, path, line_no)

    missing = [key for key in _REQUIRED_STUDY_KEYS if key not in values]
    if missing:
        raise DataError(f"{path}: missing required config keys: {', '.join(missing)}")

    rule = CovariateRule(
        kind=values.get("covariate_rule", "iid_pm1"),
        p=values.get("covariate_p", len(values["gamma_star"])),
        low=values.get("covariate_low", 0.0),
        high=values.get("covariate_high", 1.0),
        dim=values.get("covariate_dim", 2),
    )
    seed = values.get("seed", 0) if seed_override is None else seed_override
    specs = [
        GenSpec(
            n=n,
            family=values["family"],
            gamma_star=tuple(values["gamma_star"]),
            beta_range=values.get("beta_range", 1.0),
            covariates=rule,
            dependence=values.get("dependence", "independent"),
            rho=values.get("rho", 0.0),
            noise_free=values.get("noise_free", False),
            seed=seed + k,
        )
        for k, n in enumerate(values["n_grid"])
    ]
    config = SolverConfig(
        tol_f=values.get("tol_f", SolverConfig.tol_f),
        tol_q=values.get("tol_q", SolverConfig.tol_q),
        max_outer=values.get("max_outer", SolverConfig.max_outer),
        max_inner_beta=values.get("max_inner_beta", SolverConfig.max_inner_beta),
        damping=values.get("damping", SolverConfig.damping),
    )
    return specs, values["replicates"], config

"""Run configuration: a single JSON document with nested key blocks.

Every cross-module invariant is re-validated at load time and violations
name the offending dotted key.  All tolerances have defaults, and the
resolved configuration is echoed into outputs for provenance; the SHA-256
fingerprint of the resolved document identifies a run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .continuation import ContinuationPlan
from .errors import ChoquardError, ConfigError
from .functional import ProblemSpec
from .grid import Field, Grid, gaussian
from .potentials import FAMILIES, PotentialSpec

SCHEMA_VERSION = 1

_DEFAULTS = {
    "plan": {
        "lambda0": 1.0,
        "ratio": 2.0,
        "max_stages": 12,
        "stage_tol": 1e-10,
        "limit_tol": 1e-6,
        "tail_radius": 10.0,
    },
    "solver": {
        "tol": 1e-10,
        "max_iter": 20000,
        "recenter_period": 25,
        "init": {"kind": "gaussian", "sigma": None, "center": 0.0, "amplitude": 1.0},
    },
    "verify": {
        "seed": 1234,
        "young_count": 100,
        "young_slack": 1e-9,
        "bl_separations": [4.0, 8.0, 16.0],
        "bl_lambda": 10.0,
        "bl_sigma": 1.0,
        "bl_halving_factor": 0.5,
        "cl_pairs": 10000,
        "cl_radius": 30.0,
        "cl_slack": 1e-6,
    },
    "oracle": {
        "bracket": [0.1, 8.0],
        "r_max": 14.0,
        "dr": 1e-3,
        "tol": 1e-13,
        "linf_tol": 1e-2,
    },
    "output": {
        "directory": "out",
        "dump_fields": True,
        "dump_csv": False,
        "dump_traces": True,
    },
}


@dataclass
class RunConfig:
    """Validated, fully resolved configuration of one run."""

    potential: PotentialSpec
    grid: Grid
    plan: ContinuationPlan
    solver: dict
    verify: dict
    oracle: dict
    output: dict
    sweep: dict | None
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def fingerprint(self) -> str:
        """Hash of the run identity: everything except where outputs land."""
        doc = {k: v for k, v in self.raw.items() if k != "output"}
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()

    def problem(self, lam: float = 0.0) -> ProblemSpec:
        return ProblemSpec(self.potential, self.grid, lam)

    def initial_field(self) -> Field:
        init = self.solver["init"]
        sigma = init["sigma"]
        if sigma is None:
            sigma = self.grid.half_width / 8.0
        return gaussian(self.grid, sigma, init["center"], init["amplitude"])


def _require(block: dict, key: str, path: str):
    if key not in block:
        raise ConfigError(f"missing required key {path}.{key}", key=f"{path}.{key}")
    return block[key]


def _merged(block: dict, defaults: dict, path: str) -> dict:
    if not isinstance(block, dict):
        raise ConfigError(f"{path} must be an object", key=path)
    out = {}
    for key, default in defaults.items():
        value = block.get(key, default)
        if isinstance(default, dict) and isinstance(value, dict):
            value = _merged(value, default, f"{path}.{key}")
        out[key] = value
    unknown = set(block) - set(defaults)
    if unknown:
        key = f"{path}.{sorted(unknown)[0]}"
        raise ConfigError(f"unknown key {key}", key=key)
    return out


def _load_profile(entry, base_dir):
    import os

    path = entry if os.path.isabs(entry) else os.path.join(base_dir, entry)
    radii, vals = [], []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("r,"):
                    continue
                r, v = line.split(",")[:2]
                radii.append(float(r))
                vals.append(float(v))
    except OSError as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}", key="potential.profile_path")
    return tuple(radii), tuple(vals)


def resolve_config(doc: dict, base_dir: str = ".") -> RunConfig:
    """Validate a parsed JSON document and build the typed configuration."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", key="")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version {version} unsupported (expected {SCHEMA_VERSION})",
            key="schema_version",
        )
    known = {"schema_version", "potential", "grid", "plan", "solver", "verify", "oracle", "output", "sweep"}
    unknown = set(doc) - known
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key}", key=key)

    grid_block = doc.get("grid")
    if not isinstance(grid_block, dict):
        raise ConfigError("missing grid block", key="grid")
    try:
        grid = Grid(
            ndim=int(_require(grid_block, "ndim", "grid")),
            half_width=float(_require(grid_block, "half_width", "grid")),
            n=int(_require(grid_block, "n", "grid")),
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}", key="grid.n")

    pot_block = doc.get("potential")
    if not isinstance(pot_block, dict):
        raise ConfigError("missing potential block", key="potential")
    family = _require(pot_block, "family", "potential")
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}", key="potential.family")
    profile = None
    if "profile_path" in pot_block:
        profile = _load_profile(pot_block["profile_path"], base_dir)
    elif "profile" in pot_block:
        prof = pot_block["profile"]
        profile = (tuple(prof[0]), tuple(prof[1]))
    matrix = pot_block.get("matrix")
    try:
        potential = PotentialSpec(
            family=family,
            p=float(_require(pot_block, "p", "potential")),
            q=float(_require(pot_block, "q", "potential")),
            ndim=grid.ndim,
            alpha=pot_block.get("alpha"),
            beta=pot_block.get("beta"),
            matrix=tuple(tuple(row) for row in matrix) if matrix else None,
            profile=profile,
        )
    except (ValueError, ChoquardError) as exc:
        raise ConfigError(f"potential: {exc}", key="potential")

    plan_block = _merged(doc.get("plan", {}), _DEFAULTS["plan"], "plan")
    try:
        plan = ContinuationPlan(
            lambda0=float(plan_block["lambda0"]),
            ratio=float(plan_block["ratio"]),
            max_stages=int(plan_block["max_stages"]),
            stage_tol=float(plan_block["stage_tol"]),
            limit_tol=float(plan_block["limit_tol"]),
            tail_radius=float(plan_block["tail_radius"]),
        )
    except ValueError as exc:
        raise ConfigError(f"plan: {exc}", key="plan")
    if not 0 < plan.tail_radius < grid.half_width:
        raise ConfigError(
            f"tail_radius {plan.tail_radius} must lie in (0, {grid.half_width})",
            key="plan.tail_radius",
        )

    solver = _merged(doc.get("solver", {}), _DEFAULTS["solver"], "solver")
    if solver["tol"] <= 0:
        raise ConfigError("solver.tol must be positive", key="solver.tol")
    if solver["max_iter"] < 1:
        raise ConfigError("solver.max_iter must be >= 1", key="solver.max_iter")
    center = np.atleast_1d(np.asarray(solver["init"]["center"], dtype=float))
    if center.size not in (1, grid.ndim):
        raise ConfigError(
            "solver.init.center has wrong dimension", key="solver.init.center"
        )

    verify = _merged(doc.get("verify", {}), _DEFAULTS["verify"], "verify")
    oracle = _merged(doc.get("oracle", {}), _DEFAULTS["oracle"], "oracle")
    output = _merged(doc.get("output", {}), _DEFAULTS["output"], "output")

    sweep = doc.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, dict) or "parameter" not in sweep or "values" not in sweep:
            raise ConfigError("sweep needs parameter and values", key="sweep")
        if sweep["parameter"] not in ("potential.p", "potential.q", "plan.lambda0"):
            raise ConfigError(
                f"unsupported sweep parameter {sweep['parameter']!r}",
                key="sweep.parameter",
            )

    resolved = {
        "schema_version": SCHEMA_VERSION,
        "potential": pot_block,
        "grid": grid_block,
        "plan": plan_block,
        "solver": solver,
        "verify": verify,
        "oracle": oracle,
        "output": output,
    }
    if sweep is not None:
        resolved["sweep"] = sweep
    return RunConfig(
        potential=potential,
        grid=grid,
        plan=plan,
        solver=solver,
        verify=verify,
        oracle=oracle,
        output=output,
        sweep=sweep,
        raw=resolved,
    )


def load_config(path) -> RunConfig:
    import os

    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", key=str(path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}", key=str(path))
    return resolve_config(doc, base_dir=os.path.dirname(os.path.abspath(path)))

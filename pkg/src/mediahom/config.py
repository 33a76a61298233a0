"""Declarative scenario configs: JSON in, validated objects out.

A scenario names a network model, a coupling graph, bath attachments with
their prepared states, an initial system state, and one analysis to run.
Every validation failure raises :class:`ConfigError` naming the offending
field.  Configs carry a content digest so emitted tables are traceable to
the exact inputs that produced them.

Named bath states (qubits): ``"zero"`` = |0><0|, ``"plus"`` / ``"minus"``
= |+><+| / |-><-|, ``{"diag": p}`` = p|0><0| + (1-p)|1><1|, and
``{"mix": [p, s1, s2]}`` = p*s1 + (1-p)*s2 with s1, s2 again state specs.
Explicit matrices use ``{"matrix": [[...]]}`` with entries either reals or
``[re, im]`` pairs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import ConfigError
from .network import CouplingGraph, NetworkSpec, chain_graph
from .tolerances import DEFAULT_ITERATE_TOL, DEFAULT_MAX_ITER, PERIPHERAL_ATOL

_ANALYSES = ("fixed_point", "trajectory", "spectrum", "site_populations")
_TOLERANCE_KEYS = ("iterate_tol", "max_iter", "peripheral_tol")


@dataclass(frozen=True)
class BathSpec:
    """One bath attachment: where it couples and what it prepares."""

    site: int
    state: np.ndarray


@dataclass(frozen=True)
class SweepSpec:
    """Parameter path plus the values to substitute at it."""

    param: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    sites: int
    local_dim: int
    delta: float | None
    graph: CouplingGraph
    t: float
    baths: tuple[BathSpec, ...]
    initial_state: str | dict
    analysis: str
    analysis_arg: int | None
    iterate_tol: float
    max_iter: int
    peripheral_tol: float
    two_bath_mode: str
    bath_report: str
    sweep: SweepSpec | None
    digest: str
    raw: dict

    def network_spec(self):
        return NetworkSpec(
            graph=self.graph,
            local_dim=self.local_dim,
            model=self.model,
            delta=self.delta,
            bath_sites=tuple(
                (f"bath{i}", b.site) for i, b in enumerate(self.baths)
            ),
        )


def config_digest(raw):
    """Stable content hash of the raw config mapping."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _require(raw, key, kind, where="config"):
    if key not in raw:
        raise ConfigError(f"{where}: missing required field {key!r}")
    value = raw[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}.{key}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, kind):
        raise ConfigError(
            f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _parse_complex_entry(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list) and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                for x in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(
        f"{where}: matrix entries must be reals or [re, im] pairs, got {value!r}"
    )


def parse_matrix(entries, where):
    """Nested lists of reals or ``[re, im]`` pairs into a complex array."""
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{where}: expected a non-empty list of rows")
    rows = []
    for i, row in enumerate(entries):
        if not isinstance(row, list):
            raise ConfigError(f"{where}[{i}]: expected a list")
        rows.append([
            _parse_complex_entry(v, f"{where}[{i}][{j}]")
            for j, v in enumerate(row)
        ])
    if any(len(r) != len(rows) for r in rows):
        raise ConfigError(f"{where}: matrix must be square")
    return np.array(rows, dtype=complex)


def parse_bath_state(spec, local_dim, where):
    """A bath-state spec (named, parametric, or explicit) into a matrix."""
    if spec == "zero":
        return qmath.projector(qmath.basis_ket(local_dim, 0))
    if spec in ("plus", "minus"):
        if local_dim != 2:
            raise ConfigError(f"{where}: {spec!r} requires local_dim 2")
        sign = 1.0 if spec == "plus" else -1.0
        return qmath.projector(np.array([1.0, sign]) / np.sqrt(2.0))
    if isinstance(spec, str):
        raise ConfigError(f"{where}: unknown named state {spec!r}")
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(
            f"{where}: expected a named state or a single-key object, "
            f"got {spec!r}"
        )
    (kind, value), = spec.items()
    if kind == "diag":
        if local_dim != 2:
            raise ConfigError(f"{where}.diag: requires local_dim 2")
        if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
            raise ConfigError(f"{where}.diag: weight must be in [0, 1], got {value!r}")
        return np.diag([float(value), 1.0 - float(value)]).astype(complex)
    if kind == "mix":
        if not isinstance(value, list) or len(value) != 3:
            raise ConfigError(f"{where}.mix: expected [weight, state, state]")
        p = value[0]
        if not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
            raise ConfigError(f"{where}.mix: weight must be in [0, 1], got {p!r}")
        first = parse_bath_state(value[1], local_dim, f"{where}.mix[1]")
        second = parse_bath_state(value[2], local_dim, f"{where}.mix[2]")
        return float(p) * first + (1.0 - float(p)) * second
    if kind == "matrix":
        matrix = parse_matrix(value, f"{where}.matrix")
        if matrix.shape[0] != local_dim:
            raise ConfigError(
                f"{where}.matrix: dimension {matrix.shape[0]} does not match "
                f"local_dim {local_dim}"
            )
        try:
            return qmath.ensure_density(matrix)
        except ValueError as exc:
            raise ConfigError(f"{where}.matrix: {exc}") from exc
    raise ConfigError(f"{where}: unknown state form {kind!r}")


def _parse_couplings(raw, sites):
    spec = _require(raw, "couplings", dict)
    if len(spec) != 1:
        raise ConfigError("couplings: expected exactly one of 'chain' or 'edges'")
    (kind, value), = spec.items()
    if kind == "chain":
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"couplings.chain: expected a coupling, got {value!r}")
        return chain_graph(sites, float(value))
    if kind == "edges":
        if not isinstance(value, list):
            raise ConfigError("couplings.edges: expected a list of [a, b, J]")
        edges = []
        for i, edge in enumerate(value):
            if (not isinstance(edge, list) or len(edge) != 3
                    or not all(isinstance(x, (int, float)) for x in edge)):
                raise ConfigError(
                    f"couplings.edges[{i}]: expected [site, site, coupling]"
                )
            edges.append((int(edge[0]), int(edge[1]), float(edge[2])))
        try:
            return CouplingGraph(sites, tuple(edges))
        except ValueError as exc:
            raise ConfigError(f"couplings.edges: {exc}") from exc
    raise ConfigError(f"couplings: unknown form {kind!r}")


def _parse_initial_state(spec):
    if spec in ("ground", "random"):
        return spec
    if isinstance(spec, dict) and len(spec) == 1:
        (kind, value), = spec.items()
        if kind == "random_seed":
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(
                    f"initial_state.random_seed: expected an integer, got {value!r}"
                )
            return {"random_seed": value}
        if kind == "matrix":
            return {"matrix": value}  # materialized at run time, dim-checked there
    raise ConfigError(
        f"initial_state: expected 'ground', 'random', {{'random_seed': n}} "
        f"or {{'matrix': ...}}, got {spec!r}"
    )


def _parse_analysis(spec):
    if spec in ("fixed_point", "spectrum", "site_populations"):
        return spec, None
    if isinstance(spec, dict) and len(spec) == 1 and "trajectory" in spec:
        steps = spec["trajectory"]
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 0:
            raise ConfigError(
                f"analysis.trajectory: expected a step count >= 0, got {steps!r}"
            )
        return "trajectory", steps
    raise ConfigError(
        f"analysis: expected one of {_ANALYSES} (trajectory takes a step "
        f"count), got {spec!r}"
    )


def _parse_sweep(raw):
    if "sweep" not in raw:
        return None
    spec = raw["sweep"]
    if not isinstance(spec, dict):
        raise ConfigError("sweep: expected an object")
    param = spec.get("param")
    if not isinstance(param, str) or not param:
        raise ConfigError("sweep.param: expected a non-empty parameter path")
    if ("values" in spec) == ("linspace" in spec):
        raise ConfigError("sweep: expected exactly one of 'values' or 'linspace'")
    if "values" in spec:
        values = spec["values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values: expected a non-empty list")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                   for v in values):
            raise ConfigError("sweep.values: entries must be numbers")
        return SweepSpec(param, tuple(float(v) for v in values))
    grid = spec["linspace"]
    if (not isinstance(grid, list) or len(grid) != 3
            or not all(isinstance(v, (int, float)) for v in grid)
            or int(grid[2]) != grid[2] or grid[2] < 1):
        raise ConfigError("sweep.linspace: expected [start, stop, count]")
    values = np.linspace(float(grid[0]), float(grid[1]), int(grid[2]))
    return SweepSpec(param, tuple(float(v) for v in values))


_KNOWN_KEYS = {
    "model", "sites", "local_dim", "delta", "couplings", "t", "baths",
    "initial_state", "analysis", "tolerances", "two_bath_mode",
    "bath_report", "sweep",
}


def parse_config(raw):
    """Validate a raw mapping into a :class:`ScenarioConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config: expected an object, got {type(raw).__name__}")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"config: unknown fields {sorted(unknown)}")

    model = _require(raw, "model", str)
    if model not in ("swap", "xxz"):
        raise ConfigError(f"model: expected 'swap' or 'xxz', got {model!r}")
    sites = _require(raw, "sites", int)
    if sites < 1:
        raise ConfigError(f"sites: must be >= 1, got {sites}")
    local_dim = raw.get("local_dim", 2)
    if not isinstance(local_dim, int) or local_dim < 2:
        raise ConfigError(f"local_dim: must be an integer >= 2, got {local_dim!r}")
    delta = None
    if model == "xxz":
        delta = _require(raw, "delta", float)
        if local_dim != 2:
            raise ConfigError("local_dim: xxz model requires 2")
    elif "delta" in raw:
        raise ConfigError("delta: only meaningful for the xxz model")

    graph = _parse_couplings(raw, sites)
    t = _require(raw, "t", float)
    if t < 0:
        raise ConfigError(f"t: must be non-negative, got {t}")

    baths_raw = _require(raw, "baths", list)
    baths = []
    seen_sites = set()
    for i, entry in enumerate(baths_raw):
        where = f"baths[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}: expected an object")
        site = _require(entry, "site", int, where)
        if not 0 <= site < sites:
            raise ConfigError(f"{where}.site: {site} out of range for {sites} sites")
        if site in seen_sites:
            raise ConfigError(f"{where}.site: more than one bath at site {site}")
        seen_sites.add(site)
        if "state" not in entry:
            raise ConfigError(f"{where}: missing required field 'state'")
        state = parse_bath_state(entry["state"], local_dim, f"{where}.state")
        extra = set(entry) - {"site", "state"}
        if extra:
            raise ConfigError(f"{where}: unknown fields {sorted(extra)}")
        baths.append(BathSpec(site=site, state=state))

    if "initial_state" not in raw:
        raise ConfigError("config: missing required field 'initial_state'")
    initial_state = _parse_initial_state(raw["initial_state"])
    if "analysis" not in raw:
        raise ConfigError("config: missing required field 'analysis'")
    analysis, analysis_arg = _parse_analysis(raw["analysis"])

    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("tolerances: expected an object")
    unknown = set(tolerances) - set(_TOLERANCE_KEYS)
    if unknown:
        raise ConfigError(f"tolerances: unknown fields {sorted(unknown)}")
    iterate_tol = tolerances.get("iterate_tol", DEFAULT_ITERATE_TOL)
    if not isinstance(iterate_tol, (int, float)) or iterate_tol <= 0:
        raise ConfigError(f"tolerances.iterate_tol: must be positive, got {iterate_tol!r}")
    max_iter = tolerances.get("max_iter", DEFAULT_MAX_ITER)
    if not isinstance(max_iter, int) or max_iter < 1:
        raise ConfigError(f"tolerances.max_iter: must be a positive integer, got {max_iter!r}")
    peripheral_tol = tolerances.get("peripheral_tol", PERIPHERAL_ATOL)
    if not isinstance(peripheral_tol, (int, float)) or peripheral_tol <= 0:
        raise ConfigError(
            f"tolerances.peripheral_tol: must be positive, got {peripheral_tol!r}"
        )

    two_bath_mode = raw.get("two_bath_mode", "simultaneous")
    if two_bath_mode not in ("simultaneous", "alternating"):
        raise ConfigError(
            f"two_bath_mode: expected 'simultaneous' or 'alternating', "
            f"got {two_bath_mode!r}"
        )
    bath_report = raw.get("bath_report", "input")
    if bath_report not in ("input", "post_collision"):
        raise ConfigError(
            f"bath_report: expected 'input' or 'post_collision', got {bath_report!r}"
        )

    return ScenarioConfig(
        model=model, sites=sites, local_dim=local_dim, delta=delta,
        graph=graph, t=t, baths=tuple(baths), initial_state=initial_state,
        analysis=analysis, analysis_arg=analysis_arg,
        iterate_tol=float(iterate_tol), max_iter=max_iter,
        peripheral_tol=float(peripheral_tol), two_bath_mode=two_bath_mode,
        bath_report=bath_report, sweep=_parse_sweep(raw),
        digest=config_digest(raw), raw=raw,
    )


def load_config(path):
    """Read and validate a JSON scenario config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def set_by_path(raw, path, value):
    """Substitute ``value`` at a dotted ``path`` into a raw config mapping.

    Path segments index objects by key and lists by integer position, e.g.
    ``"baths.0.state.mix.0"``.  Returns a deep copy; the input is untouched.
    """
    updated = json.loads(json.dumps(raw))
    node = updated
    parts = path.split(".")
    try:
        for seg in parts[:-1]:
            node = node[int(seg)] if isinstance(node, list) else node[seg]
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            if last not in node:
                raise KeyError(last)
            node[last] = value
    except (KeyError, IndexError, ValueError, TypeError) as exc:
        raise ConfigError(f"sweep.param: path {path!r} not found in config") from exc
    return updated

"""Scenario runners: config in, result table out.

``run_scenario`` orchestrates the network builders, channel construction,
and convergence analyses behind a single declarative config;  ``sweep``
repeats it across a parameter grid, optionally in parallel, with rows
always assembled in input order.  ``emit_csv`` serializes tables
deterministically (12 significant digits, metadata in comment lines) so
identical config + seed reproduces byte-identical output.
"""

from __future__ import annotations

import csv
import datetime
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, convergence, qmath
from ._kernels import backend_name, hermitian_trace_norm
from .collision import CollisionChannel, build_channel
from .config import ScenarioConfig, parse_config, set_by_path
from .errors import (
    ConfigError,
    ConvergenceError,
    ShapeError,
    UndefinedRatioError,
)
from .network import interaction_hamiltonian, system_hamiltonian

_ANALYSIS_COLUMNS = {
    "fixed_point": (
        "s_system", "s_bath", "entropy_ratio", "concurrence_12",
        "spectral_gap", "peripheral_count", "collisions", "residual",
        "relaxing", "status",
    ),
    "trajectory": ("step", "s_system", "concurrence_12", "step_residual",
                   "status"),
    "spectrum": ("index", "eig_real", "eig_imag", "modulus", "status"),
    "site_populations": ("role", "site", "p_zero", "status"),
}


@dataclass
class ResultTable:
    """Uniform-width rows plus provenance metadata.

    Failed points never drop cells: numeric columns hold ``nan`` and the
    trailing ``status`` column says what happened.
    """

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row of width {len(row)} in a table with "
                    f"{len(self.columns)} columns"
                )

    def append(self, row):
        row = tuple(row)
        if len(row) != len(self.columns):
            raise ValueError(
                f"row of width {len(row)} in a table with "
                f"{len(self.columns)} columns"
            )
        self.rows.append(row)

    def column(self, name):
        """All values of one column, by name."""
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _initial_state(cfg, dim, seed=None):
    spec = cfg.initial_state
    if spec == "ground":
        return qmath.projector(qmath.basis_ket(dim, 0))
    if spec == "random" or (isinstance(spec, dict) and "random_seed" in spec):
        if isinstance(spec, dict):
            seed = spec["random_seed"] if seed is None else seed
        if seed is None:
            raise ConfigError(
                "initial_state: 'random' needs a seed (config random_seed "
                "or the --seed flag)"
            )
        return qmath.random_density(dim, np.random.default_rng(seed))
    from .config import parse_matrix  # local import to avoid cycle at load

    matrix = parse_matrix(spec["matrix"], "initial_state.matrix")
    if matrix.shape[0] != dim:
        raise ConfigError(
            f"initial_state.matrix: dimension {matrix.shape[0]} does not "
            f"match system dimension {dim}"
        )
    try:
        return qmath.ensure_density(matrix)
    except ValueError as exc:
        raise ConfigError(f"initial_state.matrix: {exc}") from exc


def build_scenario_channel(cfg):
    """The collision channel a config describes.

    Bath ancillas occupy trailing tensor factors in config order.  With no
    baths the channel degenerates to unitary conjugation (trivial ancilla).
    """
    spec = cfg.network_spec()
    h_sys = system_hamiltonian(spec)
    dim = cfg.local_dim ** cfg.sites
    n_baths = len(cfg.baths)
    if n_baths == 0:
        unitary = qmath.unitary_from_hamiltonian(h_sys, cfg.t)
        return CollisionChannel(unitary, np.eye(1), (1,), cfg.t)
    dims = [cfg.local_dim] * (cfg.sites + n_baths)
    terms = [
        interaction_hamiltonian(dims, [(cfg.sites + i, bath.site)])
        for i, bath in enumerate(cfg.baths)
    ]
    anc_dim = cfg.local_dim ** n_baths
    h_free = np.kron(h_sys, np.eye(anc_dim))
    if cfg.two_bath_mode == "alternating" and n_baths > 1:
        unitary = np.eye(dim * anc_dim, dtype=complex)
        for term in terms:
            unitary = qmath.unitary_from_hamiltonian(h_free + term, cfg.t) @ unitary
    else:
        unitary = qmath.unitary_from_hamiltonian(h_free + sum(terms), cfg.t)
    ancilla = qmath.tensor([b.state for b in cfg.baths]) if n_baths > 1 \
        else cfg.baths[0].state
    return CollisionChannel(
        unitary, ancilla, (cfg.local_dim,) * n_baths, cfg.t
    )


def _concurrence_12(state, cfg):
    if cfg.local_dim != 2 or cfg.sites < 2:
        return math.nan
    pair = qmath.partial_trace(state, [2] * cfg.sites, keep=[0, 1])
    return qmath.concurrence(pair)


def _fixed_point_rows(cfg, channel, rho0):
    report = convergence.is_relaxing(
        channel.superoperator(), tol=cfg.peripheral_tol
    )
    status = "ok"
    collisions, residual = math.nan, math.nan
    state = report.fixed_point
    try:
        iterated, collisions = convergence.iterative_fixed_point(
            channel, rho0, tol=cfg.iterate_tol, max_iter=cfg.max_iter
        )
        residual = float(hermitian_trace_norm(
            channel.apply(iterated) - iterated
        ))
        if state is None:
            state = iterated
    except ConvergenceError as exc:
        residual = exc.residual
        collisions = exc.iterations
        status = f"no convergence: {exc}"
    if not report.relaxing:
        status = report.reason if status == "ok" else f"{report.reason}; {status}"

    s_system = s_bath = ratio = math.nan
    conc = math.nan
    if state is not None:
        s_system = qmath.von_neumann_entropy(state)
        conc = _concurrence_12(state, cfg)
        if len(cfg.baths) == 1:
            try:
                ratio = convergence.entropy_ratio(state, cfg.baths[0].state)
                s_bath = qmath.von_neumann_entropy(cfg.baths[0].state)
            except UndefinedRatioError as exc:
                s_bath = exc.bath_entropy
                status = "undefined entropy ratio: bath state is pure" \
                    if status == "ok" else status
    return [(
        s_system, s_bath, ratio, conc, report.spectral_gap,
        report.peripheral_count, collisions, residual,
        int(report.relaxing), status,
    )]


def _trajectory_rows(cfg, channel, rho0):
    states = channel.iterate(rho0, cfg.analysis_arg)
    rows = []
    prev = None
    for step, state in enumerate(states):
        residual = math.nan if prev is None else float(
            hermitian_trace_norm(state - prev)
        )
        rows.append((
            step, qmath.von_neumann_entropy(state),
            _concurrence_12(state, cfg), residual, "ok",
        ))
        prev = state
    return rows


def _spectrum_rows(cfg, channel, rho0):
    vals = np.linalg.eigvals(channel.superoperator().matrix)
    order = np.argsort(-np.abs(vals))
    return [
        (i, float(vals[j].real), float(vals[j].imag), float(abs(vals[j])), "ok")
        for i, j in enumerate(order)
    ]


def _site_populations_rows(cfg, channel, rho0):
    dims = [cfg.local_dim] * cfg.sites
    ground = qmath.projector(qmath.basis_ket(cfg.local_dim, 0))
    report = convergence.is_relaxing(
        channel.superoperator(), tol=cfg.peripheral_tol
    )
    if report.fixed_point is not None:
        state, status = report.fixed_point, "ok"
    else:
        try:
            state, _ = convergence.iterative_fixed_point(
                channel, rho0, tol=cfg.iterate_tol, max_iter=cfg.max_iter
            )
            status = report.reason
        except ConvergenceError as exc:
            rows = [("site", k, math.nan, str(exc)) for k in range(cfg.sites)]
            rows += [("bath", b.site, math.nan, str(exc)) for b in cfg.baths]
            return rows

    rows = []
    for k in range(cfg.sites):
        marginal = qmath.partial_trace(state, dims, keep=[k])
        rows.append((
            "site", k, float(np.real(np.trace(ground @ marginal))), status,
        ))
    post = None
    if cfg.bath_report == "post_collision" and cfg.baths:
        joint = channel.joint_unitary @ qmath.tensor(
            [state] + [b.state for b in cfg.baths]
        ) @ channel.joint_unitary.conj().T
        joint_dims = [cfg.local_dim ** cfg.sites] + list(channel.ancilla_dims)
        post = [
            qmath.partial_trace(joint, joint_dims, keep=[1 + i])
            for i in range(len(cfg.baths))
        ]
    for i, bath in enumerate(cfg.baths):
        marginal = post[i] if post is not None else bath.state
        rows.append((
            "bath", bath.site, float(np.real(np.trace(ground @ marginal))),
            status,
        ))
    return rows


_ANALYSIS_RUNNERS = {
    "fixed_point": _fixed_point_rows,
    "trajectory": _trajectory_rows,
    "spectrum": _spectrum_rows,
    "site_populations": _site_populations_rows,
}


def run_scenario(cfg, seed=None, tol=None, max_iter=None):
    """Execute one scenario; optional arguments override config tolerances."""
    cfg = _with_overrides(cfg, tol, max_iter)
    started = time.perf_counter()
    channel = build_scenario_channel(cfg)
    rho0 = _initial_state(cfg, channel.system_dim, seed)
    rows = _ANALYSIS_RUNNERS[cfg.analysis](cfg, channel, rho0)
    elapsed = time.perf_counter() - started
    return ResultTable(
        columns=_ANALYSIS_COLUMNS[cfg.analysis],
        rows=rows,
        metadata={
            "config_digest": cfg.digest,
            "version": __version__,
            "backend": backend_name(),
            "analysis": cfg.analysis,
            "wall_time_s": f"{elapsed:.3f}",
        },
    )


def _with_overrides(cfg, tol, max_iter):
    if tol is None and max_iter is None:
        return cfg
    changes = {}
    if tol is not None:
        if tol <= 0:
            raise ConfigError(f"tolerances.iterate_tol: must be positive, got {tol}")
        changes["iterate_tol"] = float(tol)
    if max_iter is not None:
        if max_iter < 1:
            raise ConfigError(f"tolerances.max_iter: must be >= 1, got {max_iter}")
        changes["max_iter"] = int(max_iter)
    return replace(cfg, **changes)


def _sweep_point(args):
    raw, param, value, seed, tol, max_iter = args
    try:
        cfg = parse_config(set_by_path(raw, param, value))
        table = run_scenario(cfg, seed=seed, tol=tol, max_iter=max_iter)
        return table.rows
    except ConfigError:
        raise
    except Exception as exc:  # per-point failures land in the status column
        return [("error", f"{type(exc).__name__}: {exc}")]


def _resolve_jobs(jobs):
    if jobs is None:
        env = os.environ.get("MEDIAHOM_JOBS", "").strip()
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise ConfigError(
                    f"jobs: MEDIAHOM_JOBS must be an integer, got {env!r}"
                ) from None
        else:
            jobs = 1
    if jobs < 1:
        raise ConfigError(f"jobs: must be >= 1, got {jobs}")
    return jobs


def sweep(cfg, param=None, values=None, jobs=None, seed=None, tol=None,
          max_iter=None):
    """Rerun a scenario across parameter values; one block of rows each.

    ``param``/``values`` default to the config's own sweep section.  Points
    run in parallel when ``jobs`` (or ``MEDIAHOM_JOBS``) exceeds 1, but the
    output rows always follow the input value order.  Per-point failures
    are recorded in the status column; only config errors abort.
    """
    if param is None or values is None:
        if cfg.sweep is None:
            raise ConfigError(
                "sweep: config has no sweep section and no parameter was given"
            )
        param = cfg.sweep.param if param is None else param
        values = cfg.sweep.values if values is None else values
    values = list(values)
    if not values:
        raise ConfigError("sweep.values: expected a non-empty list")
    # The path and the substituted config must validate before any workers
    # start; per-point numerical failures are tolerated later, bad configs
    # are not.
    parse_config(set_by_path(cfg.raw, param, values[0]))

    jobs = _resolve_jobs(jobs)
    started = time.perf_counter()
    tasks = [(cfg.raw, param, v, seed, tol, max_iter) for v in values]
    if jobs == 1 or len(values) == 1:
        blocks = [_sweep_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(values))) as pool:
            blocks = list(pool.map(_sweep_point, tasks))
    elapsed = time.perf_counter() - started

    columns = (param,) + _ANALYSIS_COLUMNS[cfg.analysis]
    width = len(columns)
    table = ResultTable(
        columns=columns,
        metadata={
            "config_digest": cfg.digest,
            "version": __version__,
            "backend": backend_name(),
            "analysis": cfg.analysis,
            "sweep_param": param,
            "points": str(len(values)),
            "jobs": str(jobs),
            "wall_time_s": f"{elapsed:.3f}",
        },
    )
    for value, block in zip(values, blocks):
        for row in block:
            if row and row[0] == "error":
                padded = (value,) + (math.nan,) * (width - 2) + (row[1],)
            else:
                padded = (value,) + tuple(row)
            table.append(padded)
    return table


def _format_cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    raise TypeError(f"cannot format cell of type {type(value).__name__}")


def emit_csv(table, destination):
    """Write a table as CSV: comment-line metadata, header, then rows.

    Reals carry 12 significant digits with a ``.`` decimal separator
    regardless of locale; strings are quoted only when needed.
    """
    def _write(fh):
        fh.write(f"# created: {datetime.datetime.now().isoformat()}\n")
        for key in sorted(table.metadata):
            fh.write(f"# {key}: {table.metadata[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_format_cell(v) for v in row])

    if hasattr(destination, "write"):
        _write(destination)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {destination}: {exc}") from exc

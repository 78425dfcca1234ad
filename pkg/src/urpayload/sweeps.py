"""Parameter sweeps producing the reference figure datasets as CSV.

Each preset encodes one reference figure's parameters; generic sweeps move
one axis (target epsilon, beta, antenna count, or blocklength) while holding
the rest of the link fixed. Output rows are plain dataclasses so the CSV
writer, the CLI and the tests all share one schema, and files are
byte-stable for fixed inputs: metadata goes into '#' header comments and
never includes timestamps.
"""
from __future__ import annotations

import dataclasses
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .finite_blocklength import fb_kstar
from .rate_control import (
    LinkConfig,
    Method,
    QuantileMethod,
    RateSolution,
    Scheme,
    lomax_sum_cdf,
    lomax_sum_cdf_lower_bound,
    mrc_kstar,
    sc_kstar_approx,
    sc_kstar_exact,
)
from .sir_model import (
    SirDistribution,
    SirSource,
    Topology,
    sir_cdf_approx,
    sir_cdf_exact,
    sir_pdf_approx,
    sir_pdf_exact,
)

__all__ = [
    "Axis",
    "BoundCurveRow",
    "CdfCurveRow",
    "PRESET_NAMES",
    "SweepRow",
    "SweepSpec",
    "preset_rows",
    "run_sweep",
    "solve",
    "write_csv",
]


class Axis(str, Enum):
    EPSILON_TH = "eps"
    BETA = "beta"
    ANTENNAS = "M"
    BLOCKLENGTH = "n"


_SC_METHODS = {Method.SC_EXACT, Method.SC_APPROX}
_MRC_METHODS = {Method.MRC_NUMERIC, Method.MRC_CLOSED}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a moving axis, a fixed link, and the methods to evaluate."""

    axis: Axis
    values: tuple[float, ...]
    config: LinkConfig
    dist: SirDistribution
    methods: tuple[Method, ...]
    topology: Optional[SirSource] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if not self.values:
            raise ValueError("sweep needs at least one axis value")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("axis values must be strictly ordered")
        if not self.methods:
            raise ValueError("sweep needs at least one method")
        for method in self.methods:
            if method in _SC_METHODS and self.config.scheme is not Scheme.SC:
                raise ValueError(f"{method.value} requires an SC-scheme config")
            if method in _MRC_METHODS and self.config.scheme is not Scheme.MRC:
                raise ValueError(f"{method.value} requires an MRC-scheme config")


@dataclass(frozen=True)
class SweepRow:
    """One (axis value, method) result with its full fixed-parameter context."""

    axis: str
    axis_value: float
    method: str
    scheme: str
    antennas: int
    blocklength: int
    eta: int
    beta: float
    epsilon_th: float
    k_star: int
    k_real: float
    rate: float
    theta: float
    predicted_epsilon: float
    infeasible: bool


def solve(
    method: Method,
    dist: SirDistribution,
    config: LinkConfig,
    topology: Optional[SirSource] = None,
) -> RateSolution:
    """Dispatch one allocation method on one link configuration."""
    method = Method(method)
    if method is Method.SC_EXACT:
        return sc_kstar_exact(topology if topology is not None else dist, config)
    if method is Method.SC_APPROX:
        return sc_kstar_approx(dist, config)
    if method is Method.MRC_NUMERIC:
        return mrc_kstar(dist, config, QuantileMethod.NUMERIC)
    if method is Method.MRC_CLOSED:
        return mrc_kstar(dist, config, QuantileMethod.CLOSED)
    if method is Method.FB:
        return fb_kstar(dist, config)
    raise ValueError(f"unknown method {method!r}")


def _at_axis_value(
    spec: SweepSpec, value: float
) -> tuple[LinkConfig, SirDistribution, Optional[SirSource]]:
    cfg, dist, topology = spec.config, spec.dist, spec.topology
    if spec.axis is Axis.EPSILON_TH:
        cfg = dataclasses.replace(cfg, epsilon_th=value)
    elif spec.axis is Axis.BETA:
        dist = SirDistribution.from_beta(value, dist.eta)
        topology = None  # distances no longer describe the swept law
    elif spec.axis is Axis.ANTENNAS:
        cfg = dataclasses.replace(cfg, antennas=int(value))
    elif spec.axis is Axis.BLOCKLENGTH:
        cfg = dataclasses.replace(cfg, blocklength=int(value))
    return cfg, dist, topology


def _rows_at_value(spec: SweepSpec, value: float) -> list[SweepRow]:
    cfg, dist, topology = _at_axis_value(spec, value)
    rows = []
    for method in spec.methods:
        sol = solve(method, dist, cfg, topology if topology is not None else dist)
        rows.append(
            SweepRow(
                axis=spec.axis.value,
                axis_value=value,
                method=method.value,
                scheme=cfg.scheme.value,
                antennas=cfg.antennas,
                blocklength=cfg.blocklength,
                eta=dist.eta,
                beta=dist.beta,
                epsilon_th=cfg.epsilon_th,
                k_star=sol.k_star,
                k_real=sol.k_real,
                rate=sol.rate,
                theta=sol.theta,
                predicted_epsilon=sol.predicted_epsilon,
                infeasible=sol.infeasible,
            )
        )
    return rows


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Evaluate the sweep; rows come back in axis order regardless of workers."""
    if workers <= 1 or len(spec.values) == 1:
        chunks = [_rows_at_value(spec, v) for v in spec.values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_rows_at_value, spec, v) for v in spec.values]
            chunks = [f.result() for f in futures]
    return [row for chunk in chunks for row in chunk]


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Sequence, out, comments: Sequence[str] = ()) -> None:
    """Write dataclass rows as CSV with '#' metadata comments up top."""
    if not rows:
        raise ValueError("no rows to write")
    fields = [f.name for f in dataclasses.fields(type(rows[0]))]

    def emit(handle: io.TextIOBase) -> None:
        for line in comments:
            handle.write(f"# {line}\n")
        handle.write(",".join(fields) + "\n")
        for row in rows:
            handle.write(
                ",".join(_format_cell(getattr(row, name)) for name in fields) + "\n"
            )

    if isinstance(out, (str, Path)):
        with open(out, "w") as handle:
            emit(handle)
    else:
        emit(out)


# --- figure presets ---------------------------------------------------------

# Reference topology for the epsilon sweep: serving link 20 m, ten interferers
# at 10+20j m, exponent 3.5 (beta = 0.306102...).
_TOPOLOGY_MAIN = Topology(
    r0=20.0, interferer_distances=tuple(10.0 + 20.0 * j for j in range(1, 11)), alpha=3.5
)

# Left-tail comparison setups: (serving distance, interferer distances).
CDF_SETUPS: dict[str, Topology] = {
    "A": Topology(30.0, tuple(30.0 + 10.0 * j for j in range(1, 21)), 3.5),
    "B": Topology(20.0, tuple(10.0 + 20.0 * j for j in range(1, 11)), 3.5),
    "C": Topology(10.0, tuple(20.0 + 20.0 * j for j in range(1, 5)), 3.5),
}

_BOUND_GRID_ANTENNAS = (1, 2, 4, 8, 10)
_BOUND_GRID_ETA = (2, 4, 8, 12, 20)


@dataclass(frozen=True)
class CdfCurveRow:
    """Exact vs. scaled-Lomax CDF/PDF sample for one setup and SIR value."""

    setup: str
    gamma: float
    cdf_exact: float
    cdf_approx: float
    pdf_exact: float
    pdf_approx: float


@dataclass(frozen=True)
class BoundCurveRow:
    """Lomax-sum CDF vs. its closed-form lower bound at one grid point."""

    antennas: int
    eta: int
    x: float
    cdf: float
    lower_bound: float
    lower_bound_exact_log: float


def _kstar_preset(
    specs: Sequence[SweepSpec], workers: int
) -> list[SweepRow]:
    rows: list[SweepRow] = []
    for spec in specs:
        rows.extend(run_sweep(spec, workers=workers))
    return rows


def _preset_eps_sweep(workers: int) -> list[SweepRow]:
    # payload vs. target epsilon: n=200, main topology, M in {1,2,4,8}, SC+MRC
    dist = SirDistribution.from_topology(_TOPOLOGY_MAIN)
    eps_values = tuple(np.logspace(-9.0, -1.0, 33))
    specs = []
    for antennas in (1, 2, 4, 8):
        sc_cfg = LinkConfig(antennas, 200, 1e-3, Scheme.SC)
        mrc_cfg = LinkConfig(antennas, 200, 1e-3, Scheme.MRC)
        specs.append(
            SweepSpec(
                Axis.EPSILON_TH,
                eps_values,
                sc_cfg,
                dist,
                (Method.SC_EXACT, Method.SC_APPROX, Method.FB),
                topology=_TOPOLOGY_MAIN,
            )
        )
        specs.append(
            SweepSpec(
                Axis.EPSILON_TH, eps_values, mrc_cfg, dist, (Method.MRC_NUMERIC, Method.FB)
            )
        )
    return _kstar_preset(specs, workers)


def _preset_beta_sweep(workers: int) -> list[SweepRow]:
    # payload vs. beta: n=200, eta=8, eps in {1e-2, 1e-6}, M in {1,2,4}
    beta_values = tuple(np.logspace(math.log10(0.05), math.log10(5.0), 21))
    dist = SirDistribution.from_beta(0.8, 8)
    specs = []
    for eps in (1e-2, 1e-6):
        for antennas in (1, 2, 4):
            sc_cfg = LinkConfig(antennas, 200, eps, Scheme.SC)
            mrc_cfg = LinkConfig(antennas, 200, eps, Scheme.MRC)
            specs.append(
                SweepSpec(Axis.BETA, beta_values, sc_cfg, dist, (Method.SC_APPROX, Method.FB))
            )
            specs.append(
                SweepSpec(Axis.BETA, beta_values, mrc_cfg, dist, (Method.MRC_NUMERIC, Method.FB))
            )
    return _kstar_preset(specs, workers)


def _preset_antenna_sweep(workers: int) -> list[SweepRow]:
    # payload vs. antenna count: n=400, eta=8, beta=0.8, eps in {1e-3,1e-6,1e-9}
    antenna_values = tuple(float(m) for m in range(1, 17))
    dist = SirDistribution.from_beta(0.8, 8)
    specs = []
    for eps in (1e-3, 1e-6, 1e-9):
        sc_cfg = LinkConfig(1, 400, eps, Scheme.SC)
        mrc_cfg = LinkConfig(1, 400, eps, Scheme.MRC)
        specs.append(
            SweepSpec(Axis.ANTENNAS, antenna_values, sc_cfg, dist, (Method.SC_APPROX, Method.FB))
        )
        specs.append(
            SweepSpec(
                Axis.ANTENNAS,
                antenna_values,
                mrc_cfg,
                dist,
                (Method.MRC_NUMERIC, Method.MRC_CLOSED, Method.FB),
            )
        )
    return _kstar_preset(specs, workers)


def _preset_blocklength_sweep(workers: int) -> list[SweepRow]:
    # rate vs. blocklength: SC, eta=8, beta=0.8, eps in {1e-3, 1e-6}; antenna
    # counts chosen so both targets stay feasible across the axis
    n_values = (100.0, 200.0, 300.0, 400.0, 600.0, 800.0, 1200.0, 1600.0, 2000.0)
    dist = SirDistribution.from_beta(0.8, 8)
    specs = []
    for eps in (1e-3, 1e-6):
        for antennas in (4, 8):
            cfg = LinkConfig(antennas, 200, eps, Scheme.SC)
            specs.append(
                SweepSpec(
                    Axis.BLOCKLENGTH, n_values, cfg, dist, (Method.SC_APPROX, Method.FB)
                )
            )
    return _kstar_preset(specs, workers)


def _preset_cdf_curves(workers: int) -> list[CdfCurveRow]:
    del workers  # cheap enough to stay serial
    rows = []
    gammas = np.logspace(-4.0, 1.0, 100)
    for name, topology in CDF_SETUPS.items():
        dist = SirDistribution.from_topology(topology)
        for gamma in gammas:
            rows.append(
                CdfCurveRow(
                    setup=name,
                    gamma=float(gamma),
                    cdf_exact=sir_cdf_exact(gamma, topology),
                    cdf_approx=sir_cdf_approx(gamma, dist),
                    pdf_exact=sir_pdf_exact(gamma, topology),
                    pdf_approx=sir_pdf_approx(gamma, dist),
                )
            )
    return rows


def _preset_bound_curves(workers: int) -> list[BoundCurveRow]:
    del workers
    rows = []
    grid = np.logspace(-4.0, math.log10(5.0), 200)
    for antennas in _BOUND_GRID_ANTENNAS:
        for eta in _BOUND_GRID_ETA:
            for x in grid:
                rows.append(
                    BoundCurveRow(
                        antennas=antennas,
                        eta=eta,
                        x=float(x),
                        cdf=lomax_sum_cdf(float(x), antennas, eta),
                        lower_bound=lomax_sum_cdf_lower_bound(
                            float(x), antennas, eta, linearize=True
                        ),
                        lower_bound_exact_log=lomax_sum_cdf_lower_bound(
                            float(x), antennas, eta, linearize=False
                        ),
                    )
                )
    return rows


_PRESETS: dict[str, Callable[[int], list]] = {
    "fig2": _preset_eps_sweep,
    "fig2pp": _preset_cdf_curves,
    "fig3": _preset_bound_curves,
    "fig4": _preset_beta_sweep,
    "fig5": _preset_antenna_sweep,
    "fig6": _preset_blocklength_sweep,
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_rows(name: str, workers: int = 1) -> list:
    """Rows for a named figure preset; raises KeyError on unknown names."""
    try:
        build = _PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}") from None
    return build(workers)

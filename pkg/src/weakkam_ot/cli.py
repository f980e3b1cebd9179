"""Command-line entry points: scenario runs, listings, plot data and direct solvers.

Exit codes: 0 when every certificate passes, 1 when a certificate fails
(or a checked statement is violated), 2 for configuration and input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, clax, fixtures, singular, transport, wasserstein
from .action import (LagrangianModel, aubry_and_static_classes, fundamental_table,
                     mane_critical_value, markov_defect, peierls_table, static_class_in_superdiff,
                     weak_kam_pair)
from .errors import (ConfigError, DomainError, ModelError, PreconditionError, SolverError,
                     TheoremViolation)
from .space_core import ProbMeasure, TorusGrid, load_cost, load_json, load_measure, write_csv

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

KINDS = ("transform", "ot", "dirac", "net", "singular", "arnaud", "peierls", "rlo")
PRESETS = {"free": {"potential": "zero"}, "pendulum": {"potential": "cosine", "amplitude": 1.0}}
INPUT_ERRORS = (ConfigError, DomainError, PreconditionError, FileNotFoundError,
                json.JSONDecodeError, tomllib.TOMLDecodeError)
RUN_ERRORS = (TheoremViolation, SolverError, ModelError)


# ------------------------------------------------------------------ configs

@dataclass(frozen=True)
class ModelConfig:
    potential: str = "zero"
    amplitude: float = 1.0
    shift: float = 5.0
    dt: float = 1e-3
    k_wind: int = 3

    @classmethod
    def parse(cls, raw) -> "ModelConfig":
        if isinstance(raw, str):
            if raw not in PRESETS:
                raise ConfigError(f"unknown model preset {raw!r}; expected one of {sorted(PRESETS)}")
            raw = PRESETS[raw]
        raw = dict(raw or {})
        if "preset" in raw:
            raw = {**PRESETS.get(raw.pop("preset"), {}), **raw}
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown model keys {sorted(unknown)}")
        return cls(**raw)

    def build(self) -> LagrangianModel:
        try:
            return LagrangianModel(self.potential, float(self.amplitude), float(self.shift), 1,
                                   float(self.dt), int(self.k_wind))
        except DomainError as e:
            raise ConfigError(str(e)) from e


@dataclass(frozen=True)
class GridConfig:
    n: int = 64

    def build(self) -> TorusGrid:
        if not 4 <= int(self.n) <= 512:
            raise ConfigError("grid size must lie in [4, 512]")
        return TorusGrid(1, int(self.n))


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    description: str = ""
    seed: int = 0
    model: ModelConfig = field(default_factory=ModelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    params: dict = field(default_factory=dict)
    out: str | None = None
    path: Path | None = None

    @property
    def base(self) -> Path | None:
        return self.path.parent if self.path else None


def load_scenario(path) -> Scenario:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"scenario file not found: {p}")
    with p.open("rb") as fh:
        raw = tomllib.load(fh)
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"{p}: kind must be one of {KINDS}, got {kind!r}")
    grid = raw.get("grid", {})
    if not isinstance(grid, dict) or set(grid) - {"n"}:
        raise ConfigError(f"{p}: [grid] accepts only 'n'")
    return Scenario(name=str(raw.get("name", p.stem)), kind=kind,
                    description=str(raw.get("description", "")), seed=int(raw.get("seed", 0)),
                    model=ModelConfig.parse(raw.get("model")), grid=GridConfig(**grid),
                    params=dict(raw.get("params", {})), out=raw.get("out"), path=p)


def bundled_dir() -> Path:
    return Path(str(resources.files("weakkam_ot") / "scenarios"))


def resolve_scenario(ref: str) -> Path:
    p = Path(ref)
    if p.exists():
        return p
    cand = bundled_dir() / (ref if ref.endswith(".toml") else f"{ref}.toml")
    if cand.exists():
        return cand
    raise FileNotFoundError(f"scenario not found: {ref}")


# -------------------------------------------------------------- run output

@dataclass
class Certificate:
    name: str
    verifies: str
    passed: bool
    value: float | None = None
    tolerance: float | None = None


@dataclass
class Context:
    seed: int
    tol_scale: float = 1.0
    rng: np.random.Generator = field(init=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    def bound(self, name: str, verifies: str, value: float, tol: float) -> Certificate:
        tol = tol * self.tol_scale
        return Certificate(name, verifies, bool(value <= tol), float(value), float(tol))

    @staticmethod
    def flag(name: str, verifies: str, ok: bool) -> Certificate:
        return Certificate(name, verifies, bool(ok))


@dataclass
class RunOutput:
    results: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, non-finite floats as null."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------------ runners

def _random_instance(rng, max_size, min_size=2):
    n, m = (int(v) for v in rng.integers(min_size, max_size + 1, 2))
    a = rng.random(n)
    a[rng.random(n) < 0.2] = 0.0
    a[rng.integers(n)] += 0.05
    b = rng.random(m) + 1e-3
    c = rng.random((n, m))
    return ProbMeasure(a / a.sum()), ProbMeasure(b / b.sum()), c


def run_transform(s: Scenario, ctx: Context) -> RunOutput:
    model, grid = s.model.build(), s.grid.build()
    p = s.params
    t = float(p.get("t", 1.0))
    phi = fixtures.potential_from_config(p.get("phi", {"kind": "sine"}), grid, s.base)
    tab = fundamental_table(model, grid, 0.0, t)
    c = tab.values
    out = RunOutput()
    psi = clax.t_minus(phi, c)
    worst = 0.0
    trials = int(p.get("trials", 50))
    cases = [(c, phi, psi)]
    for _ in range(trials):
        nx, ny = (int(v) for v in ctx.rng.integers(1, int(p.get("max_size", 20)) + 1, 2))
        cases.append((ctx.rng.normal(size=(nx, ny)), ctx.rng.normal(size=nx), ctx.rng.normal(size=ny)))
    for cc, f, g in cases:
        scale = 1.0 + np.abs(cc).max()
        tm = clax.t_minus(f, cc)
        worst = max(worst,
                    float((g - clax.t_minus(clax.t_plus(g, cc), cc)).max()) / scale,
                    float((clax.t_plus(tm, cc) - f).max()) / scale,
                    float(np.abs(clax.t_minus(clax.t_plus(tm, cc), cc) - tm).max()) / scale)
    out.certificates.append(ctx.bound(
        "commutator-laws", "T^-T^+psi >= psi, T^+T^-phi <= phi and T^-T^+T^-phi = T^-phi",
        max(worst, 0.0), 1e-12))
    cc = clax.is_c_concave(psi, c)
    out.certificates.append(ctx.flag(
        "transform-is-c-concave", "T^-phi is c-concave with zero commutator defect", cc.concave))
    mu = ProbMeasure.uniform(grid.size)
    nu = fixtures.measure_from_config(p.get("nu", {"atoms": list(range(0, grid.size, 8))}), grid, s.base)
    kr = transport.solve_kantorovich(mu, nu, c)
    out.certificates.append(ctx.bound(
        "kantorovich-duality", "optimal cost equals the dual value over K_c",
        abs(kr.gap), transport.DUAL_TOL))
    out.results = {"t": t, "clax": clax.clax_report(psi, c), "duality": kr.to_json()}
    out.tables["h_table"] = (["t1", "t2", "x_index", "y_index", "h"],
                             [r[:5] for r in tab.rows()])
    out.plots["potential"] = (["x", "phi", "T_minus_phi"], list(zip(grid.coords, phi, psi)))
    return out


def run_ot(s: Scenario, ctx: Context) -> RunOutput:
    p = s.params
    out = RunOutput()
    n_inst = int(p.get("instances", 10))
    max_size = int(p.get("max_size", 20))
    gaps, k_ok, support_ok, values = [], True, True, []
    first = None
    for k in range(n_inst):
        mu, nu, c = _random_instance(ctx.rng, max_size)
        kr = transport.solve_kantorovich(mu, nu, c)
        first = first or (mu, nu, c, kr)
        gaps.append(abs(kr.gap))
        values.append(kr.value)
        try:
            transport.solve_K_minus(mu, nu, c)
            transport.solve_K_plus(mu, nu, c)
            transport.pair_from_k_minus(kr.phi, mu, nu, c)
            transport.k_minus_from_pair(kr.phi, kr.psi, mu, nu, c)
        except (TheoremViolation, PreconditionError):
            k_ok = False
        rep = transport.support_characterization(kr.phi, mu, nu, c)
        support_ok &= rep.supported and rep.solves_k_minus
    out.certificates += [
        ctx.bound("strong-duality", "primal optimum equals the K_c dual value", max(gaps), transport.DUAL_TOL),
        ctx.flag("k-minus-k-plus-equivalence",
                 "dual pairs and (K-)/(K+) solutions convert into each other", k_ok),
        ctx.flag("optimal-plan-support", "optimal plans live on the zero-slack set of a (K-) solution",
                 support_ok),
    ]
    delta = float(p.get("perturb_dual", 0.0))
    mu, nu, c, kr = first
    if delta > 0:
        phi = kr.phi + delta * ctx.rng.normal(size=kr.phi.size)
        gap = kr.value - transport.k_minus_value(phi, mu, nu, c)
        out.certificates.append(ctx.bound(
            "strong-duality[perturbed-dual]", "primal optimum equals the value of the supplied dual",
            abs(gap), transport.DUAL_TOL))
    out.results = {"instances": n_inst, "gaps": gaps, "values": values, "first": kr.to_json()}
    return out


def run_dirac(s: Scenario, ctx: Context) -> RunOutput:
    model, grid = s.model.build(), s.grid.build()
    p = s.params
    phi = fixtures.potential_from_config(p.get("phi", {"kind": "sine", "amplitude": 0.1}), grid, s.base)
    t = float(p.get("t", 0.5))
    out = RunOutput()
    res = {}
    for y0 in p.get("targets", [int(p.get("y0", grid.n // 2))]):
        cov = p.get("covectors")
        cov = transport.reachable_covectors(model, grid, phi, y0, t) if cov is None else np.asarray(cov)
        d = transport.dirac_construction(model, grid, phi, y0, t, cov, p.get("weights"))
        rc = transport.recover_covector_measure(model, grid, phi, y0, t, d.mu)
        out.certificates += [
            ctx.flag(f"dirac-k-minus[y0={y0}]",
                     "the backward-characteristic measure solves (K-) for the Dirac target", d.certified),
            ctx.flag(f"covector-recovery[y0={y0}]",
                     "recovered covectors lie in the superdifferential hull and round-trip within one cell",
                     rc.in_hull and rc.roundtrip_ok),
        ]
        res[str(y0)] = {**d.to_json(), "recovered": rc.covectors.tolist(), "hull": rc.hull.tolist()}
    out.results = res
    out.plots["potential"] = (["x", "phi"], list(zip(grid.coords, phi)))
    return out


def run_net(s: Scenario, ctx: Context) -> RunOutput:
    model, grid = s.model.build(), s.grid.build()
    p = s.params
    phi = fixtures.potential_from_config(p.get("phi", {"kind": "sine", "amplitude": 0.1}), grid, s.base)
    nu = fixtures.measure_from_config(p.get("nu", {"atoms": list(range(0, grid.size, 8))}), grid, s.base)
    sched = tuple(int(v) for v in p.get("schedule", [2, 4, 8, 16, 32]))
    r = transport.net_approximation(model, grid, phi, nu, float(p.get("t", 0.5)), sched)
    worst = max(st.w1 - 2.0 / st.n for st in r.steps)
    late = [st.value for st in r.steps if st.n >= 8]
    out = RunOutput(results=r.to_json())
    out.certificates += [
        ctx.bound("net-w1-bound", "W1(nu_n, nu) <= 2/n along the schedule", max(worst, 0.0), 1e-12),
        ctx.bound("net-value-stability", "(K-) values stabilize along the schedule",
                  max(late) - min(late) if late else 0.0, 1e-3),
        ctx.flag("net-support-membership",
                 "final support meets the c-subdifferential preimage of every later net",
                 all(r.membership.values())),
        ctx.flag("net-mixture-k-minus", "every mixture solves (K-) for its net measure",
                 all(st.mixture.certified for st in r.steps)),
    ]
    rows = [(st.n, st.w1, st.value) for st in r.steps]
    out.tables["convergence"] = (["n", "w1", "value"], rows)
    out.plots["convergence"] = (["n", "w1", "value"], rows)
    return out


def run_singular(s: Scenario, ctx: Context) -> RunOutput:
    model, grid = s.model.build(), s.grid.build()
    p = s.params
    out = RunOutput()
    res = {"short": {}, "long": {}}
    tau = float(p.get("short_time", 0.05))
    for name in p.get("fixtures", ["two_parabola", "rounded_distance"]):
        psi = fixtures.potential_from_config(name, grid, s.base)
        rep = singular.short_time_coincidence(model, grid, psi, 0.0, tau)
        res["short"][str(name)] = rep.to_json()
        out.certificates.append(ctx.flag(
            f"short-time-coincidence[{name}]", "Sing^c = Sing up to one cell below the regularity time",
            rep.holds))
        if name == p.get("plot_fixture", "two_parabola"):
            flag = np.isin(np.arange(grid.size), rep.sing).astype(int)
            out.plots["singular"] = (["x", "psi", "singular"], list(zip(grid.coords, psi, flag)))
    trials = int(p.get("trials", 20))
    for T in p.get("long_times", [1.0, 2.0]):
        c = fundamental_table(model, grid, 0.0, float(T)).values
        fails = 0
        for k in range(trials):
            psi = clax.t_minus(fixtures.random_potential(grid, ctx.rng, k), c)
            fails += not singular.long_time_inclusion(model, grid, psi, 0.0, float(T)).holds
        res["long"][str(T)] = {"trials": trials, "violations": fails}
        out.certificates.append(ctx.flag(
            f"long-time-inclusion[t={T}]", "Sing^c is contained in Sing for c-concave potentials",
            fails == 0))
    out.results = res
    return out


def run_arnaud(s: Scenario, ctx: Context) -> RunOutput:
    model = s.model.build()
    p = s.params
    t = float(p.get("t", 0.05))
    sizes = [int(n) for n in p.get("grids", [64, 128])]
    defects, res = [], {}
    out = RunOutput()
    rep = None
    for n in sizes:
        grid = TorusGrid(1, n)
        phi = fixtures.potential_from_config(p.get("phi", {"kind": "sine", "amplitude": 0.05}), grid, s.base)
        rep = singular.arnaud_graph_check(model, grid, phi, t, dt=model.dt * sizes[0] / n)
        defects.append(rep.defect)
        res[str(n)] = rep.to_json()
        out.certificates.append(ctx.bound(
            f"graph-evolution[n={n}]", "graph of D T_t^+ phi equals the backward flow image of the graph of D phi",
            rep.defect, 5.0 / 64))
    if len(defects) >= 2:
        ratio = defects[-1] / defects[-2]
        res["ratio"] = ratio
        out.certificates.append(ctx.flag(
            "graph-evolution-convergence", "halving grid and time step shrinks the defect by 0.3-0.7",
            0.3 <= ratio <= 0.7))
    out.results = res
    out.plots["graph"] = (["x", "p"], list(zip(rep.evolved.x, rep.evolved.p)))
    return out


def run_peierls(s: Scenario, ctx: Context) -> RunOutput:
    model, grid = s.model.build(), s.grid.build()
    p = s.params
    out = RunOutput()
    mane = mane_critical_value(model)
    pt = peierls_table(model, grid, t_max=float(p.get("t_max", 4096.0)))
    part = aubry_and_static_classes(pt)
    pair = weak_kam_pair(model, grid)
    inc = [static_class_in_superdiff(pair, pt, part, y) for y in range(grid.size)]
    if "expected_c0" in p:
        out.certificates.append(ctx.bound(
            "mane-critical-value", "c[0] matches the expected value", abs(mane.value - float(p["expected_c0"])),
            float(p.get("c0_tol", 1e-2))))
    out.certificates.append(ctx.flag("peierls-converged", "Peierls barrier iteration stabilized", pt.converged))
    out.certificates.append(ctx.flag(
        "static-class-in-superdiff", "some static class lies in the c-superdifferential of u- at every y",
        all(inc)))
    if "expected_aubry" in p:
        out.certificates.append(ctx.flag(
            "aubry-set", "Aubry set matches the expected nodes",
            sorted(part.aubry.tolist()) == sorted(int(v) for v in p["expected_aubry"])))
    if p.get("expect_zero_barrier"):
        out.certificates.append(ctx.bound(
            "peierls-zero", "the Peierls barrier vanishes identically", float(np.abs(pt.values).max()), 1e-3))
        sc = clax.sing_c(pair.u_minus, pt.values, tol=max(clax.eps_arg(pt.values), part.delta))
        out.certificates.append(ctx.flag(
            "sing-c-everywhere", "with a single static class every point is c-singular for u-",
            sc.singular.size == grid.size and len(part.classes) == 1))
    out.results = {"c0": mane.value, "c0_checks": mane.cross_check, "converged": pt.converged,
                   "aubry": part.aubry.tolist(), "classes": [c.tolist() for c in part.classes],
                   "in_superdiff": inc, "u_minus": pair.u_minus.tolist(),
                   "markov_defect": markov_defect(model, grid, 0.5, 1.0)}
    out.plots["potential"] = (["x", "u_minus", "u_plus"], list(zip(grid.coords, pair.u_minus, pair.u_plus)))
    return out


def run_rlo(s: Scenario, ctx: Context) -> RunOutput:
    model, grid = s.model.build(), s.grid.build()
    p = s.params
    out = RunOutput()
    times = [float(v) for v in p.get("times", [0.1, 0.5, 1.0])]
    trials = int(p.get("trials", 20))
    n_comp = int(p.get("competitors", 100))
    lift = expr = el = 0.0
    margin = -math.inf
    ens_rows = None
    per_trial = max(1, n_comp // max(trials, 1))
    for k in range(trials):
        t = times[k % len(times)]
        phi = fixtures.random_fourier(grid, ctx.rng)
        atoms = ctx.rng.choice(grid.size, int(ctx.rng.integers(1, 6)), replace=False)
        w = ctx.rng.random(atoms.size) + 0.1
        m = np.zeros(grid.size)
        m[atoms] = w / w.sum()
        nu = ProbMeasure(m)
        for side, fn in (("-", wasserstein.p_minus), ("+", wasserstein.p_plus)):
            r = fn(model, grid, phi, nu, t)
            lift = max(lift, abs(r.value - r.transform_value))
            expr = max(expr, max(abs(e - r.value) for e in r.expressions))
            el = max(el, wasserstein.euler_lagrange_slice_check(model, r.ensemble).defect)
            margin = max(margin, wasserstein.competitor_margin(model, grid, phi, nu, t, r.value, ctx.rng,
                                                               per_trial, side))
            if ens_rows is None:
                ens_rows = list(r.ensemble.rows())
    out.certificates += [
        ctx.bound("random-lift-identity", "P^-_t phi(nu) = int T^-_t phi dnu and the P^+ mirror", lift, 1e-6),
        ctx.bound("random-lift-expressions", "potential-plus-cost, curve-wise and slice-wise forms agree",
                  expr, 1e-6),
        ctx.bound("euler-lagrange", "witness curves solve the Euler-Lagrange equation", el, 1e-4),
        ctx.bound("decoupling-lower-bound", "no competitor measure beats the witness", max(margin, 0.0), 1e-8),
    ]
    out.results = {"trials": trials, "lift_defect": lift, "expression_defect": expr,
                   "euler_lagrange": el, "competitor_margin": margin,
                   "competitors": per_trial * trials * 2}
    out.tables["ensemble"] = (["curve_id", "s", "x", "v", "weight"], ens_rows or [])
    return out


RUNNERS: dict[str, Callable[[Scenario, Context], RunOutput]] = {
    "transform": run_transform, "ot": run_ot, "dirac": run_dirac, "net": run_net,
    "singular": run_singular, "arnaud": run_arnaud, "peierls": run_peierls, "rlo": run_rlo,
}


def run(scenario: Scenario, out_dir=None, seed: int | None = None, tol_scale: float = 1.0,
        quiet: bool = False) -> int:
    """Execute a scenario, write its artifacts and return the exit code."""
    if not tol_scale > 0:
        raise ConfigError("--tol-scale must be positive")
    seed = scenario.seed if seed is None else seed
    ctx = Context(seed, tol_scale)
    res = RUNNERS[scenario.kind](scenario, ctx)
    out = Path(out_dir or scenario.out or Path("runs") / scenario.name)
    out.mkdir(parents=True, exist_ok=True)
    ok = all(c.passed for c in res.certificates)
    files = ["results.json"]
    (out / "results.json").write_text(dumps({
        "scenario": scenario.name, "kind": scenario.kind, "seed": seed, "tol_scale": tol_scale,
        "certificates": [asdict(c) for c in res.certificates], "results": res.results,
        "plots": {k: {"columns": h, "rows": rows} for k, (h, rows) in res.plots.items()},
    }))
    for name, (header, rows) in sorted(res.tables.items()):
        write_csv(out / f"{name}.csv", header, rows)
        files.append(f"{name}.csv")
    for kind in sorted(res.plots):
        emit_plotdata(res.plots[kind], out / f"plot_{kind}.dat")
        files.append(f"plot_{kind}.dat")
    manifest = {
        "scenario": scenario.name, "kind": scenario.kind,
        "source": scenario.path.name if scenario.path else None, "seed": seed,
        "tol_scale": tol_scale, "model": asdict(scenario.model), "grid": asdict(scenario.grid),
        "params": scenario.params, "version": __version__, "files": files + ["manifest.json"],
        "tolerances": {c.name: c.tolerance for c in res.certificates if c.tolerance is not None},
        "passed": ok,
    }
    (out / "manifest.json").write_text(dumps(manifest))
    if not quiet:
        for c in res.certificates:
            extra = "" if c.value is None else f"  ({c.value:.3g} <= {c.tolerance:.3g})"
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.verifies}{extra}")
        print(f"artifacts in {out}")
    return 0 if ok else 1


def list_scenarios(directory=None) -> list[tuple[str, str, str]]:
    """Rows ``(name, kind, description)``; unreadable files get kind ``!invalid``."""
    d = Path(directory) if directory else bundled_dir()
    rows = []
    for f in sorted(d.glob("*.toml")):
        try:
            sc = load_scenario(f)
            rows.append((sc.name, sc.kind, sc.description))
        except INPUT_ERRORS as e:
            rows.append((f.stem, "!invalid", str(e).splitlines()[0]))
    return rows


PLOT_KINDS = ("potential", "singular", "graph", "convergence")


def emit_plotdata(table, path) -> None:
    """Whitespace-separated columns with a commented header (gnuplot format)."""
    header, rows = table
    with open(path, "w") as fh:
        fh.write("# " + " ".join(header) + "\n")
        for row in rows:
            fh.write(" ".join(format(float(v), ".17g") for v in row) + "\n")


# --------------------------------------------------------------- arguments

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory or file")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--tol-scale", type=float, default=1.0, help="multiply certificate tolerances")
    p.add_argument("--quiet", action="store_true", help="suppress console output")


def _model_arg(ref: str | None) -> LagrangianModel:
    if ref is None or ref in PRESETS:
        return ModelConfig.parse(ref or "free").build()
    p = Path(ref)
    if not p.exists():
        raise ConfigError(f"model must be one of {sorted(PRESETS)} or a TOML file; got {ref!r}")
    with p.open("rb") as fh:
        raw = tomllib.load(fh)
    return ModelConfig.parse(raw.get("model", raw)).build()


def _phi_arg(ref: str, grid: TorusGrid) -> np.ndarray:
    if Path(ref).exists():
        return fixtures.potential_from_config({"kind": "file", "path": ref}, grid)
    return fixtures.potential_from_config(ref, grid)


def _emit(obj, args) -> None:
    text = dumps(obj)
    if args.out:
        Path(args.out).write_text(text)
    if not args.quiet:
        sys.stdout.write(text)


def _ot_parser(sub) -> None:
    ot = sub.add_parser("ot", help="discrete optimal transport")
    osub = ot.add_subparsers(dest="ot_cmd", required=True)
    for name in ("solve", "kminus"):
        q = osub.add_parser(name)
        q.add_argument("--mu", required=True)
        q.add_argument("--nu", required=True)
        q.add_argument("--cost", required=True)
        _common(q)
    q = osub.add_parser("dirac")
    q.add_argument("--phi", default="sine")
    q.add_argument("--y0", type=int, required=True)
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--rho", help="JSON with 'covectors' and optional 'weights'")
    q.add_argument("--model", default="free")
    q.add_argument("--n", type=int, default=64)
    _common(q)
    q = osub.add_parser("net")
    q.add_argument("--phi", default="sine")
    q.add_argument("--nu", help="measure JSON (default: uniform on every 8th node)")
    q.add_argument("--t", type=float, default=0.5)
    q.add_argument("--schedule", default="2,4,8,16,32")
    q.add_argument("--model", default="free")
    q.add_argument("--n", type=int, default=64)
    _common(q)


def _rlo_parser(sub) -> None:
    r = sub.add_parser("rlo", help="random Lax-Oleinik operators")
    rsub = r.add_subparsers(dest="rlo_cmd", required=True)
    for name in ("pminus", "pplus"):
        q = rsub.add_parser(name)
        q.add_argument("--phi", default="sine")
        q.add_argument("--nu", required=True, help="measure JSON on the grid")
        q.add_argument("--t", type=float, required=True)
        q.add_argument("--model", default="free")
        q.add_argument("--n", type=int, default=64)
        q.add_argument("--ensemble", help="write the curve ensemble CSV here")
        _common(q)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weakkam", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a scenario")
    r.add_argument("scenario", nargs="?", help="scenario path or bundled name")
    r.add_argument("--config", help="scenario path (alternative to the positional argument)")
    _common(r)
    ls = sub.add_parser("list", help="list scenarios")
    ls.add_argument("--dir", help="directory to scan (default: bundled scenarios)")
    pd = sub.add_parser("plotdata", help="extract plot data from a results file")
    pd.add_argument("results")
    pd.add_argument("--kind", required=True)
    pd.add_argument("--out")
    tr = sub.add_parser("transform", help="c-transform report for a potential and a cost")
    tr.add_argument("--psi", required=True)
    tr.add_argument("--cost", required=True)
    _common(tr)
    _ot_parser(sub)
    _rlo_parser(sub)
    return ap


def _dispatch(args) -> int:
    if args.cmd == "run":
        ref = args.config or args.scenario
        if not ref:
            raise ConfigError("give a scenario path or name")
        return run(load_scenario(resolve_scenario(ref)), args.out, args.seed, args.tol_scale, args.quiet)
    if args.cmd == "list":
        d = Path(args.dir) if args.dir else None
        if d is not None and not d.is_dir():
            raise FileNotFoundError(f"not a directory: {d}")
        for name, kind, desc in list_scenarios(d):
            print(f"{name:<24} {kind:<10} {desc}")
        return 0
    if args.cmd == "plotdata":
        if args.kind not in PLOT_KINDS:
            raise ConfigError(f"unknown plot kind {args.kind!r}; expected one of {PLOT_KINDS}")
        plots = load_json(args.results).get("plots", {})
        if args.kind not in plots:
            raise ConfigError(f"results contain no {args.kind!r} data (have {sorted(plots)})")
        pl = plots[args.kind]
        dest = Path(args.out or Path(args.results).with_name(f"plot_{args.kind}.dat"))
        emit_plotdata((pl["columns"], pl["rows"]), dest)
        print(dest)
        return 0
    if args.cmd == "transform":
        _emit(clax.clax_report(load_json(args.psi).get("values"), load_cost(args.cost)), args)
        return 0
    if args.cmd == "ot":
        return _ot(args)
    if args.cmd == "rlo":
        return _rlo(args)
    raise ConfigError(f"unknown command {args.cmd!r}")


def _ot(args) -> int:
    if args.ot_cmd in ("solve", "kminus"):
        mu, nu, c = load_measure(args.mu), load_measure(args.nu), load_cost(args.cost)
        if args.ot_cmd == "solve":
            kr = transport.solve_kantorovich(mu, nu, c)
            _emit(kr.to_json(), args)
            return 0 if kr.certified else 1
        km = transport.solve_K_minus(mu, nu, c)
        kp = transport.solve_K_plus(mu, nu, c)
        _emit({"k_minus": {"phi": km.potential, "transform_side": km.transform_side,
                           "plan_side": km.plan_side, "cost_side": km.cost_side},
               "k_plus": {"psi": kp.potential, "transform_side": kp.transform_side,
                          "plan_side": kp.plan_side, "cost_side": kp.cost_side},
               "certified": km.certified and kp.certified}, args)
        return 0
    model, grid = _model_arg(args.model), TorusGrid(1, args.n)
    phi = _phi_arg(args.phi, grid)
    if args.ot_cmd == "dirac":
        if args.rho:
            rho = load_json(args.rho)
            cov, w = rho.get("covectors"), rho.get("weights")
        else:
            cov, w = transport.reachable_covectors(model, grid, phi, args.y0, args.t), None
        d = transport.dirac_construction(model, grid, phi, args.y0, args.t, cov, w)
        _emit(d.to_json(), args)
        return 0 if d.certified else 1
    nu = (load_measure(args.nu) if args.nu
          else ProbMeasure.uniform(grid.size, list(range(0, grid.size, 8))))
    try:
        sched = tuple(int(v) for v in args.schedule.split(","))
    except ValueError as e:
        raise ConfigError(f"bad schedule {args.schedule!r}") from e
    r = transport.net_approximation(model, grid, phi, nu, args.t, sched)
    _emit(r.to_json(), args)
    ok = r.w1_ok and r.stable_values and all(r.membership.values())
    return 0 if ok else 1


def _rlo(args) -> int:
    model, grid = _model_arg(args.model), TorusGrid(1, args.n)
    phi = _phi_arg(args.phi, grid)
    m = load_measure(args.nu)
    fn = wasserstein.p_minus if args.rlo_cmd == "pminus" else wasserstein.p_plus
    r = fn(model, grid, phi, m, args.t)
    el = wasserstein.euler_lagrange_slice_check(model, r.ensemble)
    if args.ensemble:
        r.ensemble.to_csv(args.ensemble)
    _emit({**r.to_json(), "euler_lagrange": el.defect}, args)
    return 0 if r.agree and el.defect <= 1e-4 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RUN_ERRORS as e:
        print(f"failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def ot_main(argv=None) -> int:
    return main(["ot", *(sys.argv[1:] if argv is None else argv)])


def rlo_main(argv=None) -> int:
    return main(["rlo", *(sys.argv[1:] if argv is None else argv)])

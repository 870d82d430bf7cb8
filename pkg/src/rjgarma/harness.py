"""Monte Carlo experiment runner.

A scenario fixes a data-generating truth and a grid of sampler settings
(reversible-jump scale sigma, burn-in, thinning lag).  Each replication
simulates a fresh series, runs one chain per sigma, post-processes every
(burn, thin) cell of that chain, and records per-coefficient summaries
plus whether the credible intervals classified every coefficient
correctly.  Aggregation averages across replications, so a report cell
matches one block of the simulation tables: averaged mean/median/sd/ESS,
averaged interval endpoints, and the percentage of replications with a
fully correct classification (HPD and quantile variants).

Seeds: replication i derives its stream as derive_seed(master, i); within
a replication, the simulator uses sub-stream 0 and the chain for the
i-th sigma uses sub-stream 1 + i.  Reports are therefore independent of
the number of worker processes.  Failed replications are dropped from
the averages and counted.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .diagnostics import burn, classify_model, summarize, thin
from .model import CountSeries, Family, ParamState, PriorSpec
from .rng import derive_seed
from .sampler import SamplerConfig, coef_names, run_chain
from .simulate import SimSpec, simulate_garma

_COEF_FIELDS = ("mean", "median", "sd", "ess", "hpd_lo", "hpd_hi",
                "q_lo", "q_hi", "incl_freq")


@dataclass(frozen=True)
class Scenario:
    """One simulation experiment: truth, data size, and the sampler grid."""

    family: Family
    truth: ParamState
    n: int
    replications: int
    sampler: SamplerConfig
    sigma_grid: tuple[float, ...]
    burn_grid: tuple[int, ...] = (0,)
    thin_grid: tuple[int, ...] = (1,)
    level: float = 0.95
    warmup: int = 100
    c: float = 0.3
    name: str = "scenario"

    def __post_init__(self):
        for grid, label in ((self.sigma_grid, "sigma_grid"),
                            (self.burn_grid, "burn_grid"),
                            (self.thin_grid, "thin_grid")):
            if not grid:
                raise ValueError(f"{label} must be nonempty")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.truth.p_max > self.sampler.p_max or \
                self.truth.q_max > self.sampler.q_max:
            raise ValueError("truth orders exceed the sampler maxima")
        object.__setattr__(self, "sigma_grid", tuple(float(s) for s in self.sigma_grid))
        object.__setattr__(self, "burn_grid", tuple(int(b) for b in self.burn_grid))
        object.__setattr__(self, "thin_grid", tuple(int(t) for t in self.thin_grid))

    def padded_truth(self) -> ParamState:
        """Truth with phi/theta zero-padded to the sampler maxima."""
        phi = np.zeros(self.sampler.p_max)
        phi[:self.truth.p_max] = self.truth.phi
        theta = np.zeros(self.sampler.q_max)
        theta[:self.truth.q_max] = self.truth.theta
        return ParamState(self.truth.alpha, self.truth.beta.copy(), phi, theta)

    def cells(self) -> list[tuple[float, int, int]]:
        return [(s, b, t) for s in self.sigma_grid for b in self.burn_grid
                for t in self.thin_grid]


@dataclass
class CoefAggregate:
    """Replication averages for one coefficient in one grid cell."""

    mean: float = 0.0
    median: float = 0.0
    sd: float = 0.0
    ess: float = 0.0
    hpd_lo: float = 0.0
    hpd_hi: float = 0.0
    q_lo: float = 0.0
    q_hi: float = 0.0
    incl_freq: float = 0.0


@dataclass
class CellReport:
    coef: dict
    pct_correct_hpd: float
    pct_correct_quantile: float
    n_reps: int


@dataclass
class ScenarioReport:
    name: str
    coef_names: tuple[str, ...]
    cells: dict
    replications: int
    failures: int = 0
    failure_notes: tuple[str, ...] = ()


def _run_replication(scenario: Scenario, rep: int) -> dict:
    rep_seed = derive_seed(scenario.sampler.seed, rep)
    series = simulate_garma(SimSpec(
        family=scenario.family, params=scenario.padded_truth(), n=scenario.n,
        warmup=scenario.warmup, c=scenario.c,
        seed=derive_seed(rep_seed, 0)))
    truth = scenario.padded_truth()
    out = {}
    for i, sigma in enumerate(scenario.sigma_grid):
        cfg = replace(scenario.sampler, rj_scale=sigma,
                      seed=derive_seed(rep_seed, 1 + i))
        chain = run_chain(series, scenario.family, cfg)
        for b in scenario.burn_grid:
            bchain = burn(chain, b)
            for lag in scenario.thin_grid:
                pchain = thin(bchain, lag)
                summ = summarize(pchain, scenario.level)
                stats = {row.name: tuple(getattr(row, f) for f in _COEF_FIELDS)
                         for row in summ.rows}
                out[(sigma, b, lag)] = (stats,
                                        classify_model(summ, truth, "hpd"),
                                        classify_model(summ, truth, "quantile"))
    return out


def _replication_task(args):
    scenario, rep = args
    try:
        return rep, _run_replication(scenario, rep), None
    except Exception as exc:  # recorded and excluded, never fatal
        return rep, None, f"rep {rep}: {exc}"


def run_scenario(scenario: Scenario, parallelism: int = 1) -> ScenarioReport:
    """Run all replications and aggregate; deterministic for any parallelism."""
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    tasks = [(scenario, rep) for rep in range(scenario.replications)]
    if parallelism == 1:
        results = [_replication_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_replication_task, tasks))
    results.sort(key=lambda r: r[0])

    dummy = CountSeries(y=np.zeros(0, dtype=np.int64),
                        X=np.zeros((0, scenario.truth.beta.shape[0])))
    names = coef_names(dummy, scenario.sampler)

    cells = {}
    failures = []
    for key in scenario.cells():
        sums = {nm: np.zeros(len(_COEF_FIELDS)) for nm in names}
        ok_h = 0
        ok_q = 0
        n_ok = 0
        for rep, payload, err in results:
            if payload is None:
                continue
            stats, hit_h, hit_q = payload[key]
            for nm in names:
                sums[nm] += np.asarray(stats[nm])
            ok_h += int(hit_h)
            ok_q += int(hit_q)
            n_ok += 1
        coef = {}
        for nm in names:
            avg = sums[nm] / n_ok if n_ok else sums[nm] * math.nan
            coef[nm] = CoefAggregate(**dict(zip(_COEF_FIELDS, map(float, avg))))
        cells[key] = CellReport(
            coef=coef,
            pct_correct_hpd=100.0 * ok_h / n_ok if n_ok else math.nan,
            pct_correct_quantile=100.0 * ok_q / n_ok if n_ok else math.nan,
            n_reps=n_ok)
    for rep, payload, err in results:
        if err is not None:
            failures.append(err)

    return ScenarioReport(name=scenario.name, coef_names=names, cells=cells,
                          replications=scenario.replications,
                          failures=len(failures),
                          failure_notes=tuple(failures))


def compare_reports(a: ScenarioReport, b: ScenarioReport) -> ScenarioReport:
    """Per-cell differences (a minus b) of every aggregate."""
    if set(a.cells) != set(b.cells) or a.coef_names != b.coef_names:
        raise ValueError("reports have different shapes")
    cells = {}
    for key in a.cells:
        ca, cb = a.cells[key], b.cells[key]
        coef = {}
        for nm in a.coef_names:
            coef[nm] = CoefAggregate(**{
                f: getattr(ca.coef[nm], f) - getattr(cb.coef[nm], f)
                for f in _COEF_FIELDS})
        cells[key] = CellReport(
            coef=coef,
            pct_correct_hpd=ca.pct_correct_hpd - cb.pct_correct_hpd,
            pct_correct_quantile=ca.pct_correct_quantile - cb.pct_correct_quantile,
            n_reps=ca.n_reps - cb.n_reps)
    return ScenarioReport(name=f"delta({a.name}-{b.name})",
                          coef_names=a.coef_names, cells=cells,
                          replications=a.replications - b.replications)


# ---------------------------------------------------------------------------
# scenario files: `key = value` lines, '#' comments, comma-separated lists
# ---------------------------------------------------------------------------

_SCENARIO_KEYS = {
    "name", "family", "m", "k", "alpha", "beta", "phi", "theta", "n",
    "replications", "warmup", "c", "p_max", "q_max", "inc_prob", "sd_alpha",
    "sd_phi", "sd_theta", "sd_beta", "rw_scale", "iters", "seed",
    "sigma_grid", "burn_grid", "thin_grid", "level", "always_include",
}


def _parse_floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(v) for v in text.split(","))


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    """Parse the key = value scenario grammar (see module docstring)."""
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _SCENARIO_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        kv[key] = val

    tag = kv.get("family")
    if tag is None:
        raise ValueError("scenario must set 'family'")
    if tag == "poisson":
        family = Family.poisson()
    elif tag == "binomial":
        if "m" not in kv:
            raise ValueError("binomial scenario requires 'm'")
        family = Family.binomial(int(kv["m"]))
    elif tag == "negbinomial":
        if "k" not in kv:
            raise ValueError("negbinomial scenario requires 'k'")
        family = Family.negbinomial(float(kv["k"]))
    else:
        raise ValueError(f"unknown family {tag!r}")

    truth = ParamState(alpha=float(kv.get("alpha", 0.0)),
                       beta=_parse_floats(kv.get("beta", "")),
                       phi=_parse_floats(kv.get("phi", "")),
                       theta=_parse_floats(kv.get("theta", "")))
    priors = dict(sd_alpha=float(kv.get("sd_alpha", 0.3)),
                  sd_phi=float(kv.get("sd_phi", 0.2)),
                  sd_theta=float(kv.get("sd_theta", 0.2)),
                  sd_beta=float(kv.get("sd_beta", 1.0)),
                  inc_prob=float(kv.get("inc_prob", 0.5)))
    always = frozenset(v.strip() for v in kv.get("always_include", "alpha").split(",")
                       if v.strip())
    sampler = SamplerConfig(
        p_max=int(kv.get("p_max", 3)), q_max=int(kv.get("q_max", 3)),
        priors=PriorSpec(**priors), rw_scale=float(kv.get("rw_scale", 0.1)),
        iters=int(kv.get("iters", 30000)), seed=int(kv.get("seed", 0)),
        always_included=always)
    return Scenario(
        family=family, truth=truth, n=int(kv.get("n", 1000)),
        replications=int(kv.get("replications", 50)), sampler=sampler,
        sigma_grid=_parse_floats(kv.get("sigma_grid", "5")),
        burn_grid=tuple(int(float(b)) for b in _parse_floats(kv.get("burn_grid", "0"))),
        thin_grid=tuple(int(float(t)) for t in _parse_floats(kv.get("thin_grid", "1"))),
        level=float(kv.get("level", 0.95)), warmup=int(kv.get("warmup", 100)),
        c=float(kv.get("c", 0.3)), name=kv.get("name", name))


def load_scenario(path) -> Scenario:
    p = Path(path)
    return parse_scenario(p.read_text(), name=p.stem)


def write_report_csv(report: ScenarioReport, fh) -> None:
    """One row per grid cell x coefficient; cell-level percentages repeated."""
    fh.write("sigma,burn,thin,coef,mean,median,sd,ess,hpd_lo,hpd_hi,q_lo,q_hi,"
             "incl_freq,pct_correct_hpd,pct_correct_quantile,n_reps\n")
    for key in sorted(report.cells):
        sigma, b, lag = key
        cell = report.cells[key]
        for nm in report.coef_names:
            ca = cell.coef[nm]
            vals = [repr(float(sigma)), str(b), str(lag), nm]
            vals += [repr(float(getattr(ca, f))) for f in _COEF_FIELDS]
            vals += [repr(float(cell.pct_correct_hpd)),
                     repr(float(cell.pct_correct_quantile)), str(cell.n_reps)]
            fh.write(",".join(vals) + "\n")


def write_report_text(report: ScenarioReport, fh) -> None:
    """Human-readable table, one block per grid cell."""
    fh.write(f"Scenario: {report.name}  "
             f"(replications={report.replications}, failed={report.failures})\n")
    for key in sorted(report.cells):
        sigma, b, lag = key
        cell = report.cells[key]
        fh.write(f"\nsigma={sigma:g}  burn-in={b}  thinning={lag}  "
                 f"[reps={cell.n_reps}]  "
                 f"HPD {cell.pct_correct_hpd:.1f}%  "
                 f"Quant {cell.pct_correct_quantile:.1f}%\n")
        fh.write(f"{'coef':<14}{'Mean':>9}{'Med':>9}{'SD':>8}{'ESS':>9}"
                 f"{'HPD lo':>9}{'HPD hi':>9}{'incl':>7}\n")
        for nm in report.coef_names:
            ca = cell.coef[nm]
            fh.write(f"{nm:<14}{ca.mean:>9.3f}{ca.median:>9.3f}{ca.sd:>8.3f}"
                     f"{ca.ess:>9.1f}{ca.hpd_lo:>9.3f}{ca.hpd_hi:>9.3f}"
                     f"{ca.incl_freq:>7.2f}\n")
    if report.failure_notes:
        fh.write("\nfailed replications:\n")
        for note in report.failure_notes:
            fh.write(f"  {note}\n")

"""Named experiments: configuration schema, runners, and artifact assembly.

Every runner returns (record, artifacts, checks): a JSON-able result record,
a {filename: text} map of CSV artifacts, and a list of (name, passed, detail)
assertion rows.  Runners are deterministic given the config (timing data is
never written into artifacts), so artifact bytes are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .bergman import convergence_scan, scan_csv
from .counterexample import (build_counterexample, divergence_scan,
                             find_annuli, pushforward_rescue)
from .energy import (PushedKinkFamily, energy_derivative_scan,
                     kappa_energy_diff, ma_measure_radial,
                     volume_ratio_limit_check)
from .envelopes import envelope_iterate, radial_envelope_oracle
from .errors import ConfigError
from .geometry import circle_quadrature, disk_quadrature, disk_samples
from .series import (SeriesSpec, closure_spec, dim_sequence, fit_growth,
                     monomial_closure_and_degree, okounkov_body)
from .weights import (Direction, FSWeight, PaperDiskWeight, WeightFamily,
                      radial_profile)

COMMANDS = ("kappa", "okounkov", "bergman", "envelope", "energy", "volratio",
            "derivative", "counterexample")


@dataclass
class ExperimentConfig:
    command: str
    kmax: int = 0                # 0 = command default
    seed: int = 0
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("config is not valid JSON: %s" % e)
        if not isinstance(d, dict) or "command" not in d:
            raise ConfigError("config must be an object with a 'command' key")
        cmd = d["command"]
        if cmd not in COMMANDS:
            raise ConfigError("unknown command %r" % cmd)
        kmax = d.get("kmax", 0)
        if not isinstance(kmax, int) or kmax < 0:
            raise ConfigError("kmax must be a nonnegative integer")
        return ExperimentConfig(cmd, kmax, int(d.get("seed", 0)),
                                dict(d.get("params", {})),
                                dict(d.get("tolerances", {})))


def _series_from_name(name, degree=1):
    if isinstance(name, dict):
        return SeriesSpec.monomial([(g["delta"], tuple(g["exponent"]))
                                    for g in name["generators"]],
                                   int(name.get("degree", degree)))
    table = {"full": SeriesSpec.full, "even": SeriesSpec.even,
             "simplex": SeriesSpec.simplex}
    if name not in table:
        raise ConfigError("unknown series %r" % name)
    return table[name]()


def _weight_from_name(name):
    table = {"paper-disk": PaperDiskWeight, "fs": FSWeight}
    if name not in table:
        raise ConfigError("unknown weight %r" % name)
    return table[name]()


def run_kappa(cfg: ExperimentConfig):
    spec = _series_from_name(cfg.params.get("series", "even"))
    kmax = cfg.kmax or 200
    fit = fit_growth(spec, kmax)
    record = {"kappa": fit.kappa, "vol": fit.vol, "residual": fit.residual}
    checks = []
    if "kappa" in cfg.params:
        checks.append(("kappa-expected", fit.kappa == cfg.params["kappa"],
                       "kappa=%d" % fit.kappa))
    if "vol" in cfg.params:
        tol = cfg.tolerances.get("vol_rel", 0.05)
        ok = abs(fit.vol - cfg.params["vol"]) <= tol * abs(cfg.params["vol"])
        checks.append(("vol-expected", ok, "vol=%.6g" % fit.vol))
    dims = dim_sequence(spec, kmax)
    csv = "k,dim\n" + "\n".join("%d,%d" % (k, dims[k])
                                for k in range(max(2, kmax - 8), kmax + 1))
    return record, {"dims.csv": csv + "\n"}, checks


def run_okounkov(cfg: ExperimentConfig):
    spec = _series_from_name(cfg.params.get("series", "even"))
    k_body = max(16, cfg.kmax or 48)
    body = okounkov_body(spec, k_body)
    analysis = monomial_closure_and_degree(spec)
    closure = closure_spec(spec)
    vol0 = body.lattice_normalized_volume()
    vol1 = okounkov_body(closure, k_body).lattice_normalized_volume()
    gdeg = analysis.generic_degree
    record = {"hull_dimension": body.hull_dimension,
              "body_volume": body.body_volume,
              "vol_kappa": vol0,
              "generic_degree": gdeg,
              "closure": analysis.saturation,
              "closure_vol_kappa": vol1}
    checks = [("closure-volume-law", abs(vol1 - gdeg * vol0) < 1e-12,
               "vol(closure)=%.6g = %d * %.6g" % (vol1, gdeg, vol0))]
    csv = ("quantity,value\nhull_dimension,%d\nbody_volume,%.12g\n"
           "generic_degree,%d\nvol_kappa,%.12g\nclosure_vol_kappa,%.12g\n"
           % (body.hull_dimension, body.body_volume, gdeg, vol0, vol1))
    return record, {"body.csv": csv}, checks


def run_bergman(cfg: ExperimentConfig):
    kmax = cfg.kmax or 64
    w = _weight_from_name(cfg.params.get("weight", "paper-disk"))
    spec = _series_from_name(cfg.params.get("series", "full"))
    k_list = [k for k in (16, 32, 64, 128, 256) if k <= kmax] or [kmax]
    mu = disk_quadrature(1.0, 48, 2 * max(k_list) + 8)
    K = disk_samples(1.0, 24, 48)
    target = circle_quadrature(1.0, 256)
    rows = convergence_scan(spec, w, K, mu, k_list, target)
    tol = cfg.tolerances.get("discrepancy", 0.1)
    mono = all(b.discrepancy <= a.discrepancy * 1.1
               for a, b in zip(rows, rows[1:]))
    record = {"rows": [(r.k, r.mass, r.discrepancy) for r in rows]}
    checks = [("discrepancy-at-kmax", rows[-1].discrepancy <= tol,
               "%.4g <= %g" % (rows[-1].discrepancy, tol)),
              ("discrepancy-trend", mono, "nonincreasing within 10%")]
    csv = "k,mass,discrepancy\n" + "".join(
        "%d,%.12g,%.12g\n" % (r.k, r.mass, r.discrepancy) for r in rows)
    return record, {"scan.csv": csv}, checks


def run_envelope(cfg: ExperimentConfig):
    kmax = cfg.kmax or 128
    w = _weight_from_name(cfg.params.get("weight", "paper-disk"))
    spec = _series_from_name(cfg.params.get("series", "full"))
    K = disk_samples(1.0, 24, 48)
    t_grid = np.linspace(-4.0, 1.5, 111)
    it = envelope_iterate(spec, w, K, t_grid, kmax)
    oracle = radial_envelope_oracle(radial_profile(w, t_grid), "disk(1)")
    dist = float(np.max(np.abs(it.values - oracle.values)))
    tol = cfg.tolerances.get("oracle_distance", 0.08)
    record = {"k_source": it.k_source, "gap": it.gap, "mode": it.mode,
              "oracle_distance": dist, "distortion": list(it.distortion)}
    checks = [("envelope-oracle-distance", dist <= tol,
               "%.4g <= %g" % (dist, tol))]
    csv = "t,iterate,oracle\n" + "".join(
        "%.12g,%.12g,%.12g\n" % (t, a, b)
        for t, a, b in zip(t_grid, it.values, oracle.values))
    return record, {"envelope.csv": csv}, checks


def run_energy(cfg: ExperimentConfig):
    w = _weight_from_name(cfg.params.get("weight", "paper-disk"))
    t_grid = np.linspace(-6.0, 2.5, 341)
    env = radial_envelope_oracle(radial_profile(w, t_grid), "disk(1)")
    ma = ma_measure_radial(env)
    shift = 0.25
    from .envelopes import EnvelopeGrid
    env_s = EnvelopeGrid(env.t_grid, env.values + shift, env.degree, "limit")
    ed = kappa_energy_diff(env, env_s)
    record = {"ma_total_mass": ma.total_mass,
              "shift_energy": ed.value,
              "shift_expected": -shift * env.degree}
    checks = [("ma-mass", abs(ma.total_mass - env.degree) <= 1e-10,
               "total=%.12g" % ma.total_mass),
              ("shift-energy", abs(ed.value + shift * env.degree) <= 1e-10,
               "%.12g" % ed.value)]
    csv = "t,mass\n" + "".join("%.12g,%.12g\n" % (t, m)
                               for t, m in zip(ma.positions, ma.masses))
    return record, {"ma_measure.csv": csv}, checks


def run_volratio(cfg: ExperimentConfig):
    kmax = cfg.kmax or 128
    spec = _series_from_name(cfg.params.get("series", "full"))
    w0 = _weight_from_name(cfg.params.get("weight0", "paper-disk"))
    w1 = _weight_from_name(cfg.params.get("weight1", "fs"))
    K = disk_samples(1.0, 24, 48)
    k_list = [k for k in (16, 32, 64, 128, 256) if k <= kmax] or [kmax]
    vr = volume_ratio_limit_check(spec, w0, w1, K, k_list)
    tol = cfg.tolerances.get("limit_error", 0.05)
    record = {"rows": list(vr.rows), "oracle": vr.oracle.value,
              "error": vr.error, "budget_note": vr.budget_note}
    checks = [("volume-ratio-limit", vr.error <= tol,
               "%.4g <= %g" % (vr.error, tol))]
    return record, {"volratio.csv": vr.csv()}, checks


def run_derivative(cfg: ExperimentConfig):
    w = _weight_from_name(cfg.params.get("weight", "paper-disk"))
    spec = _series_from_name(cfg.params.get("series", "full"))
    f = Direction(lambda z, comp=0: 1.0 / (1.0 + abs(z) ** 2), 1.0, "bump")
    K = disk_samples(1.0, 24, 48)
    t_grid = np.linspace(-6.0, 2.5, 341)
    kink = energy_derivative_scan(spec, PushedKinkFamily(w, f), K, t_grid)
    pull = energy_derivative_scan(spec, WeightFamily(w, f), K, t_grid)
    record = {"kink": {"slope_plus": kink.slope_plus,
                       "slope_minus": kink.slope_minus,
                       "gap": kink.kink_gap},
              "pullback": {"slope_plus": pull.slope_plus,
                           "slope_minus": pull.slope_minus,
                           "mu_integral": pull.mu_integral}}
    sp = abs(kink.slope_plus)
    checks = [("kink-detected", kink.kink_gap >= 0.5 * sp,
               "gap=%.4g vs %.4g" % (kink.kink_gap, 0.5 * sp)),
              ("pullback-smooth",
               abs(pull.slope_plus - pull.slope_minus) <= 0.02 * abs(pull.slope_plus),
               "slopes %.6g / %.6g" % (pull.slope_plus, pull.slope_minus)),
              ("pullback-slope-vs-equilibrium",
               abs(pull.slope_plus - pull.mu_integral) <= 0.05 * abs(pull.mu_integral),
               "%.6g vs %.6g" % (pull.slope_plus, pull.mu_integral))]
    return record, {"kink.csv": kink.csv(), "pullback.csv": pull.csv()}, checks


def run_counterexample(cfg: ExperimentConfig):
    kmax = cfg.kmax or 96
    count = int(cfg.params.get("count", 2))
    plan = find_annuli(PaperDiskWeight(), count, kmax)
    built = build_counterexample(plan)
    rep = divergence_scan(built)
    resc = pushforward_rescue(built)
    amp_tol = cfg.tolerances.get("amplitude", 0.15)
    disc_tol = cfg.tolerances.get("rescue_discrepancy", 0.1)
    record = {"plan": {"rows": list(plan.rows), "masses_a": list(plan.masses_a),
                       "masses_c": list(plan.masses_c),
                       "achieved": plan.achieved},
              "oscillation": {"rows": list(rep.rows),
                              "amplitude": rep.amplitude},
              "rescue": [(r.k, r.discrepancy) for r in resc]}
    checks = [("oscillation-amplitude", rep.amplitude >= amp_tol,
               "%.4g >= %g" % (rep.amplitude, amp_tol)),
              ("pushforward-rescue", resc[-1].discrepancy <= disc_tol,
               "%.4g <= %g" % (resc[-1].discrepancy, disc_tol))]
    resc_csv = "k,discrepancy\n" + "".join(
        "%d,%.12g\n" % (r.k, r.discrepancy) for r in resc)
    return record, {"oscillation.csv": rep.csv(), "rescue.csv": resc_csv}, checks


RUNNERS = {"kappa": run_kappa, "okounkov": run_okounkov,
           "bergman": run_bergman, "envelope": run_envelope,
           "energy": run_energy, "volratio": run_volratio,
           "derivative": run_derivative, "counterexample": run_counterexample}


def run_experiment(cfg: ExperimentConfig):
    if cfg.command not in RUNNERS:
        raise ConfigError("unknown command %r" % cfg.command)
    record, artifacts, checks = RUNNERS[cfg.command](cfg)
    summary = {"command": cfg.command, "seed": cfg.seed,
               "result": record,
               "checks": [{"name": n, "pass": bool(p), "detail": d}
                          for n, p, d in checks]}
    return summary, artifacts, checks

"""Verification suites, reports and plot data.

Every check returns a residual that is compared with a threshold.  A check
that cannot be evaluated (a singular curve, a failed integration) becomes a
failed record with ``residual = None`` and the exception in ``details``.

Reports are plain dictionaries serialised as JSON with sorted keys, records
ordered by name, so that two runs of the same configuration differ only in
the ``wall_time`` fields.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import neumann as nm
from .abel_jacobi import (DPSI_DU_SIGN, cubic_condition_residual, default_pairs,
                          dpsi_du, dpsi_du_fd, dpsi_dx_analytic, dpsi_dx_fd,
                          elementary_periods)
from .config import RunConfig, parse_config
from .errors import HyperintError, NumericalFailure
from .instances import rng
from .riemann import Path as XPath
from .riemann import continue_y, integrate_path, large_circle_integral, plan_path, sigma_integrand
from .surface import cut_curve, lift_points, points_to_u
from .symplectic import (BRACKET_SIGN, calibrate_bracket_sign, canonical_study,
                         flow_time_scale, integrate_flow, involutivity_residual)

__all__ = ["run_verify", "run_flow", "run_periods", "run_neumann", "run_interp",
           "conventions", "write_report", "report_json", "emit_plot_data", "exit_code"]


def _c(v) -> list:
    v = complex(v)
    return [v.real, v.imag]


def _cl(a) -> list:
    return [_c(v) for v in np.ravel(a)]


def conventions() -> dict:
    return {"base_sheet": 1, "bracket_sign": BRACKET_SIGN, "dpsi_du_sign": DPSI_DU_SIGN,
            "neumann_time_scale": "4i/r", "rng": "numpy PCG64"}


def _record(name, family, residual, threshold, details, wall) -> dict:
    ok = residual is not None and math.isfinite(residual) and residual <= threshold
    return {"name": name, "family": family, "residual": residual, "threshold": threshold,
            "pass": bool(ok), "wall_time": round(wall, 6), "details": details}


def _error_details(e: Exception) -> dict:
    return {"error": type(e).__name__, "message": str(e),
            "numerical_failure": isinstance(e, NumericalFailure)}


# -----------------------------------------------------------------------------
# instance checks

def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def _chk_canonical_residual(rc, inst):
    st = canonical_study(inst.family, inst.u, inst.config, rc.fd_step, rc.settings)
    return st.residual, {"h": st.h, "residual_half_step": st.residual_half,
                         "halving_ratio": st.ratio, "extrapolated_residual": st.extrapolated}


def _chk_involutivity(rc, inst):
    return involutivity_residual(inst.family, inst.u, inst.config), {}


def _chk_dpsi_dx(rc, inst):
    A = dpsi_dx_analytic(inst.family, inst.config)
    F = dpsi_dx_fd(inst.family, inst.u, inst.config, rc.fd_step, rc.settings)
    return _rel(F, A), {"h": rc.fd_step}


def _chk_dpsi_symmetry(rc, inst):
    D = dpsi_du(inst.family, inst.u, inst.config, rc.settings)
    return float(np.max(np.abs(D - D.T)) / np.max(np.abs(D))), {}


def _chk_dpsi_du_fd(rc, inst):
    D = dpsi_du(inst.family, inst.u, inst.config, rc.settings)
    F = dpsi_du_fd(inst.family, inst.u, inst.config, rc.fd_step, rc.settings)
    return _rel(F, D), {"h": rc.fd_step}


def _chk_cubic_condition(rc, inst):
    curve = cut_curve(inst.family, inst.u)
    per_pair = {}
    for p in default_pairs(len(curve.branch_points)):
        key = f"{p[0]}-{'inf' if p[1] is None else p[1]}"
        per_pair[key] = cubic_condition_residual(inst.family, inst.u, p, 1e-4, rc.settings)
    return max(per_pair.values()), {"h": 1e-4, "pairs": per_pair}


def _flow_indices(rc, g):
    if "m" in rc.flow:
        m = rc.flow["m"]
        if not 1 <= m <= g:
            raise ValueError(f"flow.m must lie in 1..{g}")
        return [m - 1]
    return list(range(g))


def _flow_T(rc, inst, m):
    if "T" in rc.flow:
        return float(rc.flow["T"])
    return 0.1 * flow_time_scale(inst.family, inst.config, m)


def _chk_flow_linearization(rc, inst):
    g = inst.family.genus
    worst, per = 0.0, {}
    for m in _flow_indices(rc, g):
        T = _flow_T(rc, inst, m)
        tr = integrate_flow(inst.family, inst.config, m, T, rc.settings)
        dpsi = tr.psi_series - tr.psi_series[0]
        dpsi[:, m] -= tr.times
        r = float(np.max(np.abs(dpsi)))
        per[str(m + 1)] = {"T": T, "residual": r,
                           "calibrated_sign": calibrate_bracket_sign(
                               inst.family, inst.config, m, settings=rc.settings)}
        worst = max(worst, r)
    return worst, {"flows": per}


def _chk_flow_conservation(rc, inst):
    g = inst.family.genus
    worst, per = 0.0, {}
    for m in _flow_indices(rc, g):
        T = _flow_T(rc, inst, m)
        tr = integrate_flow(inst.family, inst.config, m, T, rc.settings, with_psi=False)
        r = float(np.max(np.abs(tr.u_series - tr.u_series[0])))
        per[str(m + 1)] = {"T": T, "residual": r}
        worst = max(worst, r)
    return worst, {"flows": per}


def _chk_monodromy(rc, inst):
    """Loops around each branch point: once flips ``y``, twice restores it."""
    curve = cut_curve(inst.family, inst.u)
    bp = curve.branch_points
    worst = 0.0
    for n, b in enumerate(bp):
        others = np.delete(bp, n)
        rad = 0.5 * np.min(np.abs(others - b)) if len(others) else 1.0
        ang = 2 * np.pi * np.arange(65) / 64
        loop = b + rad * np.exp(1j * ang)
        y0 = np.sqrt(complex(curve.F(loop[0])))
        once = continue_y(curve, XPath(loop, y0), check=False)
        twice = continue_y(curve, XPath(np.concatenate([loop, loop[1:]]), y0), check=False)
        worst = max(worst, abs(once + y0) / abs(y0), abs(twice - y0) / abs(y0))
    return worst, {"branch_points": len(bp)}


def _detour(wp: np.ndarray, delta: float) -> np.ndarray:
    """Each segment replaced by two through a midpoint pushed sideways by ``delta``."""
    out = [wp[0]]
    for a, b in zip(wp[:-1], wp[1:]):
        n = 1j * (b - a) / abs(b - a)
        out += [0.5 * (a + b) + delta * n, b]
    return np.array(out)


def _chk_path_independence(rc, inst):
    curve = cut_curve(inst.family, inst.u)
    x, w = inst.config.x, inst.family.curve_y(inst.config)
    integrand = sigma_integrand(curve.genus)
    worst = 0.0
    for j in range(len(x)):
        k = (j + 1) % len(x)
        if k == j:
            break
        wp = plan_path(curve, x[j], x[k])
        I1, y1 = integrate_path(curve, integrand, XPath(wp, w[j]), rc.settings)
        I2, y2 = integrate_path(curve, integrand, XPath(_detour(wp, 0.25 * curve.clearance), w[j]),
                                rc.settings, check=False)
        worst = max(worst, float(np.max(np.abs(I1 - I2)) / max(1.0, np.max(np.abs(I1)))))
    return worst, {"threshold_basis": "10 x quadrature rel_tol"}


def _chk_holomorphy_at_infinity(rc, inst):
    curve = cut_curve(inst.family, inst.u)
    v = large_circle_integral(curve, None, settings=rc.settings)
    return float(np.max(np.abs(v))), {"radius": curve.radius}


def _chk_roundtrip(rc, inst):
    fam, cfg = inst.family, inst.config
    u = points_to_u(fam, cfg)
    e1 = float(np.max(np.abs(u - inst.u)) / max(1.0, np.max(np.abs(inst.u))))
    F = fam.curve_poly(fam.section(u))
    w = fam.curve_y(cfg)
    signs = np.where(np.abs(np.sqrt(F(cfg.x)) - w) <= np.abs(np.sqrt(F(cfg.x)) + w), 1, -1)
    back = lift_points(fam, u, cfg.x, signs)
    e2 = float(np.max(np.abs(back.y - cfg.y)) / max(1.0, np.max(np.abs(cfg.y))))
    return max(e1, e2), {"u_error": e1, "lift_error": e2}


def _chk_permutation_invariance(rc, inst):
    u = points_to_u(inst.family, inst.config)
    perm = np.arange(len(inst.config))[::-1]
    up = points_to_u(inst.family, inst.config.permuted(perm))
    return float(np.max(np.abs(u - up)) / max(1.0, np.max(np.abs(u)))), {}


def _chk_surface_residual(rc, inst):
    fam = inst.family
    return max(fam.surface_residual(p) for p in inst.config.points()), {}


_CHECKS = {
    "canonical_residual": _chk_canonical_residual,
    "involutivity": _chk_involutivity,
    "dpsi_dx": _chk_dpsi_dx,
    "dpsi_symmetry": _chk_dpsi_symmetry,
    "dpsi_du_fd": _chk_dpsi_du_fd,
    "cubic_condition": _chk_cubic_condition,
    "flow_linearization": _chk_flow_linearization,
    "flow_conservation": _chk_flow_conservation,
    "monodromy": _chk_monodromy,
    "path_independence": _chk_path_independence,
    "holomorphy_at_infinity": _chk_holomorphy_at_infinity,
    "roundtrip": _chk_roundtrip,
    "permutation_invariance": _chk_permutation_invariance,
    "surface_residual": _chk_surface_residual,
}


def _threshold(rc: RunConfig, name: str) -> float:
    if name == "path_independence" and name not in rc.thresholds:
        return 10 * rc.settings.rel_tol
    return rc.threshold(name)


def _run_instance_check(raw: dict, name: str) -> dict:
    rc = parse_config(raw)
    t0 = time.perf_counter()
    try:
        inst = rc.instance()
        res, det = _CHECKS[name](rc, inst)
        res = float(res)
    except (HyperintError, ValueError, ArithmeticError, RuntimeError) as e:
        res, det = None, _error_details(e)
    return _record(name, rc.tag, res, _threshold(rc, name), det, time.perf_counter() - t0)


def _map(fn, raw, names, workers):
    if workers > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, [raw] * len(names), names))
    return [fn(raw, n) for n in names]


def _instance_summary(rc: RunConfig) -> dict:
    out = {"tag": rc.tag, "seed": rc.seed}
    try:
        inst = rc.instance()
    except (HyperintError, ValueError, RuntimeError) as e:
        out["error"] = _error_details(e)
        return out
    out["family"] = inst.family.to_dict()
    out["u"] = _cl(inst.u)
    out["x"] = _cl(inst.config.x)
    out["w"] = _cl(inst.family.curve_y(inst.config))
    return out


def _assemble(mode: str, rc: RunConfig, records: list, skipped=None, extra=None) -> dict:
    records = sorted(records, key=lambda r: r["name"])
    n_pass = sum(r["pass"] for r in records)
    rep = {"mode": mode, "conventions": conventions(),
           "tolerances": {"rel_tol": rc.settings.rel_tol, "abs_tol": rc.settings.abs_tol,
                          "fd_step": rc.fd_step},
           "checks": records, "skipped": sorted(skipped or [], key=lambda s: s["name"]),
           "summary": {"pass_count": int(n_pass), "fail_count": len(records) - int(n_pass)}}
    if extra:
        rep.update(extra)
    return rep


def run_verify(rc: RunConfig, workers: int = 1) -> dict:
    """Run the configured instance checks; see :data:`hyperint.config.CHECK_NAMES`."""
    names = sorted(set(rc.checks))
    recs = _map(_run_instance_check, rc.raw, names, workers)
    extra = {"instance": _instance_summary(rc)} if names else {}
    return _assemble("verify", rc, recs, extra=extra)


def run_interp(rc: RunConfig, workers: int = 1) -> dict:
    names = ["permutation_invariance", "roundtrip", "surface_residual"]
    recs = _map(_run_instance_check, rc.raw, names, workers)
    return _assemble("interp", rc, recs, extra={"instance": _instance_summary(rc)})


def run_flow(rc: RunConfig, workers: int = 1):
    """Flow checks plus the sampled trajectory of the first configured flow.

    Returns ``(report, trajectory or None)``.
    """
    names = ["flow_conservation", "flow_linearization"]
    recs = _map(_run_instance_check, rc.raw, names, workers)
    traj = None
    try:
        inst = rc.instance()
        m = _flow_indices(rc, inst.family.genus)[0]
        traj = integrate_flow(inst.family, inst.config, m, _flow_T(rc, inst, m), rc.settings,
                              n_samples=int(rc.flow.get("samples", 11)))
    except (HyperintError, ValueError) as e:
        recs.append(_record("trajectory", rc.tag, None, 0.0, _error_details(e), 0.0))
    return _assemble("flow", rc, recs, extra={"instance": _instance_summary(rc)}), traj


def run_periods(rc: RunConfig, workers: int = 1) -> dict:
    """Elementary periods and the cubic condition on every default cycle."""
    t0 = time.perf_counter()
    recs, extra = [], {"instance": _instance_summary(rc)}
    try:
        inst = rc.instance()
        pd = elementary_periods(inst.family, inst.u, rc.settings)
        extra["periods"] = {"branch_points": _cl(pd.branch_points),
                            "pairs": [[i, j] for i, j in pd.pairs],
                            "e": [_cl(row) for row in pd.e]}
    except (HyperintError, ValueError) as e:
        recs.append(_record("periods", rc.tag, None, 0.0, _error_details(e),
                            time.perf_counter() - t0))
        return _assemble("periods", rc, recs, extra=extra)
    args = [(i, j) for i, j in pd.pairs]
    recs += _map(_run_pair_check, rc.raw, args, workers)
    recs += _map(_run_instance_check, rc.raw, ["holomorphy_at_infinity"], 1)
    return _assemble("periods", rc, recs, extra=extra)


def _run_pair_check(raw: dict, pair) -> dict:
    rc = parse_config(raw)
    name = f"cubic_condition[{pair[0]},{'inf' if pair[1] is None else pair[1]}]"
    t0 = time.perf_counter()
    try:
        inst = rc.instance()
        r1 = cubic_condition_residual(inst.family, inst.u, pair, 1e-4, rc.settings)
        r2 = cubic_condition_residual(inst.family, inst.u, pair, 5e-5, rc.settings)
        res, det = r1, {"h": 1e-4, "residual_half_step": r2,
                        "halving_ratio": r1 / r2 if r2 > 0 else None}
    except (HyperintError, ValueError) as e:
        res, det = None, _error_details(e)
    return _record(name, rc.tag, res, rc.threshold("cubic_condition"), det,
                   time.perf_counter() - t0)


# -----------------------------------------------------------------------------
# Neumann suite

def _neumann_setup(rc: RunConfig):
    spec = rc.neumann or {}
    params = nm.NeumannParams(np.array(spec.get("c", [1.0, 2.0, 3.0]), float),
                              float(spec.get("r", 1.0)))
    if "q0" in spec:
        state = nm.NeumannState(spec["q0"], spec["p0"])
    else:
        state = nm.random_state(params, rng(int(spec.get("seed", rc.seed or 0))))
    return params, state, float(spec.get("T", 5.0))


def _is_equilibrium(params, state) -> bool:
    dq, dp = nm.mechanical_rhs(params, state)
    return float(np.max(np.abs(np.concatenate([dq, dp])))) < 1e-14 * max(1.0, params.r)


def _neumann_checks(raw: dict, name: str) -> dict:
    rc = parse_config(raw)
    t0 = time.perf_counter()
    thr = rc.threshold(name)
    try:
        params, state, T = _neumann_setup(rc)
        if state.constraint_residual(params) > 1e-10 * max(1.0, params.r ** 2):
            raise ValueError("initial state violates |q| = r, q.p = 0")
        res, det = _NEUMANN[name](params, state, T, rc)
    except (HyperintError, ValueError) as e:
        res, det = None, _error_details(e)
    return _record(name, "NeumannRational", res if res is None else float(res), thr, det,
                   time.perf_counter() - t0)


def _nm_trajectory(params, state, T):
    return nm.integrate(params, state, T, n_samples=max(11, int(10 * T) + 1))


def _nm_constraints(params, state, T, rc):
    tr = _nm_trajectory(params, state, T)
    return tr.drift(params), {"T": T, "projections": len(tr.projections)}


def _nm_uhlenbeck(params, state, T, rc):
    tr = _nm_trajectory(params, state, T)
    F0 = nm.uhlenbeck_integrals(params, state)
    return max(float(np.max(np.abs(nm.uhlenbeck_integrals(params, s) - F0))) for s in tr.states), \
        {"T": T}


def _nm_energy(params, state, T, rc):
    tr = _nm_trajectory(params, state, T)
    E0 = nm.energy(params, state)
    return max(abs(nm.energy(params, s) - E0) for s in tr.states), {"T": T}


def _nm_h_identity(params, state, T, rc):
    F = nm.uhlenbeck_integrals(params, state)
    return abs(0.5 * float(params.c @ F) - nm.energy(params, state)), {}


def _nm_two_route(params, state, T, rc):
    P, u = nm.spectral_data(params, state)
    cfg = nm.separated_points(params, state)
    u2 = points_to_u(params.family(), cfg)
    return float(np.max(np.abs(u2 - u)) / max(1.0, np.max(np.abs(u)))), {"u": _cl(u)}


def _nm_interlacing(params, state, T, rc):
    """Distance by which a separated root falls outside its interval ``[c_n, c_n+1]``."""
    xs = nm._separated_x(params, state, 1e-10)
    worst = float(np.max(np.abs(xs.imag)))
    xr = np.sort(xs.real)
    for n, x in enumerate(xr):
        worst = max(worst, params.c[n] - x, x - params.c[n + 1])
    return max(worst, 0.0), {"roots": [float(v) for v in xr]}


def _nm_linearization(params, state, T, rc, part):
    if _is_equilibrium(params, state):
        zeros = [[0.0, 0.0]] * (len(params.c) - 1)
        return 0.0, {"equilibrium": True, "slopes": zeros,
                     "note": "state does not move; slopes are zero"}
    T_lin = min(T, 0.1 * nm.turning_time(params, state))
    res = nm.linearization_check(params, state, T_lin, rc.settings)
    d = res.to_dict()
    d["T"] = T_lin
    return (res.fit_residual if part == "fit" else res.slope_error), d


_NEUMANN = {
    "constraints": _nm_constraints,
    "uhlenbeck_conservation": _nm_uhlenbeck,
    "energy_conservation": _nm_energy,
    "h_identity": _nm_h_identity,
    "two_route_u": _nm_two_route,
    "interlacing": _nm_interlacing,
    "linearization_fit": lambda *a: _nm_linearization(*a, "fit"),
    "linearization_slopes": lambda *a: _nm_linearization(*a, "slopes"),
}


def run_neumann(rc: RunConfig, workers: int = 1) -> dict:
    """Conservation, two-route ``u``, interlacing and linearization checks."""
    names = sorted(_NEUMANN)
    skipped = []
    try:
        params, state, _ = _neumann_setup(rc)
    except (ValueError, HyperintError) as e:
        rec = _record("setup", "NeumannRational", None, 0.0, _error_details(e), 0.0)
        return _assemble("neumann", rc, [rec])
    if params.r != 1.0:
        names.remove("h_identity")
        skipped.append({"name": "h_identity",
                        "reason": "H = 1/2 sum c_n F_n is checked only on the unit sphere "
                                  "(r = 1), the scope in which it is stated"})
    if _is_equilibrium(params, state):
        names.remove("linearization_slopes")
        skipped.append({"name": "linearization_slopes",
                        "reason": "equilibrium state: separated points sit on branch points, "
                                  "psi is constant and the slopes are zero"})
    recs = _map(_neumann_checks, rc.raw, names, workers)
    extra = {"neumann": {"c": [float(v) for v in params.c], "r": params.r,
                         "q0": [float(v) for v in state.q], "p0": [float(v) for v in state.p]}}
    return _assemble("neumann", rc, recs, skipped, extra)


# -----------------------------------------------------------------------------
# output

def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(report_json(report))


def exit_code(report: dict) -> int:
    """0 all pass, 3 if a check died of a numerical failure, 1 otherwise."""
    recs = report["checks"]
    if all(r["pass"] for r in recs):
        return 0
    if any(r["details"].get("numerical_failure") for r in recs if not r["pass"]):
        return 3
    return 1


def emit_plot_data(data, path: str | Path) -> int:
    """Write a trajectory (flow mode) or a report (report mode) as CSV.

    Flow mode columns are ``t``, then real and imaginary parts of each
    ``u_k`` and ``psi_k``; report mode rows are ``(check, residual)``.
    Returns the number of data rows.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        if isinstance(data, dict):
            wr.writerow(["check", "residual"])
            for r in sorted(data["checks"], key=lambda r: r["name"]):
                wr.writerow([r["name"], "" if r["residual"] is None else repr(r["residual"])])
            return len(data["checks"])
        g = data.u_series.shape[1]
        head = ["t"]
        for name in ("u", "psi"):
            for k in range(1, g + 1):
                head += [f"Re_{name}{k}", f"Im_{name}{k}"]
        wr.writerow(head)
        for i, t in enumerate(data.times):
            row = [repr(float(t))]
            for arr in (data.u_series[i], data.psi_series[i]):
                for v in arr:
                    row += [repr(float(v.real)), repr(float(v.imag))]
            wr.writerow(row)
        return len(data.times)

"""Command-line entry point.

Every subcommand reads an optional TOML config, lets flags override it,
validates everything up front (exit 2 on any problem), runs, writes one report
and exits 0 if all checks passed or 1 naming the first failing check.

Reports go to stdout, or to ``$CGOLAB_REPORT_DIR/<subcommand>.<json|csv>``
when that variable is set.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np
import tomli

from . import multiindex as mi
from . import recovery as rec
from . import semiclassical as sc
from . import structure as stc
from .calculus import PolyPlaneWave
from .symtensor import SymTensor, tensor_product, identity2
from .verify import appendix_suite, dimension_report

REPORT_DIR_ENV = "CGOLAB_REPORT_DIR"


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# config schema
# --------------------------------------------------------------------------

def _int(lo=None, hi=None):
    def conv(name, v):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise ConfigError(f"{name} must be an integer")
        if (lo is not None and v < lo) or (hi is not None and v > hi):
            raise ConfigError(f"{name}={v} outside [{lo}, {hi}]")
        return int(v)

    return conv


def _float(lo=None, hi=None, lo_open=False):
    def conv(name, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name} must be a number")
        v = float(v)
        if not math.isfinite(v):
            raise ConfigError(f"{name} must be finite")
        if lo is not None and (v < lo or (lo_open and v == lo)):
            raise ConfigError(f"{name}={v} below {lo}")
        if hi is not None and v > hi:
            raise ConfigError(f"{name}={v} above {hi}")
        return v

    return conv


def _vector(name, v):
    if not isinstance(v, list) or not v or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise ConfigError(f"{name} must be a nonempty list of numbers")
    return [float(x) for x in v]


def _hlist(name, v):
    if not isinstance(v, list) or len(v) < 1:
        raise ConfigError(f"{name} must be a nonempty list")
    out = [_float(0.0, 1.0, lo_open=True)(name, x) for x in v]
    if len(set(out)) != len(out):
        raise ConfigError(f"{name} has repeated entries")
    return out


def _choice(*options):
    def conv(name, v):
        if v not in options:
            raise ConfigError(f"{name} must be one of {options}")
        return v

    return conv


def _bumps(name, v):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{name} must be a nonempty array of tables")
    allowed = {"order", "amplitude", "sigma", "center", "tensor"}
    out = []
    for i, b in enumerate(v):
        if not isinstance(b, dict):
            raise ConfigError(f"{name}[{i}] must be a table")
        extra = set(b) - allowed
        if extra:
            raise ConfigError(f"{name}[{i}] has unknown keys {sorted(extra)}")
        c = {"order": _int(0)(f"{name}[{i}].order", b.get("order", 0))}
        c["amplitude"] = _float(0.0)(f"{name}[{i}].amplitude", b.get("amplitude", 0.1))
        c["sigma"] = _float(0.0, lo_open=True)(f"{name}[{i}].sigma", b.get("sigma", 0.35))
        if "center" in b:
            c["center"] = _vector(f"{name}[{i}].center", b["center"])
        if "tensor" in b:
            c["tensor"] = _vector(f"{name}[{i}].tensor", b["tensor"])
        out.append(c)
    return out


def _path(name, v):
    if not isinstance(v, str) or not v:
        raise ConfigError(f"{name} must be a file path")
    return v


COMMON = {"seed": (_int(0, 2**63 - 1), 0)}

SCHEMAS = {
    "tensor-verify": {
        "draws": (_int(1, 1000), 50),
        "dmax": (_int(1, 4), 4),
        "max_order": (_int(0, 6), 6),
        "tol": (_float(0.0, lo_open=True), 1e-12),
    },
    "dim-check": {
        "d": (_int(1, 12), 3),
        "kmax": (_int(0, 40), 5),
        "rank_kmax": (_int(0, 6), None),
    },
    "decompose": {
        "input": (_path, None),
        "d": (_int(2, 6), 3),
        "k": (_int(1, 6), 3),
        "xi": (_vector, None),
        "draws": (_int(1, 10_000), 100),
        "tol": (_float(0.0, lo_open=True), 1e-10),
        "kernel_tol": (_float(0.0, lo_open=True), 1e-8),
    },
    "recover": {
        "d": (_int(3, 4), 3),
        "R": (_int(0, 3), 1),
        "xi": (_vector, None),
        "kmin": (_int(0, 9), 0),
        "kmax": (_int(0, 9), None),
        "check": (_choice("containment", "equality"), "containment"),
        "angle_tol": (_float(0.0, lo_open=True), 1e-8),
        "pieces_sets": (_int(0, 1000), 5),
        "pieces_k0": (_int(0, 4), 2),
        "pieces_tol": (_float(0.0, lo_open=True), 1e-10),
    },
    "cgo": {
        "d": (_int(2, 3), 3),
        "m": (_int(1, 4), 2),
        "N": (_int(8, 96), 48),
        "L": (_float(0.0, lo_open=True), 2 * math.pi),
        "h": (_hlist, [2.0**-j for j in range(3, 8)]),
        "bumps": (_bumps, [{"order": 0, "amplitude": 0.1, "sigma": 0.35}]),
        "case": (_choice("a", "b"), "a"),
        "s": (_float(), None),
        "sigma": (_float(0.0, 1.0), None),
        "r": (_int(0), 0),
        "eps": (_float(0.0, lo_open=True), 1.0),
        "max_iter": (_int(1, 1000), 30),
        "tol": (_float(0.0, lo_open=True), 1e-12),
        "residual_tol": (_float(0.0, lo_open=True), 1e-8),
        "contraction_max": (_float(0.0, 1.0, lo_open=True), 0.5),
        "alias_tol": (_float(0.0, lo_open=True), 1e-10),
        "slope_slack": (_float(0.0), 0.3),
    },
    "avg": {
        "d": (_int(2, 3), 3),
        "N": (_int(8, 128), 32),
        "L": (_float(0.0, lo_open=True), 2 * math.pi),
        "kmax": (_float(0.0, lo_open=True), 8.0),
        "h": (_hlist, [2.0**-j for j in range(2, 7)]),
        "lam": (_float(), 1.0),
        "k": (_float(), 0.0),
        "s": (_float(), 1.2),
        "sigma": (_float(), 0.2),
        "n_f": (_int(1, 100), 5),
        "n_mc": (_int(2, 10**7), 10_000),
        "band": (_float(1.0), 2.0),
    },
}


@dataclass
class RunConfig:
    subcommand: str
    seed: int
    params: dict = field(default_factory=dict)


def load_config(subcommand: str, path: str | None, overrides: dict) -> RunConfig:
    raw = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomli.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from exc
    raw.update({k: v for k, v in overrides.items() if v is not None})
    schema = {**COMMON, **SCHEMAS[subcommand]}
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    params = {}
    for key, (conv, default) in schema.items():
        params[key] = conv(key, raw[key]) if key in raw else default
    _cross_validate(subcommand, params)
    return RunConfig(subcommand, params.pop("seed"), params)


def case_window(case, m, s, sigma):
    """Parameter checks for the two coefficient-regularity cases; returns ``k0``."""
    if case == "a":
        k0 = m // 2 - 1
        if not m / 2 + 0.5 < s < m / 2 + 1:
            raise ConfigError(f"case a needs m/2 + 1/2 < s < m/2 + 1, got s={s}")
    else:
        if m % 2 != 1:
            raise ConfigError("case b needs m odd")
        k0 = (m - 1) // 2
        if s != m / 2 + 0.5:
            raise ConfigError(f"case b needs s = m/2 + 1/2, got s={s}")
    if k0 < 0:
        raise ConfigError("no lower-order coefficients are allowed for this m")
    if not 0 <= sigma < 1:
        raise ConfigError("need 0 <= sigma < 1")
    if s - k0 - 2 * sigma < 0:
        raise ConfigError(f"need s - k0 - 2 sigma >= 0, got {s - k0 - 2 * sigma}")
    if s - k0 <= 0 or s > m:
        raise ConfigError("need s - k0 > 0 and s <= m")
    return k0


def _cross_validate(sub, p):
    if sub == "dim-check" and p["rank_kmax"] is None:
        p["rank_kmax"] = min(p["kmax"], 4)
    if sub == "decompose" and p["input"] is not None and p["xi"] is None:
        raise ConfigError("--input needs --xi")
    if sub == "decompose" and p["input"] is not None:
        try:
            with open(p["input"], encoding="utf-8") as fh:
                A = SymTensor.from_json(fh.read())
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot read input tensor: {exc}") from exc
        if A.k < 1:
            raise ConfigError("input tensor needs k >= 1")
        p["d"], p["k"], p["tensor"] = A.d, A.k, A
    if sub in ("decompose", "recover"):
        if p["xi"] is None:
            p["xi"] = [0.0] * (p["d"] - 1) + [1.0]
        if len(p["xi"]) != p["d"]:
            raise ConfigError("xi must have length d")
        if not np.linalg.norm(p["xi"]) > 0:
            raise ConfigError("xi must be nonzero")
    if sub == "recover":
        if p["kmax"] is None:
            p["kmax"] = 2 * p["R"] + 1
        if p["kmin"] > p["kmax"]:
            raise ConfigError("kmin exceeds kmax")
        if p["kmax"] > 2 * p["R"] + 1:
            raise ConfigError("kmax beyond 2R + 1 has no prediction")
    if sub == "cgo":
        m = p["m"]
        if p["s"] is None:
            p["s"] = m / 2 + 0.75 if p["case"] == "a" else m / 2 + 0.5
        if p["sigma"] is None:
            p["sigma"] = 0.5 if p["case"] == "a" else 0.0
        k0 = case_window(p["case"], m, p["s"], p["sigma"])
        p["k0"] = k0
        if any(b["order"] > k0 for b in p["bumps"]):
            raise ConfigError(f"bump order exceeds k0={k0}")
        if p["r"] > m - 1:
            raise ConfigError("need r <= m - 1")
        for b in p["bumps"]:
            if "center" in b and len(b["center"]) != p["d"]:
                raise ConfigError("bump center must have length d")
            if "tensor" in b and len(b["tensor"]) != mi.sym_dim(p["d"], b["order"]):
                raise ConfigError("bump tensor has the wrong number of components")
    if sub == "avg":
        try:
            sc.check_window(p["lam"], p["s"], p["k"], p["sigma"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


# --------------------------------------------------------------------------
# checks
# --------------------------------------------------------------------------

class Checks:
    """Ordered named assertions; the first failure is what the exit message names."""

    def __init__(self):
        self.items: list[dict] = []

    def add(self, name, ok, **detail):
        self.items.append({"name": name, "passed": bool(ok), **detail})

    @property
    def first_failure(self):
        return next((c["name"] for c in self.items if not c["passed"]), None)


def _zeta(d):
    z = np.zeros(d, dtype=complex)
    z[0], z[1] = 1.0, 1j
    return z


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def run_tensor_verify(cfg: RunConfig, checks: Checks):
    p = cfg.params
    rep = appendix_suite(cfg.seed, p["draws"], p["dmax"], p["max_order"])
    for name, v in rep["identities"].items():
        checks.add(name, v["max_rel_error"] < p["tol"], max_rel_error=v["max_rel_error"])
    checks.add("id3_closed_form_identified", len(rep["id3_closed_form"]) == 1, matches=rep["id3_closed_form"])
    return rep, None


def run_dim_check(cfg: RunConfig, checks: Checks):
    d, kmax, rk = cfg.params["d"], cfg.params["kmax"], cfg.params["rank_kmax"]
    rows = dimension_report(d, kmax)
    for r in rows:
        checks.add(f"sym_dim[k={r['k']}]", r["sym_dim"] == r["sym_dim_binomial"])
        checks.add(f"poly_dim_le[k={r['k']}]", r["poly_dim_le"] == r["poly_dim_le_binomial"])
        if d >= 2:
            checks.add(f"codim[k={r['k']}]", r["codim_lhs"] == r["codim_rhs"])
        if d >= 2 and r["k"] <= rk:
            rank = stc.constraint_rank(r["k"], d, None, seed=cfg.seed)
            r["constraint_rank"] = rank
            checks.add(f"constraint_rank[k={r['k']}]", rank == r["codim_lhs"], rank=rank)
    rep = {"d": d, "kmax": kmax, "rows": rows}
    return rep, rows


def run_decompose(cfg: RunConfig, checks: Checks):
    p = cfg.params
    d, k, xi = p["d"], p["k"], np.array(p["xi"])
    if p["input"] is not None:
        A = p.pop("tensor")
        ok, dev = stc.kernel_test(A, xi, seed=cfg.seed)
        dec = stc.decompose_V_xi(A, xi)
        rel = dec.residual / max(A.max_norm(), np.finfo(float).tiny)
        checks.add("structure_holds", rel < p["tol"], relative_residual=rel, kernel_condition=ok, kernel_deviation=dev)
        return {"xi": list(xi), "decomposition": dec.to_dict(), "kernel_condition": ok, "kernel_deviation": dev}, None
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(p["draws"]):
        C0 = SymTensor.random(d, k - 1, rng)
        A = tensor_product(SymTensor(d, 1, xi), C0)
        if k >= 2:
            A = A + tensor_product(identity2(d), SymTensor.random(d, k - 2, rng))
        worst = max(worst, stc.decompose_V_xi(A, xi).residual / max(A.max_norm(), 1.0))
    checks.add("reconstruction_residual", worst < p["tol"], max_residual=worst)
    basis = stc.kernel_basis(k, d, xi, seed=cfg.seed)
    kworst = 0.0
    for col in basis.T:
        kworst = max(kworst, stc.decompose_V_xi(SymTensor(d, k, col), xi).residual)
    checks.add("kernel_vectors_decompose", kworst < p["kernel_tol"], max_residual=kworst)
    sdim = stc.structured_dim(k, d, xi)
    checks.add("kernel_dimension", basis.shape[1] == sdim, kernel_dim=basis.shape[1], structured_dim=sdim)
    rep = {
        "d": d,
        "k": k,
        "xi": list(xi),
        "draws": p["draws"],
        "max_reconstruction_residual": worst,
        "kernel_dim": int(basis.shape[1]),
        "structured_dim": int(sdim),
        "max_kernel_residual": kworst,
    }
    return rep, None


def run_recover(cfg: RunConfig, checks: Checks):
    p = cfg.params
    d, R, xi = p["d"], p["R"], np.array(p["xi"]) / np.linalg.norm(p["xi"])
    rows = []
    for k in range(p["kmin"], p["kmax"] + 1):
        res = rec.jet_nullspace(d, k, R, xi, seed=cfg.seed)
        pred = rec.predicted_value_space(d, k, R, xi)
        row = {"k": k, "value_dim": res.value_dim, "predicted_dim": int(pred.shape[1]), "nullity": res.nullity}
        if res.value_dim:
            w = np.sqrt(mi.multiplicities(d, k))[:, None]
            q, _ = np.linalg.qr(pred * w) if pred.shape[1] else (np.zeros((len(w), 0)), None)
            U = res.value_basis * w
            outside = float(np.linalg.norm(U - q @ (q.conj().T @ U), 2)) if q.size else float(np.linalg.norm(U, 2))
        else:
            outside = 0.0
        row["containment_defect"] = outside
        if k <= R:
            checks.add(f"value_vanishes[k={k}]", res.value_dim == 0, value_dim=res.value_dim)
        else:
            checks.add(f"value_contained[k={k}]", outside < p["angle_tol"], defect=outside)
            if p["check"] == "equality":
                ang = rec.principal_angles(res.value_basis, pred, d, k)
                amax = float(np.max(ang, initial=0.0))
                row["max_angle"] = amax
                checks.add(f"value_equals_prediction[k={k}]", res.value_dim == pred.shape[1] and amax < p["angle_tol"], max_angle=amax)
        rows.append(row)
    pieces = []
    if p["pieces_sets"]:
        rng = np.random.default_rng(cfg.seed)
        k0 = p["pieces_k0"]
        worst = 0.0
        for _ in range(p["pieces_sets"]):
            coeffs = [rec.CoefficientField.random(d, kk, rng, degree=2, width=1.2) for kk in range(k0 + 1)]
            z = stc.sample_V_xi(xi, rng).value
            omega = z.real.copy()
            report = rec.reduce_to_pieces(coeffs, k0, R + k0, xi, z, omega)
            rel = report.step_discrepancy / max(report.scale, np.finfo(float).tiny)
            worst = max(worst, rel)
            pieces.append(rel)
        checks.add("pieces_equivalence", worst < p["pieces_tol"], max_rel_discrepancy=worst)
    rep = {"d": d, "R": R, "xi": list(xi), "rows": rows, "pieces_rel_discrepancy": pieces}
    return rep, rows


def run_cgo(cfg: RunConfig, checks: Checks):
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    problem = sc.CGOProblem.from_bumps(p["d"], p["N"], p["m"], p["bumps"], rng, p["L"])
    zeta = _zeta(p["d"])
    a = PolyPlaneWave.linear_power(np.conj(zeta), p["r"])
    rows = []
    for h in p["h"]:
        w = sc.SemiclassicalWeight(h, zeta)
        try:
            res = sc.cgo_solve(problem, a, w, p["max_iter"], p["tol"], p["eps"])
        except sc.ContractionError as exc:
            checks.add(f"contraction[h={h!r}]", False, factor=exc.factor)
            break
        except RuntimeError as exc:
            checks.add(f"converged[h={h!r}]", False, message=str(exc))
            break
        rows.append(
            {
                "h": h,
                "x_norm_psi": res.x_norm_psi,
                "residual": res.residual,
                "contraction_factor": res.contraction_factor,
                "iterations": res.iterations,
                "floored_residual": res.floored_energy,
                "alias_energy": res.alias_energy,
            }
        )
        checks.add(f"contraction[h={h!r}]", res.contraction_factor < p["contraction_max"], factor=res.contraction_factor)
        checks.add(f"residual[h={h!r}]", res.residual < p["residual_tol"], residual=res.residual)
        checks.add(f"aliasing[h={h!r}]", res.alias_energy < p["alias_tol"], alias_energy=res.alias_energy)
    m = p["m"]
    target = min(1.5 * m - p["r"], 1.5 * m - p["s"] + p["sigma"])
    slope = None
    if len(rows) >= 4 and len(rows) == len(p["h"]):
        slope = sc.fit_slope([r["h"] for r in rows], [r["x_norm_psi"] for r in rows])
        checks.add("decay_slope", slope >= target - p["slope_slack"], slope=slope, target=target)
    rep = {"k0": p["k0"], "s": p["s"], "sigma": p["sigma"], "r": p["r"], "rows": rows, "slope": slope, "slope_target": target}
    return rep, [{k: r[k] for k in ("h", "x_norm_psi", "residual", "contraction_factor")} for r in rows]


def run_avg(cfg: RunConfig, checks: Checks):
    p = cfg.params
    grid = sc.Grid(p["d"], p["N"], p["L"])
    rng = np.random.default_rng(cfg.seed)
    zeta = _zeta(p["d"])
    rows = []
    spreads = []
    for fi in range(p["n_f"]):
        f = sc.random_field(grid, rng, kmax=p["kmax"])
        ratios = []
        for h in p["h"]:
            ratio, err = sc.avg_estimate_mc(f, p["lam"], p["s"], p["k"], p["sigma"], h, zeta, p["n_mc"], seed=cfg.seed + fi)
            rows.append({"f": fi, "h": h, "mc_ratio": ratio, "mc_stderr": err})
            ratios.append(ratio)
        # the estimate is one-sided: the ratio may shrink with h but must not grow
        checks.add(f"ratio_bounded[f={fi}]", max(ratios) <= p["band"] * ratios[0], growth=max(ratios) / ratios[0])
        spreads.append(max(ratios) / min(ratios))
    rep = {"rows": rows, "two_sided_spread": spreads, "band": p["band"]}
    return rep, rows


RUNNERS = {
    "tensor-verify": run_tensor_verify,
    "dim-check": run_dim_check,
    "decompose": run_decompose,
    "recover": run_recover,
    "cgo": run_cgo,
    "avg": run_avg,
}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def render(cfg: RunConfig, report, rows, checks: Checks, emit: str) -> str:
    if emit == "json":
        doc = {
            "subcommand": cfg.subcommand,
            "seed": cfg.seed,
            "params": cfg.params,
            "report": report,
            "checks": checks.items,
            "passed": checks.first_failure is None,
        }
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    if rows is None:
        rows = [{"check": c["name"], "passed": c["passed"]} for c in checks.items]
    rows = _jsonable(rows)
    buf = io.StringIO()
    fields = list(rows[0].keys()) if rows else ["check", "passed"]
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _xi_flag(text):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgolab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in RUNNERS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="TOML file with parameters")
        sp.add_argument("--emit", choices=("json", "csv"), default=None)
        sp.add_argument("--seed", type=int)
        if name == "dim-check":
            sp.add_argument("--d", type=int)
            sp.add_argument("--kmax", type=int)
        if name in ("decompose", "recover"):
            sp.add_argument("--d", type=int)
        if name == "decompose":
            sp.add_argument("--k", type=int)
            sp.add_argument("--input", help="JSON tensor {d, k, components}")
            sp.add_argument("--xi", type=_xi_flag, help='comma-separated, e.g. "1,2,-1"')
        if name == "recover":
            sp.add_argument("--R", type=int)
        if name == "tensor-verify":
            sp.add_argument("--draws", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("subcommand", "config", "emit")}
    default_emit = "csv" if args.subcommand in ("cgo", "avg") else "json"
    emit = args.emit or default_emit
    try:
        cfg = load_config(args.subcommand, args.config, flags)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    checks = Checks()
    report, rows = RUNNERS[args.subcommand](cfg, checks)
    text = render(cfg, report, rows, checks, emit)
    out_dir = os.environ.get(REPORT_DIR_ENV)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{args.subcommand}.{emit}"), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = checks.first_failure
    if failed is not None:
        print(f"FAIL: {failed}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

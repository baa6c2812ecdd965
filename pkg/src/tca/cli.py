"""Batch command line front end.

    tca <verify|laws|spectrum|wiener|grs> --config FILE [--seed N] [--out DIR]
    tca builtins

Exit codes: 0 every verdict passed, 1 some verdict failed, 2 input error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from .crossed import CrossedElement, random_element as random_crossed
from .groups import GroupError, parse_group
from .kernels import kappa, kernel_distance, random_kernel
from .laws import exhaustive_crossed_laws, exhaustive_kernel_laws
from .spectral import SingularOperator, grs_verdict, regular_spectrum, symmetry_probe, wiener_decay
from .specs import SpecError, build_system, parse_norm, parse_weight
from .system import cocycle_form_sweep, verify_axioms

log = logging.getLogger("tca")

KINDS = ("verify", "laws", "spectrum", "wiener", "grs")

DEFAULTS = {
    "verify": {"trials": 10_000, "radius": 6, "tolerance": 1e-12, "exhaustive_cap": 1_000_000},
    "laws": {"samples": 200, "size": 3, "radius": 2, "tolerance": 1e-12, "kernels": True, "exhaustive_support": 0},
    "spectrum": {"levels": 6, "slack": 0.15, "budget": 200_000, "eigen_tolerance": 1e-10},
    "wiener": {"R": 16, "margin": 1e-8, "stability_tolerance": 1e-8, "compare": True},
    "grs": {"n_max": 32, "threshold": 1.05, "window": 5},
}

_ELEMENT = {
    "oneOf": [
        {"type": "object", "properties": {"terms": {"type": "array"}}, "required": ["terms"],
         "additionalProperties": False},
        {"type": "array"},
    ]
}

_JOB_PROPERTIES = {
    "kind": {"enum": list(KINDS)},
    "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
    "group": {"type": "string", "minLength": 1},
    "coefficients": {"type": "string"},
    "action": {"type": "string"},
    "cocycle": {"type": "string"},
    "norm": {"type": "string"},
    "weight": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0},
    "element": _ELEMENT,
    "random_element": {
        "type": "object",
        "properties": {"size": {"type": "integer", "minimum": 1}, "radius": {"type": "integer", "minimum": 0}},
        "additionalProperties": False,
    },
    "params": {
        "type": "object",
        "properties": {
            "trials": {"type": "integer", "minimum": 1},
            "radius": {"type": "integer", "minimum": 0},
            "tolerance": {"type": "number", "exclusiveMinimum": 0},
            "exhaustive_cap": {"type": "integer", "minimum": 0},
            "samples": {"type": "integer", "minimum": 1},
            "size": {"type": "integer", "minimum": 1},
            "kernels": {"type": "boolean"},
            "exhaustive_support": {"type": "integer", "minimum": 0, "maximum": 4},
            "levels": {"type": "integer", "minimum": 0, "maximum": 20},
            "slack": {"type": "number", "minimum": 0},
            "budget": {"type": "integer", "minimum": 1},
            "eigen_tolerance": {"type": "number", "minimum": 0},
            "R": {"type": "integer", "minimum": 1},
            "margin": {"type": "number", "minimum": 0},
            "stability_tolerance": {"type": "number", "minimum": 0},
            "compare": {"type": "boolean"},
            "n_max": {"type": "integer", "minimum": 1},
            "threshold": {"type": "number"},
            "window": {"type": "integer", "minimum": 1},
        },
        "additionalProperties": False,
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": dict(_JOB_PROPERTIES, jobs={
        "type": "array", "minItems": 1,
        "items": {"type": "object", "properties": _JOB_PROPERTIES, "additionalProperties": False},
    }),
    "additionalProperties": False,
}


class InputError(Exception):
    """Anything wrong with the configuration or its referenced data (exit code 2)."""


# ----------------------------------------------------------------------------
# configuration


def load_config(path: Path) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    errors = sorted(jsonschema.Draft202012Validator(CONFIG_SCHEMA).iter_errors(data), key=lambda e: list(e.path))
    if errors:
        msgs = ["$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in e.path) + f": {e.message}"
                for e in errors]
        raise InputError(f"{path}: schema violation\n  " + "\n  ".join(msgs))
    return data


def expand_jobs(config: dict, kind: str, seed: int | None) -> list[dict]:
    base = {k: v for k, v in config.items() if k != "jobs"}
    jobs = []
    for i, job in enumerate(config.get("jobs") or [{}]):
        merged = copy.deepcopy(base)
        for k, v in job.items():
            if k == "params":
                merged.setdefault("params", {}).update(v)
            else:
                merged[k] = v
        merged.setdefault("name", f"job{i}" if "jobs" in config else "")
        if merged.get("kind", kind) != kind:
            raise InputError(f"job {i} has kind {merged['kind']!r} but the subcommand is {kind!r}")
        merged["kind"] = kind
        if seed is not None:
            merged["seed"] = seed
        if "group" not in merged:
            raise InputError(f"job {i}: missing required field 'group'")
        merged["params"] = dict(DEFAULTS[kind], **merged.get("params", {}))
        jobs.append(merged)
    return jobs


def _require_seed(job: dict) -> int:
    if "seed" not in job:
        raise InputError(f"{job['kind']} runs are randomised: a seed is required (config 'seed' or --seed)")
    return int(job["seed"])


def _system(job: dict, base_dir: Path):
    try:
        return build_system(job["group"], job.get("coefficients", "scalar"), job.get("action", "trivial"),
                            job.get("cocycle", "trivial"), base_dir)
    except (SpecError, GroupError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"system: {exc}") from None


def _element(job: dict, system) -> CrossedElement:
    if "element" in job:
        try:
            f = CrossedElement.from_json(system, job["element"])
        except (ValueError, TypeError, KeyError, GroupError) as exc:
            raise InputError(f"element: {exc}") from None
    elif "random_element" in job:
        rnd = job["random_element"]
        f = random_crossed(system, np.random.default_rng(_require_seed(job)), rnd.get("size", 3), rnd.get("radius", 2))
    else:
        raise InputError("an 'element' or 'random_element' entry is required")
    if not f.coeffs:
        raise InputError("empty element: the element has no nonzero coefficients")
    return f


# ----------------------------------------------------------------------------
# experiments


def run_verify(job: dict, base_dir: Path) -> dict:
    seed = _require_seed(job)
    p = job["params"]
    sys_ = _system(job, base_dir)
    rows = verify_axioms(sys_, p["trials"], seed, p["radius"], p["exhaustive_cap"])
    rows.append(cocycle_form_sweep(sys_, p["trials"], seed, p["radius"]))
    failures = [{"identity": r["axiom"], "residual": r["residual"], "witness": r["witness"]}
                for r in rows if not r["residual"] < p["tolerance"]]
    return {"system": sys_.describe(), "results": rows, "failures": failures}


def _rel(num: float, den: float) -> float:
    return num / den if den > 0 else num


def run_laws(job: dict, base_dir: Path) -> dict:
    seed = _require_seed(job)
    p = job["params"]
    sys_ = _system(job, base_dir)
    try:
        nrm = parse_norm(job.get("norm", "l1"), sys_.group, base_dir)
    except (SpecError, ValueError) as exc:
        raise InputError(f"norm: {exc}") from None
    rng = np.random.default_rng(seed)
    worst: dict[str, tuple[float, object]] = {}

    def bump(name, value, witness):
        if name not in worst or value > worst[name][0]:
            worst[name] = (value, witness)

    unit = CrossedElement.unit(sys_)
    for i in range(p["samples"]):
        f, g, h = (random_crossed(sys_, rng, p["size"], p["radius"]) for _ in range(3))
        wit = {"sample": i, "supports": [[list(x) for x in e.support] for e in (f, g, h)]}
        nf, ng, nh = (e.distance(CrossedElement.zero(sys_)) for e in (f, g, h))
        fg = f * g
        bump("crossed.associativity", _rel((fg * h).distance(f * (g * h)), nf * ng * nh), wit)
        bump("crossed.unit", _rel(max((f * unit).distance(f), (unit * f).distance(f)), nf), wit)
        bump("crossed.involutivity", _rel(f.star().star().distance(f), nf), wit)
        bump("crossed.anti_multiplicativity", _rel(fg.star().distance(g.star() * f.star()), nf * ng), wit)
        bump("crossed.submultiplicativity", max(0.0, fg.norm(nrm) - f.norm(nrm) * g.norm(nrm))
             / max(f.norm(nrm) * g.norm(nrm), 1e-300), wit)
        bump("crossed.star_isometry", _rel(abs(f.star().norm(nrm) - f.norm(nrm)), f.norm(nrm)), wit)
        if p["kernels"]:
            K, L, M = (random_kernel(sys_, rng, radius=p["radius"]) for _ in range(3))
            nk, nl, nm = (math.fsum(kappa(e).values()) for e in (K, L, M))
            KL = K * L
            kw = {"sample": i, "bands": [[list(a) for a in e.bands] for e in (K, L, M)]}
            bump("kernel.associativity", _rel(kernel_distance(KL * M, K * (L * M)), nk * nl * nm), kw)
            bump("kernel.involutivity", _rel(kernel_distance(K.star().star(), K), nk), kw)
            bump("kernel.anti_multiplicativity", _rel(kernel_distance(KL.star(), L.star() * K.star()), nk * nl), kw)
    rows = [{"law": k, "mode": "sampled", "relative_residual": v, "witness": w} for k, (v, w) in sorted(worst.items())]
    k = p["exhaustive_support"]
    if k > 0:
        if not sys_.group.finite:
            raise InputError("exhaustive_support needs a finite group")
        swept = exhaustive_crossed_laws(sys_, k, seed)
        if p["kernels"]:
            swept.update(exhaustive_kernel_laws(sys_, k, seed))
        rows += [{"law": name, "mode": f"exhaustive:support<={k}", "relative_residual": v, "witness": w}
                 for name, (v, w) in sorted(swept.items())]
    failures = [{"identity": r["law"], "residual": r["relative_residual"], "witness": dict(r["witness"], mode=r["mode"])}
                for r in rows if not r["relative_residual"] < p["tolerance"]]
    return {"system": sys_.describe(), "norm": nrm.spec(), "results": rows, "failures": failures}


def run_spectrum(job: dict, base_dir: Path) -> dict:
    p = job["params"]
    sys_ = _system(job, base_dir)
    try:
        nrm = parse_norm(job.get("norm", "l1"), sys_.group, base_dir)
    except (SpecError, ValueError) as exc:
        raise InputError(f"norm: {exc}") from None
    f = _element(job, sys_)
    rep = symmetry_probe(f, nrm, p["levels"], p["slack"], p["budget"])
    out = {"system": sys_.describe(), "norm": nrm.spec(), "element": f.to_json(), "probe": rep.to_dict(),
           "failures": []}
    if rep.verdict != "PASS":
        out["failures"].append({"identity": "symmetry_shifted_radius", "residual": -rep.margin,
                                "witness": {"lambda": rep.lam, "shifted": rep.shifted, "monotone": rep.monotone}})
    if sys_.group.finite:
        h = f.star() * f
        spec = regular_spectrum(h)
        out["regular_spectrum"] = spec
        if spec["min_eigenvalue"] < -p["eigen_tolerance"]:
            out["failures"].append({"identity": "positivity_in_regular_representation",
                                    "residual": -spec["min_eigenvalue"], "witness": f.to_json()})
    out["_csv"] = ("spectral.csv", ["level", "norm", "rho", "shifted_rho"], rep.csv_rows())
    return out


def run_wiener(job: dict, base_dir: Path) -> dict:
    p = job["params"]
    sys_ = _system(job, base_dir)
    f = _element(job, sys_)
    try:
        prof = wiener_decay(sys_, f, p["R"], p["margin"], p["compare"])
    except SingularOperator as exc:
        raise InputError(str(exc)) from None
    failures = []
    tails = prof.tail_sum
    for i in range(1, len(tails)):
        if tails[i] > tails[i - 1] * (1 + 1e-12):
            failures.append({"identity": "tail_sums_nonincreasing", "residual": tails[i] - tails[i - 1],
                             "witness": {"distance": prof.distances[i]}})
            break
    deltas = [(d, s) for d, s in zip(prof.distances, prof.stability_delta) if s is not None]
    if deltas:
        d, s = max(deltas, key=lambda t: t[1])
        if s >= p["stability_tolerance"]:
            failures.append({"identity": "inverse_stability_under_window_doubling", "residual": s,
                             "witness": {"distance": d}})
    return {"system": sys_.describe(), "element": f.to_json(), "profile": prof.to_dict(), "failures": failures,
            "_csv": ("decay.csv", ["distance", "max_abs", "tail_sum", "stability_delta"], prof.csv_rows())}


def run_grs(job: dict, base_dir: Path) -> dict:
    p = job["params"]
    try:
        group = parse_group(job["group"])
        weight = parse_weight(job.get("weight", "one"), group, base_dir)
    except (SpecError, GroupError, ValueError) as exc:
        raise InputError(str(exc)) from None
    rep = grs_verdict(group, weight, p["n_max"], p["threshold"], p["window"])
    failures = []
    if not rep["condition1"]["pass"]:
        failures.append({"identity": "uniform_grs_condition", "residual": rep["condition1"]["final"] - p["threshold"],
                         "witness": {"n": p["n_max"], "a_n": rep["condition1"]["final"]}})
    if not rep["condition2"]["pass"]:
        failures.append({"identity": "shell_ratio_condition", "residual": rep["condition2"]["max_ratio"],
                         "witness": {"second_half_max": rep["condition2"]["second_half_max"]}})
    return {"report": rep, "failures": failures}


RUNNERS = {"verify": run_verify, "laws": run_laws, "spectrum": run_spectrum, "wiener": run_wiener, "grs": run_grs}


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n")


def run_job(job: dict, base_dir: Path, out_dir: Path) -> tuple[int, dict]:
    try:
        result = RUNNERS[job["kind"]](job, base_dir)
    except InputError as exc:
        return 2, {"kind": job["kind"], "name": job["name"], "verdict": "ERROR", "error": str(exc)}
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_spec = result.pop("_csv", None)
    if csv_spec:
        _write_csv(out_dir / csv_spec[0], csv_spec[1], csv_spec[2])
    verdict = "FAIL" if result["failures"] else "PASS"
    report = {"kind": job["kind"], "name": job["name"], "config": job, "verdict": verdict, **result}
    _write_json(out_dir / "report.json", report)
    return (1 if result["failures"] else 0), report


def run(kind: str, config_path: Path, seed: int | None, out: Path) -> int:
    config = load_config(config_path)
    jobs = expand_jobs(config, kind, seed)
    base_dir = config_path.parent
    threads = max(1, int(os.environ.get("TCA_THREADS", "1") or 1))
    dirs = [out / job["name"] if len(jobs) > 1 else out for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda jd: run_job(jd[0], base_dir, jd[1]), zip(jobs, dirs)))
    for (code, rep), job in zip(results, jobs):
        if code == 2:
            print(f"error: {job['name'] or kind}: {rep['error']}", file=sys.stderr)
        else:
            line = f"{rep['verdict']} {job['name'] or kind}"
            for fail in rep["failures"]:
                line += f"\n  {fail['identity']}: residual {fail['residual']!r} witness {json.dumps(fail['witness'])}"
            print(line)
    if len(jobs) > 1:
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "summary.json", [{"name": j["name"], "exit": c, "verdict": r["verdict"]}
                                           for (c, r), j in zip(results, jobs)])
    return max(code for code, _ in results)


# ----------------------------------------------------------------------------
# builtins catalog


def list_builtins() -> dict:
    return {
        "groups": [
            {"spec": "Z^n", "example": "Z^2", "description": "integer lattice, l1 word length", "cocycles": ["trivial", "theta", "coboundary"]},
            {"spec": "C<m>", "example": "C4", "description": "cyclic group of order m", "cocycles": ["trivial", "bicharacter", "table", "coboundary"]},
            {"spec": "D<m>", "example": "D3", "description": "dihedral group of order 2m", "cocycles": ["trivial", "table", "coboundary"]},
            {"spec": "Heis<p>", "example": "Heis3", "description": "unitriangular 3x3 matrices mod p", "cocycles": ["trivial", "table", "coboundary"]},
            {"spec": "<factor>x<factor>...", "example": "C2xC4", "description": "direct product", "cocycles": ["trivial", "bicharacter", "table", "coboundary"]},
        ],
        "coefficients": [
            {"spec": "scalar", "description": "complex numbers"},
            {"spec": "finite:<n>", "description": "functions on a finite set of n points"},
            {"spec": "standard", "description": "constant plus finitely supported function on the group"},
        ],
        "actions": [
            {"spec": "trivial", "description": "identity action"},
            {"spec": "point:<json list of permutations>", "description": "action on a finite spectrum, one permutation per generator"},
            {"spec": "translation", "description": "left translation on the standard model"},
        ],
        "cocycles": [
            {"spec": "trivial", "description": "omega = 1"},
            {"spec": "theta:<json skew-symmetric matrix>", "description": "exp(2 pi i x^T Theta y) on Z^n"},
            {"spec": "bicharacter:<json integer matrix>", "description": "exp(2 pi i sum B_ij x_i y_j / gcd(m_i, m_j)) on products of cyclic groups"},
            {"spec": "table:<file>", "description": "explicit table [[x, y, value], ...], missing entries are 1"},
            {"spec": "coboundary:seed=<n>", "description": "u(x) alpha_x[u(y)] u(xy)^* for a seeded unitary u"},
            {"spec": "<cocycle>*<cocycle>", "description": "pointwise product"},
        ],
        "weights": [
            {"spec": "one", "description": "constant 1"},
            {"spec": "poly:s=<s>", "description": "(1 + |x|)^s, s >= 0"},
            {"spec": "exp:c=<c>", "description": "exp(c |x|), c >= 0"},
            {"spec": "table:<file>", "description": "explicit values on a finite group"},
        ],
        "norms": [
            {"spec": "l1", "description": "sum |k(x)|"},
            {"spec": "l1w:<weight>", "description": "sum nu(x) |k(x)|"},
            {"spec": "linf:<weight>[;R=<r>]", "description": "C sup theta(x) |k(x)|, C the subconvolutivity constant on ball(r)"},
        ],
        "experiments": list(KINDS),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tca", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", type=Path, default=Path("."))
    sub.add_parser("builtins", help="print the catalog of built-in constructors")
    args = parser.parse_args(argv)
    logging.basicConfig(level=os.environ.get("TCA_LOG", "WARNING"))
    if args.command == "builtins":
        print(json.dumps(list_builtins(), indent=2, sort_keys=True))
        return 0
    try:
        return run(args.command, args.config, args.seed, args.out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

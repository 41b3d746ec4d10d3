"""Command-line front end.

Flat key=value config files plus flag overrides; one master seed feeds
named, splittable random streams per subsystem, so identical (config, seed)
pairs give byte-identical outputs.  Exit codes: 0 success, 2 configuration
or input error, 1 failed strict audit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import zlib
from dataclasses import dataclass, fields

import numpy as np

from . import analysis, core, families, influences, noise
from .fourier import fourier_transform

CONFIG_ERROR = 2
VERDICT_FAILURE = 1


def stream_rng(seed: int, name: str) -> np.random.Generator:
    """Named substream of the master seed; streams are independent."""
    return np.random.default_rng(np.random.SeedSequence((seed, zlib.crc32(name.encode()))))


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("POLYSPEC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    """Run parameters; every theorem-statement scalar lives here.

    All probabilities must lie in (0,1); a seed is mandatory for any
    randomized run.  Configs round-trip losslessly through the key=value
    file format.
    """

    n: int = 8
    p: float = 0.5
    rho: float = 0.5
    lam: float = 0.5
    nu: float = 0.1
    m: int = 2
    width_cap: int = 4
    samples: int = 1_000_000
    seed: int = 0
    tau: float = 0.05
    eps: float = 0.1
    eta: float = 0.1
    family: str = "and"
    sizes: str = "8"
    perturbations: str = "0,1,2,4,8"
    trials: int = 3
    and_width: int = 2
    window_scale: float = 0.5
    out: str = ""

    def __post_init__(self):
        for name in ("p", "rho", "nu"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"config {name} must lie in (0,1), got {v}")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError(f"config lam must lie in (0,1], got {self.lam}")

    def int_list(self, field_name: str) -> list[int]:
        raw = getattr(self, field_name)
        return [int(tok) for tok in str(raw).split(",") if tok != ""]

    def to_file(self, path) -> None:
        with open(path, "w") as fh:
            for f in fields(self):
                fh.write(f"{f.name}={getattr(self, f.name)}\n")

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "ExperimentConfig":
        values: dict = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value")
                key, _, raw = line.partition("=")
                values[key.strip()] = raw.strip()
        values.update(overrides or {})
        kwargs: dict = {}
        for f in fields(cls):
            if f.name in values:
                kwargs[f.name] = _coerce(f.type, values.pop(f.name))
        if values:
            raise ValueError(f"unknown config keys: {sorted(values)}")
        return cls(**kwargs)


def _coerce(type_name, raw):
    if isinstance(raw, (int, float)):
        return raw
    name = type_name if isinstance(type_name, str) else getattr(type_name, "__name__", "str")
    if name == "int":
        return int(raw)
    if name == "float":
        return float(raw)
    return str(raw)


def _parse_coords(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok != ""]


def _parse_blocks(text: str) -> families.BlockPartition:
    blocks = [frozenset(_parse_coords(blk)) for blk in text.split(";") if blk]
    return families.BlockPartition(tuple(blocks))


class CliError(Exception):
    """Configuration or input problem; maps to exit code 2."""


def _load(path: str):
    try:
        return core.load_function(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read function file {path!r}: {exc}")


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=None, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _builtin_function(name: str, n: int):
    if name == "maj3":
        return families.make_majority3(max(n, 3))
    if name == "dictator":
        return families.make_and(n, [0])
    if name == "xor2":
        return families.make_xor(n, [0, 1])
    raise CliError(f"unknown builtin function {name!r}")


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_transform(args) -> int:
    f = _load(args.infile)
    spec = fourier_transform(f, args.p)
    _emit({"n": spec.n, "kind": "spectrum", "p": spec.p,
           "values": spec.coeffs.tolist()}, args.out)
    return 0


def _cmd_noise(args) -> int:
    f = _load(args.infile)
    g = (noise.iterated_noise(f, args.rho, args.m) if args.m
         else noise.downward_noise(f, args.rho))
    if args.out:
        core.save_function(g, args.out)
    else:
        _emit(core.to_json_dict(g), None)
    return 0


def _cmd_ns(args) -> int:
    f = _load(args.infile)
    if not isinstance(f, core.BooleanFunction):
        raise CliError("noise sensitivity needs a Boolean function")
    rng = stream_rng(args.seed, "ns") if args.mode == "montecarlo" else None
    rep = noise.noise_sensitivity(f, args.p, args.nu, mode=args.mode,
                                  samples=args.samples, rng=rng, seed=args.seed)
    _emit({"estimate": rep.estimate, "std_error": rep.std_error,
           "samples": rep.samples, "exact": rep.exact}, args.out)
    return 0


def _cmd_profile(args) -> int:
    f = _load(args.infile)
    _emit(influences.influence_profile(f, args.p).to_json_dict(), args.out)
    return 0


def _cmd_make(args) -> int:
    fam = args.family
    if fam == "and":
        f = families.make_and(args.n, _parse_coords(args.coords or ""))
    elif fam == "or":
        f = families.make_or(args.n, _parse_coords(args.coords or ""))
    elif fam == "xor":
        f = families.make_xor(args.n, _parse_coords(args.coords or ""))
    elif fam == "andor":
        f = families.make_and_or(args.n, _parse_blocks(args.blocks or ""))
    elif fam == "andxor":
        f = families.make_and_xor(args.n, _parse_blocks(args.blocks or ""))
    elif fam == "maj3":
        f = families.make_majority3(args.n)
    elif fam == "f1":
        f = families.make_f1(args.n)
    elif fam == "f2":
        f = families.make_f2(args.n, args.lam, stream_rng(args.seed, "f2"))
    elif fam == "midslice":
        f = families.make_midslice(args.n, args.window_scale)
    elif fam == "semirandom":
        f = families.make_semirandom(args.n, args.window_scale,
                                     stream_rng(args.seed, "semirandom"))
    else:
        raise CliError(f"unknown family {fam!r}")
    if args.out:
        core.save_function(f, args.out)
    else:
        _emit(core.to_json_dict(f), None)
    return 0


def _cmd_classify(args) -> int:
    hits = analysis.classify_boolean_eigens(args.n, args.rho)
    out = [{"bits_hex": f.bits_hex, "lambda": lam} for f, lam in hits]
    _emit({"n": args.n, "rho": args.rho, "count": len(hits),
           "eigenfunctions": out}, args.out)
    return 0


def _cmd_solve(args) -> int:
    g = _load(args.infile)
    if not isinstance(g, core.BooleanFunction):
        raise CliError("solve needs a Boolean right-hand side")
    sol = analysis.solve_exact_pair(g, args.rho, args.lam)
    _emit({"feasible": sol.feasible, "lambda_max": sol.lam_max,
           "negative_mass": sol.negative_mass,
           "preimage": sol.preimage.tolist()}, args.out)
    return 0


def _cmd_test_hom(args) -> int:
    f = (_builtin_function(args.fn, args.n) if args.fn else _load(args.infile))
    g = _load(args.g) if args.g else None
    h = _load(args.h) if args.h else None
    for name, fn in (("f", f), ("g", g), ("h", h)):
        if fn is not None and not isinstance(fn, core.BooleanFunction):
            raise CliError(f"test-hom needs Boolean functions ({name} is not)")
    mode = "exact" if args.exact else "montecarlo"
    rep = analysis.homomorphism_agreement(
        f, args.p, args.rho, mode=mode, g=g, h=h, samples=args.samples,
        rng=None if args.exact else stream_rng(args.seed, "hom"), seed=args.seed)
    print(format(rep.estimate, ".12g"))
    return 0


def _cmd_prs(args) -> int:
    f = _load(args.infile)
    if not isinstance(f, core.BooleanFunction):
        raise CliError("prs needs a Boolean function")
    rep = analysis.prs_tester(
        f, args.p, samples=args.samples,
        rng=stream_rng(args.seed, "prs") if args.samples else None,
        seed=args.seed, expectation_window=args.expectation_window,
        agreement_min=args.agreement_min)
    _emit({"accepted": rep.accepted, "agreement": rep.estimate,
           "std_error": rep.std_error, "exact": rep.exact,
           **(rep.details or {})}, args.out)
    return 0


def _cmd_audit(args) -> int:
    f = _load(args.f)
    g = _load(args.g)
    h = _load(args.h) if args.h else None
    params = noise.NoiseParams(p=args.p, rho=args.rho, lam=args.lam)
    report = analysis.theorem_audit(args.theorem, f, g, params, h=h, tau=args.tau)
    payload = {"theorem": report.theorem, "premise": report.premise,
               "conclusion": report.conclusion, "notes": list(report.notes)}
    if report.verdict is not None:
        payload["verdict"] = {"kind": report.verdict.kind,
                              "witness": report.verdict.witness_str(),
                              "distance": report.verdict.distance}
    _emit(payload, args.out)
    if args.strict and not report.passed(args.eta, args.eps):
        return VERDICT_FAILURE
    return 0


def _cmd_sweep(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out:
        overrides["out"] = args.out
    try:
        cfg = ExperimentConfig.from_file(args.config, overrides)
    except (OSError, ValueError) as exc:
        print(f"polyspec: bad sweep config: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    rows = analysis.sweep_rows(
        cfg.family, cfg.int_list("sizes"), cfg.int_list("perturbations"),
        cfg.trials, cfg.p, cfg.rho, cfg.seed, and_width=cfg.and_width,
        andor_max_width=cfg.m, tau=cfg.tau, window_scale=cfg.window_scale,
        workers=worker_count())
    text = analysis.SWEEP_HEADER + "\n" + "\n".join(rows) + "\n"
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyspec",
        description="Analysis of Boolean functions under downwards noise on "
                    "the p-biased hypercube")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, helptext):
        sp = sub.add_parser(name, help=helptext)
        sp.set_defaults(handler=fn)
        return sp

    sp = add("transform", _cmd_transform, "Fourier-transform a function file")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default=None)

    sp = add("noise", _cmd_noise, "apply the downwards noise operator")
    sp.add_argument("--p", type=float, default=0.5,
                    help="output-side bias (recorded only; the operator "
                         "depends on rho alone)")
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--m", type=int, default=None,
                    help="arity of the iterated operator (m >= 2)")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default=None)

    sp = add("ns", _cmd_ns, "noise sensitivity of a Boolean function")
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--mode", choices=("exact", "montecarlo"), default="exact")
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--samples", type=int, default=noise.DEFAULT_SAMPLES)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)

    sp = add("profile", _cmd_profile, "influence profile as JSON")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default=None)

    sp = add("make", _cmd_make, "construct a family member")
    sp.add_argument("--family", required=True,
                    choices=("and", "or", "xor", "andor", "andxor", "maj3",
                             "f1", "f2", "midslice", "semirandom"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--coords", default=None, help="comma-separated, e.g. 0,2")
    sp.add_argument("--blocks", default=None,
                    help="semicolon-separated blocks, e.g. 0,1;2")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.5)
    sp.add_argument("--window-scale", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)

    sp = add("classify", _cmd_classify, "exhaustive Boolean eigenfunctions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--out", default=None)

    sp = add("solve", _cmd_solve, "invert the operator and test feasibility")
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default=None)

    sp = add("test-hom", _cmd_test_hom, "AND-homomorphism agreement rate")
    sp.add_argument("--fn", default=None, help="builtin: maj3, dictator, xor2")
    sp.add_argument("--in", dest="infile", default=None)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--g", default=None)
    sp.add_argument("--h", default=None)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--samples", type=int, default=noise.DEFAULT_SAMPLES)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("prs", _cmd_prs, "expectation-plus-agreement dictatorship test")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--samples", type=int, default=None,
                    help="omit for exact evaluation")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--expectation-window", type=float, default=0.05)
    sp.add_argument("--agreement-min", type=float, default=0.95)
    sp.add_argument("--out", default=None)

    sp = add("audit", _cmd_audit, "premise/conclusion report for one theorem")
    sp.add_argument("--theorem", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--h", default=None)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--tau", type=float, default=0.05)
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--eta", type=float, default=0.1)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--out", default=None)

    sp = add("sweep", _cmd_sweep, "perturbation sweep to CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "test-hom" and not args.fn and not args.infile:
        parser.error("test-hom needs --fn or --in")
    try:
        return args.handler(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"polyspec: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())

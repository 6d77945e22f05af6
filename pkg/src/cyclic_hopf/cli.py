"""Command-line entry point: ``cyclic-hopf {classify,check,demo,gap}``.

Exit codes: 0 success, 1 internal disagreement (closed form vs pipeline, or
measured symmetry vs request), 2 input error, 3 inadmissible pair,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .admissibility import SCHEMA_VERSION, abelian_vs_cyclic_gap, check_cyclic_hopf, classify_all
from .dynamics import (
    IntegrationError,
    OrbitNotFound,
    detect_symmetries,
    find_periodic_orbit,
    floquet_multipliers,
    hopf_crossing_check,
    split_trivial_multiplier,
)
from .groups import GroupSpec, NotNestedError, Subgroup
from .representation import PermAction, isotropy_point
from .synthesis import HopfFamilyNumeric, bump_gap, hopf_family, verify_equivariance

log = logging.getLogger("cyclic_hopf")

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_INPUT = 2
EXIT_INADMISSIBLE = 3
EXIT_NUMERIC = 4


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    group: str
    H: str | None = None
    K: str | None = None
    lam: float = 0.1
    tol_int: float = 1e-10
    tol_sym: float = 1e-5
    tol_phase: float = 1e-6
    fmt: str = "json"
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("tol_int", "tol_sym", "tol_phase"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be positive, got {v}")
        if not math.isfinite(self.lam):
            raise InputError(f"lambda must be finite, got {self.lam}")
        if self.fmt not in ("json", "csv"):
            raise InputError(f"unknown format {self.fmt!r}")

    @property
    def group_spec(self) -> GroupSpec:
        try:
            return GroupSpec.parse(self.group)
        except ValueError as exc:
            raise InputError(str(exc)) from exc

    def pair(self) -> tuple[Subgroup, Subgroup]:
        G = self.group_spec
        if self.H is None or self.K is None:
            raise InputError("--H and --K are required")
        try:
            H, K = G.parse_subgroup(self.H), G.parse_subgroup(self.K)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        if not K.issubgroup(H):
            raise InputError(f"K={K} is not contained in H={H}")
        return H, K


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_classify(cfg: RunConfig) -> int:
    table = classify_all(cfg.group_spec, seed=cfg.seed)
    _emit(cfg, table.to_csv() if cfg.fmt == "csv" else _dump_json(table.to_dict()))
    bad = table.disagreements()
    for row in bad:
        print(f"disagreement: closed form and pipeline differ on ({row.report.H}, {row.report.K})", file=sys.stderr)
    return EXIT_DISAGREE if bad else EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    H, K = cfg.pair()
    rep = check_cyclic_hopf(H, K, PermAction(cfg.group_spec), seed=cfg.seed)
    if cfg.fmt == "csv":
        flat = {k: v for k, v in rep.to_dict().items() if not isinstance(v, dict)}
        flat["reasons"] = "; ".join(rep.reasons)
        _emit(cfg, _rows_csv([flat]))
    else:
        _emit(cfg, _dump_json({"schema_version": SCHEMA_VERSION, "group": cfg.group, "report": rep.to_dict()}))
    return EXIT_OK


def cmd_gap(cfg: RunConfig) -> int:
    G = cfg.group_spec
    if G.rank != 2:
        raise InputError("gap is empty by definition; cyclic groups are abelian")
    gap = abelian_vs_cyclic_gap(G, seed=cfg.seed)
    rows = [g.to_dict() for g in gap]
    if cfg.fmt == "csv":
        _emit(cfg, _rows_csv([{**r, "reasons": "; ".join(r["reasons"])} for r in rows]) or "H,K,reasons\n")
    else:
        _emit(cfg, _dump_json({"schema_version": SCHEMA_VERSION, "group": str(G), "gap_pairs": rows}))
    return EXIT_OK


DEMO_SPREAD = 20  # minimum spacing of the equilibria along the bump direction
DEMO_CANDIDATES = 8


def _spread(A: PermAction, x) -> tuple:
    scale = max(1, math.ceil(DEMO_SPREAD / bump_gap(A, x)))
    return tuple(v * scale for v in x)


def demo_seed_point(A: PermAction, H: Subgroup, seed: int, witness=None, lam: float = 0.1) -> tuple:
    """Equilibrium for the demo: the origin if H is all of the group, else a point with isotropy exactly H.

    Off the origin the point is scaled so its group orbit is well spread out.
    Given a witness, the candidate whose blended field stays closest to the
    normal form on the circle of radius sqrt(lam) is used.
    """
    if H == A.group.whole():
        return (0,) * A.dim
    candidates = [_spread(A, isotropy_point(H, A, seed=seed + i)) for i in range(DEMO_CANDIDATES if witness else 1)]
    if witness is None:
        return candidates[0]
    radius = math.sqrt(max(lam, 0.0)) or 0.1
    return min(candidates, key=lambda x: HopfFamilyNumeric(A, x, witness).normal_form_remainder(radius, lam))


def run_demo(cfg: RunConfig) -> tuple[int, dict]:
    G = cfg.group_spec
    H, K = cfg.pair()
    A = PermAction(G)
    rep = check_cyclic_hopf(H, K, A, seed=cfg.seed)
    payload = {"schema_version": SCHEMA_VERSION, "group": str(G), "H": str(H), "K": str(K), "lambda": cfg.lam}
    if not rep.verdict_cyclic_hopf:
        payload.update(status="inadmissible", admissibility=rep.to_dict())
        return EXIT_INADMISSIBLE, payload

    w = rep.h_simple_witness
    x0 = demo_seed_point(A, H, cfg.seed, w, cfg.lam)
    F = HopfFamilyNumeric(A, x0, w)
    x0f = np.array([float(v) for v in x0])
    payload["equilibrium"] = [str(v) for v in x0]
    payload["witness"] = w.to_dict()
    # the blend must not swamp the cubic term where the orbit is expected
    radius = math.sqrt(max(cfg.lam, 0.0))
    remainder = F.normal_form_remainder(radius, cfg.lam) if radius else 0.0
    payload["blend_remainder"] = remainder if math.isfinite(remainder) else "inf"
    if radius and not remainder <= radius**3:
        payload.update(
            status="orbit_not_found",
            error=f"blend remainder {remainder:.3g} exceeds the cubic term {radius**3:.3g} at radius sqrt(lambda); "
            f"the polynomial blend over {len(F.y)} equilibria dominates the normal form",
        )
        return EXIT_NUMERIC, payload
    f = hopf_family(A, x0, w)
    payload["field"] = {"degree": f.degree, "terms": len(f.terms) + len(f.parameter_terms)}
    payload["equivariance_residual"] = str(verify_equivariance(f, A, samples=5, seed=cfg.seed))
    payload["crossing"] = hopf_crossing_check(f, x0, w.basis).to_dict()

    start = x0f + 2 * math.sqrt(max(cfg.lam, 0.0)) * np.asarray(w.basis, float)[:, 0]
    try:
        orbit = find_periodic_orbit(F, cfg.lam, start, rtol=cfg.tol_int, atol=cfg.tol_int * 1e-2)
        mu = floquet_multipliers(orbit, F, rtol=cfg.tol_int, atol=cfg.tol_int * 1e-2)
    except (OrbitNotFound, IntegrationError) as exc:
        payload.update(status="orbit_not_found", error=str(exc))
        return EXIT_NUMERIC, payload
    sym = detect_symmetries(orbit, A, tol=cfg.tol_sym, phase_tol=cfg.tol_phase)
    trivial, rest = split_trivial_multiplier(mu)

    payload["orbit"] = orbit.to_dict()
    payload["orbit"]["amplitude_about_equilibrium"] = orbit.amplitude_about(x0f)
    payload["orbit"]["trivial_multiplier"] = [float(trivial.real), float(trivial.imag)]
    payload["orbit"]["max_nontrivial_multiplier"] = float(np.abs(rest).max()) if rest.size else 0.0
    payload["symmetry"] = sym.to_dict()
    matched = sym.H == H and sym.K == K
    payload["status"] = "verified" if matched else "symmetry_mismatch"
    return (EXIT_OK if matched else EXIT_DISAGREE), payload


def cmd_demo(cfg: RunConfig) -> int:
    code, payload = run_demo(cfg)
    if code == EXIT_INADMISSIBLE:
        reasons = "; ".join(payload["admissibility"]["reasons"])
        print(f"inadmissible: ({cfg.H}, {cfg.K}): {reasons}", file=sys.stderr)
    elif code == EXIT_NUMERIC:
        print(f"numerical failure: {payload['error']}", file=sys.stderr)
    if cfg.fmt == "csv":
        rows = [
            {"element": " ".join(map(str, e["element"])), **{k: v for k, v in e.items() if k != "element"}}
            for e in payload.get("symmetry", {}).get("elements", [])
        ]
        _emit(cfg, _rows_csv(rows) or f"status\n{payload['status']}\n")
    else:
        _emit(cfg, _dump_json(payload))
    return code


COMMANDS = {"classify": cmd_classify, "check": cmd_check, "demo": cmd_demo, "gap": cmd_gap}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyclic-hopf", description="Hopf-admissible (H, K) pairs for cyclic permutation actions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--group", required=True, help='e.g. "Z6" or "Z2xZ3"')
        if name in ("check", "demo"):
            p.add_argument("--H", required=True)
            p.add_argument("--K", required=True)
        if name == "demo":
            p.add_argument("--lambda", dest="lam", type=float, default=0.1)
            p.add_argument("--tol-int", type=float, default=1e-10, help="integrator relative tolerance")
            p.add_argument("--tol-sym", type=float, default=1e-5, help="relative symmetry residual tolerance")
            p.add_argument("--tol-phase", type=float, default=1e-6)
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
        p.add_argument("--out")
        p.add_argument("--seed", type=int, default=0)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("CYCLIC_HOPF_LOG", "WARNING").upper()
    logging.basicConfig(level=int(level) if level.isdigit() else getattr(logging, level, logging.WARNING), stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    try:
        cfg = RunConfig(**fields)
        log.info("config %s", asdict(cfg))
        return COMMANDS[args.command](cfg)
    except (InputError, NotNestedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

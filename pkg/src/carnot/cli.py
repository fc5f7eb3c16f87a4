"""Command-line surface: validate group specs, run the verification suites,
emit deterministic text or JSON reports.

Commands
  check       stratification axioms + multicomplex identities
  frame       the left-invariant frame fields
  e0          bases and dimensions of the Rumin spaces per degree and weight
  dc          Rumin differential matrices per homogeneity slice
  pages       spectral page dimensions and page differentials
  verify      operator identity d_c vs page sum, two-route page dims,
              boundary-in-cycle witness sampling
  cohomology  slice cohomology by rank-nullity vs stable page dims

Exit status: 0 all checks pass, 2 a check failed, 1 input or resource
error.  Output bytes depend only on the input file and flags.
"""

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

from . import spectral
from .derham import Slice, SliceTooLargeError, multicomplex_check
from .lie_core import (GroupSpecError, hausdorff_dimension, parse_group_spec,
                       validate_stratification)
from .poly_coeff import left_invariant_fields, poly_str
from .rumin import SliceOps
from .exterior import covector_str

SCHEMA = 1
DEFAULT_GUARD = 20000


@dataclass
class RunConfig:
    command: str
    spec_path: str
    tau: int = 4
    page_r: int | None = None
    p: int | None = None
    format: str = "text"
    out: str | None = None
    max_block_dim: int = DEFAULT_GUARD
    seed: int = 2024


def _worker_count():
    raw = os.environ.get("CARNOT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _tau_map(taus, fn):
    """Apply fn over slice indices, possibly in parallel, order-stable."""
    workers = _worker_count()
    if workers == 1 or len(taus) <= 1:
        return {tau: fn(tau) for tau in taus}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = dict(zip(taus, pool.map(fn, taus)))
    return {tau: results[tau] for tau in taus}


def load_algebra(path):
    if path.startswith("builtin:"):
        name = path.split(":", 1)[1]
        text = (resources.files("carnot") / "data" / (name + ".grp")).read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return parse_group_spec(text)


def builtin_corpus():
    return ["abelian_r3", "heisenberg1", "heisenberg2", "engel", "free32"]


# ---- command implementations -------------------------------------------


def _guard_slices(alg, cfg):
    """Resource guard: refuse slices whose degree blocks exceed the cap."""
    if cfg.max_block_dim is None or cfg.command in ("frame", "e0"):
        return
    for tau in range(cfg.tau + 1):
        sl = Slice(alg, tau, max_block_dim=cfg.max_block_dim)
        for h in range(alg.n + 1):
            sl.dim(h)


def cmd_check(alg, cfg):
    report = validate_stratification(alg)
    payload = {
        "schema": SCHEMA,
        "command": "check",
        "group": alg.name,
        "tau": cfg.tau,
        "stratification_valid": report.valid,
        "stratification_failures": report.failures,
    }
    ok = report.valid
    if report.valid:
        mc = multicomplex_check(alg, cfg.tau, max_block_dim=cfg.max_block_dim)
        payload["multicomplex_ok"] = mc.ok
        payload["multicomplex_failures"] = [
            {"tau": c.tau, "degree": c.degree, "order": c.order, "witness": c.witness}
            for c in mc.failures()]
        payload["identities_checked"] = len(mc.checks)
        payload["slice_dims"] = {
            str(tau): [Slice(alg, tau).dim(h) for h in range(alg.n + 1)]
            for tau in range(cfg.tau + 1)}
        ok = ok and mc.ok
    lines = []
    if report.valid:
        lines.append("stratification valid")
    else:
        lines.append("stratification INVALID")
        lines.extend("  - " + f for f in report.failures)
    if report.valid:
        if payload["multicomplex_ok"]:
            lines.append("multicomplex identities hold (tau <= %d, %d identities)"
                         % (cfg.tau, payload["identities_checked"]))
        else:
            lines.append("multicomplex identities FAIL:")
            lines.extend("  - tau=%d degree=%d order=%d witness=%s"
                         % (f["tau"], f["degree"], f["order"], f["witness"])
                         for f in payload["multicomplex_failures"])
    return ok, payload, lines


def cmd_frame(alg, cfg):
    fields = left_invariant_fields(alg)
    payload = {"schema": SCHEMA, "command": "frame", "group": alg.name, "fields": []}
    lines = ["left-invariant frame of %s (n=%d, step %d):" % (alg.name, alg.n, alg.s)]
    for f in fields:
        comps = [poly_str(p) for p in f.components]
        payload["fields"].append({"index": f.index + 1, "components": comps})
        terms = []
        for m, c in enumerate(comps):
            if c == "0":
                continue
            terms.append("d%d" % (m + 1) if c == "1" else "(%s) d%d" % (c, m + 1))
        lines.append("  X%d = %s" % (f.index + 1, " + ".join(terms)))
    return True, payload, lines


def cmd_e0(alg, cfg):
    from .rumin import e0_basis
    payload = {"schema": SCHEMA, "command": "e0", "group": alg.name, "degrees": []}
    lines = ["Rumin spaces of %s per degree and weight:" % alg.name]
    for h in range(alg.n + 1):
        basis = e0_basis(alg, h)
        entry = {"degree": h,
                 "dims": {str(a): len(vs) for a, vs in basis.items()},
                 "basis": {str(a): [covector_str(v) for v in vs]
                           for a, vs in basis.items()}}
        payload["degrees"].append(entry)
        total = sum(len(vs) for vs in basis.values())
        lines.append("  h=%d  dim %d" % (h, total))
        for a, vs in basis.items():
            for v in vs:
                lines.append("    w=%d  %s" % (a, covector_str(v)))
    return True, payload, lines


def _matrix_payload(mat):
    return [[str(x) for x in row] for row in mat]


def cmd_dc(alg, cfg):
    payload = {"schema": SCHEMA, "command": "dc", "group": alg.name,
               "tau_max": cfg.tau, "slices": []}
    lines = ["Rumin differential on E0 coordinates, slices tau <= %d:" % cfg.tau]

    def one(tau):
        ops = SliceOps(Slice(alg, tau, max_block_dim=cfg.max_block_dim))
        out = {"tau": tau, "degrees": []}
        for h in range(alg.n + 1):
            if ops.dim(h) == 0:
                continue
            block = ops.rumin_block_operator(h)
            if not block.mat or not block.mat[0]:
                continue
            out["degrees"].append({
                "degree": h,
                "rows": list(block.row_labels),
                "cols": list(block.col_labels),
                "matrix": _matrix_payload(block.mat),
            })
        return out

    for tau, data in _tau_map(list(range(cfg.tau + 1)), one).items():
        payload["slices"].append(data)
        lines.append("  tau=%d" % tau)
        for entry in data["degrees"]:
            lines.append("    d_c: h=%d -> %d   (%d x %d)"
                         % (entry["degree"], entry["degree"] + 1,
                            len(entry["rows"]), len(entry["cols"])))
            for rl, row in zip(entry["rows"], entry["matrix"]):
                lines.append("      [%s]  %s" % (" ".join(row), rl))
    return True, payload, lines


def cmd_pages(alg, cfg):
    Qh = hausdorff_dimension(alg)
    rs = [cfg.page_r] if cfg.page_r else list(range(1, min(cfg.tau, Qh) + 2))
    ps = [cfg.p] if cfg.p is not None else list(range(0, min(cfg.tau, Qh) + 1))
    payload = {"schema": SCHEMA, "command": "pages", "group": alg.name,
               "tau": cfg.tau, "pages": []}
    lines = ["spectral pages of %s on the tau=%d slice:" % (alg.name, cfg.tau)]
    pc = spectral.page_computer(alg, cfg.tau)
    for r in rs:
        grid = {}
        for p in ps:
            for h in range(alg.n + 1):
                if pc.block_dim(h, p) == 0:
                    continue
                z = len(pc.z_block(r, p, h))
                b = len(pc.b_block(r, p, h))
                mat = pc.partial_matrix(r, p, h)
                payload["pages"].append({
                    "r": r, "p": p, "degree": h, "tau": cfg.tau,
                    "dims": {"Z": z, "B": b, "E": z - b},
                    "partial_r": _matrix_payload(mat),
                })
                grid[(p, h)] = z - b
        lines.append("  page r=%d   E_r dims as (p, h) grid:" % r)
        hs = sorted({h for (_, h) in grid})
        for p in sorted({p for (p, _) in grid}):
            row = ["p=%d:" % p]
            row.extend("h%d=%d" % (h, grid.get((p, h), 0)) for h in hs)
            lines.append("    " + " ".join(row))
    return True, payload, lines


def cmd_verify(alg, cfg):
    Qh = hausdorff_dimension(alg)
    payload = {"schema": SCHEMA, "command": "verify", "group": alg.name,
               "tau_max": cfg.tau, "identity": [], "page_dims_agree": [],
               "boundary_witness_samples": 0, "boundary_witness_failures": 0}
    lines = []
    ok = True

    def identity(tau):
        return spectral.rumin_vs_pages(alg, tau)

    for tau, rep in _tau_map(list(range(cfg.tau + 1)), identity).items():
        payload["identity"].append({
            "tau": tau, "ok": rep.ok,
            "blocks": [{"p": b.p, "degree": b.h, "ok": b.ok} for b in rep.blocks],
            "weight_jumps": {"p%d_h%d" % k: v for k, v in sorted(rep.weight_parts.items())},
        })
        ok = ok and rep.ok
        lines.append("identity d_c = page sum on tau=%d: %s" % (tau, "ok" if rep.ok else "FAIL"))

    def dims_agree(tau):
        bad = []
        for r in range(1, Qh + 2):
            for p in range(0, min(tau, Qh) + 1):
                fd = spectral.filtered_page_dims(alg, r, p, tau)
                bd = spectral.blockwise_page_dims(alg, r, p, tau)
                for h in fd:
                    if fd[h] != bd.get(h, 0):
                        bad.append({"r": r, "p": p, "degree": h,
                                    "filtered": fd[h], "blockwise": bd.get(h, 0)})
        return bad

    for tau, bad in _tau_map(list(range(cfg.tau + 1)), dims_agree).items():
        payload["page_dims_agree"].append({"tau": tau, "ok": not bad, "mismatches": bad})
        ok = ok and not bad
        lines.append("page dims, two routes, tau=%d: %s" % (tau, "ok" if not bad else "FAIL"))

    rng = random.Random(cfg.seed)
    samples = failures = 0
    for tau in range(min(cfg.tau, 4) + 1):
        for r in range(2, min(tau, Qh) + 2):
            for p in range(0, min(tau, Qh) + 1):
                for h in range(1, alg.n + 1):
                    s = spectral.random_constrained_boundary(alg, r, p, tau, h, rng)
                    if s is None:
                        continue
                    samples += 1
                    if not spectral.check_boundary_in_cycles(alg, r, p, tau, h, s):
                        failures += 1
    payload["boundary_witness_samples"] = samples
    payload["boundary_witness_failures"] = failures
    ok = ok and failures == 0
    lines.append("boundary-in-cycle witness sampling: %d samples, %d failures"
                 % (samples, failures))
    return ok, payload, lines


def cmd_cohomology(alg, cfg):
    payload = {"schema": SCHEMA, "command": "cohomology", "group": alg.name,
               "tau_max": cfg.tau, "slices": []}
    lines = ["slice cohomology vs stable page, %s:" % alg.name]
    ok = True

    def one(tau):
        return (spectral.brute_cohomology(alg, tau),
                spectral.infinity_page_dims(alg, tau))

    for tau, (brute, einf) in _tau_map(list(range(cfg.tau + 1)), one).items():
        agree = all(brute[h] == einf.get(h, 0) for h in brute)
        ok = ok and agree
        payload["slices"].append({
            "tau": tau,
            "rank_nullity": {str(h): v for h, v in sorted(brute.items())},
            "stable_page": {str(h): v for h, v in sorted(einf.items())},
            "ok": agree,
        })
        dims = " ".join("h%d=%d" % (h, v) for h, v in sorted(brute.items()))
        lines.append("  tau=%d  %s  (%s)" % (tau, dims, "ok" if agree else "MISMATCH"))
    return ok, payload, lines


COMMANDS = {
    "check": cmd_check,
    "frame": cmd_frame,
    "e0": cmd_e0,
    "dc": cmd_dc,
    "pages": cmd_pages,
    "verify": cmd_verify,
    "cohomology": cmd_cohomology,
}


def run(cfg: RunConfig):
    """Execute one command; returns the process exit status."""
    try:
        alg = load_algebra(cfg.spec_path)
    except FileNotFoundError:
        sys.stderr.write("error: cannot read %s\n" % cfg.spec_path)
        return 1
    except GroupSpecError as exc:
        sys.stderr.write("error: %s: %s\n" % (cfg.spec_path, exc))
        return 1
    if cfg.command != "check":
        report = validate_stratification(alg)
        if not report.valid:
            sys.stderr.write("error: %s is not a valid stratification:\n%s\n"
                             % (cfg.spec_path, "\n".join("  " + f for f in report.failures)))
            return 1
    if cfg.p is not None and not (0 <= cfg.p <= hausdorff_dimension(alg) + 1):
        sys.stderr.write("error: --weight %d outside 0..%d\n"
                         % (cfg.p, hausdorff_dimension(alg) + 1))
        return 1
    try:
        _guard_slices(alg, cfg)
        ok, payload, lines = COMMANDS[cfg.command](alg, cfg)
    except SliceTooLargeError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1
    payload["ok"] = ok
    if cfg.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        status = "PASS" if ok else "FAIL"
        text = "\n".join(lines + ["result: " + status]) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="carnot",
        description="exact verification of the Rumin complex and the weight "
                    "spectral sequence on Carnot groups")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("spec", help="group spec file, or builtin:<name> (%s)"
                        % ", ".join(builtin_corpus()))
    parser.add_argument("--tau", type=int, default=4,
                        help="largest homogeneity slice to process (default 4)")
    parser.add_argument("--page", type=int, default=None, help="single page index r")
    parser.add_argument("--weight", type=int, default=None, help="single filtration weight p")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--out", default=None, help="write the report to a file")
    parser.add_argument("--max-block-dim", type=int, default=DEFAULT_GUARD,
                        help="resource guard on slice block dimensions")
    args = parser.parse_args()
    if args.tau < 0:
        parser.error("--tau must be >= 0")
    if args.page is not None and args.page < 1:
        parser.error("--page must be >= 1")
    return RunConfig(command=args.command, spec_path=args.spec, tau=args.tau,
                     page_r=args.page, p=args.weight, format=args.format,
                     out=args.out, max_block_dim=args.max_block_dim)


def main():
    sys.exit(run(build_parser()))


if __name__ == "__main__":
    main()

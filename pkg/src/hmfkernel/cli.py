"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration, 3 computational precondition
violated, 4 comparison failure, 5 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time
from fractions import Fraction

import sympy

from . import __version__
from .basefield import FieldError
from .btree import BTTree, TreeDepthError, norm_relation_check
from .cmext import ScenarioError
from .coeffs import TagMismatch
from .config import ConfigError, ScenarioConfig
from .qexp import QExpansionError, TruncationError, deserialize, qexp_mul, serialize

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_COMPARISON, EXIT_IO = 0, 2, 3, 4, 5
REPORT_FORMAT = "hmfkernel-report 1"


class ComparisonFailure(Exception):
    pass


# -- output ---------------------------------------------------------------------------

class Writer:
    """Writes result files under the output directory and a manifest at the end."""

    def __init__(self, cfg: ScenarioConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.root = cfg.output_dir
        self.files: list[tuple[str, str]] = []
        self.start = time.perf_counter()

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.root, name)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        self.files.append((name, hashlib.sha256(text.encode()).hexdigest()))
        return path

    def manifest(self, status: str) -> None:
        m = {
            "command": self.command,
            "status": status,
            "config": self.cfg.path,
            "config_sha256": self.cfg.digest,
            "overrides": {k: v for k, v in sorted(self.cfg.overrides.items()) if v is not None},
            "versions": {"hmfkernel": __version__, "python": platform.python_version(), "sympy": sympy.__version__},
            "wall_time_s": round(time.perf_counter() - self.start, 3),
            "files": [{"name": n, "sha256": h} for n, h in self.files],
        }
        path = os.path.join(self.root, f"{self.command}.manifest.json")
        os.makedirs(self.root, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            json.dump(m, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _table(header: str, columns: list[str], rows: list[list]) -> str:
    lines = [f"# {REPORT_FORMAT}", f"# {header}", "\t".join(columns)]
    lines += ["\t".join(str(c) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------------

def cmd_primes(cfg, args, out):
    F = cfg.field()
    b = args.bound or cfg.bound("ideal_norm", 100)
    rows = [[P.label, P.p, P.norm, P.e, P.f] for P in F.enumerate_primes(b)]
    out.write("primes.tsv", _table(f"primes of {F.name()} up to norm {b}", ["label", "p", "norm", "e", "f"], rows))


def cmd_ideals(cfg, args, out):
    F = cfg.field()
    b = args.bound or cfg.bound("ideal_norm", 100)
    rows = [[F.ideal_label(I), int(I.norm)] for I in F.ideals_up_to(b)]
    out.write("ideals.tsv", _table(f"integral ideals of {F.name()} up to norm {b}", ["ideal", "norm"], rows))


def cmd_theta(cfg, args, out):
    from .thetaeis import ThetaSpec, theta_coeffs
    E = cfg.cm()
    f = theta_coeffs(ThetaSpec(E, cfg.e_character(E), cfg.bound("ideal_norm", 100)))
    out.write("theta.qexp", serialize(f))


def _eis(cfg):
    from .thetaeis import EisSpec, eis_coeffs
    E = cfg.cm() if "cm" in cfg.raw else None
    chi = cfg.f_character(E)
    source, value = cfg.constant_term()
    level = cfg.ideal("level") if cfg.get("level") is not None else chi.conductor
    return eis_coeffs(EisSpec(chi, cfg.weight, level, cfg.bound("ideal_norm", 100), source, value))


def cmd_eis(cfg, args, out):
    out.write("eis.qexp", serialize(_eis(cfg)))


def _input(cfg, path):
    try:
        return deserialize(_read(path), cfg.field())
    except OSError:
        raise
    except QExpansionError as e:
        raise QExpansionError(f"{path}: {e}") from None


def _op_ctx(cfg, f):
    from .operators import OperatorContext
    spec = cfg.character_spec()
    chi = cfg.f_character() if spec.get("type") in ("epsilon", "dirichlet") else None
    if chi is None:
        return OperatorContext.trivial(f.field, f.level, f.weight)
    return OperatorContext(f.field, f.level, f.weight, chi)


def cmd_hecke(cfg, args, out):
    from .operators import hecke_T
    f = _input(cfg, args.input)
    M = f.field.parse_ideal(args.ideal)
    out.write("hecke.qexp", serialize(hecke_T(_op_ctx(cfg, f), M, f)))


def cmd_mul(cfg, args, out):
    f, g = _input(cfg, args.input), _input(cfg, args.input2)
    out.write("mul.qexp", serialize(qexp_mul(f, g)))


def _stab_data(cfg, f):
    from .operators import PStabilizationData
    p = cfg.get("p")
    if not isinstance(p, int):
        raise ConfigError(["stabilize needs an explicit integer p"])
    F = f.field
    if f.weight != 2:
        raise ScenarioError(f"stabilization uses X^2 - aX + N(P) and needs weight 2, not {f.weight}")
    table = cfg.raw.get("eigenvalues", {})
    a = {}
    for P in F.primes_above(p):
        a[P.label] = Fraction(str(table[P.label])) if P.label in table else f[F.prime_ideal(P)]
    return PStabilizationData.build(F, p, a, int(cfg.get("precision", 6)))


def cmd_stabilize(cfg, args, out):
    from .operators import p_stabilize
    f = _input(cfg, args.input)
    g = p_stabilize(f, _stab_data(cfg, f), args.direction)
    out.write(f"stabilize-{args.direction}.qexp", serialize(g))


def cmd_eord(cfg, args, out):
    from .operators import e_ord_iterate, p_stabilize
    f = _input(cfg, args.input)
    data = _stab_data(cfg, f)
    if f.tag() != "padic":
        f = p_stabilize(f, data, args.direction)
    g, rep = e_ord_iterate(f, data, args.iterations)
    rows = [[s.step, s.power, s.bound, s.stabilized, s.vanished] for s in rep.steps]
    out.write("eord.qexp", serialize(g))
    out.write("eord.tsv", _table(f"T(p)^(k!) iteration, p={data.p} M={data.M} exhausted={rep.exhausted}",
                                 ["k", "power", "bound", "stabilized", "vanished"], rows))


def _scenario(cfg):
    from .kernel import KernelScenario, choose_split_prime
    E = cfg.cm()
    N = cfg.ideal("level")
    p = cfg.get("p", "auto")
    if p == "auto":
        p = choose_split_prime(E, N)
    chi = cfg.e_character(E)
    source, value = cfg.constant_term()
    try:
        return KernelScenario(E, N, int(p), cfg.bound("ideal_norm", 100), chi, value if source == "supplied" else None)
    except ScenarioError as e:
        raise ConfigError([str(e)]) from None


def _kernel_ideals(sc, args):
    from .kernel import qualifying_ideals
    b = args.ideal_norm_max or sc.bound
    if b > sc.bound:
        raise ScenarioError(f"--ideal-norm-max {b} exceeds the scenario bound {sc.bound}")
    if args.require_p_divisible:
        return qualifying_ideals(sc, b)
    return list(sc.F.ideals_up_to(b))


def cmd_kernel_analytic(cfg, args, out):
    from .kernel import FiniteCharacter, derivative_local, kernel_coeff
    sc = _scenario(cfg)
    F = sc.F
    rows = []
    if args.require_p_divisible:
        for I in _kernel_ideals(sc, args):
            vals = derivative_local(sc, I)
            labs = sorted(vals, key=lambda s: F.prime(s).id) or ["-"]
            rows += [[F.ideal_label(I), lab, vals.get(lab, Fraction(0))] for lab in labs]
        out.write("kernel-analytic.tsv", _table(f"formal-log local coefficients, p={sc.p}", ["I", "prime", "analytic"], rows))
    else:
        fun = FiniteCharacter(sc.chi)
        for I in _kernel_ideals(sc, args):
            rows.append([F.ideal_label(I), "-", kernel_coeff(sc, fun, I)])
        out.write("kernel-analytic.tsv", _table(f"kernel coefficients for {sc.chi.label()}, p={sc.p}",
                                                ["I", "prime", "analytic"], rows))


def cmd_kernel_geometric(cfg, args, out):
    from .kernel import geometric_local
    sc = _scenario(cfg)
    F = sc.F
    if not args.require_p_divisible:
        raise ScenarioError("geometric local coefficients need p | I")
    rows = []
    for I in _kernel_ideals(sc, args):
        vals = geometric_local(sc, I)
        labs = sorted(vals, key=lambda s: F.prime(s).id) or ["-"]
        rows += [[F.ideal_label(I), lab, vals.get(lab, Fraction(0))] for lab in labs]
    out.write("kernel-geometric.tsv", _table(f"closed-form local coefficients, p={sc.p}", ["I", "prime", "geometric"], rows))


def kernel_report_rows(reports):
    rows = []
    for r in reports:
        if not r.rows:
            rows.append([r.ideal, "-", 0, 0, "yes"])
        for lab, _, a, g in r.rows:
            rows.append([r.ideal, lab, a, g, "yes" if a == g else "no"])
    return rows


def cmd_kernel_compare(cfg, args, out):
    from .kernel import compare_kernels
    sc = _scenario(cfg)
    if not args.require_p_divisible:
        raise ScenarioError("the comparison needs p | I")
    reps = compare_kernels(sc, _kernel_ideals(sc, args), workers=cfg.workers)
    ok = all(r.equal and r.split_vanishing for r in reps)
    out.write("kernel-compare.tsv", _table(f"analytic against geometric, p={sc.p}, all_equal={ok}, "
                                           f"sign_hypothesis={sc.sign_hypothesis}",
                                           ["I", "prime", "analytic", "geometric", "equal"], kernel_report_rows(reps)))
    if not ok:
        raise ComparisonFailure(f"{sum(not r.equal for r in reps)} ideals differ")


def cmd_product_check(cfg, args, out):
    from .kernel import product_vs_kernel_check
    sc = _scenario(cfg)
    rep = product_vs_kernel_check(sc)
    rows = [[lab, x, k] for lab, x, k in rep.mismatches]
    out.write("product-check.tsv", _table(f"product against D1=(1) kernel summand, bound={rep.bound}, "
                                          f"mismatches={len(rep.mismatches)}", ["I", "product", "kernel"], rows))
    if not rep.equal:
        raise ComparisonFailure(f"{len(rep.mismatches)} coefficients differ")


def cmd_tree_normrel(cfg, args, out):
    q = args.q
    k = args.k
    depth = cfg.bound("tree_depth", k + 4)
    t = BTTree(q, max(depth, k + 3))
    r = norm_relation_check(t, k)
    lines = [f"# {REPORT_FORMAT}", f"q {q}", f"k {k}", f"equal {r.equal}", f"size {r.size}",
             f"expected_size {(q - 1) * q ** (k + 1)}", f"containments {r.containments}"]
    if args.dump:
        lines.append("lhs " + " ".join(f"{x}:{m}" for x, m in r.lhs.items()))
        lines.append("rhs " + " ".join(f"{x}:{m}" for x, m in r.rhs.items()))
    out.write(f"tree-normrel-q{q}-k{k}.txt", "\n".join(lines) + "\n")
    if not r.equal:
        raise ComparisonFailure("norm relation failed")


def cmd_verify_all(cfg, args, out):
    from .acceptance import KNOWN_FAILURES, run_checks
    scale = args.scale or cfg.raw.get("verify", {}).get("scale", "full")
    workers = cfg.workers
    first = run_checks(scale, workers=workers)
    second = run_checks(scale, workers=1 if workers > 1 else 2)
    same = [a.text() == b.text() for a, b in zip(first, second)]
    summary = []
    for r in first:
        out.write(f"verify-all/{r.key}.txt", r.text())
        note = " (known, see README)" if (r.key in KNOWN_FAILURES and not r.passed) else ""
        summary.append(f"{r.status()} {r.key} {r.title}{note}")
    det = all(same)
    summary.append(f"{'PASS' if det else 'FAIL'} C11 determinism across two runs with different worker counts")
    out.write("verify-all/summary.txt", "\n".join(summary) + "\n")
    for line in summary:
        print(line)
    failed = [r.key for r in first if not r.passed] + ([] if det else ["C11"])
    if failed:
        raise ComparisonFailure("failed checks: " + ", ".join(failed))


COMMANDS = {
    "primes": cmd_primes, "ideals": cmd_ideals, "theta": cmd_theta, "eis": cmd_eis, "hecke": cmd_hecke,
    "mul": cmd_mul, "stabilize": cmd_stabilize, "eord": cmd_eord, "kernel-analytic": cmd_kernel_analytic,
    "kernel-geometric": cmd_kernel_geometric, "kernel-compare": cmd_kernel_compare,
    "product-check": cmd_product_check, "tree-normrel": cmd_tree_normrel, "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hmfk", description="Exact q-expansions and kernel comparisons.")
    ap.add_argument("--version", action="version", version=f"hmfkernel {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON scenario file")
        sp.add_argument("--out", help="output directory (overrides output_dir)")
        sp.add_argument("--bound", type=int, help="ideal norm bound (overrides bounds.ideal_norm)")
        sp.add_argument("--workers", type=int, help="process count (overrides workers)")
        if name in ("hecke", "mul", "stabilize", "eord"):
            sp.add_argument("--input", required=True, help="expansion file")
        if name == "hecke":
            sp.add_argument("--ideal", required=True, help="ideal label M for T(M)")
        if name == "mul":
            sp.add_argument("--input2", required=True, help="second expansion file")
        if name in ("stabilize", "eord"):
            sp.add_argument("--direction", choices=("alpha", "beta"), default="alpha")
        if name == "eord":
            sp.add_argument("--iterations", type=int, default=3)
        if name.startswith("kernel-"):
            sp.add_argument("--ideal-norm-max", type=int)
            sp.add_argument("--require-p-divisible", action=argparse.BooleanOptionalAction, default=True)
        if name == "tree-normrel":
            sp.add_argument("--q", type=int, required=True)
            sp.add_argument("--k", type=int, required=True)
            sp.add_argument("--dump", action="store_true", help="include the divisor supports")
        if name == "verify-all":
            sp.add_argument("--scale", choices=("full", "quick"))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = None
    try:
        cfg = ScenarioConfig.load(args.config, {"output_dir": args.out, "bound": args.bound, "workers": args.workers})
        out = Writer(cfg, args.command)
        COMMANDS[args.command](cfg, args, out)
    except ConfigError as e:
        print("invalid configuration:", file=sys.stderr)
        for p in e.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_CONFIG
    except ComparisonFailure as e:
        print(f"comparison failed: {e}", file=sys.stderr)
        if out is not None:
            out.manifest("comparison-failure")
        return EXIT_COMPARISON
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        if out is not None:
            try:
                out.manifest("io-error")
            except OSError:
                pass
        return EXIT_IO
    except (ScenarioError, FieldError, TagMismatch, TruncationError, QExpansionError, TreeDepthError,
            ValueError, ArithmeticError) as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        if out is not None:
            out.manifest("precondition-violated")
        return EXIT_PRECONDITION
    out.manifest("ok")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

# Command line front end: spectral tables, measure evaluation, search, sampling,
# certification, design checks and the verification battery.

import argparse
import logging
import sys
import time
from fractions import Fraction
from math import sqrt
from pathlib import Path

from .certifier import CONDITIONS, certify, petrunin_scalar_check
from .config import DEFAULT_TOLERANCES, FIXTURES_DIR, fixture_path
from .copositivity import b_matrix, critical_s, is_isotropic
from .designs import check_design_moments, design_to_measure, load_design, torus_design_bound
from .immersion import build_sns1, build_tensor, build_veronese, estimate_normal_curvature
from .known_measures import BUNDLED_MEASURES, known_cases
from .measure import (ProblemInstance, ambient_dimension, curvature_data, immersion_check,
                      load_measure, save_measure, validate)
from .optimizer import load_search_config, minimize_s
from .reports import STRUCTURED, TEXT, RunReport
from .spectral import spectral_triple
from .version import __version__

log = logging.getLogger(__name__)

MAP_KINDS = ("sns1", "veronese", "tensor")
EXPERIMENTAL = ("biricci", "ric-eigen")


# ---------------------------------------------------------------------------------------------
# Helpers


def _build_map(args, report):
    if args.map == "sns1":
        r1 = sqrt(2.0 / 3.0) if args.r1 is None else args.r1
        r2 = sqrt(1.0 - r1 * r1) if args.r2 is None else args.r2
        return build_sns1(args.n, r1, r2)
    if args.map == "veronese":
        return build_veronese(args.n, args.l)
    if args.map == "tensor":
        if args.measure is None:
            raise ValueError("--map tensor needs --measure <file>.")
        report.add_input(args.measure)
        return build_tensor(load_measure(args.measure))
    raise NameError(f"Unknown map kind '{args.map}'. Expected one of {', '.join(MAP_KINDS)}.")


def _certificate_results(mu, mode="auto"):
    data = curvature_data(mu)
    ok, m = immersion_check(data)
    if not ok:
        raise ValueError(f"coordinate m={m + 1} has G_m = 0: the tensor map is not an immersion.")
    if mode == "numeric":
        data = data.to_float()
    certificate = critical_s(data, mode=mode)
    return data, certificate


# ---------------------------------------------------------------------------------------------
# Subcommands


def cmd_spectral(args, report):
    rows = []
    for n in args.n:
        for l in range(args.l_min, args.l_max + 1):
            D, r, lam = spectral_triple(n, l)
            rows.append({"n": n, "l": l, "D": D, "rho": r, "lambda": lam})
    report.results["table"] = rows


def cmd_eval_measure(args, report):
    report.add_input(args.file)
    mu = load_measure(args.file)
    ok, message = validate(mu)
    if not report.check("measure is valid", ok, "" if ok else message):
        return
    data, certificate = _certificate_results(mu, "numeric" if args.numeric_only else "auto")
    report.results["measure"] = mu.name or Path(args.file).stem
    report.results["factors"] = list(mu.instance.factors)
    report.results["A"] = [list(row) for row in data.A]
    report.results["G"] = list(data.G)
    report.results["certificate"] = certificate
    report.results["normal_curvature"] = sqrt(float(certificate.s_star))
    report.results["ambient_dimension"] = ambient_dimension(mu)
    report.results["isotropic"] = is_isotropic(data, certificate.s_star, DEFAULT_TOLERANCES.feasibility
                                               if args.numeric_only else 0)
    if args.expect is not None:
        expected = Fraction(args.expect)
        diff = abs(Fraction(certificate.s_star) - expected) if certificate.mode == "exact" else \
            abs(float(certificate.s_star) - float(expected))
        report.check(f"s = {expected}", diff <= (0 if certificate.mode == "exact" else 1e-9),
                     f"got {certificate.s_star}")


def cmd_min_s(args, report):
    cfg = load_search_config(args.config or fixture_path("search_config.json"))
    if args.config:
        report.add_input(args.config)
    cfg = cfg.replace(l_max=args.lmax, max_support=args.max_support, restarts=args.restarts,
                      seed=args.seed, budget_secs=args.budget_secs)
    report.seed = cfg.seed
    instance = ProblemInstance.parse(args.factors)
    warm = None
    if args.warm_start:
        report.add_input(args.warm_start)
        warm = load_measure(args.warm_start)
    result = minimize_s(instance, cfg, warm_start=warm, cache_dir=args.cache, log_progress=args.verbose)
    report.results["config"] = cfg.to_dict()
    report.results["factors"] = list(instance.factors)
    report.results["measure"] = [{"l": list(a.l_vec), "w": a.weight} for a in result.measure.atoms]
    report.results["certificate"] = result.certificate
    report.results["incomplete"] = result.incomplete
    report.results["refined"] = result.refined
    report.results["evaluations"] = result.evaluations
    report.results["restarts_completed"] = result.restarts_completed
    if args.save_measure:
        save_measure(result.measure, args.save_measure)


def cmd_sample(args, report):
    F = _build_map(args, report)
    estimate = estimate_normal_curvature(F, args.samples, args.seed)
    report.results["map"] = F.label
    report.results["statistics"] = estimate
    if F.normal_curvature is not None:
        report.results["exact_normal_curvature"] = F.normal_curvature
        report.results["deviation"] = estimate.max - F.normal_curvature
        report.check("sampled maximum within exact normal curvature",
                     estimate.max <= F.normal_curvature + DEFAULT_TOLERANCES.fd_cmp,
                     f"{estimate.max:.12g} vs {F.normal_curvature:.12g}")


def cmd_certify(args, report):
    F = _build_map(args, report)
    result = certify(F, args.condition, c=args.c, c_f=args.c_f, samples=args.samples,
                     frames_per_point=args.frames_per_point, seed=args.seed, log_progress=args.verbose)
    report.results["map"] = F.label
    report.results["certificate"] = result
    if args.condition not in EXPERIMENTAL:
        report.check(f"{args.condition} margin nonnegative", result.passed(DEFAULT_TOLERANCES.fd_cmp),
                     f"min margin {result.min_margin:.12g}")


def cmd_check_design(args, report):
    report.add_input(args.file)
    design = load_design(args.file)
    moments = check_design_moments(design)
    report.results["design"] = design.name
    report.results["moments"] = moments
    report.check("design moment identities", moments.passed,
                 "; ".join(c.identity for c in moments.failures))
    if args.fold:
        mu = design_to_measure(design)
        _, certificate = _certificate_results(mu)
        bound = torus_design_bound(design.M)
        report.results["folded_measure"] = [{"l": list(a.l_vec), "w": a.weight} for a in mu.atoms]
        report.results["certificate"] = certificate
        report.check(f"folded measure reaches s = {bound}", certificate.s_star == bound,
                     f"got {certificate.s_star}")


def _check_fixture(report, fixtures, name, constructor, expected, numeric):
    path = fixtures / name
    report.add_input(path)
    mu = load_measure(path)
    ok, message = validate(mu)
    if not report.check(f"{name}: measure is valid", ok, "" if ok else message):
        return
    report.check(f"{name}: matches closed form", mu == constructor())
    data, certificate = _certificate_results(mu, "numeric" if numeric else "exact")
    if numeric:
        report.check(f"{name}: s = {expected}", abs(float(certificate.s_star) - float(expected)) <= 1e-9,
                     f"got {float(certificate.s_star):.12g}")
        report.check(f"{name}: B(s) = 0 within 1e-9", is_isotropic(data, float(expected), 1e-9))
        return
    report.check(f"{name}: s = {expected}", certificate.s_star == expected, f"got {certificate.s_star}")
    report.check(f"{name}: B(s) = 0", all(x == 0 for row in b_matrix(data, expected) for x in row))
    gauss = petrunin_scalar_check(mu)
    report.check(f"{name}: traced Gauss identity", gauss.residual == 0, f"residual {gauss.residual}")


def cmd_verify_paper(args, report):
    fixtures = Path(args.fixtures) if args.fixtures else FIXTURES_DIR
    numeric = args.numeric_only

    # Spectral values
    spectral_ok = True
    for n in range(1, 11):
        _, r1, l1 = spectral_triple(n, 1)
        _, r2, l2 = spectral_triple(n, 2)
        spectral_ok &= r1 == 1 and l1 == 1
        spectral_ok &= r2 == Fraction(2 * (n + 1), n) and l2 == Fraction(8 * (n + 1), n)
    for l in range(0, 21):
        _, r, lam = spectral_triple(1, l)
        spectral_ok &= r == l * l and lam == l ** 4
    report.check("spectral values rho, lambda", spectral_ok)

    for name, (constructor, expected) in sorted(BUNDLED_MEASURES.items()):
        try:
            _check_fixture(report, fixtures, name, constructor, expected, numeric)
        except (ValueError, OSError) as e:
            report.check(f"{name}: readable", False, str(e))

    for case in known_cases():
        data, certificate = _certificate_results(case.measure, "numeric" if numeric else "exact")
        if numeric:
            ok = abs(float(certificate.s_star) - float(case.expected_s)) <= 1e-9
        else:
            ok = certificate.s_star == case.expected_s and is_isotropic(data, case.expected_s)
        report.check(f"{case.label}: s = {case.expected_s}", ok, f"got {certificate.s_star}")
        if case.expected_dimension is not None:
            N = ambient_dimension(case.measure)
            report.check(f"{case.label}: N = {case.expected_dimension}", N == case.expected_dimension, f"got {N}")

    design_path = fixtures / "pythagorean_design.json"
    report.add_input(design_path)
    design = load_design(design_path)
    moments = check_design_moments(design)
    report.check("Pythagorean design moments", moments.passed,
                 "; ".join(c.identity for c in moments.failures))
    _, certificate = _certificate_results(design_to_measure(design))
    report.check("Pythagorean torus measure reaches 3n/(n+2)", certificate.s_star == torus_design_bound(2),
                 f"got {certificate.s_star}")
    report.results["checks_run"] = len(report.checks)


COMMANDS = {
    "spectral": cmd_spectral,
    "eval-measure": cmd_eval_measure,
    "min-s": cmd_min_s,
    "sample": cmd_sample,
    "certify": cmd_certify,
    "check-design": cmd_check_design,
    "verify-paper": cmd_verify_paper,
}


# ---------------------------------------------------------------------------------------------
# Argument parsing


def _add_map_args(p):
    p.add_argument("--map", choices=MAP_KINDS, default="sns1", help="Immersion to sample")
    p.add_argument("--measure", help="Measure file for --map tensor")
    p.add_argument("--n", type=int, default=2, help="Sphere dimension for sns1 and veronese")
    p.add_argument("--l", type=int, default=2, help="Eigenvalue index for veronese")
    p.add_argument("--r1", type=float, help="First radius of sns1 (default sqrt(2/3))")
    p.add_argument("--r2", type=float, help="Second radius of sns1 (default sqrt(1 - r1^2))")
    p.add_argument("--samples", type=int, default=1000, help="Number of sample points")


def build_parser():
    parser = argparse.ArgumentParser(prog="smallcurv",
                                     description="Curvature of tensor-product Veronese immersions")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, help="Master seed (default 0; min-s defaults to the configured seed)")
    parser.add_argument("--out", help="Write the report to this file instead of stdout")
    parser.add_argument("--format", choices=(TEXT, STRUCTURED), default=TEXT, help="Report format")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    parser.add_argument("--timing", action="store_true", help="Include the wall time in the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectral", help="Table of D(n,l), rho(n,l), lambda(n,l)")
    p.add_argument("--n", type=int, nargs="+", default=[1, 2, 3], help="Sphere dimensions")
    p.add_argument("--l-min", type=int, default=0)
    p.add_argument("--l-max", type=int, default=4)

    p = sub.add_parser("eval-measure", help="Validate a measure and compute its exact critical s")
    p.add_argument("file")
    p.add_argument("--numeric-only", action="store_true", help="Use the float path")
    p.add_argument("--expect", help="Expected s as a rational string")

    p = sub.add_parser("min-s", help="Search for a measure with small critical s")
    p.add_argument("--factors", required=True, help="Sphere dimensions, e.g. 2,1")
    p.add_argument("--lmax", type=int)
    p.add_argument("--max-support", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--budget-secs", type=float)
    p.add_argument("--warm-start", help="Measure file used as a warm start")
    p.add_argument("--cache", help="Results cache directory")
    p.add_argument("--config", help="Search configuration file")
    p.add_argument("--save-measure", help="Write the best measure to this file")

    p = sub.add_parser("sample", help="Sample |A(u,u)| of an explicit immersion")
    _add_map_args(p)

    p = sub.add_parser("certify", help="Evaluate a curvature condition over sampled frames")
    _add_map_args(p)
    p.set_defaults(samples=100)
    p.add_argument("--condition", choices=CONDITIONS, required=True)
    p.add_argument("--c", type=float, help="Conformal constant")
    p.add_argument("--c-f", type=float, help="Normal curvature bound (default: measured)")
    p.add_argument("--frames-per-point", type=int, default=8)

    p = sub.add_parser("check-design", help="Check the moment identities of a weighted design")
    p.add_argument("file")
    p.add_argument("--fold", action="store_true", help="Also fold into a torus measure and compute s")

    p = sub.add_parser("verify-paper", help="Run the verification battery on the bundled measures")
    p.add_argument("--numeric-only", action="store_true", help="Use the float path")
    p.add_argument("--fixtures", help="Directory with the measure and design files")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None and args.command != "min-s":
        args.seed = 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    arguments = {k: v for k, v in sorted(vars(args).items())
                 if k not in ("out", "format", "verbose", "timing") and v is not None}
    report = RunReport(args.command, arguments, seed=args.seed, timing=args.timing)
    started = time.perf_counter()
    try:
        COMMANDS[args.command](args, report)
    except (ValueError, NameError, OSError) as e:
        if args.verbose:
            log.exception("%s failed", args.command)
        report.check(f"{args.command} failed", False, str(e))
        print(f"error: {args.command}: {e}", file=sys.stderr)
    report.wall_time = time.perf_counter() - started
    if args.out:
        report.write(args.out, args.format)
    else:
        sys.stdout.write(report.render(args.format))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())

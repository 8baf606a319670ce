"""
wittlab command line: run verification suites on a declared instance,
build or verify the structure-polynomial cache, and show an instance.

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration
error, 3 internal inconsistency.
"""
import argparse
import configparser
import logging
import os
import sys
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .dualitylab import (SUITES, DualityInstance, SuiteSettings, VerificationReport,
                         check_divisibility, nl_hopf, psi_polynomial, run_suite)
from .errors import ConfigError, WittlabError
from .utils import dumps_report, export_report, format_summary, has_errors, \
    validate_precision_parameters
from .wittcore import DEPTH_LIMITS, KINDS, default_cache, format_record

logger = logging.getLogger(__name__)

INSTANCE_KEYS = {"name", "ring", "p", "l", "modulus", "lift", "lambda"}
SETTING_KEYS = {"window", "order", "length", "samples", "seed", "cases"}
RUN_KEYS = SETTING_KEYS | {"suites", "jobs"}

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3

CACHE_FILE = "structure.cache"


@dataclass
class RunConfig:
    """An instance file: [instance], optional [run] and one section per suite."""
    path: str
    instance: Dict[str, str]
    run: Dict[str, str] = field(default_factory=dict)
    suites: Dict[str, Dict[str, str]] = field(default_factory=dict)


def load_config(path: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not parser.has_section("instance"):
        raise ConfigError(f"{path}: missing [instance] section")
    config = RunConfig(path, {})
    for section in parser.sections():
        values = dict(parser.items(section))
        if section == "instance":
            allowed, target = INSTANCE_KEYS, None
        elif section == "run":
            allowed, target = RUN_KEYS, None
        elif section in SUITES:
            allowed, target = SETTING_KEYS, section
        else:
            raise ConfigError(f"{path}: unknown section [{section}]")
        unknown = sorted(set(values) - allowed)
        if unknown:
            raise ConfigError(f"{path}: unknown key(s) {', '.join(unknown)} in [{section}]")
        if section == "instance":
            config.instance = values
        elif section == "run":
            config.run = values
        else:
            config.suites[target] = values
    return config


def _int(value: Any, key: str) -> int:
    try:
        return int(str(value).strip())
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from exc


def parse_cases(text: str) -> Tuple[Tuple[int, int, int], ...]:
    """'2:2:1, 3:1:1' -> ((2, 2, 1), (3, 1, 1))"""
    cases = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(f"theorem2 case {item!r} is not p:l:lambda")
        cases.append(tuple(_int(x, "case") for x in parts))
    if not cases:
        raise ConfigError("theorem2 cases are empty")
    return tuple(cases)


def parse_suites(text: str) -> List[str]:
    names = [s.strip() for s in text.replace(" ", ",").split(",") if s.strip()]
    if "all" in names:
        return list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {', '.join(unknown)}; choose from "
                          f"{', '.join(SUITES)} or all")
    return names


def settings_for(suite: str, config: RunConfig, args: argparse.Namespace) -> SuiteSettings:
    """Command line over the suite section over [run] over defaults."""
    merged: Dict[str, Any] = {}
    merged.update({k: v for k, v in config.run.items() if k in SETTING_KEYS})
    merged.update(config.suites.get(suite, {}))
    for key in ("window", "order", "length", "samples", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    kwargs: Dict[str, Any] = {}
    for key in ("window", "order", "length", "samples", "seed"):
        if key in merged:
            kwargs[key] = _int(merged[key], key)
    if "cases" in merged:
        kwargs["theorem2_cases"] = parse_cases(str(merged["cases"]))
    return SuiteSettings(**kwargs)


# -- workers ----------------------------------------------------------------------

def _init_worker(cache_path: Optional[str], level: int):
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if cache_path and os.path.exists(cache_path):
        default_cache.load(cache_path, verify=False)


def _run_job(job: Tuple[str, Dict[str, str], SuiteSettings]) -> List[VerificationReport]:
    suite, instance_cfg, settings = job
    instance = DualityInstance.from_mapping(instance_cfg)
    return run_suite(suite, instance, settings)


def _run_jobs(jobs: List[Tuple[str, Dict[str, str], SuiteSettings]], workers: int,
              cache_path: Optional[str], level: int) -> List[VerificationReport]:
    if workers <= 1 or len(jobs) <= 1:
        results = [_run_job(job) for job in jobs]
    else:
        with Pool(min(workers, len(jobs)), initializer=_init_worker,
                  initargs=(cache_path, level)) as pool:
            results = pool.map(_run_job, jobs)
    return [report for reports in results for report in reports]


# -- commands -----------------------------------------------------------------------

def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.instance)
    instance = DualityInstance.from_mapping(config.instance)
    if args.suite:
        suites = parse_suites(",".join(args.suite))
    else:
        suites = parse_suites(config.run.get("suites", "all"))
    jobs = []
    for suite in suites:
        settings = settings_for(suite, config, args)
        warnings = validate_precision_parameters(settings.window, settings.order_for(suite),
                                                 settings.length, settings.samples_for(suite),
                                                 instance.ring.cardinality)
        for w in warnings:
            logger.warning("%s: %s", suite, w)
        if has_errors(warnings):
            raise ConfigError(f"invalid precision for {suite}")
        jobs.append((suite, config.instance, settings))

    cache_path = cache_file(args.cache) if args.cache else None
    if cache_path and os.path.exists(cache_path):
        default_cache.load(cache_path)
    workers = args.jobs if args.jobs is not None else _int(config.run.get("jobs", 1), "jobs")
    reports = _run_jobs(jobs, workers, cache_path, logging.getLogger().level)

    seed = jobs[0][2].seed if jobs else 0
    data = export_report(reports, instance.summary(), suites, seed, timings=args.timings)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(dumps_report(data))
        logger.info("wrote report %s", args.report)
    print(format_summary(reports))
    return EXIT_OK if all(r.outcome != "fail" for r in reports) else EXIT_FAIL


def cache_file(path: str) -> str:
    """A cache directory holds CACHE_FILE; anything else is the cache file itself."""
    if os.path.isdir(path) or path.endswith(os.sep):
        return os.path.join(path, CACHE_FILE)
    return path


def build_plan(primes: Optional[Sequence[int]], depth: Optional[int],
               kinds: Optional[Sequence[str]]) -> List[Tuple[int, int, List[str]]]:
    """(p, depth, kinds) per prime, checked against DEPTH_LIMITS before anything is built."""
    kinds = list(dict.fromkeys(kinds or KINDS))
    plan = []
    for p in primes or sorted(DEPTH_LIMITS):
        if p not in DEPTH_LIMITS:
            raise ConfigError(f"no structure depth limit for p={p}; "
                              f"cacheable primes are {', '.join(map(str, sorted(DEPTH_LIMITS)))}")
        limit = DEPTH_LIMITS[p]
        n = limit if depth is None else depth
        if not 1 <= n <= limit:
            raise ConfigError(f"depth {n} for p={p} is outside 1..{limit}")
        plan.append((p, n, kinds))
    return plan


def cmd_cache_build(args: argparse.Namespace) -> int:
    path = cache_file(args.cache)
    depths = {}
    for p, depth, kinds in build_plan(args.prime, args.depth, args.kind):
        for kind in kinds:
            table = default_cache.table(p, kind, depth)
            logger.info("p=%d %s: %d polynomials", p, kind, len(table.polynomials))
            depths[(p, kind)] = depth
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    default_cache.save(path, depths=depths)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_cache_verify(args: argparse.Namespace) -> int:
    path = cache_file(args.cache)
    if not os.path.exists(path):
        raise ConfigError(f"no cache file at {path}")
    default_cache.load(path, verify=True)
    print(f"{path}: all records satisfy their ghost identities")
    return EXIT_OK


def _show_structure(args: argparse.Namespace) -> int:
    if args.kind not in KINDS:
        raise ConfigError(f"unknown polynomial kind {args.kind!r}; expected one of {', '.join(KINDS)}")
    if args.prime is None or args.index is None or args.index < 0:
        raise ConfigError("--structure needs --prime and a non-negative --index")
    poly = default_cache.polynomial(args.prime, args.kind, args.index)
    print(format_record(args.prime, args.kind, args.index, poly))
    return EXIT_OK


def cmd_show(args: argparse.Namespace) -> int:
    if args.kind is not None:
        return _show_structure(args)
    config = load_config(args.instance)
    instance = DualityInstance.from_mapping(config.instance)
    print(instance.summary())
    psi = psi_polynomial(instance)
    print(f"psi(X) = {psi.to_text(instance.ring)}")
    try:
        witness = check_divisibility(instance, instance.l + 1)
        print(f"a = {witness.a_lift.to_text()}  (in A: {witness.a.to_text()})")
        for k, quotient in enumerate(witness.quotients):
            print(f"  quotient k={k}: {quotient}")
    except WittlabError as exc:
        print(f"a: {type(exc).__name__}: {exc}")
    hopf = nl_hopf(instance)
    print(f"rank = {hopf.rank}")
    index, steps = hopf.nilpotency()
    if index is None:
        print(f"X is not nilpotent (powers repeat after {steps} steps)")
    else:
        print(f"X^{index} = 0")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wittlab",
        description="Witt vectors, deformed Artin-Hasse exponentials and the Cartier dual of N_l")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="More logging (-v info, -vv debug).")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None,
                        help="Explicit log level; overrides -v.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run verification suites on an instance file.")
    run.add_argument("--instance", required=True, help="INI instance file.")
    run.add_argument("--suite", action="append",
                     help=f"Suite to run ({', '.join(SUITES)} or all); repeatable.")
    run.add_argument("--window", type=int, default=None, help="Witt window n (W_{n+1} -> W_n).")
    run.add_argument("--order", type=int, default=None, help="Series order N.")
    run.add_argument("--length", type=int, default=None, help="Symbolic vector length.")
    run.add_argument("--samples", type=int, default=None, help="Random samples per sampled check.")
    run.add_argument("--seed", type=int, default=None, help="Random seed.")
    run.add_argument("--jobs", type=int, default=None, help="Worker processes.")
    run.add_argument("--report", default=None, help="Write the JSON report here.")
    run.add_argument("--cache", default=None,
                     help=f"Cache directory (holding {CACHE_FILE}) or cache file to preload.")
    run.add_argument("--timings", action="store_true", help="Keep check timings in the report.")
    run.set_defaults(func=cmd_run)

    build = subparsers.add_parser("cache-build", help="Build and save structure polynomials.")
    build.add_argument("--cache", required=True,
                       help=f"Output directory (writes {CACHE_FILE}) or cache file.")
    build.add_argument("--prime", type=int, action="append", help="Prime to build; repeatable.")
    build.add_argument("--depth", type=int, default=None,
                       help="Polynomials per kind; at most the depth limit for the prime.")
    build.add_argument("--kind", action="append", choices=KINDS,
                       help="Polynomial kind to build; repeatable, default all.")
    build.set_defaults(func=cmd_cache_build)

    verify = subparsers.add_parser("cache-verify", help="Check every cache record against its ghost identity.")
    verify.add_argument("--cache", required=True,
                        help=f"Cache directory (holding {CACHE_FILE}) or cache file to verify.")
    verify.set_defaults(func=cmd_cache_verify)

    show = subparsers.add_parser("show", help="Print an instance or one structure polynomial.")
    target = show.add_mutually_exclusive_group(required=True)
    target.add_argument("--instance", help="INI instance file.")
    target.add_argument("--structure", dest="kind", help=f"Polynomial kind ({', '.join(KINDS)}).")
    show.add_argument("--prime", type=int, default=None, help="Prime for --structure.")
    show.add_argument("--index", type=int, default=None, help="Polynomial index for --structure.")
    show.set_defaults(func=cmd_show)
    return parser


def _log_level(args: argparse.Namespace) -> int:
    if args.log_level:
        return getattr(logging, args.log_level)
    return {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=_log_level(args), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except WittlabError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except Exception:
        logger.exception("unexpected failure")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

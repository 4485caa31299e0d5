import os
import sys
import json
import logging
import argparse
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Configure logging with UTF-8 encoding (stderr, so --json output stays clean)
log_level = os.getenv('LOG_LEVEL', 'INFO')
logging.basicConfig(
    level=getattr(logging, log_level),
    format='%(asctime)s - %(levelname)s - %(name)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stderr),
        logging.FileHandler('pseudogroup_sheaf.log', encoding='utf-8')
    ]
)
logger = logging.getLogger(__name__)

# Import project modules
from corpus import SPACE, PRESHEAF, PSEUDOGROUP, GROUPOID, build_corpus
from groupoids.groupoid import (
    check_groupoid, sections_category, groupoid_from_pseudogroup, roundtrip_groupoid, roundtrip_pseudogroup,
    unit_groupoid, pair_groupoid, coarse_unit_groupoid,
)
from pseudogroups.groups import cyclic_group, trivial_group
from pseudogroups.pseudogroup import (
    T1, NON_T1, build_homeo_l, from_group_sheaf, constant_group_sheaf, hom_presheaf,
    check_category, check_pre_pseudogroup,
)
from renderers import DOT_KINDS, space_to_dot, etale_to_dot, groupoid_to_dot, write_dot
from storage import ReportStorage, load_instance, dump_instance, instance_digest
from suites import SuiteManager, summarize
from topology.finspace import sierpinski_space, discrete_space, chain_space
from topology.sheaves import check_presheaf, constant_presheaf, etale_space
from utils.config import Config
from utils.errors import ToolkitError, SchemaError, SuiteUnavailable, MissingUnderlyingFunctor, INPUT_ERRORS
from utils.reporting import Report, CheckResult, PASS, FAIL, ERROR

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_INPUT = 2

DIRECTIONS = ('g2p2g', 'p2g2p')

# Built-in instances written by `generate`
EXAMPLES: Dict[str, Tuple[str, Callable[[], Any]]] = {
    'sierpinski': (SPACE, sierpinski_space),
    'discrete2': (SPACE, lambda: discrete_space(2)),
    'chain3': (SPACE, lambda: chain_space(3)),
    'constant-sierpinski': (PRESHEAF, lambda: constant_presheaf(sierpinski_space(), ['a', 'b'], name='constant')),
    'homeo-discrete2': (PSEUDOGROUP, lambda: build_homeo_l(discrete_space(2))),
    'homeo-sierpinski': (PSEUDOGROUP, lambda: build_homeo_l(sierpinski_space())),
    'trivial-sheaf': (PSEUDOGROUP, lambda: from_group_sheaf(constant_group_sheaf(discrete_space(2), trivial_group()))),
    'z2-sheaf': (PSEUDOGROUP, lambda: from_group_sheaf(constant_group_sheaf(discrete_space(1), cyclic_group(2)))),
    'pair2': (GROUPOID, lambda: pair_groupoid(2)),
    'unit-sierpinski': (GROUPOID, lambda: unit_groupoid(sierpinski_space())),
    'coarse-unit2': (GROUPOID, lambda: coarse_unit_groupoid(2)),
}


def print_banner():
    """Print application banner."""
    banner = """
    ╔═══════════════════════════════════════════════════════════════╗
    ║                                                               ║
    ║        ÉTALE GROUPOIDS & PSEUDOGROUP SHEAVES - Toolkit        ║
    ║                                                               ║
    ║   Commands:                                                   ║
    ║   • validate   structural checks of an instance file          ║
    ║   • check      one verification suite                         ║
    ║   • roundtrip  groupoid ↔ pseudogroup sheaf                   ║
    ║   • corpus     full battery over a seeded corpus              ║
    ║   • dot        Hasse diagrams, germ bundles, arrow graphs     ║
    ║                                                               ║
    ╚═══════════════════════════════════════════════════════════════╝
    """
    print(banner)


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_validate(path: str, config: Config) -> Report:
    """
    Run the structural checks that fit the instance in `path`.

    Load-time topology violations (a family not closed under union, ...)
    are reported as failures with their witness rather than input errors.
    """
    report = Report(command='validate', target=path)
    try:
        kind, value = load_instance(path)
    except INPUT_ERRORS:
        raise
    except ToolkitError as e:
        report.add(CheckResult(name='load', status=FAIL,
                               witness=e.to_dict()))
        return report

    report.add(CheckResult(name=f"{kind}.load", status=PASS))
    if kind == SPACE:
        report.add(CheckResult(name='space.axioms', status=PASS,
                               details={'points': len(value.points), 'opens': len(value.opens)}))
    elif kind == PRESHEAF:
        report.results.extend(check_presheaf(value).to_results('presheaf.'))
    elif kind == PSEUDOGROUP:
        report.results.extend(_validate_pseudogroup(value))
    else:
        report.results.extend(check_groupoid(value).to_results('groupoid.'))
    _record_digest(report, kind, value)
    return report


def _record_digest(report: Report, kind: str, value: Any) -> None:
    """Instances whose tables cannot be exported (a missing composition, ...) get no digest."""
    try:
        report.instance_digests[value.name or kind] = instance_digest(kind, value)
    except ToolkitError as e:
        logger.warning(f"No digest for {value.name or kind}: {type(e).__name__}: {e}")


def _validate_pseudogroup(C) -> List[CheckResult]:
    if C.space.is_t1:
        return check_pre_pseudogroup(C, T1).to_results('pseudogroup.')
    try:
        return check_pre_pseudogroup(C, NON_T1).to_results('pseudogroup.')
    except MissingUnderlyingFunctor:
        results = check_category(C).to_results('pseudogroup.')
        for r in results:
            r.details.setdefault('notes', []).append(
                "non-T1 space without underlying maps: only the category laws were checked")
        return results


def cmd_check(path: str, suite: str, config: Config) -> Report:
    """
    Run one named suite on an instance file.

    Raises:
        SuiteUnavailable: unknown suite, or the instance lacks what it needs.
    """
    kind, value = load_instance(path)
    manager = SuiteManager(config)
    report = Report(command='check', target=path, summary={'suite': suite, 'kind': kind})
    report.results.extend(manager.run_suite(suite, value, kind))
    _record_digest(report, kind, value)
    return report


def cmd_roundtrip(path: str, direction: str, config: Config) -> Report:
    """
    g2p2g: étale groupoid → sections → germs; p2g2p: pseudogroup sheaf → germs → sections.

    NotEtale and NotAPseudogroupSheaf are recorded as failures with their witness.
    """
    if direction not in DIRECTIONS:
        raise SchemaError(f"Unknown direction {direction!r}", direction=direction, expected=list(DIRECTIONS))
    kind, value = load_instance(path)
    expected = GROUPOID if direction == 'g2p2g' else PSEUDOGROUP
    if kind != expected:
        raise SchemaError(f"Direction {direction} needs a {expected} file, got a {kind}",
                          direction=direction, kind=kind)

    report = Report(command='roundtrip', target=path, summary={'direction': direction})
    _record_digest(report, kind, value)
    if direction == 'g2p2g':
        dialect = T1 if value.base.is_t1 else NON_T1
        run = lambda: roundtrip_groupoid(value, dialect)
        sizes = {'arrows': len(value.arrows.points)}
    else:
        if not value.space.is_t1 and not value.has_underlying:
            raise SuiteUnavailable("Round trip off T1 needs stored underlying maps", pseudogroup=value.name)
        dialect = T1 if value.space.is_t1 else NON_T1
        run = lambda: roundtrip_pseudogroup(value, dialect)
        sizes = {}

    try:
        witness = run()
    except ToolkitError as e:
        logger.warning(f"Round trip {direction} failed: {type(e).__name__}: {e}")
        report.add(CheckResult(name=f"roundtrip.{direction}", status=FAIL,
                               witness=e.to_dict(), details={'dialect': dialect}))
        return report

    details = {'dialect': dialect, **sizes, **witness.to_dict()}
    if direction == 'g2p2g':
        details['germs'] = len(set(witness.arrow_map.values()))
    report.add(CheckResult(name=f"roundtrip.{direction}", status=PASS if witness.verified else FAIL,
                           details=details))
    return report


def cmd_corpus(config: Config, parallel: Optional[bool] = None) -> Report:
    """
    Build the seeded corpus, run every battery on it, and run the mutation smoke test.

    Per-instance budget refusals and errors are recorded; the run continues.
    """
    manager = SuiteManager(config)

    logger.info("\n[STEP 1] Building corpus...")
    instances = build_corpus(config)

    logger.info("\n[STEP 2] Running suites and batteries...")
    results = manager.run_corpus(instances, parallel=parallel)

    logger.info("\n[STEP 3] Running mutation smoke test...")
    mutations = manager.run_mutations()
    results.extend(mutations)

    logger.info("\n[STEP 4] Computing instance digests...")
    digests = {}
    for inst in instances:
        try:
            digests[inst.name] = instance_digest(inst.kind, inst.value)
        except ToolkitError as e:
            logger.error(f"  {inst.name}: cannot export - {e}")

    kinds: Dict[str, int] = {}
    for inst in instances:
        kinds[inst.kind] = kinds.get(inst.kind, 0) + 1
    summary = {
        'seed': config.seed,
        'max_points': config.max_points,
        'instances': kinds,
        'suites': summarize(results),
        'mutations_detected': sum(1 for r in mutations if r.status == PASS),
        'mutations_total': len(mutations),
    }
    return Report(command='corpus', target=f"seed={config.seed}", results=results,
                  instance_digests=digests, summary=summary)


def cmd_dot(path: str, kind: str, output: str) -> str:
    """
    Write a DOT graph of an instance file.

    space: the specialization Hasse diagram of any instance's base space.
    etale: the étale space of a presheaf, or of C(-, X) for a pseudogroup or
        the section category of a groupoid.
    groupoid: the arrow diagram of a groupoid, or of the germ groupoid of a
        pseudogroup sheaf.
    """
    if kind not in DOT_KINDS:
        raise SchemaError(f"Unknown DOT kind {kind!r}", kind=kind, expected=list(DOT_KINDS))
    instance_kind, value = load_instance(path)

    if kind == 'space':
        space = {SPACE: lambda v: v, PRESHEAF: lambda v: v.space,
                 PSEUDOGROUP: lambda v: v.space, GROUPOID: lambda v: v.base}[instance_kind](value)
        text = space_to_dot(space)
    elif kind == 'etale':
        if instance_kind == PRESHEAF:
            presheaf = value
        elif instance_kind == PSEUDOGROUP:
            presheaf = hom_presheaf(value, value.space.full)
        elif instance_kind == GROUPOID:
            C = sections_category(value)
            presheaf = hom_presheaf(C, C.space.full)
        else:
            raise SchemaError("An étale space needs a presheaf, pseudogroup or groupoid", kind=instance_kind)
        text = etale_to_dot(etale_space(presheaf))
    else:
        if instance_kind == GROUPOID:
            G = value
        elif instance_kind == PSEUDOGROUP:
            G = groupoid_from_pseudogroup(value)
        else:
            raise SchemaError("An arrow diagram needs a groupoid or pseudogroup sheaf", kind=instance_kind)
        text = groupoid_to_dot(G)

    written = write_dot(text, output)
    logger.info(f"DOT graph ({kind}) written to {written}")
    return written


def cmd_generate(example: str, output: str) -> str:
    if example not in EXAMPLES:
        raise SchemaError(f"Unknown example {example!r}", example=example, expected=sorted(EXAMPLES))
    kind, builder = EXAMPLES[example]
    return dump_instance(kind, builder(), output)


# ----------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Étale groupoid / pseudogroup sheaf toolkit')
    parser.add_argument('--json', action='store_true', help='Print the report as JSON')
    parser.add_argument('--report', help='Write the report to this path instead of REPORT_DIR')
    parser.add_argument('--no-banner', action='store_true', help='Skip the banner')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='Structural checks of an instance file')
    p.add_argument('path')

    p = sub.add_parser('check', help='Run one verification suite')
    p.add_argument('path')
    p.add_argument('--suite', required=True, help='prop11, def21, prop24, prop25, prop45 or universality')

    p = sub.add_parser('roundtrip', help='Groupoid ↔ pseudogroup sheaf round trip')
    p.add_argument('path')
    p.add_argument('--direction', required=True, help='g2p2g or p2g2p')

    p = sub.add_parser('corpus', help='Run every battery over the seeded corpus')
    p.add_argument('--seed', type=int, help='Corpus seed (default: SEED)')
    p.add_argument('--max-points', type=int, help='Largest enumerated space (default: MAX_POINTS)')
    p.add_argument('--workers', type=int, help='Parallel workers (default: WORKERS)')

    p = sub.add_parser('dot', help='Write a DOT graph')
    p.add_argument('path')
    p.add_argument('--kind', required=True, help='space, etale or groupoid')
    p.add_argument('-o', '--output', required=True)

    p = sub.add_parser('generate', help='Write a built-in instance to JSON')
    p.add_argument('example', help=', '.join(sorted(EXAMPLES)))
    p.add_argument('-o', '--output', required=True)
    return parser


def _error_report(command: str, target: str, error: ToolkitError) -> Report:
    report = Report(command=command, target=target)
    report.add(CheckResult(name='input', status=ERROR,
                           witness=error.to_dict()))
    return report


def _emit(report: Report, args, storage: Optional[ReportStorage]) -> None:
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, ensure_ascii=False, sort_keys=True))
    else:
        print(report.render_text())
    if storage is not None:
        storage.save(report, args.report)


def main(args=None) -> int:
    """
    Main execution flow.

    Returns:
        0 when every check passes, 1 on check failures, 2 on input errors.
    """
    parser = build_parser()
    args = parser.parse_args(args)

    if not args.no_banner and not args.json:
        print_banner()

    logger.info("=" * 60)
    logger.info(f"Starting {args.command}")
    logger.info(f"Run time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    logger.info("=" * 60)

    # Load configuration
    config = Config()
    if args.command == 'corpus':
        if args.seed is not None:
            config.seed = args.seed
        if args.max_points is not None:
            config.max_points = args.max_points
        if args.workers is not None:
            config.workers = args.workers
    issues = config.validate()
    if issues:
        for issue in issues:
            logger.error(f"Configuration: {issue}")
        return EXIT_INPUT

    target = getattr(args, 'path', None) or getattr(args, 'example', '') or f"seed={config.seed}"

    # Commands that only write files
    if args.command in ('dot', 'generate'):
        try:
            if args.command == 'dot':
                written = cmd_dot(args.path, args.kind, args.output)
            else:
                written = cmd_generate(args.example, args.output)
        except ToolkitError as e:
            logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
            _emit(_error_report(args.command, target, e), args, None)
            return EXIT_INPUT
        print(written)
        return EXIT_OK

    storage = ReportStorage(config.report_dir)

    logger.info(f"\n[STEP 1] {args.command} {target}")
    try:
        if args.command == 'validate':
            report = cmd_validate(args.path, config)
        elif args.command == 'check':
            report = cmd_check(args.path, args.suite, config)
        elif args.command == 'roundtrip':
            report = cmd_roundtrip(args.path, args.direction, config)
        else:
            report = cmd_corpus(config)
    except ToolkitError as e:
        # Anything escaping a command is about the input, not about the checks
        logger.error(f"Input error: {type(e).__name__}: {e}")
        _emit(_error_report(args.command, target, e), args, storage)
        return EXIT_INPUT

    _emit(report, args, storage)

    # Summary
    counts = report.counts()
    logger.info("\n" + "=" * 60)
    logger.info(f"{args.command.upper()} COMPLETE")
    logger.info("=" * 60)
    for status, count in sorted(counts.items()):
        logger.info(f"{status}: {count}")
    logger.info(f"Digest: {report.digest()}")
    logger.info("=" * 60)

    return EXIT_OK if report.ok else EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())

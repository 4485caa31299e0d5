import os
import sys
import logging
import tempfile
from datetime import datetime

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def print_header(text):
    print(f"\n{'='*60}")
    print(f" {text}")
    print(f"{'='*60}")


def test_environment():
    """Test environment configuration."""
    print_header("1. Testing Environment Configuration")

    from dotenv import load_dotenv
    load_dotenv()

    optional = ['SEED', 'MAX_POINTS', 'COVER_BUDGET', 'MAX_HOM_SIZE', 'CATEGORY_CHECK_BUDGET',
                'REPORT_DIR', 'WORKERS', 'ENABLED_SUITES', 'LOG_LEVEL']

    print("\nOptional variables:")
    for var in optional:
        value = os.getenv(var)
        if value:
            print(f"  ✓ {var}: {value[:50]}")
        else:
            print(f"  - {var}: (using default)")

    from utils.config import Config
    config = Config()
    issues = config.validate()
    if issues:
        for issue in issues:
            print(f"  ✗ {issue}")
        return False

    print(f"\n  ✓ Configuration valid (seed {config.seed}, max points {config.max_points})")
    return True


def test_spaces():
    """Test finite spaces."""
    print_header("2. Testing Finite Spaces")

    try:
        from topology.finspace import sierpinski_space, local_homeos
        from corpus import enumerate_spaces

        space = sierpinski_space()
        print(f"  ✓ Sierpinski space: {len(space.opens)} opens, T1={space.is_t1}")

        counts = {n: len(enumerate_spaces(n)) for n in (1, 2, 3)}
        print(f"  ✓ Spaces up to homeomorphism (cumulative): {counts}")
        if counts != {1: 1, 2: 4, 3: 13}:
            print("  ✗ Unexpected space counts")
            return False

        maps = list(local_homeos(space, space.full, space.full))
        print(f"  ✓ Local homeomorphisms X → X: {len(maps)}")
        return True
    except Exception as e:
        print(f"  ✗ Space error: {e}")
        return False


def test_sheaves():
    """Test presheaves and sheafification."""
    print_header("3. Testing Sheaves")

    try:
        from topology.finspace import sierpinski_space
        from topology.sheaves import constant_presheaf, is_sheaf, sheafify

        space = sierpinski_space()
        P = constant_presheaf(space, ['a', 'b'])
        verdict = is_sheaf(P)
        print(f"  ✓ Constant presheaf is a sheaf: {bool(verdict)} {verdict.witness}")

        result = sheafify(P)
        sizes = {str(sorted(U)): result.sheaf.size(U) for U in space.opens}
        print(f"  ✓ Sheafification sizes: {sizes}")
        return bool(is_sheaf(result.sheaf))
    except Exception as e:
        print(f"  ✗ Sheaf error: {e}")
        return False


def test_pseudogroups():
    """Test pseudogroup sheaves and sheafification."""
    print_header("4. Testing Pseudogroups")

    try:
        from topology.finspace import discrete_space
        from pseudogroups.pseudogroup import build_homeo_l, injective_truncation, evaluate_conditions
        from pseudogroups.ppg_sheafify import ppg_sheafify

        C = build_homeo_l(discrete_space(2))
        report = evaluate_conditions(C)
        print(f"  ✓ Homeo^l conditions: {'ok' if report.ok else 'failing'}")

        truncated = injective_truncation(C)
        chat, _unit = ppg_sheafify(truncated)
        X = C.space.full
        print(f"  ✓ Sheafified truncation: |C(X,X)| {len(truncated.hom(X, X))} → {len(chat.hom(X, X))}")
        return report.ok and len(chat.hom(X, X)) == len(C.hom(X, X))
    except Exception as e:
        print(f"  ✗ Pseudogroup error: {e}")
        return False


def test_groupoids():
    """Test étale groupoids and round trips."""
    print_header("5. Testing Groupoids")

    try:
        from groupoids.groupoid import pair_groupoid, coarse_unit_groupoid, is_etale, roundtrip_groupoid

        G = pair_groupoid(2)
        witness = roundtrip_groupoid(G)
        print(f"  ✓ pair2 round trip verified: {witness.verified}")

        verdict = is_etale(coarse_unit_groupoid(2))
        if verdict:
            print("  ✗ Coarse unit groupoid reported as étale")
            return False
        print(f"  ✓ Coarse unit groupoid rejected: {verdict.witness}")
        return witness.verified
    except Exception as e:
        print(f"  ✗ Groupoid error: {e}")
        return False


def test_suites():
    """Test the suite manager and the mutation smoke test."""
    print_header("6. Testing Suites")

    try:
        from utils.config import Config
        from suites import SuiteManager
        from corpus import PSEUDOGROUP
        from pseudogroups.pseudogroup import build_homeo_l
        from topology.finspace import discrete_space

        config = Config()
        manager = SuiteManager(config)
        print(f"  ✓ Suites enabled: {manager.get_enabled_suites()}")

        C = build_homeo_l(discrete_space(2))
        all_good = True
        for name in manager.get_enabled_suites():
            results = manager.run_suite(name, C, PSEUDOGROUP)
            bad = [r.name for r in results if r.status not in ('pass', 'skipped-over-budget')]
            if bad:
                print(f"  ✗ {name}: {bad}")
                all_good = False
            else:
                print(f"  ✓ {name}: {len(results)} checks")

        mutations = manager.run_mutations()
        detected = sum(1 for r in mutations if r.status == 'pass')
        mark = '✓' if detected == len(mutations) else '⚠'
        print(f"\n  {mark} Mutations detected: {detected}/{len(mutations)}")
        return all_good and detected == len(mutations)
    except Exception as e:
        print(f"  ✗ Suite error: {e}")
        return False


def test_storage():
    """Test instance files and report storage."""
    print_header("7. Testing Storage")

    try:
        from storage import ReportStorage, dump_instance, load_instance
        from groupoids.groupoid import pair_groupoid
        from utils.reporting import Report, CheckResult

        with tempfile.TemporaryDirectory() as tmp:
            path = dump_instance('groupoid', pair_groupoid(2), os.path.join(tmp, 'pair2.json'))
            kind, G = load_instance(path)
            print(f"  ✓ Instance file: {kind} with {len(G.arrows.points)} arrows")

            storage = ReportStorage(os.path.join(tmp, 'reports'))
            report = Report(command='system', target='test')
            report.add(CheckResult(name='storage.smoke', status='pass'))
            written = storage.save(report)
            print(f"  ✓ Report saved: {os.path.basename(written)}")
            print(f"  ✓ Runs recorded: {storage.get_stats()['total_runs']}")
            return storage.has_digest(report.digest())
    except Exception as e:
        print(f"  ✗ Storage error: {e}")
        return False


def run_all_tests():
    """Run all tests."""
    print("\n" + "=" * 60)
    print(" ÉTALE GROUPOIDS & PSEUDOGROUP SHEAVES - Component Tests")
    print("=" * 60)
    print(f" Time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    results = {
        'Environment': test_environment(),
        'Spaces': test_spaces(),
        'Sheaves': test_sheaves(),
        'Pseudogroups': test_pseudogroups(),
        'Groupoids': test_groupoids(),
        'Suites': test_suites(),
        'Storage': test_storage(),
    }

    print_header("TEST SUMMARY")

    passed = sum(1 for r in results.values() if r)
    failed = len(results) - passed

    for test, result in results.items():
        status = "✓ PASS" if result else "✗ FAIL"
        print(f"  {test}: {status}")

    print(f"\nResults: {passed} passed, {failed} failed")

    if failed == 0:
        print("\n✓ All tests passed! Run: python main.py corpus")
    else:
        print("\n⚠ Some tests failed. Check configuration.")
        print("\nQuick fixes:")
        print("  1. pip install -r requirements.txt")
        print("  2. Unset budget overrides in .env")
        print("  3. Run: pytest -x to see the failing check")

    return failed == 0


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)

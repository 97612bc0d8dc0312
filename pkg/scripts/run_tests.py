#!/usr/bin/env python3
"""
Test runner script for balk_metrics.

Usage:
    python scripts/run_tests.py                    # Fast tests (no slow, no CLI)
    python scripts/run_tests.py --integration      # Include CLI tests
    python scripts/run_tests.py --slow             # Include full-prefix acceptance runs
    python scripts/run_tests.py -k "pretangent"    # Run specific tests
"""

import os
import subprocess
import sys
from pathlib import Path

# Project paths
PROJECT_ROOT = Path(__file__).parent.parent
PACKAGE_DIR = PROJECT_ROOT / "packages" / "balk_metrics"
TESTS_DIR = PACKAGE_DIR / "tests"


def run_tests(args: list = None) -> int:
    """Run pytest from the package directory with the given arguments."""
    cmd = [sys.executable, "-m", "pytest", str(TESTS_DIR), *(args or [])]

    full_env = os.environ.copy()
    full_env["PYTHONPATH"] = str(PROJECT_ROOT / "packages")

    print(f"Running: {' '.join(cmd)}")
    print("-" * 60)
    return subprocess.run(cmd, env=full_env, cwd=PACKAGE_DIR).returncode


def main():
    import argparse

    parser = argparse.ArgumentParser(description="Run balk_metrics tests")
    parser.add_argument(
        "--integration", "-i",
        action="store_true",
        help="Include CLI integration tests"
    )
    parser.add_argument(
        "--slow", "-s",
        action="store_true",
        help="Include slow acceptance tests"
    )
    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Verbose output"
    )
    parser.add_argument(
        "-k",
        type=str,
        help="Only run tests matching the given expression"
    )
    parser.add_argument(
        "extra_args",
        nargs="*",
        help="Additional pytest arguments"
    )

    args = parser.parse_args()

    excluded = []
    if not args.integration:
        excluded.append("not integration")
    if not args.slow:
        excluded.append("not slow")

    pytest_args = []
    if excluded:
        pytest_args.extend(["-m", " and ".join(excluded)])
    if args.verbose:
        pytest_args.append("-vv")
    if args.k:
        pytest_args.extend(["-k", args.k])
    pytest_args.extend(args.extra_args)

    sys.exit(run_tests(pytest_args))


if __name__ == "__main__":
    main()

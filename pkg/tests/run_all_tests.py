#!/usr/bin/env python3
"""
Master Test Runner for orient-subsidy
Runs each pytest suite in its own process and writes a JSON report
"""

import sys
import json
import time
import subprocess
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Any
import argparse

# Add project root to path
PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT))

SUITES = {
    "model": ["test_core_model.py", "test_envy_analysis.py", "test_subroutines.py"],
    "solvers": ["test_binary_solver.py", "test_monotone_solver.py", "test_additive_solver.py", "test_simple_solver.py"],
    "oracle": ["test_oracle.py", "test_instances.py"],
    "surface": ["test_cli.py", "test_api.py"],
}


class MasterTestRunner:
    def __init__(self, runslow: bool = False, timeout: int = 600):
        self.test_results = {}
        self.start_time = None
        self.total_duration = 0
        self.runslow = runslow
        self.timeout = timeout

    def log_test_suite(self, suite_name: str, status: str, details: str = "", duration: float = 0):
        """Log test suite results"""
        print(f"{'OK  ' if status == 'PASS' else 'FAIL'} {suite_name}: {status}")
        if details:
            print(f"   Details: {details}")
        if duration > 0:
            print(f"   Duration: {duration:.2f}s")
        print()

    def run_suite(self, suite_name: str) -> Dict[str, Any]:
        print(f" Running {suite_name} tests...")
        start_time = time.time()
        command = [sys.executable, "-m", "pytest", "-q", *SUITES[suite_name]]
        if self.runslow:
            command.append("--runslow")

        try:
            result = subprocess.run(
                command,
                cwd=PROJECT_ROOT / "tests",
                capture_output=True,
                text=True,
                timeout=self.timeout
            )
            duration = time.time() - start_time
            summary = result.stdout.strip().splitlines()[-1] if result.stdout.strip() else ""

            if result.returncode == 0:
                self.log_test_suite(suite_name, "PASS", summary, duration)
                return {"status": "PASS", "duration": duration, "summary": summary}
            self.log_test_suite(suite_name, "FAIL", summary, duration)
            return {"status": "FAIL", "duration": duration, "summary": summary, "output": result.stdout, "error": result.stderr}

        except subprocess.TimeoutExpired:
            self.log_test_suite(suite_name, "FAIL", f"timed out after {self.timeout}s")
            return {"status": "FAIL", "duration": self.timeout, "error": "Timeout"}
        except Exception as e:
            self.log_test_suite(suite_name, "FAIL", f"test runner error: {str(e)}")
            return {"status": "FAIL", "duration": 0, "error": str(e)}

    def generate_report(self) -> Dict[str, Any]:
        total_passed = sum(1 for result in self.test_results.values() if result["status"] == "PASS")
        failed_suites = [name for name, result in self.test_results.items() if result["status"] == "FAIL"]
        return {
            "test_execution": {
                "timestamp": datetime.now().isoformat(),
                "total_duration": self.total_duration,
                "test_suites_run": len(self.test_results),
                "test_suites_passed": total_passed,
                "runslow": self.runslow,
            },
            "test_suite_results": self.test_results,
            "summary": {
                "overall_status": "FAIL" if failed_suites else "PASS",
                "failed_suites": failed_suites,
            },
        }

    def run_all_tests(self, test_suites: List[str] = None) -> Dict[str, Any]:
        """Run all or specified test suites"""
        print(" Starting Master Test Execution...")
        print("=" * 60)

        self.start_time = time.time()
        for suite_name in test_suites or list(SUITES):
            self.test_results[suite_name] = self.run_suite(suite_name)
        self.total_duration = time.time() - self.start_time

        report = self.generate_report()
        print("=" * 60)
        print(f" Overall Results: {report['test_execution']['test_suites_passed']}/{report['test_execution']['test_suites_run']} test suites passed")
        print(f" Total Duration: {self.total_duration:.2f}s")
        print(f" Overall Status: {report['summary']['overall_status']}")
        return report


def main():
    """Main function to run master test suite"""
    parser = argparse.ArgumentParser(description="Master Test Runner for orient-subsidy")
    parser.add_argument("--suites", nargs="+", choices=list(SUITES),
                        help="Specific test suites to run (default: all)")
    parser.add_argument("--runslow", action="store_true", help="Include the full-scale acceptance runs")
    parser.add_argument("--timeout", type=int, default=600, help="Per-suite timeout in seconds")
    parser.add_argument("--output", default="comprehensive_test_report.json",
                        help="Output file for test report")
    args = parser.parse_args()

    runner = MasterTestRunner(runslow=args.runslow, timeout=args.timeout)
    report = runner.run_all_tests(args.suites)

    output_file = PROJECT_ROOT / "tests" / args.output
    with open(output_file, 'w') as f:
        json.dump(report, f, indent=2)

    print(f"\n Comprehensive report saved to: {output_file}")
    sys.exit(0 if report['summary']['overall_status'] == "PASS" else 1)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
Validation Suite Runner for FractalDrums

Runs every catalog entry (or the ones named) through the
expansion-versus-oracle comparison and prints one status line per entry.

Usage:
    python run_validation_suite.py                          # All entries
    python run_validation_suite.py --entry gasket --entry cantor_string
    python run_validation_suite.py --xlsx validation.xlsx   # Also write a workbook
"""

import os
import sys
import argparse

# Add the app directory to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import create_app
from app.catalog import get_entry, validate_entry
from app.errors import FractalError
from app.excel_export import generate_validation_excel
from app.models import RunConfig


def run_suite(app, names, cfg):
    reports, descriptors = [], {}
    for name in names:
        try:
            entry = get_entry(name, catalog=app.catalog)
            report = validate_entry(entry, K=cfg.k_trunc, resolution=cfg.pixel_resolution)
        except FractalError as e:
            print(f"❌ {name}: {type(e).__name__}: {e}")
            continue
        reports.append(report)
        descriptors[name] = entry
        status = "✅" if report.passed else "❌"
        print(f"{status} {name:<14} sup abs {report.sup_abs:.3e}  sup rel {report.sup_rel:.3e}  "
              f"({'relative' if report.relative else 'absolute'}, tol {report.tolerance:g})")
    return reports, descriptors


def main():
    parser = argparse.ArgumentParser(description="Validate tube formulas against oracles")
    parser.add_argument("--entry", action="append", default=[], help="Entry name (repeatable)")
    parser.add_argument("--K-trunc", dest="K", type=int, default=None, help="Rows |k| <= K kept")
    parser.add_argument("--xlsx", default=None, help="Write a workbook here")
    args = parser.parse_args()

    app = create_app()
    names = args.entry or sorted(app.catalog)
    cfg = RunConfig.from_settings(app.config, "validate", output_path=args.xlsx, k_trunc=args.K)

    print("🚀 FractalDrums - Validation Suite")
    print("=" * 50)
    reports, descriptors = run_suite(app, names, cfg)

    if args.xlsx:
        with open(args.xlsx, "wb") as file:
            file.write(generate_validation_excel(reports, descriptors).getvalue())
        print(f"\n📊 Workbook written to {args.xlsx}")

    failed = [r.entry for r in reports if not r.passed]
    print("\n" + "=" * 50)
    print(f"{len(reports) - len(failed)} of {len(names)} entries passed")
    if failed or len(reports) != len(names):
        sys.exit(4)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
Catalog Check for FractalDrums

Loads every catalog entry and prints its derived quantities, so a hand
edit of data/catalog.json can be checked before running the suite.

Usage:
    python catalog_check.py
    python catalog_check.py --path my_catalog.json
"""

import os
import sys
import argparse

# Add the app directory to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.catalog import get_entry, load_catalog
from app.errors import FractalError


def main():
    parser = argparse.ArgumentParser(description="Check the catalog file")
    parser.add_argument("--path", default=None, help="Catalog file (default data/catalog.json)")
    args = parser.parse_args()

    try:
        catalog = load_catalog(args.path)
    except FractalError as e:
        print(f"❌ {e}")
        sys.exit(e.exit_code)

    print(f"📚 {len(catalog)} entries")
    print(f"{'name':<14} {'N':>2} {'D':>10} {'|Omega|':>12} {'kappa':>6} {'strong':>6} {'t_max':>10}")
    bad = 0
    for name in sorted(catalog):
        try:
            entry = get_entry(name, catalog=catalog)
        except FractalError as e:
            print(f"❌ {name}: {type(e).__name__}: {e}")
            bad += 1
            continue
        lang = entry.languidity
        t_max = f"{entry.validity_t_max:.4g}" if entry.validity_t_max else "-"
        print(f"{name:<14} {entry.ambient_dim:>2} {entry.dimension:>10.6f} {entry.omega_volume:>12.6g} "
              f"{lang.kappa:>6g} {str(lang.strong):>6} {t_max:>10}")

    if bad:
        print(f"\n⚠️  {bad} entries could not be derived")
        sys.exit(4)
    print("\n✅ All entries derived")


if __name__ == "__main__":
    main()

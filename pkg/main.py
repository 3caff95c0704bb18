import sys

from app.cli import cli

if __name__ == '__main__':
    print(f"\n{'='*40}", file=sys.stderr)
    print("🚀 FractalDrums: zeta functions and tube formulas", file=sys.stderr)
    print(f"{'='*40}\n", file=sys.stderr)

    cli(prog_name="fractal-drums")

#!/usr/bin/env python
"""
Format code with isort and Black.
"""
import subprocess
import sys

TARGETS = ["src", "tests", "benchmark.py"]


def main():
    """Sort imports, then run Black over the codebase."""
    for tool in (["isort", *TARGETS], ["black", *TARGETS]):
        print(f"Running {tool[0]}...")
        try:
            result = subprocess.run(tool, check=True, capture_output=True, text=True)
        except subprocess.CalledProcessError as e:
            print(f"❌ Error running {tool[0]}: {e}")
            print(e.stdout)
            print(e.stderr)
            return 1
        print(result.stdout or result.stderr)
    print("✅ Formatting complete!")
    return 0


if __name__ == "__main__":
    sys.exit(main())

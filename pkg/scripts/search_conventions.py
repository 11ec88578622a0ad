"""
Print every gate-convention combination and whether the noiseless
algorithm works with it.

A combination passes when each oracle produces its marked superposition
and the decode step returns the tagged basis state with certainty.
"""

from __future__ import annotations

import sys
from pathlib import Path

# --- make sure project root is on sys.path ---
BASE_DIR = Path(__file__).resolve().parents[1]
if str(BASE_DIR) not in sys.path:
    sys.path.insert(0, str(BASE_DIR))

from transmon_grover.core.gates import CANONICAL, convention_space  # noqa: E402
from transmon_grover.core.grover import convention_passes  # noqa: E402


def main() -> int:
    passing = []
    for conventions in convention_space():
        ok = convention_passes(conventions)
        marker = " (canonical)" if conventions == CANONICAL else ""
        print(f"{'PASS' if ok else 'fail'}  {conventions.describe()}{marker}")
        if ok:
            passing.append(conventions)

    print(f"\n{len(passing)} of {len(convention_space())} combinations pass.")
    if CANONICAL not in passing:
        print("WARNING: the canonical conventions do not pass.")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

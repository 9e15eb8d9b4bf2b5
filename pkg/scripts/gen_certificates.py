"""Fill the planner's certificate store for cells no construction reaches.

Runs the randomized base-row hunter on every in-window (3, k, m) cell that the
constructive planner leaves open (skipping the excluded and open cases) and
writes ``mu3_k{K}_m{M}.json`` files.  Every base row is verified before saving.

Usage: python scripts/gen_certificates.py [--max-m 40] [--out DIR]
"""

import argparse
import sys
from pathlib import Path

from latin_trades.circulant import expand_base_row, verify_base_row
from latin_trades.planner import NONEXISTENT_TABLE, OPEN_TABLE, Planner, save_certificate
from latin_trades.search import SearchBudget, hunt_base_row
from latin_trades.trade import verify_trade

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src/latin_trades/data/certificates"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-m", type=int, default=40)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--seconds", type=float, default=60.0)
    args = ap.parse_args()
    planner = Planner(certificates={})
    missing = 0
    for m in range(4, args.max_m + 1):
        for k in range(4, m + 1):
            if (k, m) in NONEXISTENT_TABLE or (k, m) in OPEN_TABLE:
                continue
            if planner.build(k, m) is not None:
                continue
            out = hunt_base_row(3, k, m, SearchBudget(seconds=args.seconds), seed=k * 1000 + m)
            if out.verdict != "FOUND":
                print(f"(3,{k},{m}): {out.verdict}", file=sys.stderr)
                missing += 1
                continue
            b = out.witness
            assert verify_base_row(b).ok and verify_trade(expand_base_row(b)).ok
            path = save_certificate(args.out, k, m, b)
            print(f"(3,{k},{m}): {path.name} {b}", file=sys.stderr)
    return 1 if missing else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Write a seeded directory of instances for offline sweeps
"""

import argparse
import os
import sys
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from asylum.generator import PROFILES, generate_instance, parse_dims
from asylum.instance_io import write_instance


def generate_corpus(out_dir: Path, profile: str, dims: str, seeds: range, waiting_room: bool = False) -> int:
    """Write one canonical document per seed; returns the number written"""
    out_dir.mkdir(parents=True, exist_ok=True)
    for seed in seeds:
        inst = generate_instance(seed, profile=profile, dims=parse_dims(dims), waiting_room=waiting_room)
        write_instance(inst, out_dir / f"{profile}-{dims}-{seed:04d}.json")
    return len(seeds)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--profile", choices=PROFILES, default="unrestricted")
    ap.add_argument("--dims", default="3x2x2")
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--waiting-room", action="store_true")
    args = ap.parse_args()

    seeds = range(args.first_seed, args.first_seed + args.count)
    written = generate_corpus(Path(args.out_dir), args.profile, args.dims, seeds, args.waiting_room)
    print(f"✅ Wrote {written} {args.profile} instances to {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

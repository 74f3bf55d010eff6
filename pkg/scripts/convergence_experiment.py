#!/usr/bin/env python3
"""Frequency/mean convergence traces for the constructive streams.

Runs the greedy construction for a battery of frequency vectors and the
block construction for a mean-pinned and a frequency-pinned schedule,
writes one trace CSV per stream into --outdir, and prints the final-row
summary. Everything is deterministic; rerunning overwrites identical
files.

Usage:
    python scripts/convergence_experiment.py --outdir out/traces --max-n 100000
"""

import argparse
from pathlib import Path

from adiclab.construct import (
    ColumnSchedule,
    ProbabilityVector,
    ScheduleSpec,
    block_stream,
    greedy_stream,
    mean_target_stream,
)
from adiclab.stats import convergence_trace

GREEDY_VECTORS = ("1/4,1/4,1/4,1/4", "1/2,1/3,1/6,0", "1/10,2/10,3/10,4/10")


def checkpoints_up_to(max_n: int) -> tuple[int, ...]:
    points = [n for n in (10, 100, 1000, 10**4, 10**5, 10**6) if n <= max_n]
    return tuple(points) or (max_n,)


def build_streams():
    streams = {}
    for spec in GREEDY_VECTORS:
        tau = ProbabilityVector.parse(spec)
        streams[f"greedy_{spec.replace('/', '-').replace(',', '_')}"] = greedy_stream(tau)
    streams["mean_target_3-2"] = mean_target_stream("3/2")
    streams["block_mean_3-2_linear"] = block_stream(
        ColumnSchedule.constant(ProbabilityVector.parse("1/6,1/3,1/3,1/6")),
        ScheduleSpec.polynomial(1),
    )
    streams["block_freq_limit_quadratic"] = block_stream(
        ColumnSchedule.converging(ProbabilityVector.parse("1/2,1/2,0,0"), mix_digit=2),
        ScheduleSpec.polynomial(2),
    )
    return streams


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("out/traces"))
    parser.add_argument("--max-n", type=int, default=10**5)
    args = parser.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    points = checkpoints_up_to(args.max_n)
    print(f"checkpoints: {points}")
    for name, stream in build_streams().items():
        trace = convergence_trace(stream, points)
        path = args.outdir / f"{name}.csv"
        path.write_text(trace.to_csv())
        final = trace.reports[-1]
        freqs = " ".join(f"{float(f):.6f}" for f in final.freqs)
        print(f"{name:34s} n={final.n:>8d}  v=({freqs})  r_n={float(final.mean):.6f}")
    print(f"wrote {len(build_streams())} traces to {args.outdir}")


if __name__ == "__main__":
    main()

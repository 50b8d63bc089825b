#!/usr/bin/env python3
"""Small block-error-rate demo that runs in well under a minute.

Simulates a K=128 polar code under SSC and the bundled (3,6)-regular
quasi-cyclic LDPC code under layered min-sum over short SNR grids and
prints the standard CSV rows, so the output can be piped straight into
a plotting tool.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fecbench.channel import ChannelPoint
from fecbench.ldpc.code import derive_layers, expand_protograph, parse_protograph
from fecbench.polar.construction import design_snr_search
from fecbench.sim import (
    CSV_HEADER,
    LdpcScheme,
    PolarScheme,
    SimConfig,
    csv_line,
    run_bler_point,
)

CODES = Path(__file__).resolve().parents[1] / "data" / "codes"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-frames", type=int, default=20_000)
    ap.add_argument("--min-errors", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    config = SimConfig(max_frames=args.max_frames,
                       min_frame_errors=args.min_errors,
                       master_seed=args.seed)

    _, cons = design_snr_search(256, 128)
    polar = PolarScheme(cons)
    proto = parse_protograph((CODES / "reg36_z16.txt").read_text())
    code = expand_protograph(proto)
    ldpc = LdpcScheme(code, derive_layers(code, proto.z), max_iter=20,
                      code_id="reg36_z16")

    print(CSV_HEADER)
    for ebno in (1.5, 2.5, 3.5):
        point = run_bler_point("ssc", polar,
                               ChannelPoint.from_ebno(ebno, polar.rate), config)
        print(csv_line(polar.code_id, "ssc", point, polar.k))
    for ebno in (2.0, 3.0, 4.0):
        point = run_bler_point("lms", ldpc,
                               ChannelPoint.from_ebno(ebno, ldpc.rate), config)
        print(csv_line(ldpc.code_id, "lms", point, ldpc.k))
    return 0


if __name__ == "__main__":
    sys.exit(main())

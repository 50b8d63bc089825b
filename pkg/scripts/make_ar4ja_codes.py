#!/usr/bin/env python3
"""Generate the bundled parity-check files under data/codes/.

Everything here is deterministic (fixed seeds), so rerunning the script
reproduces the same files byte for byte.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from fecbench.ldpc.ar4ja import AR4JA_RATES, build_ar4ja_protograph, has_four_cycle
from fecbench.ldpc.code import (
    ProtographBase,
    SparseParityCheck,
    expand_protograph,
    format_alist,
    format_protograph,
)
from fecbench.ldpc.ar4ja import _assign_shifts  # reuse the seeded search

OUT = Path(__file__).resolve().parents[1] / "data" / "codes"

HAMMING_74_CHECKS = [
    [0, 2, 4, 6],
    [1, 2, 5, 6],
    [3, 4, 5, 6],
]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    for rate, k_b in AR4JA_RATES.items():
        for k in (1024, 4096, 16384):
            proto = build_ar4ja_protograph(rate, k, seed=1)
            assert not has_four_cycle(proto)
            tag = rate.replace("/", "")
            path = OUT / f"ar4ja_r{tag}_k{k}.txt"
            path.write_text(format_protograph(proto))
            code = expand_protograph(proto)
            per_iter = (5 * code.e - 3 * code.m) / k
            print(f"{path.name}: Z'={proto.z} N={code.n} M={code.m} "
                  f"E={code.e} ops/iter/K={per_iter}")

    # (3,6)-regular quasi-cyclic code; every check degree is even, so the
    # all-ones word is a codeword (used by the decoder-symmetry checks)
    adj = np.ones((3, 6), dtype=np.int64)
    shifts = _assign_shifts(adj, 16, seed=0)
    proto = ProtographBase(
        z=16,
        shifts=tuple(tuple(int(s) for s in row) for row in shifts),
        punctured_cols=(),
    )
    assert not has_four_cycle(proto)
    path = OUT / "reg36_z16.txt"
    path.write_text(format_protograph(proto))
    code = expand_protograph(proto)
    print(f"{path.name}: N={code.n} M={code.m} E={code.e}")

    code = SparseParityCheck.from_cn_adj(3, 7, HAMMING_74_CHECKS)
    path = OUT / "hamming74.alist"
    path.write_text(format_alist(code))
    print(f"{path.name}: N={code.n} M={code.m} E={code.e}")


if __name__ == "__main__":
    main()

"""Shared fixtures: the benchmark construction table, the K=1024 reference
curves, and the acceptance-report hook that prints one line per criterion
at the end of the run."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from fecbench.channel import ChannelPoint
from fecbench.ldpc.code import derive_layers, expand_protograph, parse_protograph
from fecbench.polar.codec import build_pruned_tree
from fecbench.polar.construction import design_snr_search, make_shortening
from fecbench.sim import LdpcScheme, PolarScheme, SimConfig, run_bler_point

DATA = Path(__file__).resolve().parents[1] / "data" / "codes"

# (k, n_mother, n_target, variant) -> expected SSC ops per info bit
BENCHMARK_TABLE = {
    (1024, 2048, 2048, "full"): 13.85,
    (1024, 2048, 1536, "natural"): 9.76,
    (1024, 2048, 1280, "natural"): 7.34,
    (4096, 8192, 8192, "full"): 15.87,
    (4096, 8192, 6144, "bit_reverse"): 11.66,
    (4096, 8192, 5120, "natural"): 8.71,
    (16384, 32768, 32768, "full"): 17.68,
    (16384, 32768, 24576, "bit_reverse"): 13.01,
    (16384, 32768, 20480, "bit_reverse"): 9.93,
    (32400, 65536, 64800, "bit_reverse"): 18.26,
    (43200, 65536, 64800, "natural"): 13.88,
    (51840, 65536, 64800, "natural"): 10.99,
}


@pytest.fixture(scope="session")
def benchmark_constructions():
    """Designed constructions + pruned trees for the 12 benchmark configs."""
    out = {}
    for (k, n_mother, n_target, variant) in BENCHMARK_TABLE:
        short = make_shortening(n_mother, n_target, variant)
        _, cons = design_snr_search(n_mother, k, shortening=short)
        out[(k, n_mother, n_target, variant)] = (cons, build_pruned_tree(cons))
    return out


def ldpc_scheme_from_file(path: Path, max_iter: int = 20) -> LdpcScheme:
    proto = parse_protograph(path.read_text())
    code = expand_protograph(proto)
    return LdpcScheme(code, derive_layers(code, proto.z),
                      puncture=proto.puncture_vars(), max_iter=max_iter,
                      code_id=path.stem)


@pytest.fixture(scope="session")
def ar4ja_k1024_schemes():
    return {rate: ldpc_scheme_from_file(DATA / f"ar4ja_r{rate.replace('/', '')}_k1024.txt")
            for rate in ("1/2", "2/3", "4/5")}


@pytest.fixture(scope="session")
def polar_k1024_r12_curves(benchmark_constructions):
    """SC and SSC curves for the rate-1/2 benchmark code on a shared seed
    (criterion 8's property set and criterion 9's rate-1/2 reference)."""
    cons, _ = benchmark_constructions[(1024, 2048, 2048, "full")]
    scheme = PolarScheme(cons)
    config = SimConfig(max_frames=100_000, min_frame_errors=100,
                       master_seed=2024, batch_size=1024)
    curves = {"scheme": scheme, "config": config}
    for decoder in ("sc", "ssc"):
        curves[decoder] = [
            run_bler_point(decoder, scheme, ChannelPoint.from_ebno(e, scheme.rate),
                           config)
            for e in (2.0, 2.4, 2.8, 3.2)
        ]
    return curves


@pytest.fixture(scope="session")
def polar_k1024_shortened_curves(benchmark_constructions):
    """SSC reference curves for the shortened rate-2/3 and rate-4/5 codes."""
    grids = {
        (1024, 2048, 1536, "natural"): (3.0, 3.4, 3.8),
        (1024, 2048, 1280, "natural"): (4.0, 4.4, 4.8),
    }
    out = {}
    for key, grid in grids.items():
        cons, _ = benchmark_constructions[key]
        scheme = PolarScheme(cons)
        config = SimConfig(max_frames=60_000, min_frame_errors=60,
                           master_seed=2024, batch_size=1024)
        out[key] = [
            run_bler_point("ssc", scheme, ChannelPoint.from_ebno(e, scheme.rate),
                           config)
            for e in grid
        ]
    return out


# ---------------------------------------------------------------------------
# Acceptance reporting


@pytest.fixture
def acceptance_report(request):
    lines = getattr(request.config, "_acceptance_lines", None)
    if lines is None:
        lines = {}
        request.config._acceptance_lines = lines

    def record(criterion: int, description: str, passed: bool, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        suffix = f" [{detail}]" if detail else ""
        lines[criterion] = f"criterion {criterion:2d}: {status} - {description}{suffix}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])

"""File I/O, seeded generators, pipelines, the claim suite and the CLI."""

from .generators import gen, rng_for
from .io import Instance, dump_instance, load_instance, loads_instance
from .pipeline import qlorentzian_trace
from .suite import CLAIMS, RunConfig, run_suite

__all__ = [
    "CLAIMS",
    "Instance",
    "RunConfig",
    "dump_instance",
    "gen",
    "load_instance",
    "loads_instance",
    "qlorentzian_trace",
    "rng_for",
    "run_suite",
]

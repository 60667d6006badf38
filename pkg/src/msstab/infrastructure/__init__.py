"""Infrastructure layer - Gaussian streams and output writers"""

from .counter_rng import CounterGaussianStream, gaussian_stream
from .writers import write_json, write_region_csv, write_trace_csv

__all__ = [
    "CounterGaussianStream",
    "gaussian_stream",
    "write_json",
    "write_region_csv",
    "write_trace_csv",
]

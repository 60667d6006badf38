"""CSV and JSON output for rasters, traces and verdicts"""

import csv
import json
from typing import Any, Dict, Mapping, TextIO

from ..core.regions import RegionRaster
from ..core.simulate import MsTrace

TRACE_HEADER = ("t", "scheme", "ms_norm", "diverged")
SYSTEM_TRACE_HEADER = TRACE_HEADER + ("ms_norm_first",)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_region_csv(raster: RegionRaster, stream: TextIO) -> int:
    """Write one row per (cell, scheme); returns the number of data rows"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(raster.header)
    count = 0
    for first, second, scheme, verdict in raster.rows():
        writer.writerow((_fmt(first), _fmt(second), scheme, verdict))
        count += 1
    return count


def write_trace_csv(traces: Mapping[str, MsTrace], stream: TextIO) -> int:
    """Write traces grouped by scheme; systems get an extra first-component column"""
    with_component = any(t.component_norm is not None for t in traces.values())
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SYSTEM_TRACE_HEADER if with_component else TRACE_HEADER)
    count = 0
    for trace in traces.values():
        flag = "1" if trace.diverged else "0"
        for i, t in enumerate(trace.times):
            row = [_fmt(t), trace.scheme, _fmt(trace.ms_norm[i]), flag]
            if with_component:
                row.append(_fmt(trace.component_norm[i]))
            writer.writerow(row)
            count += 1
    return count


def write_json(payload: Any, stream: TextIO) -> None:
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write("\n")


def complex_to_json(value: complex) -> Dict[str, float] | float:
    """Real numbers stay scalars; complex ones become {"re": .., "im": ..}"""
    value = complex(value)
    if value.imag == 0:
        return value.real
    return {"re": value.real, "im": value.imag}

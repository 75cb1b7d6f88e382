from ._cvlattice import (
    CvlError,
    GridSpec,
    cli,
    decompose,
    dxn_bin,
    generate_day,
    global_index,
    lat_bin,
    lon_bin,
    normalize_speed,
    normalize_volume,
    process_day,
    read_container,
    speedup,
    time_bin,
)

__all__ = [
    "CvlError",
    "GridSpec",
    "cli",
    "decompose",
    "dxn_bin",
    "generate_day",
    "global_index",
    "lat_bin",
    "lon_bin",
    "normalize_speed",
    "normalize_volume",
    "process_day",
    "read_container",
    "speedup",
    "time_bin",
]

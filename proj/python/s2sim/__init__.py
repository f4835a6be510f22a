"""SpiNNaker2 prototype simulator.

Configurations are plain dicts with the same layout as the JSON config
files read by the ``s2sim`` command-line tool.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    MacError,
    PacketError,
    cli,
    conv2d,
    decode_dnoc,
    decode_spinn,
    encode_dnoc,
    encode_spinn,
    energy_cycle,
    matmul,
    nef_synops,
    peak_gops,
    synfire_structure,
)

__all__ = [
    "ConfigError",
    "MacError",
    "PacketError",
    "cli",
    "compare_modes",
    "conv2d",
    "decode_dnoc",
    "decode_spinn",
    "default_config",
    "encode_dnoc",
    "encode_spinn",
    "energy_cycle",
    "load_config",
    "matmul",
    "nef_synops",
    "peak_gops",
    "run",
    "synfire_config",
    "synfire_structure",
]


def default_config():
    return json.loads(_core.default_config_json())


def synfire_config():
    """Calibrated synfire setup, the same as configs/synfire.json."""
    return json.loads(_core.synfire_config_json())


def load_config(path):
    with open(path, encoding="utf-8") as f:
        return json.loads(_core.normalize_config_json(f.read()))


def run(config=None, out_dir=None):
    """Run one simulation; returns {"metrics": {...}, "pl_ticks": [...], "spikes": n}.

    With out_dir set, the trace and CSV files are written there too.
    """
    text = json.dumps(config if config is not None else {})
    return json.loads(_core.run_json(text, str(out_dir) if out_dir else ""))


def compare_modes(config):
    """Run DVFS and only-PL3 with the same seed; returns both metric sets and the reductions."""
    return json.loads(_core.compare_modes_json(json.dumps(config)))

"""hetnet154: heterogeneous 802.15.4 interop toolkit and testbed simulator.

Frame-level interoperability between four 802.15.4 stacks
(Arduino/XBee, SunSPOT, TelosB, iSense), RSSI normalization across
their divergent reporting conventions, and a deterministic
discrete-event replay of the heterogeneous broadcast-beacon testbed
experiment with a CLI harness.
"""

__version__ = "0.1.0"

from .devices import (CalibrationConstraints, PlatformProfile, ProfileSet,
                      calibrate, default_profiles, load_profiles)
from .errors import HetnetError
from .frame import (Address, DispatchPrefix, FrameControl, MacFrame,
                    add_dispatch, crc16, decode_frame, encode_frame,
                    make_data_frame, strip_dispatch)
from .platforms import (InteropConfig, PlatformId, caps,
                        common_payload_limit, negotiate, unwrap,
                        validate_payload, wrap)
from .rssi import (PathLossModel, RawRssiReading, cc2420_to_dbm, normalize,
                   synth_rssi, telosb_fix)
from .simulator import (MetricsRecord, Scenario, channel_per,
                        default_scenario, rng_stream, run_scenario)

__all__ = [
    "Address", "CalibrationConstraints", "DispatchPrefix", "FrameControl",
    "HetnetError", "InteropConfig", "MacFrame", "MetricsRecord",
    "PathLossModel", "PlatformId", "PlatformProfile", "ProfileSet",
    "RawRssiReading", "Scenario", "add_dispatch", "calibrate", "caps",
    "cc2420_to_dbm", "channel_per", "common_payload_limit", "crc16",
    "decode_frame", "default_profiles", "default_scenario", "encode_frame",
    "load_profiles", "make_data_frame", "negotiate", "normalize",
    "rng_stream", "run_scenario", "strip_dispatch", "synth_rssi",
    "telosb_fix", "unwrap", "validate_payload", "wrap",
]

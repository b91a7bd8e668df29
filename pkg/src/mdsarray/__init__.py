"""MDS array codes with small sub-packetization and near-optimal repair."""

from .codec import Codeword, decode_erasures, encode, verify_mds, verify_optimal_update
from .config import CodeSpec
from .families import (build, build_c1, build_c2, build_c2prime, build_c3,
                       check_conditions)
from .gf import FieldSpec, find_field
from .lift import ArrayCode, LiftSpec, bandwidth_ratio, lift
from .msrbase import MsrCode, build_c0, build_yb1, build_yb2
from .repair import execute_repair, plan_repair, verify_repair_all

__all__ = [
    "ArrayCode", "CodeSpec", "Codeword", "FieldSpec", "LiftSpec", "MsrCode",
    "bandwidth_ratio", "build", "build_c0", "build_c1", "build_c2", "build_c2prime",
    "build_c3", "build_yb1", "build_yb2", "check_conditions", "decode_erasures",
    "encode", "execute_repair", "find_field", "lift", "plan_repair", "verify_mds",
    "verify_optimal_update", "verify_repair_all",
]

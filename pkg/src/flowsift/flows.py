"""Core flow record types and binary label semantics.

Traffic is classified per flow into exactly two classes. Botnet is the
positive class; normal and background traffic both map to Benign (the
toolkit evaluates binary detection only, so the distinction between
"normal" and "background" is intentionally collapsed — see README).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Label(enum.IntEnum):
    BENIGN = 0
    BOTNET = 1


@dataclass(frozen=True)
class RawFlow:
    """One NetFlow-like record as read from disk.

    Invariants (enforced by ingestion, assumed everywhere else):
    ``src_bytes <= tot_bytes``; ``duration``, ``tot_pkts``, ``tot_bytes``,
    ``src_bytes`` are all non-negative. Ports are ``None`` when the protocol
    carries none (ICMP) or the token was unparseable.
    """

    start_time: float
    duration: float
    protocol: str
    src_addr: str
    src_port: int | None
    dst_addr: str
    dst_port: int | None
    tot_pkts: int
    tot_bytes: int
    src_bytes: int
    label_raw: str = ""


def parse_label(label_raw: str) -> Label:
    """Map a free-text flow label to the binary class.

    A flow is Botnet iff the label contains the case-insensitive substring
    "botnet"; anything else (normal, background, empty) is Benign.
    """
    return Label.BOTNET if "botnet" in label_raw.lower() else Label.BENIGN

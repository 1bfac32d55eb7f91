"""Seeded synthetic flow generator for desk-scale end-to-end checks.

The benign population has heavy-tailed (log-normal-ish) volume statistics.
Botnet flows differ only through ``separation``-scaled parameter shifts:
each botnet flow is either a "beacon" (fewer packets, smaller
bytes-per-packet, uplink-heavy byte share) or a "flood" (the mirror image),
so the class signal is deliberately non-monotone in the ratio features —
easy for threshold-based learners, hard for a linear boundary. Protocol
and destination-port mixes tilt toward ICMP/TCP and toward scan-style
ports as separation grows. At separation 0 every class-conditional
distribution is identical by construction, so no learner can beat the
prevalence baseline.

The generator emits the same binetflow CSV format the ingestion module
reads, with exactly round(n * prevalence) botnet rows, in shuffled order,
and never emits a row the ingestion cleaning would drop.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import rng
from .flows import Label, RawFlow

PROTOCOLS = ("icmp", "rtp", "tcp", "udp")
_P_BENIGN = np.array([0.06, 0.04, 0.42, 0.48])
_P_BOT_TARGET = np.array([0.28, 0.01, 0.53, 0.18])

_PORT_CATALOG = (25, 53, 80, 123, 443, 445, 6667, 8080)
# catalog entries, then a registered-range and an ephemeral-range category
_P_PORT_BENIGN = np.array([0.04, 0.18, 0.14, 0.05, 0.16, 0.03, 0.005, 0.035,
                           0.23, 0.13])
_P_PORT_BOT = np.array([0.10, 0.08, 0.06, 0.01, 0.06, 0.09, 0.17, 0.03,
                        0.12, 0.28])

_MU_PKTS, _SIGMA_PKTS = 1.4, 1.1
_MU_BPP, _SIGMA_BPP = 4.2, 0.9
_MU_DUR, _SIGMA_DUR = 1.2, 1.3
_SIGMA_SHARE = 0.18
_BPP_SHIFT = 1.3      # in units of sigma, per mode
_PKTS_SHIFT = 0.6
_SHARE_SHIFT = 0.22   # absolute share shift per mode
_DUR_SHIFT = 0.3      # monotone, in units of sigma

_BASE_EPOCH = 1312970400.0  # 2011-08-10 10:00:00 UTC

BINETFLOW_HEADER = ("StartTime,Dur,Proto,SrcAddr,Sport,Dir,DstAddr,Dport,"
                    "State,sTos,dTos,TotPkts,TotBytes,SrcBytes,Label")


@dataclass(frozen=True)
class SynthConfig:
    n: int
    prevalence: float = 0.0248
    seed: int = 0
    separation: float = 1.0

    def __post_init__(self):
        if self.n < 100:
            raise ValueError("n must be at least 100")
        if not 0.0 < self.prevalence < 1.0:
            raise ValueError("prevalence must lie in (0, 1)")
        if self.separation < 0.0:
            raise ValueError("separation must be non-negative")


def _interp(p_from: np.ndarray, p_to: np.ndarray, separation: float) -> np.ndarray:
    t = min(separation, 1.0)
    p = (1.0 - t) * p_from + t * p_to
    return p / p.sum()


def _columns(cfg: SynthConfig) -> dict:
    n = cfg.n
    sep = cfg.separation
    n_bot = int(round(n * cfg.prevalence))
    y = np.zeros(n, np.int8)
    y[:n_bot] = 1
    bot = y == 1

    # one flat draw per row per quantity; class only changes the parameters
    u_proto = rng.stream(cfg.seed, rng.STREAM_SYNTH, 1).uniform(n)
    mode = rng.stream(cfg.seed, rng.STREAM_SYNTH, 2).integers(n, 2) * 2 - 1
    z_pkts = rng.stream(cfg.seed, rng.STREAM_SYNTH, 3).normal(n)
    z_bpp = rng.stream(cfg.seed, rng.STREAM_SYNTH, 4).normal(n)
    z_share = rng.stream(cfg.seed, rng.STREAM_SYNTH, 5).normal(n)
    z_dur = rng.stream(cfg.seed, rng.STREAM_SYNTH, 6).normal(n)
    u_cat = rng.stream(cfg.seed, rng.STREAM_SYNTH, 7).uniform(n)
    u_range = rng.stream(cfg.seed, rng.STREAM_SYNTH, 8).uniform(n)
    u_sport = rng.stream(cfg.seed, rng.STREAM_SYNTH, 9).uniform(n)
    addr = rng.stream(cfg.seed, rng.STREAM_SYNTH, 10).integers(4 * n, 254)
    u_label = rng.stream(cfg.seed, rng.STREAM_SYNTH, 11).uniform(n)
    variant = rng.stream(cfg.seed, rng.STREAM_SYNTH, 12).integers(n, 3)
    u_time = rng.stream(cfg.seed, rng.STREAM_SYNTH, 13).uniform(n)

    cdf_ben = np.cumsum(_P_BENIGN)
    cdf_bot = np.cumsum(_interp(_P_BENIGN, _P_BOT_TARGET, sep))
    proto_idx = np.where(
        bot,
        np.searchsorted(cdf_bot, u_proto, side="right"),
        np.searchsorted(cdf_ben, u_proto, side="right"),
    ).clip(0, len(PROTOCOLS) - 1)

    shift = bot * mode * sep
    log_pkts = _MU_PKTS + _SIGMA_PKTS * z_pkts + shift * _PKTS_SHIFT * _SIGMA_PKTS
    tot_pkts = np.maximum(1, np.rint(np.expm1(log_pkts))).astype(np.int64)
    log_bpp = np.clip(
        _MU_BPP + _SIGMA_BPP * z_bpp + shift * _BPP_SHIFT * _SIGMA_BPP, 0.0, None
    )
    tot_bytes = np.rint(np.expm1(log_bpp) * tot_pkts).astype(np.int64)
    share = np.clip(0.5 + shift * _SHARE_SHIFT + _SIGMA_SHARE * z_share, 0.0, 1.0)
    src_bytes = np.rint(share * tot_bytes).astype(np.int64)
    log_dur = np.clip(
        _MU_DUR + _SIGMA_DUR * z_dur + bot * sep * _DUR_SHIFT * _SIGMA_DUR, 0.0, None
    )
    duration = np.round(np.expm1(log_dur), 6)

    cdf_port_ben = np.cumsum(_P_PORT_BENIGN)
    cdf_port_bot = np.cumsum(_interp(_P_PORT_BENIGN, _P_PORT_BOT, sep))
    cat = np.where(
        bot,
        np.searchsorted(cdf_port_bot, u_cat, side="right"),
        np.searchsorted(cdf_port_ben, u_cat, side="right"),
    ).clip(0, _P_PORT_BENIGN.size - 1)
    dst_port = np.empty(n, np.int32)
    catalog = np.asarray(_PORT_CATALOG, np.int32)
    in_catalog = cat < catalog.size
    dst_port[in_catalog] = catalog[cat[in_catalog]]
    registered = cat == catalog.size
    dst_port[registered] = 1024 + (u_range[registered] * 48128).astype(np.int32)
    ephemeral = cat == catalog.size + 1
    dst_port[ephemeral] = 49152 + (u_range[ephemeral] * 16384).astype(np.int32)
    src_port = (49152 + u_sport * 16384).astype(np.int32)
    portless = proto_idx == PROTOCOLS.index("icmp")
    dst_port[portless] = -1
    src_port[portless] = -1

    start_time = np.round(_BASE_EPOCH + u_time * 86400.0, 6)
    addr = addr.reshape(4, n)

    perm = rng.stream(cfg.seed, rng.STREAM_SYNTH, 14).permutation(n)
    return {
        "y": y[perm],
        "mode": mode[perm],
        "proto_idx": proto_idx[perm],
        "tot_pkts": tot_pkts[perm],
        "tot_bytes": tot_bytes[perm],
        "src_bytes": src_bytes[perm],
        "duration": duration[perm],
        "src_port": src_port[perm],
        "dst_port": dst_port[perm],
        "start_time": start_time[perm],
        "addr": addr[:, perm],
        "u_label": u_label[perm],
        "variant": variant[perm],
    }


def _label_text(is_bot: bool, proto: str, u: float, variant: int) -> str:
    if is_bot:
        return f"flow=From-Botnet-V{variant + 1}-{proto.upper()}-CC"
    if u < 0.85:
        return f"flow=Background-{proto}-Established"
    return f"flow=To-Normal-{proto}-Established"


def generate(cfg: SynthConfig) -> list[tuple[RawFlow, Label]]:
    """Labeled flows in shuffled order; exactly round(n*prevalence) botnet."""
    c = _columns(cfg)
    out: list[tuple[RawFlow, Label]] = []
    a = c["addr"]
    for i in range(cfg.n):
        proto = PROTOCOLS[c["proto_idx"][i]]
        is_bot = bool(c["y"][i])
        sport = int(c["src_port"][i])
        dport = int(c["dst_port"][i])
        flow = RawFlow(
            start_time=float(c["start_time"][i]),
            duration=float(c["duration"][i]),
            protocol=proto,
            src_addr=f"10.0.{a[0, i]}.{a[1, i] + 1}",
            src_port=None if sport < 0 else sport,
            dst_addr=f"147.32.{a[2, i]}.{a[3, i] + 1}",
            dst_port=None if dport < 0 else dport,
            tot_pkts=int(c["tot_pkts"][i]),
            tot_bytes=int(c["tot_bytes"][i]),
            src_bytes=int(c["src_bytes"][i]),
            label_raw=_label_text(is_bot, proto, c["u_label"][i], int(c["variant"][i])),
        )
        out.append((flow, Label.BOTNET if is_bot else Label.BENIGN))
    return out


def write_csv(cfg: SynthConfig, path: str | os.PathLike) -> int:
    """Write the generated flows as a binetflow CSV; returns rows written.

    Byte-identical output for identical configs.
    """
    c = _columns(cfg)
    a = c["addr"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(BINETFLOW_HEADER + "\n")
        for i in range(cfg.n):
            proto = PROTOCOLS[c["proto_idx"][i]]
            ts = datetime.fromtimestamp(float(c["start_time"][i]), tz=timezone.utc)
            stamp = ts.strftime("%Y/%m/%d %H:%M:%S.%f")
            sport = int(c["src_port"][i])
            dport = int(c["dst_port"][i])
            label = _label_text(
                bool(c["y"][i]), proto, c["u_label"][i], int(c["variant"][i])
            )
            fh.write(
                f"{stamp},{c['duration'][i]:.6f},{proto},"
                f"10.0.{a[0, i]}.{a[1, i] + 1},{'' if sport < 0 else sport},<->,"
                f"147.32.{a[2, i]}.{a[3, i] + 1},{'' if dport < 0 else dport},"
                f"CON,0,0,{c['tot_pkts'][i]},{c['tot_bytes'][i]},"
                f"{c['src_bytes'][i]},{label}\n"
            )
    return cfg.n

import numpy as np
import pytest

from flowsift import FlowArrays, SynthConfig, generate

BINETFLOW_HEADER = (
    "StartTime,Dur,Proto,SrcAddr,Sport,Dir,DstAddr,Dport,State,sTos,dTos,"
    "TotPkts,TotBytes,SrcBytes,Label"
)


def make_binetflow(rows: list[str]) -> str:
    return BINETFLOW_HEADER + "\n" + "\n".join(rows) + ("\n" if rows else "")


GOOD_ROW = (
    "2011/08/10 09:46:53.047277,3.126,udp,212.50.71.179,39678,  <->,"
    "147.32.84.229,13363,CON,0,0,2,135,75,flow=Background-UDP-Established"
)
BOTNET_ROW = (
    "2011/08/10 10:01:00.5,0.02,tcp,147.32.84.165,1025,->,"
    "74.125.232.195,443,S_RA,0,0,4,312,186,flow=From-Botnet-V42-TCP-CC"
)
ICMP_ROW = (
    "2011/08/10 10:02:11.0,0.0,icmp,147.32.84.165,0x0303,->,"
    "147.32.96.69,0x0303,URP,0,0,1,70,70,flow=Background-ICMP"
)


@pytest.fixture(scope="session")
def small_dataset():
    """Deterministic labeled feature matrix with learnable signal."""
    pairs = generate(SynthConfig(n=3000, prevalence=0.05, seed=11, separation=1.2))
    arrays, y = FlowArrays.from_pairs(pairs)
    from flowsift import FlowFeaturizer

    X = FlowFeaturizer().fit(arrays).transform(arrays)
    return X, y.astype(np.int8)


@pytest.fixture(scope="session")
def separable_dataset():
    """Two clearly separated clusters; any sound learner scores AUC 1."""
    rng = np.random.default_rng(5)
    n = 400
    X = rng.normal(size=(n, 2))
    y = (rng.random(n) < 0.3).astype(np.int8)
    X[y == 1, 0] += 8.0
    return X, y

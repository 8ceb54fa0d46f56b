"""Shipped code matrix and design artifact."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .density import DesignArtifact
from .ldpc import ParityCheckMatrix, named_code, parse_alist

SHIPPED_CODE = "802.3an-like"
SHIPPED_ALIST = "ieee8023an_like.alist"
SHIPPED_ARTIFACT = "design_8023an_4.5dB_I5_q4_3.json"


def data_path(name: str) -> Path:
    return Path(str(resources.files("lutldpc") / "data" / name))


def shipped_code() -> ParityCheckMatrix:
    """The (6,32)-regular N=2048 matrix used by the shipped artifact."""
    return parse_alist(data_path(SHIPPED_ALIST).read_text())


def shipped_artifact() -> DesignArtifact:
    """LUT design for the shipped code at 4.5 dB, I=5, q_ch=4, q_msg=3."""
    return DesignArtifact.load(data_path(SHIPPED_ARTIFACT))


def load_code(name: str | None = None, alist: str | Path | None = None,
              seed: int = 0) -> ParityCheckMatrix:
    if alist is not None:
        return parse_alist(Path(alist).read_text())
    name = name or SHIPPED_CODE
    if name == SHIPPED_CODE and seed == 0:
        return shipped_code()
    return named_code(name, seed)

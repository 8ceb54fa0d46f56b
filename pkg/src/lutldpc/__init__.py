"""LUT-based LDPC decoding: discrete density evolution design of
mutual-information-maximizing variable-node tables, min-sum baselines,
FER simulation and an unrolled-pipeline cost model."""

__version__ = "0.1.0"

from .decoder import Decoder, DecoderConfig, decode  # noqa: E402
from .density import DesignArtifact, DesignSchedule, design, run_de  # noqa: E402
from .kernels import default_backend_name  # noqa: E402
from .ldpc import ParityCheckMatrix, build_tanner_graph, parse_alist  # noqa: E402

__all__ = ["Decoder", "DecoderConfig", "decode", "DesignArtifact", "DesignSchedule", "design",
           "run_de", "default_backend_name", "ParityCheckMatrix", "build_tanner_graph",
           "parse_alist", "__version__"]

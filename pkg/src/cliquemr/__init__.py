"""k-clique counting and estimation with in-process MapReduce rounds."""
__version__ = "0.1.0"

from .baselines import SizingError, afu_count, bucket_of, sv_count
from .engine import KVBlock, Round, RoundMetrics, RunReport, run_pipeline, run_round
from .exact import CliqueCountReport, fff_count
from .generators import generate_pa, gnp
from .graph import EdgeListParseError, Graph, OrderKey, from_edges, load_graph, normalize, parse_edge_list
from .kernel import LocalGraph, brute_force_count, count_cliques
from .sampling import Estimate, SamplingConfig, estimate

__all__ = [
    "CliqueCountReport", "EdgeListParseError", "Estimate", "Graph", "KVBlock", "LocalGraph",
    "OrderKey", "Round", "RoundMetrics", "RunReport", "SamplingConfig", "SizingError",
    "afu_count", "brute_force_count", "bucket_of", "count_cliques", "estimate", "fff_count",
    "from_edges", "generate_pa", "gnp", "load_graph", "normalize", "parse_edge_list",
    "run_pipeline", "run_round", "sv_count",
]

from dpq_infer.bench.workload import cell_distribution, generate_queries, build_hier_history
from dpq_infer.bench.metrics import Metrics, compute_metrics

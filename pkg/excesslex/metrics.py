from prometheus_client import REGISTRY, Counter, Gauge, Histogram, write_to_textfile

from .config import settings

# Metrics for grammar inference
INFERENCE_LATENCY = Histogram(
    'excesslex_inference_latency_seconds',
    'Time spent inferring a grammar',
    ['algorithm']
)

GRAMMAR_LENGTH = Histogram(
    'excesslex_grammar_length_symbols',
    'Total production length of inferred grammars',
    ['algorithm'],
    buckets=(4, 16, 64, 256, 1024, 4096, 16384, 65536, 262144, float('inf'))
)

EXACT_SEARCH_NODES = Counter(
    'excesslex_exact_search_nodes_total',
    'Branch-and-bound nodes visited by the exact grammar search'
)

# Metrics for the codec
CODE_LENGTH_BITS = Histogram(
    'excesslex_code_length_bits',
    'Length of encoded grammars in bits',
    buckets=(64, 256, 1024, 4096, 16384, 65536, 262144, 1048576, float('inf'))
)

GAMMA_CONSTANT = Gauge(
    'excesslex_gamma_constant',
    'Largest measured constant c in code_bits <= |G| (c + log2 |G|)'
)

# Metrics for verification
VERIFY_INSTANCES = Counter(
    'excesslex_verify_instances_total',
    'Number of instances tested by verification checks',
    ['check']
)

VERIFY_VIOLATIONS = Counter(
    'excesslex_verify_violations_total',
    'Number of violations found by verification checks',
    ['check']
)


def record_inference(algorithm: str, duration: float, grammar_length: int):
    """Record latency and size of one grammar inference."""
    if not settings.metrics_enabled:
        return
    INFERENCE_LATENCY.labels(algorithm=algorithm).observe(duration)
    GRAMMAR_LENGTH.labels(algorithm=algorithm).observe(grammar_length)


def record_search_nodes(count: int):
    """Record nodes explored by one exact search."""
    if settings.metrics_enabled:
        EXACT_SEARCH_NODES.inc(count)


def record_code_length(bits: int):
    """Record the bit length of an encoded grammar."""
    if settings.metrics_enabled:
        CODE_LENGTH_BITS.observe(bits)


def set_gamma_constant(value: float):
    """Publish the measured gamma constant."""
    if settings.metrics_enabled:
        GAMMA_CONSTANT.set(value)


def record_verification(check: str, instances: int, violations: int):
    """Record the outcome of a verification check."""
    if not settings.metrics_enabled:
        return
    VERIFY_INSTANCES.labels(check=check).inc(instances)
    VERIFY_VIOLATIONS.labels(check=check).inc(violations)


def export_metrics(path: str) -> None:
    """Write the default registry in the textfile-collector format."""
    write_to_textfile(path, REGISTRY)

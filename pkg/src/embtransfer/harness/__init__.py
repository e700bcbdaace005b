"""Config-driven experiment runner, metrics files, aggregation and heatmaps."""
from .config import (
    OUTPUT_ROOT_ENV, ConfigError, ExperimentConfig, config_keys, parse_config,
    parse_config_text, write_resolved,
)
from .heatmap import (
    emit_heatmap, emit_snapshot_heatmap, read_pgm, read_sidecar, snapshot_field,
)
from .metrics import (
    COLUMNS, SCHEMA_VERSION, MetricsRecord, MetricsWriter, aggregate_runs, moving_average,
    read_metrics, read_summary, stable_bytes,
)
from .suites import (
    ExplorationResult, ir_field, run_agent_suite, run_exploration_study, run_transfer_suite,
    suite_tasks,
)

__all__ = [
    "COLUMNS", "ConfigError", "ExperimentConfig", "ExplorationResult", "MetricsRecord",
    "MetricsWriter", "OUTPUT_ROOT_ENV", "SCHEMA_VERSION", "aggregate_runs", "config_keys",
    "emit_heatmap", "emit_snapshot_heatmap", "ir_field", "moving_average", "parse_config",
    "parse_config_text", "read_metrics", "read_pgm", "read_sidecar", "read_summary",
    "run_agent_suite", "run_exploration_study", "run_transfer_suite", "snapshot_field",
    "stable_bytes", "suite_tasks", "write_resolved",
]

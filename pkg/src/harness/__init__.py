__version__ = "0.1.0"

from .aggregate import aggregate, aggregate_dirs, load_runs  # noqa: E402
from .compare import compare_runs  # noqa: E402
from .config import RunConfig, build_environment, load_config  # noqa: E402
from .records import EpisodeRecord, RecordWriter, read_records  # noqa: E402
from .report import write_report  # noqa: E402
from .runner import run  # noqa: E402

__all__ = [
    "aggregate",
    "aggregate_dirs",
    "load_runs",
    "compare_runs",
    "RunConfig",
    "build_environment",
    "load_config",
    "EpisodeRecord",
    "RecordWriter",
    "read_records",
    "write_report",
    "run",
]

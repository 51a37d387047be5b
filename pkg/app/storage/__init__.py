from .local import (
    JobPaths,
    init_storage,
    new_job,
    write_text,
    write_json,
    read_json,
    save_status,
    cleanup_old_jobs,
    load_status,
)
from .tables import emit_csv, read_csv, export_plan_csv, export_trace_csv

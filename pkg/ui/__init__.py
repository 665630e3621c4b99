"""Console tables for MagStrich reports."""

from ui.tables import (
    checks_table,
    eigen_table,
    errata_table_text,
    norms_table,
    sweep_table,
    verdict_table,
    window_table,
)

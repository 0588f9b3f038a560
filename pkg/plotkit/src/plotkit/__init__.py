from .charts import (
    FigureSpec,
    SchemaError,
    extract_bar_heights,
    extract_line_points,
    load_pairs,
    load_sweep,
    plot_sweep,
    plot_toppairs,
    read_rows,
)

__version__ = "0.1.0"

"""Published equilibrium tables for three and four builders (2-decimal values).

Each table has five columns.  ``columns`` holds the swept value for each column
and ``builder_arrays(table, column)`` rebuilds ``(f_bar, v_bar)`` from the
table's construction rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ReferenceTable", "TABLES", "builder_arrays"]


@dataclass(frozen=True)
class ReferenceTable:
    table_id: int
    label: str
    sweep: str                      # name of the swept quantity
    columns: tuple[float, ...]
    v_weights: tuple[float, ...]    # v_bar proportions, last entry = 1
    f_over_v: tuple[float, ...] | None   # per-builder ratios; None means ratio = column value
    v_scale: float | None           # fixed scale of v_bar; None means scale = column value
    h: tuple[tuple[float, ...], ...]          # h[i][col]
    utility: tuple[tuple[float, ...], ...]    # E pi[i][col]

    @property
    def n_builders(self) -> int:
        return len(self.v_weights)


TABLES: dict[int, ReferenceTable] = {
    2: ReferenceTable(
        2, "three builders, common f/v ratio", "f_over_v", (2, 3, 5, 8, 10),
        (5, 2, 1), None, 30.0,
        h=((138.55, 184.96, 278.07, 417.99, 511.34),
           (64.31, 89.42, 139.38, 214.14, 263.93),
           (31.58, 45.50, 73.07, 114.27, 141.69)),
        utility=((147.81, 203.40, 315.73, 484.98, 597.97),
                 (19.79, 30.01, 50.48, 81.21, 101.70),
                 (4.37, 6.94, 12.13, 19.95, 25.18)),
    ),
    3: ReferenceTable(
        3, "three builders, descending f/v ratios", "v_scale", (10, 20, 30, 50, 80),
        (5, 2, 1), (1000, 100, 10), None,
        h=((6099.31, 12198.62, 18297.94, 30496.56, 48794.50),
           (932.00, 1864.01, 2796.01, 4660.01, 7456.02),
           (49.89, 99.79, 149.68, 249.47, 399.15)),
        utility=((37850.41, 75700.83, 113551.24, 189252.07, 302803.32),
                 (140.91, 281.82, 422.74, 704.56, 1127.30),
                 (0.35, 0.71, 1.06, 1.77, 2.83)),
    ),
    4: ReferenceTable(
        4, "four builders, common f/v ratio", "f_over_v", (2, 3, 5, 8, 10),
        (5, 3, 2, 1), None, 30.0,
        h=((154.60, 209.39, 319.68, 485.63, 596.37),
           (96.45, 134.13, 209.45, 322.38, 397.67),
           (63.84, 90.77, 144.32, 224.47, 277.87),
           (31.16, 45.46, 73.91, 116.47, 144.82)),
        utility=((94.89, 133.59, 211.51, 328.74, 406.96),
                 (30.28, 45.02, 74.48, 118.65, 148.09),
                 (12.40, 19.03, 32.30, 52.21, 65.49),
                 (2.84, 4.49, 7.82, 12.83, 16.18)),
    ),
    5: ReferenceTable(
        5, "four builders, descending f/v ratios", "v_scale", (10, 20, 30, 50, 80),
        (5, 3, 2, 1), (1000, 500, 100, 10), None,
        h=((13099.66, 26199.33, 39298.99, 65498.31, 104797.30),
           (6164.17, 12328.35, 18492.52, 30820.87, 49313.39),
           (976.29, 1952.57, 2928.86, 4881.44, 7810.30),
           (49.96, 99.93, 149.89, 249.81, 399.70)),
        utility=((23844.40, 47688.79, 71533.19, 119221.98, 190755.16),
                 (2687.11, 5374.23, 8061.34, 13435.56, 21496.90),
                 (49.30, 98.61, 147.91, 246.52, 394.43),
                 (0.12, 0.25, 0.37, 0.62, 0.99)),
    ),
}


def builder_arrays(table: ReferenceTable | int, column: int) -> tuple[np.ndarray, np.ndarray]:
    """``(f_bar, v_bar)`` for one column of a published table."""
    t = TABLES[table] if isinstance(table, int) else table
    value = float(t.columns[column])
    scale = value if t.v_scale is None else t.v_scale
    v = scale * np.asarray(t.v_weights, dtype=float)
    ratio = np.full(t.n_builders, value) if t.f_over_v is None else np.asarray(t.f_over_v, dtype=float)
    return ratio * v, v

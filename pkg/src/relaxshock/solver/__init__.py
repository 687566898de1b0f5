from .grid import FieldState, Grid
from .slab import BumpSpec, SlabSolver, init_perturbed_shock, profile_columns
from .snapshot import read_snapshot, write_snapshot

__all__ = ["FieldState", "Grid", "BumpSpec", "SlabSolver", "init_perturbed_shock",
           "profile_columns", "read_snapshot", "write_snapshot"]

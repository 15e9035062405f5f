"""Static analyses run before symbolic execution."""

from .coi import CoiResult, bind_assertions, bind_expr, cone_of_influence
from .depgraph import (
    DependencyGraph,
    comb_dependency_graph,
    comb_dependency_order,
    module_dependency_graph,
    to_dot,
)
from .legality import Race, RaceReport, check_blocking_in_sequential, check_write_write
from .partition import AlwaysPartition, Partitions, iter_statements, partition
from .pathcode import (
    BlockLayout,
    DecisionPoint,
    PathBounds,
    PathcodeLayout,
    block_layout,
    build_pathcode_layout,
    upper_bound_paths,
)
from .repeat import detect_repeat_instances

__all__ = [
    "AlwaysPartition",
    "BlockLayout",
    "CoiResult",
    "DecisionPoint",
    "DependencyGraph",
    "PathBounds",
    "PathcodeLayout",
    "Partitions",
    "Race",
    "RaceReport",
    "bind_assertions",
    "bind_expr",
    "block_layout",
    "build_pathcode_layout",
    "check_blocking_in_sequential",
    "check_write_write",
    "comb_dependency_graph",
    "comb_dependency_order",
    "cone_of_influence",
    "detect_repeat_instances",
    "iter_statements",
    "module_dependency_graph",
    "partition",
    "to_dot",
    "upper_bound_paths",
]

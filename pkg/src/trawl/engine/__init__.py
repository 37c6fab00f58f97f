from .driver import EngineConfig, RunStats, StepTiming, make_samples
from .sample_parallel import sp_run, sp_step
from .transit_parallel import (
    TransitGroup,
    TransitSchedule,
    build_transit_map,
    partition_work_classes,
    subgroup_size,
    tp_execute_class,
    tp_run,
    tp_step,
)

__all__ = [
    "EngineConfig", "RunStats", "StepTiming", "make_samples",
    "sp_run", "sp_step", "tp_run", "tp_step",
    "TransitGroup", "TransitSchedule", "build_transit_map",
    "partition_work_classes", "subgroup_size", "tp_execute_class",
]

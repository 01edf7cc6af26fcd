"""Optimal acyclic temporal plan graphs from switchable temporal plan graphs."""
from .errors import (CycleEncountered, DeadlockDetected, DelayIndexOutOfRange, GroupsFileError, InfeasibleInput,
                     MalformedPlan, PlanConflict, SettleNonSwitchable, StpgError, TooLarge, UnreachableGoal)
from .graph import (Direction, EdgeState, Stpg, Tpg, Type2Pair, fix_all, has_cycle, reduced_view, settle,
                    simulate_execution)
from .grouping import Grouping, edge_grouping, group_stpg, simple_grouping
from .heuristics import edge_slack, greedy_ewmvc, h_value, vertex_slack
from .longest_paths import UNREACHABLE, blpl, blpl_incremental, flpl, flpl_incremental, longest_paths
from .plan import (Delay, DelayScenario, MapfPlan, apply_delays, build_tpg, generate_scenario, to_stpg,
                   validate_plan)
from .search import SearchConfig, SearchResult, all_configs, optimize

__version__ = "0.1.0"

"""Round-based simulator for adaptive sampling on cluster-heads of hierarchical WSNs."""

from adhs_sim.adhs import (
    AdhsParams,
    BufferOnly,
    ChState,
    ProcessAndTransmit,
    TransmitLast,
    adhs_init,
    adhs_step,
    aggregate,
)
from adhs_sim.config import ConfigError, SimConfig, load_config
from adhs_sim.energy import (
    EnergyBreakdown,
    EnergyParams,
    ch_avg_energy,
    ch_round_energy_full,
    ch_round_energy_quiet,
    process_energy,
    receive_energy,
    transmit_energy,
)
from adhs_sim.engine import RoundReport, SimReport, Simulation, fidelity, run
from adhs_sim.field import Circle, Field, Reading, Rect, Region, sample_field, variance
from adhs_sim.hcc import BfsTree, ClusterHierarchy, assign_roles, cluster_formation, tree_discovery
from adhs_sim.metrics import SymbolicEnergy, ep_savings_ratio, symbolic_ch_total
from adhs_sim.topology import (
    DeploymentConfig,
    Position,
    Role,
    SensorNode,
    deploy_grid,
    deploy_uniform,
    euclidean_distance,
)

__version__ = "0.1.0"

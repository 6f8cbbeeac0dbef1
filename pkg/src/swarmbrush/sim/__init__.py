from swarmbrush.sim.canvas import Canvas, Stamp, encode_png, to_u8
from swarmbrush.sim.config import (
    ConfigError,
    SimConfig,
    config_from_dict,
    config_to_dict,
    load_config,
)
from swarmbrush.sim.engine import (
    CommandError,
    Engine,
    StepResult,
    UserCommand,
    initial_robots,
    run_headless,
    si_to_unicycle,
)
from swarmbrush.sim.sweep import SweepSetup, load_setups, run_sweep, setup_config

__all__ = [
    "Canvas", "Stamp", "encode_png", "to_u8",
    "ConfigError", "SimConfig", "config_from_dict", "config_to_dict", "load_config",
    "CommandError", "Engine", "StepResult", "UserCommand",
    "initial_robots", "run_headless", "si_to_unicycle",
    "SweepSetup", "load_setups", "run_sweep", "setup_config",
]

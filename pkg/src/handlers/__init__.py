"""Experiment handlers for the command-line front end."""
from .experiments import EXPERIMENTS, ExperimentConfig, run

__all__ = ['EXPERIMENTS', 'ExperimentConfig', 'run']

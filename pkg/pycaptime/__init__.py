from pycaptime.experiment import Experiment, ExperimentConfig

from pycaptime import Experiment
from benchmarks.experiment_data import experiment_data


def parallelization_default():
    data = experiment_data()
    general_opts = {
        "logging_folder": "benchmarks/logs_parallelization_default",
        "progress_bar": False,
    }

    for name, config in data.items():
        opts = dict(general_opts, name=name)
        Experiment(config, opts).play()

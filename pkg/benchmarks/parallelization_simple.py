from pycaptime import Experiment
from benchmarks.experiment_data import experiment_data


def parallelization_simple():
    data = experiment_data()
    general_opts = {
        "logging_folder": "benchmarks/logs_parallelization_simple",
        "cpu_count": 1,
        "progress_bar": False,
    }

    for name, config in data.items():
        opts = dict(general_opts, name=name)
        Experiment(config, opts).play()

from pycaptime import Experiment
from benchmarks.experiment_data import experiment_data


def parallelization_cores():
    data = experiment_data()
    general_opts = {
        "logging_folder": "benchmarks/logs_parallelization_cores",
        "progress_bar": False,
    }

    # Small batches fit in one block, so more cores would not be used
    data = {name: config for name, config in data.items() if config.trials > 200}

    for name, config in data.items():
        for cores in range(2, 49, 2):
            opts = dict(general_opts, name=f"{name}_{cores}", cpu_count=cores, block_size=50)
            Experiment(config, opts).play()

from pycaptime import Experiment, ExperimentConfig

# Multiprocessing requires this If statement (on Windows)
if __name__ == "__main__":
    config = ExperimentConfig(
        graph="Q11",
        cops="squad",
        robber="maxmin",
        trials=50,
        seed=0,
        out="q11_squad_maxmin.csv",
        assert_bound=40,
    )

    opts = {
        "name": "q11_squad_maxmin",
        "block_size": 5,
    }

    experiment = Experiment(config, opts)  # instantiate the experiment
    summaries = experiment.run()  # play all trials and write the CSV
    violations = experiment.violations()  # trials longer than the bound

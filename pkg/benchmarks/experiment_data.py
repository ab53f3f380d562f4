from pycaptime import ExperimentConfig


def experiment_data():
    return {
        "q8_squad_maxmin": ExperimentConfig("Q8", cops="squad", robber="maxmin", trials=200),
        "q16_squad_maxmin": ExperimentConfig("Q16", cops="squad", robber="maxmin", trials=200),
        "q32_squad_random": ExperimentConfig("Q32", cops="squad", robber="random", trials=200),
        "q40_greedy_random": ExperimentConfig("Q40", cops="greedy", robber="random", trials=2000),
        "trees_lemma1_random": ExperimentConfig("T40:1xT40:2", cops="lemma1", robber="random", trials=2000),
    }

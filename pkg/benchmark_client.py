from benchmarks import parallelization_cores

if __name__ == "__main__":
    parallelization_cores()

from benchmarks.parallelization_default import parallelization_default
from benchmarks.parallelization_simple import parallelization_simple
from benchmarks.parallelization_no_redivide import parallelization_no_redivide
from benchmarks.parallelization_cores import parallelization_cores
